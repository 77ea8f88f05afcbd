//! Permutation sweeps, conjecture references, reporting, and exports.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{records_from_cyclic, CrossingEntry, CrossingState, EmbeddingState};
use crate::error::{Error, Result};
use crate::graph::{apply_permutation, biconnected_components, Graph, Permutation, VertexId};
use crate::heuristic::{run, HeuristicConfig, MinScheme};
use crate::init::{circle_init, planar_init, spring_init};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitScheme {
    Circle,
    Planar,
    Spring,
}

impl InitScheme {
    pub fn label(self) -> &'static str {
        match self {
            InitScheme::Circle => "circle",
            InitScheme::Planar => "planar",
            InitScheme::Spring => "spring",
        }
    }

    pub fn parse(s: &str) -> Option<InitScheme> {
        match s {
            "circle" => Some(InitScheme::Circle),
            "planar" => Some(InitScheme::Planar),
            "spring" => Some(InitScheme::Spring),
            _ => None,
        }
    }

    pub fn build(self, g: &Graph) -> Result<EmbeddingState> {
        match self {
            InitScheme::Circle => circle_init(g),
            InitScheme::Planar => planar_init(g),
            InitScheme::Spring => spring_init(g),
        }
    }
}

pub fn min_scheme_label(s: MinScheme) -> &'static str {
    match s {
        MinScheme::First => "first",
        MinScheme::Best => "best",
        MinScheme::BiggestFace => "bf",
    }
}

pub fn parse_min_scheme(s: &str) -> Option<MinScheme> {
    match s {
        "first" => Some(MinScheme::First),
        "best" => Some(MinScheme::Best),
        "bf" => Some(MinScheme::BiggestFace),
        _ => None,
    }
}

/// One permutation's outcome, summed over biconnected components.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub perm_index: usize,
    pub perm_seed: u64,
    pub initial_cr: usize,
    pub final_cr: usize,
    pub iterations: usize,
    pub init_time_ms: f64,
    pub loop_time_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub init_scheme: String,
    pub min_scheme: String,
    pub perms: usize,
    pub seed: u64,
    pub runs: Vec<RunReport>,
    pub best_cr: usize,
    pub best_perm: usize,
    pub reference: Option<usize>,
    /// 100*(best_cr - reference)/reference; "exact" when the reference is 0
    /// and met; absent without a reference.
    pub deviation: Option<serde_json::Value>,
}

impl SweepReport {
    /// JSON with the timing fields zeroed, for byte-level determinism
    /// comparisons.
    pub fn canonical_json(&self) -> Result<String> {
        let mut c = self.clone();
        for r in &mut c.runs {
            r.init_time_ms = 0.0;
            r.loop_time_ms = 0.0;
        }
        Ok(serde_json::to_string_pretty(&c)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Guy's conjectured crossing number of K_n.
pub fn conjecture_h(n: usize) -> usize {
    (n / 2) * ((n - 1) / 2) * ((n - 2) / 2) * ((n - 3) / 2) / 4
}

/// Zarankiewicz's conjectured crossing number of K_{n1,n2}.
pub fn conjecture_z(n1: usize, n2: usize) -> usize {
    (n1 / 2) * ((n1 - 1) / 2) * (n2 / 2) * ((n2 - 1) / 2)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Stream seed for permutation `i`: independent of execution order.
pub fn perm_seed(seed: u64, i: usize) -> u64 {
    splitmix64(seed ^ splitmix64(i as u64 ^ 0x632be59bd9b4e019))
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub init: InitScheme,
    pub min_scheme: MinScheme,
    pub bf_failure_threshold: usize,
    pub perms: usize,
    pub seed: u64,
    pub parallel: bool,
    pub verify: bool,
    pub reference: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            init: InitScheme::Planar,
            min_scheme: MinScheme::First,
            bf_failure_threshold: 10,
            perms: 100,
            seed: 0,
            parallel: true,
            verify: false,
            reference: None,
        }
    }
}

pub struct SweepOutcome {
    pub report: SweepReport,
    /// Best embedding found, expressed on the input graph's own labels.
    pub best_embedding: EmbeddingState,
}

/// Glue per-component embeddings (vertex lists map component-local ids to
/// ids in `g`) back into one embedding of `g`.  Cut vertices concatenate
/// their per-component rotations; crossing orientations are re-signed where
/// an edge's smaller endpoint flips under the relabelling.
pub fn assemble_embedding(
    g: &Graph,
    parts: &[(EmbeddingState, Vec<VertexId>)],
) -> Result<EmbeddingState> {
    let n = g.num_vertices();
    let m = g.num_edges();
    let mut cyclic: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order: Vec<Vec<CrossingEntry>> = vec![Vec::new(); m];
    let mut total = 0usize;
    let mut covered = vec![false; m];
    for (es, verts) in parts {
        if es.has_subdivisions() {
            return Err(Error::Consistency(
                "component embedding still has subdivisions".into(),
            ));
        }
        let cg = &es.graph;
        // Component edge -> (global edge, whether the smaller endpoint flips).
        let mut to_global = Vec::with_capacity(cg.num_edges());
        for &(a, b) in cg.edges() {
            let (ga, gb) = (verts[a], verts[b]);
            let ge = g.edge_between(ga, gb).ok_or_else(|| {
                Error::Consistency(format!("component edge ({ga},{gb}) missing from graph"))
            })?;
            if covered[ge] {
                return Err(Error::Consistency(format!(
                    "edge ({ga},{gb}) covered by two components"
                )));
            }
            covered[ge] = true;
            to_global.push((ge, ga > gb));
        }
        for v in 0..cg.num_vertices() {
            let cyc = es
                .cyclic_at(v)
                .map_err(|w| Error::Consistency(format!("bad component rotation: {w:?}")))?;
            cyclic[verts[v]].extend(cyc.into_iter().map(|e| to_global[e].0));
        }
        for (e, list) in es.crossings.order.iter().enumerate() {
            let (ge, flip_e) = to_global[e];
            let mut mapped: Vec<CrossingEntry> = list
                .iter()
                .map(|c| {
                    let (go, flip_o) = to_global[c.other];
                    let mut s = c.orientation;
                    if flip_e != flip_o {
                        s = -s;
                    }
                    CrossingEntry {
                        other: go,
                        orientation: s,
                    }
                })
                .collect();
            if flip_e {
                mapped.reverse();
            }
            order[ge] = mapped;
        }
        total += es.num_crossings();
    }
    if let Some(e) = covered.iter().position(|&c| !c) {
        return Err(Error::Consistency(format!(
            "edge {e} not covered by any component"
        )));
    }
    let rotation = records_from_cyclic(g, &cyclic)?;
    Ok(EmbeddingState {
        graph: g.clone(),
        rotation,
        crossings: CrossingState { order, total },
        num_real_vertices: n,
        edge_orig: (0..m).collect(),
        chains: Vec::new(),
    })
}

/// One full permutation run: relabel, decompose into biconnected
/// components, solve each, and reassemble on the original labels.
fn run_perm(
    g: &Graph,
    cfg: &SweepConfig,
    index: usize,
) -> Result<(RunReport, EmbeddingState)> {
    let pseed = perm_seed(cfg.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(pseed);
    let mut map: Vec<VertexId> = (0..g.num_vertices()).collect();
    map.shuffle(&mut rng);
    let perm = Permutation::new(map)?;
    let gp = apply_permutation(g, &perm)?;
    let inv = perm.inverse();
    let hcfg = HeuristicConfig {
        min_scheme: cfg.min_scheme,
        bf_failure_threshold: cfg.bf_failure_threshold,
        seed: pseed,
        max_iterations: None,
        verify: cfg.verify,
    };
    let mut parts: Vec<(EmbeddingState, Vec<VertexId>)> = Vec::new();
    let mut initial_cr = 0usize;
    let mut final_cr = 0usize;
    let mut iterations = 0usize;
    let mut init_time = 0.0f64;
    let mut loop_time = 0.0f64;
    let mut comps = biconnected_components(&gp);
    // Deterministic component order regardless of traversal internals.
    comps.sort_by(|a, b| a.1.cmp(&b.1));
    let mut in_comp = vec![false; gp.num_vertices()];
    for (cg, verts) in comps {
        for &v in &verts {
            in_comp[v] = true;
        }
        let t0 = std::time::Instant::now();
        let es = cfg.init.build(&cg)?;
        init_time += t0.elapsed().as_secs_f64() * 1e3;
        let t1 = std::time::Instant::now();
        let (fin, stats) = run(&cg, es, &hcfg)?;
        loop_time += t1.elapsed().as_secs_f64() * 1e3;
        initial_cr += stats.initial_cr;
        final_cr += stats.final_cr;
        iterations += stats.iterations;
        let global: Vec<VertexId> = verts.iter().map(|&v| inv.apply(v)).collect();
        parts.push((fin, global));
    }
    // Vertices in no biconnected component (isolated) keep empty rotations.
    for v in 0..gp.num_vertices() {
        if !in_comp[v] && gp.degree(v) != 0 {
            return Err(Error::Consistency(format!(
                "vertex {v} missed by the decomposition"
            )));
        }
    }
    let assembled = assemble_embedding(g, &parts)?;
    if cfg.verify {
        assembled.require_valid()?;
    }
    if assembled.num_crossings() != final_cr {
        return Err(Error::Consistency(
            "assembled crossing total differs from component sum".into(),
        ));
    }
    Ok((
        RunReport {
            perm_index: index,
            perm_seed: pseed,
            initial_cr,
            final_cr,
            iterations,
            init_time_ms: init_time,
            loop_time_ms: loop_time,
        },
        assembled,
    ))
}

/// Try `perms` random vertex relabellings and keep the best result.
pub fn sweep(g: &Graph, cfg: &SweepConfig) -> Result<SweepOutcome> {
    if cfg.perms == 0 {
        return Err(Error::Domain("sweep needs at least one permutation".into()));
    }
    let results: Vec<Result<(RunReport, EmbeddingState)>> = if cfg.parallel {
        (0..cfg.perms)
            .into_par_iter()
            .map(|i| run_perm(g, cfg, i))
            .collect()
    } else {
        (0..cfg.perms).map(|i| run_perm(g, cfg, i)).collect()
    };
    let mut runs = Vec::with_capacity(cfg.perms);
    let mut best: Option<(usize, usize, EmbeddingState)> = None; // (cr, perm, emb)
    for r in results {
        let (report, emb) = r?;
        let replace = match &best {
            None => true,
            Some((cr, _, _)) => report.final_cr < *cr,
        };
        if replace {
            best = Some((report.final_cr, report.perm_index, emb));
        }
        runs.push(report);
    }
    let (best_cr, best_perm, best_embedding) = best.unwrap();
    let deviation = cfg.reference.map(|r| {
        if r == 0 {
            if best_cr == 0 {
                serde_json::Value::String("exact".into())
            } else {
                serde_json::Value::String(format!("+{best_cr} over a planar reference"))
            }
        } else {
            let d = 100.0 * (best_cr as f64 - r as f64) / r as f64;
            serde_json::json!(d)
        }
    });
    Ok(SweepOutcome {
        report: SweepReport {
            schema_version: REPORT_SCHEMA_VERSION,
            num_vertices: g.num_vertices(),
            num_edges: g.num_edges(),
            init_scheme: cfg.init.label().to_string(),
            min_scheme: min_scheme_label(cfg.min_scheme).to_string(),
            perms: cfg.perms,
            seed: cfg.seed,
            runs,
            best_cr,
            best_perm,
            reference: cfg.reference,
            deviation,
        },
        best_embedding,
    })
}

/// Straight-line SVG of a drawing, with markers at the crossings.
pub fn emit_svg(g: &Graph, coords: &crate::embed::LayoutCoords) -> Result<String> {
    if coords.len() != g.num_vertices() {
        return Err(Error::Domain(
            "coordinate count does not match the graph".into(),
        ));
    }
    let pos: Vec<(f64, f64)> = (0..g.num_vertices()).map(|v| coords.pos[v]).collect();
    let (mut minx, mut miny, mut maxx, mut maxy) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in &pos {
        minx = minx.min(x);
        miny = miny.min(y);
        maxx = maxx.max(x);
        maxy = maxy.max(y);
    }
    let span = (maxx - minx).max(maxy - miny).max(1e-9);
    let scale = 480.0 / span;
    let tx = |x: f64| 10.0 + (x - minx) * scale;
    let ty = |y: f64| 10.0 + (maxy - y) * scale;
    let mut s = String::new();
    s.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" viewBox=\"0 0 500 500\">\n",
    );
    for &(u, v) in g.edges() {
        s.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1\"/>\n",
            tx(pos[u].0), ty(pos[u].1), tx(pos[v].0), ty(pos[v].1)
        ));
    }
    // Proper pairwise crossings of non-adjacent segments.
    let cross = |a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)| {
        let o = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
            (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
        };
        let (o1, o2, o3, o4) = (o(a, b, c), o(a, b, d), o(c, d, a), o(c, d, b));
        if (o1 > 0.0) != (o2 > 0.0) && (o3 > 0.0) != (o4 > 0.0) {
            let t = o3 / (o3 - o4);
            Some((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)))
        } else {
            None
        }
    };
    let es = g.edges();
    for i in 0..es.len() {
        for j in (i + 1)..es.len() {
            let (a, b) = es[i];
            let (c, d) = es[j];
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if let Some((x, y)) = cross(pos[a], pos[b], pos[c], pos[d]) {
                s.push_str(&format!(
                    "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"red\"/>\n",
                    tx(x),
                    ty(y)
                ));
            }
        }
    }
    for (v, &(x, y)) in pos.iter().enumerate() {
        s.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"steelblue\"/>\n  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\">{v}</text>\n",
            tx(x), ty(y), tx(x) + 5.0, ty(y) - 5.0
        ));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};

    #[test]
    fn conjecture_values() {
        assert_eq!(conjecture_h(4), 0);
        assert_eq!(conjecture_h(5), 1);
        assert_eq!(conjecture_h(12), 150);
        assert_eq!(conjecture_z(3, 3), 1);
        assert_eq!(conjecture_z(2, 9), 0);
        assert_eq!(conjecture_z(5, 5), 16);
    }

    #[test]
    fn k5_sweep_reaches_one() {
        let g = generate(Family::Complete { n: 5 }).unwrap();
        let cfg = SweepConfig {
            perms: 10,
            verify: true,
            reference: Some(conjecture_h(5)),
            ..Default::default()
        };
        let out = sweep(&g, &cfg).unwrap();
        assert_eq!(out.report.best_cr, 1);
        assert_eq!(out.best_embedding.num_crossings(), 1);
        assert!(out.best_embedding.validate().is_empty());
        assert_eq!(out.report.runs.len(), 10);
    }

    #[test]
    fn planar_graph_exact_label() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let cfg = SweepConfig {
            perms: 1,
            reference: Some(0),
            ..Default::default()
        };
        let out = sweep(&g, &cfg).unwrap();
        assert_eq!(out.report.best_cr, 0);
        assert_eq!(
            out.report.deviation,
            Some(serde_json::Value::String("exact".into()))
        );
    }

    #[test]
    fn serial_and_parallel_agree() {
        let g = generate(Family::Complete { n: 6 }).unwrap();
        let mk = |parallel| SweepConfig {
            perms: 6,
            parallel,
            seed: 7,
            ..Default::default()
        };
        let a = sweep(&g, &mk(true)).unwrap();
        let b = sweep(&g, &mk(false)).unwrap();
        assert_eq!(
            a.report.canonical_json().unwrap(),
            b.report.canonical_json().unwrap()
        );
        assert_eq!(
            a.best_embedding.to_doc(None).unwrap(),
            b.best_embedding.to_doc(None).unwrap()
        );
    }

    #[test]
    fn disjoint_union_sums_components() {
        // Two K5s glued into one graph: best_cr should be 2.
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                edges.push((i, j));
                edges.push((i + 5, j + 5));
            }
        }
        let g = Graph::from_edges(10, &edges).unwrap();
        let cfg = SweepConfig {
            perms: 8,
            ..Default::default()
        };
        let out = sweep(&g, &cfg).unwrap();
        assert_eq!(out.report.best_cr, 2);
        assert!(out.best_embedding.validate().is_empty());
    }

    #[test]
    fn svg_mentions_all_edges() {
        let g = generate(Family::Complete { n: 5 }).unwrap();
        let pos = (0..5)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
                (t.cos(), t.sin())
            })
            .collect();
        let svg = emit_svg(&g, &crate::embed::LayoutCoords::new(pos)).unwrap();
        assert_eq!(svg.matches("<line").count(), 10);
        assert_eq!(svg.matches("fill=\"red\"").count(), 5);
    }
}
