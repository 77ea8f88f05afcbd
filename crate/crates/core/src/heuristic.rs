//! The main improvement loop: repeatedly remove one vertex star and
//! re-insert it along a crossing-minimal star insertion path, until the
//! drawing is locally crossing-optimal.

use crate::dual::{remove_vertex_dual, sip_biggest_face, sip_fixed, SipResult};
use crate::embed::{build_dual, Chain, DualGraph, EmbeddingState, FaceSet, Planarisation};
use crate::error::{Error, Result};
use crate::graph::{biconnected_components, EdgeId, Graph, VertexId};
use crate::insert::{chain_can_merge, insert_star, manage_subdivisions, merge_chain, StarEdge};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinScheme {
    First,
    Best,
    BiggestFace,
}

#[derive(Debug, Clone)]
pub struct HeuristicConfig {
    pub min_scheme: MinScheme,
    /// Consecutive non-improving biggest-face iterations before permanently
    /// switching to the `first` scheme.
    pub bf_failure_threshold: usize,
    pub seed: u64,
    pub max_iterations: Option<usize>,
    /// Check the full invariant suite after every accepted iteration.
    pub verify: bool,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            min_scheme: MinScheme::First,
            bf_failure_threshold: 10,
            seed: 0,
            max_iterations: None,
            verify: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunStats {
    pub initial_cr: usize,
    pub final_cr: usize,
    pub iterations: usize,
    /// biggest_face fell back to `first` permanently.
    pub switched_to_first: bool,
    /// Termination forced chains to merge while still multi-crossing.
    pub forced_merge_left_multi: bool,
}

/// Improvement loop state: the embedding plus cached planarisation, faces
/// and dual, which are rebuilt after every accepted iteration.
pub struct HeuristicState {
    pub embedding: EmbeddingState,
    pub current_cr: usize,
    pub iteration: usize,
    plan: Planarisation,
    fs: FaceSet,
    dual: DualGraph,
    scan_start: VertexId,
    bf_failures: usize,
    switched: bool,
    /// Eligible vertices: non-articulation (removal keeps the rest
    /// connected, so the re-insertion face is bounded by one closed walk).
    candidates: Vec<bool>,
}

/// An accepted-improvement candidate produced by `select_vertex`.
pub struct Proposal {
    pub vertex: VertexId,
    /// Crossings currently on the vertex's (working) star.
    pub k_v: usize,
    pub sip: SipResult,
    dual_removed: DualGraph,
    works: Vec<EdgeId>,
    kill_verts: Vec<VertexId>,
}

impl HeuristicState {
    pub fn new(g: &Graph, initial: EmbeddingState) -> Result<Self> {
        initial.require_valid()?;
        if initial.num_real_vertices != g.num_vertices() {
            return Err(Error::Consistency(
                "initial embedding does not cover the graph's vertices".into(),
            ));
        }
        if initial.edge_orig.len() != initial.graph.num_edges() {
            return Err(Error::Consistency("edge origin map out of step".into()));
        }
        let mut candidates = vec![true; g.num_vertices()];
        if g.num_vertices() > 2 {
            let mut seen = vec![0usize; g.num_vertices()];
            for (_, verts) in biconnected_components(g) {
                for v in verts {
                    seen[v] += 1;
                }
            }
            for v in 0..g.num_vertices() {
                if seen[v] > 1 {
                    candidates[v] = false;
                }
            }
        }
        let current_cr = initial.num_crossings();
        let plan = Planarisation::build(&initial)?;
        let fs = plan.trace_faces()?;
        let dual = build_dual(&plan, &fs);
        Ok(HeuristicState {
            embedding: initial,
            current_cr,
            iteration: 0,
            plan,
            fs,
            dual,
            scan_start: 0,
            bf_failures: 0,
            switched: false,
            candidates,
        })
    }

    fn rebuild(&mut self) -> Result<()> {
        self.plan = Planarisation::build(&self.embedding)?;
        self.fs = self.plan.trace_faces()?;
        self.dual = build_dual(&self.plan, &self.fs);
        Ok(())
    }

    /// Working edges and extra working vertices belonging to v's star
    /// (chain pieces and their interior subdivision vertices).
    fn star_parts(&self, g: &Graph, v: VertexId) -> Result<(Vec<EdgeId>, Vec<VertexId>)> {
        let mut works = Vec::new();
        let mut kills = vec![v];
        for &(_, orig) in g.adjacency(v) {
            if let Some(ch) = self.embedding.chains.iter().find(|c| c.orig == orig) {
                works.extend(ch.working.iter().copied());
                kills.extend(ch.interior.iter().copied());
            } else {
                let we = self.embedding.working_edges_of(orig);
                if we.len() != 1 {
                    return Err(Error::Consistency(format!(
                        "edge {orig} maps to {} working edges without a chain",
                        we.len()
                    )));
                }
                works.push(we[0]);
            }
        }
        Ok((works, kills))
    }

    /// Score vertex v: propose it iff re-insertion strictly reduces the
    /// total. `use_bf` picks the biggest-face solver instead of the full SIP.
    fn evaluate(&mut self, g: &Graph, v: VertexId, use_bf: bool) -> Result<Option<Proposal>> {
        let k_v = self.embedding.crossings_at_vertex(v, g);
        if k_v == 0 {
            return Ok(None);
        }
        let (works, kill_verts) = self.star_parts(g, v)?;
        let mut dual_removed = remove_vertex_dual(&self.dual, &self.plan, &works);
        let mut nbrs: Vec<VertexId> = g.adjacency(v).iter().map(|&(w, _)| w).collect();
        nbrs.sort_unstable();
        let sip = if use_bf {
            sip_biggest_face(&self.plan, &self.fs, &mut dual_removed, &nbrs)?
        } else {
            sip_fixed(&self.plan, &self.fs, &mut dual_removed, &nbrs)?
        };
        if sip.new_cr < k_v {
            Ok(Some(Proposal {
                vertex: v,
                k_v,
                sip,
                dual_removed,
                works,
                kill_verts,
            }))
        } else {
            Ok(None)
        }
    }

    fn scan_first(&mut self, g: &Graph, use_bf: bool) -> Result<Option<Proposal>> {
        let n = g.num_vertices();
        for i in 0..n {
            let v = (self.scan_start + i) % n;
            if !self.candidates[v] {
                continue;
            }
            if let Some(p) = self.evaluate(g, v, use_bf)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    fn scan_best(&mut self, g: &Graph) -> Result<Option<Proposal>> {
        let mut best: Option<Proposal> = None;
        for v in 0..g.num_vertices() {
            if !self.candidates[v] {
                continue;
            }
            if let Some(p) = self.evaluate(g, v, false)? {
                let better = match &best {
                    None => true,
                    Some(b) => p.k_v - p.sip.new_cr > b.k_v - b.sip.new_cr,
                };
                if better {
                    best = Some(p);
                }
            }
        }
        Ok(best)
    }
}

/// Pick the next vertex to re-insert, or None when no vertex improves
/// (local optimality for the configured scheme).
pub fn select_vertex(
    state: &mut HeuristicState,
    g: &Graph,
    cfg: &HeuristicConfig,
) -> Result<Option<Proposal>> {
    match cfg.min_scheme {
        MinScheme::First => state.scan_first(g, false),
        MinScheme::Best => state.scan_best(g),
        MinScheme::BiggestFace => {
            if state.switched {
                return state.scan_first(g, false);
            }
            if let Some(p) = state.scan_first(g, true)? {
                state.bf_failures = 0;
                return Ok(Some(p));
            }
            state.bf_failures += 1;
            if state.bf_failures >= cfg.bf_failure_threshold {
                state.switched = true;
            }
            // The cheap scan failed; fall back to the full solver for this
            // iteration so a real local optimum is never missed.
            state.scan_first(g, false)
        }
    }
}

/// Apply an accepted proposal: delete the old star, re-insert it along the
/// planned paths, manage subdivisions, and refresh all caches.
pub fn reinsert_star(
    state: &mut HeuristicState,
    g: &Graph,
    prop: Proposal,
    cfg: &HeuristicConfig,
) -> Result<()> {
    let v = prop.vertex;
    let old_cr = state.current_cr;
    let m_work = state.embedding.graph.num_edges();
    // Drop the registry entries of the star being deleted.
    let star_origs: Vec<EdgeId> = g.adjacency(v).iter().map(|&(_, e)| e).collect();
    let mut registry: Vec<Chain> = state
        .embedding
        .chains
        .iter()
        .filter(|c| !star_origs.contains(&c.orig))
        .cloned()
        .collect();
    // 1. Delete the star from the planarisation.
    let remap = state
        .plan
        .delete_working_vertices(&prop.kill_verts, &prop.works)?;
    let fs_new = state.plan.trace_faces()?;
    // 2. Identify each contracted face class with its re-traced face, via
    //    the heritage darts preserved across dummy dissolution.
    let mut dual_removed = prop.dual_removed;
    let mut class_face = vec![usize::MAX; dual_removed.num_base_faces()];
    for p in 0..state.plan.num_pedges() {
        if !state.plan.pedge_is_alive(p) {
            continue;
        }
        for d in [2 * p, 2 * p + 1] {
            let h = state.plan.heritage(d);
            let cls = dual_removed.find(state.fs.face_of[h]);
            let f = fs_new.face_of[d];
            if class_face[cls] == usize::MAX {
                class_face[cls] = f;
            } else if class_face[cls] != f {
                return Err(Error::Consistency(format!(
                    "face class {cls} maps to two faces after deleting vertex {v}"
                )));
            }
        }
    }
    let newface = class_face[dual_removed.find(prop.sip.newface)];
    if newface == usize::MAX {
        return Err(Error::Consistency(
            "insertion face has no surviving boundary".into(),
        ));
    }
    // 3. Plan the star edges over the re-traced planarisation.
    let mut stars = Vec::with_capacity(prop.sip.paths.len());
    let mut star_pairs = Vec::with_capacity(prop.sip.paths.len());
    let mut work_orig = Vec::with_capacity(prop.sip.paths.len());
    for (j, (w, path)) in prop.sip.paths.iter().enumerate() {
        let work = m_work + j;
        let mut segments = Vec::with_capacity(path.len());
        for &s in path {
            let r = remap[s];
            if r == usize::MAX {
                return Err(Error::Consistency(
                    "insertion path crosses a deleted segment".into(),
                ));
            }
            if segments.last() == Some(&r) {
                return Err(Error::Consistency(
                    "insertion path crosses a merged segment twice in a row".into(),
                ));
            }
            segments.push(r);
        }
        stars.push(StarEdge {
            w: *w,
            work,
            segments,
        });
        star_pairs.push((work, v));
        work_orig.push(g.edge_between(v, *w).ok_or_else(|| {
            Error::Consistency(format!("no original edge between {v} and {w}"))
        })?);
    }
    insert_star(&mut state.plan, &fs_new, v, &stars, newface)?;
    // 4. Cut multi-crossing star edges; register the chains.
    let cuts = manage_subdivisions(&mut state.plan, &star_pairs)?;
    for c in cuts {
        let j = star_pairs
            .iter()
            .position(|&(s, _)| s == c.work)
            .expect("cut chain for unknown star edge");
        let w = prop.sip.paths[j].0;
        let (mut working, mut interior) = (c.pieces, c.interior);
        if w < v {
            // Chains run from the original edge's smaller endpoint.
            working.reverse();
            interior.reverse();
        }
        registry.push(Chain {
            orig: work_orig[j],
            working,
            interior,
        });
    }
    // 5. Merge back every chain that no longer multi-crosses anything.
    merge_mergeable(&mut state.plan, &mut registry)?;
    // 6. Extract with canonical numbering and translate the bookkeeping.
    let mut orig_of = state.embedding.edge_orig.clone();
    orig_of.extend(work_orig.iter().copied());
    let embedding = extract_with_bookkeeping(
        &state.plan,
        orig_of,
        registry,
        g.num_vertices(),
    )?;
    // 7. Account and refresh.
    let expected = old_cr - prop.k_v + prop.sip.new_cr;
    if embedding.num_crossings() != expected {
        return Err(Error::Consistency(format!(
            "crossing recount {} does not match expected {expected}",
            embedding.num_crossings()
        )));
    }
    state.embedding = embedding;
    state.current_cr = expected;
    state.iteration += 1;
    state.scan_start = (v + 1) % g.num_vertices();
    state.rebuild()?;
    if cfg.verify {
        verify_invariants(state)?;
    }
    Ok(())
}

/// Extract the planarisation into a fresh embedding and translate the
/// edge-origin map and chain registry through the renumbering. `orig_of`
/// maps pre-extraction working edge ids to original edge ids; chain pieces
/// are filled in from the registry.
pub(crate) fn extract_with_bookkeeping(
    plan: &Planarisation,
    mut orig_of: Vec<EdgeId>,
    registry: Vec<Chain>,
    n_real: usize,
) -> Result<EmbeddingState> {
    let ex = plan.extract_canonical()?;
    orig_of.resize(ex.edge_map.len(), usize::MAX);
    for c in &registry {
        for &piece in &c.working {
            if piece >= orig_of.len() {
                return Err(Error::Consistency("chain piece out of range".into()));
            }
            orig_of[piece] = c.orig;
        }
    }
    let mut embedding = ex.state;
    let mut edge_orig = vec![usize::MAX; embedding.graph.num_edges()];
    for (old, &new) in ex.edge_map.iter().enumerate() {
        if new != usize::MAX {
            if orig_of[old] == usize::MAX {
                return Err(Error::Consistency(format!(
                    "working edge {old} has no original edge"
                )));
            }
            edge_orig[new] = orig_of[old];
        }
    }
    for v0 in 0..n_real {
        if ex.vertex_map[v0] != v0 {
            return Err(Error::Consistency(
                "original vertex renumbered during extraction".into(),
            ));
        }
    }
    let chains = registry
        .into_iter()
        .map(|c| {
            Ok(Chain {
                orig: c.orig,
                working: c
                    .working
                    .iter()
                    .map(|&p| {
                        let e = ex.edge_map[p];
                        if e == usize::MAX {
                            Err(Error::Consistency("chain piece vanished".into()))
                        } else {
                            Ok(e)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?,
                interior: c
                    .interior
                    .iter()
                    .map(|&x| {
                        let nv = ex.vertex_map[x];
                        if nv == usize::MAX {
                            Err(Error::Consistency("chain vertex vanished".into()))
                        } else {
                            Ok(nv)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    embedding.num_real_vertices = n_real;
    embedding.edge_orig = edge_orig;
    embedding.chains = chains;
    Ok(embedding)
}

pub(crate) fn merge_mergeable(plan: &mut Planarisation, registry: &mut Vec<Chain>) -> Result<()> {
    loop {
        let mut merged = false;
        let mut i = 0;
        while i < registry.len() {
            if chain_can_merge(plan, &registry[i].working) {
                let c = registry.remove(i);
                merge_chain(plan, &c.working, &c.interior)?;
                merged = true;
            } else {
                i += 1;
            }
        }
        if !merged {
            return Ok(());
        }
    }
}

fn verify_invariants(state: &HeuristicState) -> Result<()> {
    state.embedding.require_valid()?;
    if state.embedding.crossings.recount() != state.current_cr {
        return Err(Error::Consistency("stored crossing total drifted".into()));
    }
    for c in &state.embedding.chains {
        for &x in &c.interior {
            if state.embedding.graph.degree(x) != 2 {
                return Err(Error::Consistency(format!(
                    "subdivision vertex {x} has degree {}",
                    state.embedding.graph.degree(x)
                )));
            }
        }
    }
    Ok(())
}

/// Run the improvement loop to local optimality (or the iteration cap).
pub fn run(
    g: &Graph,
    initial: EmbeddingState,
    cfg: &HeuristicConfig,
) -> Result<(EmbeddingState, RunStats)> {
    if !g.is_connected() {
        return Err(Error::Domain("heuristic requires a connected graph".into()));
    }
    let mut state = HeuristicState::new(g, initial)?;
    let initial_cr = state.current_cr;
    if initial_cr > 0 {
        loop {
            if let Some(cap) = cfg.max_iterations {
                if state.iteration >= cap {
                    break;
                }
            }
            match select_vertex(&mut state, g, cfg)? {
                Some(p) => reinsert_star(&mut state, g, p, cfg)?,
                None => break,
            }
            if state.iteration > initial_cr {
                return Err(Error::Consistency(
                    "iteration count exceeded the initial crossing count".into(),
                ));
            }
        }
    }
    // Revert all remaining subdivisions; at a natural local optimum this
    // never recreates a multi-crossing (diagnosed if it does).
    let mut forced_multi = false;
    if !state.embedding.chains.is_empty() {
        let mut registry = std::mem::take(&mut state.embedding.chains);
        merge_mergeable(&mut state.plan, &mut registry)?;
        for c in &registry {
            merge_chain(&mut state.plan, &c.working, &c.interior)?;
        }
        let ex = state.plan.extract_canonical()?;
        let mut embedding = ex.state;
        embedding.num_real_vertices = g.num_vertices();
        state.embedding = embedding;
        forced_multi = state.embedding.crossings.order.iter().any(|l| {
            let mut partners: Vec<_> = l.iter().map(|c| c.other).collect();
            partners.sort_unstable();
            partners.windows(2).any(|w| w[0] == w[1])
        });
    }
    let final_cr = state.current_cr;
    let final_embedding = state.embedding.remap_to(g)?;
    if cfg.verify {
        // Independent local-optimality sweep over all eligible vertices.
        let mut check = HeuristicState::new(g, final_embedding.clone())?;
        for v in 0..g.num_vertices() {
            if !check.candidates[v] {
                continue;
            }
            if check.evaluate(g, v, false)?.is_some() && cfg.max_iterations.is_none() {
                return Err(Error::Consistency(format!(
                    "final embedding is not locally optimal at vertex {v}"
                )));
            }
        }
    }
    Ok((
        final_embedding,
        RunStats {
            initial_cr,
            final_cr,
            iterations: state.iteration,
            switched_to_first: state.switched,
            forced_merge_left_multi: forced_multi,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::EmbeddingState;
    use crate::graph::Graph;

    /// W4 with the apex drawn outside, crossing the rim twice; one
    /// re-insertion makes it planar.
    #[test]
    fn wheel_apex_reinsertion() {
        // Rim 0-1-2-3 (edges 0..4), apex 4 joined to all (edges 4..8).
        let g = Graph::from_edges(
            5,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (0, 3),
                (0, 4),
                (1, 4),
                (2, 4),
                (3, 4),
            ],
        )
        .unwrap();
        // Straight-line drawing with the apex far outside the square.
        let coords = crate::embed::LayoutCoords::new(vec![
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 2.0),
            (0.0, 2.0),
            (5.0, 1.0),
        ]);
        let es = crate::embed::from_straight_line_drawing(&g, &coords, 3).unwrap();
        assert!(es.num_crossings() > 0);
        let cfg = HeuristicConfig {
            verify: true,
            ..Default::default()
        };
        let (fin, stats) = run(&g, es, &cfg).unwrap();
        assert_eq!(stats.final_cr, 0);
        assert_eq!(fin.num_crossings(), 0);
        assert!(fin.validate().is_empty());
        assert!(stats.iterations <= stats.initial_cr);
    }

    /// Planar input comes back unchanged with zero iterations.
    #[test]
    fn planar_input_untouched() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let es = EmbeddingState::planar_from_cyclic(
            g.clone(),
            &[vec![0, 1], vec![0, 2], vec![1, 2]],
        )
        .unwrap();
        let (fin, stats) = run(&g, es.clone(), &HeuristicConfig::default()).unwrap();
        assert_eq!(stats.iterations, 0);
        assert_eq!(fin.rotation, es.rotation);
    }
}
