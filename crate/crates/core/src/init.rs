//! Initial embedding constructors: circle, incremental planar, spring
//! layout, and user-supplied drawings.

use crate::dual::sip_fixed;
use crate::embed::{
    build_dual, from_straight_line_drawing, Chain, EmbeddingState, LayoutCoords, Planarisation,
};
use crate::error::{Error, Result};
use crate::graph::{find_chordless_cycle, Graph, VertexId};
use crate::heuristic::{extract_with_bookkeeping, merge_mergeable};
use crate::insert::{insert_star, manage_subdivisions, StarEdge};

/// Crossing count of the circle drawing, by the interleaving rule: two
/// chords (a,c) and (b,d) cross iff exactly one of b,d lies strictly
/// between a and c in circular vertex order.
pub fn circle_crossing_count(g: &Graph) -> usize {
    let es = g.edges();
    let mut count = 0;
    for i in 0..es.len() {
        let (a, c) = es[i];
        for &(b, d) in &es[i + 1..] {
            if a == b || a == d || c == b || c == d {
                continue;
            }
            let inside = |x: VertexId| a < x && x < c;
            if inside(b) != inside(d) {
                count += 1;
            }
        }
    }
    count
}

/// Vertices on a circle in label order, edges as straight chords.
///
/// The rotation system is lifted from the exact drawing (with seeded
/// jitter resolving concurrent chords); the crossing pair set is checked
/// against the combinatorial interleaving rule, so the count is exact.
pub fn circle_init(g: &Graph) -> Result<EmbeddingState> {
    let n = g.num_vertices();
    if n == 0 {
        return EmbeddingState::planar_from_cyclic(g.clone(), &[]);
    }
    let es = from_straight_line_drawing(g, &circle_coords(g), 0)?;
    let expected = circle_crossing_count(g);
    if es.num_crossings() != expected {
        return Err(Error::Geometry(format!(
            "circle drawing produced {} crossings where the interleaving rule gives {expected}",
            es.num_crossings()
        )));
    }
    Ok(es)
}

/// Unit-circle positions in label order.
pub fn circle_coords(g: &Graph) -> LayoutCoords {
    let n = g.num_vertices();
    LayoutCoords::new(
        (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n.max(1) as f64;
                (t.cos(), t.sin())
            })
            .collect(),
    )
}

/// Incremental planarity-first construction: start from a chordless cycle
/// and insert the remaining vertices one at a time along optimal star
/// insertion paths.  Forests come out with zero crossings trivially.
pub fn planar_init(g: &Graph) -> Result<EmbeddingState> {
    let n = g.num_vertices();
    let cycle = match find_chordless_cycle(g) {
        None => {
            // Acyclic: any rotation of a forest is planar.
            let cyclic: Vec<Vec<usize>> = (0..n)
                .map(|v| g.adjacency(v).iter().map(|&(_, e)| e).collect())
                .collect();
            return EmbeddingState::planar_from_cyclic(g.clone(), &cyclic);
        }
        Some(c) => c,
    };
    // Seed: the cycle embedded as a closed curve, all other vertices
    // isolated for now.
    let mut placed = vec![false; n];
    let mut gp = Graph::new(n);
    let mut cyclic: Vec<Vec<usize>> = vec![Vec::new(); n];
    let k = cycle.len();
    for i in 0..k {
        gp.add_edge(cycle[i], cycle[(i + 1) % k])?;
    }
    for i in 0..k {
        let before = gp.edge_between(cycle[(i + k - 1) % k], cycle[i]).unwrap();
        let after = gp.edge_between(cycle[i], cycle[(i + 1) % k]).unwrap();
        cyclic[cycle[i]] = vec![before, after];
        placed[cycle[i]] = true;
    }
    let mut es = EmbeddingState::planar_from_cyclic(gp, &cyclic)?;
    let mut orig_of: Vec<usize> = es
        .graph
        .edges()
        .iter()
        .map(|&(a, b)| g.edge_between(a, b).unwrap())
        .collect();
    es.edge_orig = orig_of.clone();
    let mut registry: Vec<Chain> = Vec::new();
    loop {
        // Lowest unplaced vertex with an edge into the partial embedding;
        // failing that, lowest unplaced vertex (fresh component seed).
        let next = (0..n)
            .filter(|&v| !placed[v])
            .find(|&v| g.adjacency(v).iter().any(|&(w, _)| placed[w]))
            .or_else(|| (0..n).find(|&v| !placed[v]));
        let v = match next {
            Some(v) => v,
            None => break,
        };
        placed[v] = true;
        let mut nbrs: Vec<VertexId> = g
            .adjacency(v)
            .iter()
            .filter(|&&(w, _)| placed[w] && w != v)
            .map(|&(w, _)| w)
            .collect();
        nbrs.sort_unstable();
        if nbrs.is_empty() {
            continue;
        }
        let mut plan = Planarisation::build(&es)?;
        let fs = plan.trace_faces()?;
        let mut dual = build_dual(&plan, &fs);
        let sip = sip_fixed(&plan, &fs, &mut dual, &nbrs)?;
        let m_work = es.graph.num_edges();
        let mut stars = Vec::with_capacity(sip.paths.len());
        let mut star_pairs = Vec::with_capacity(sip.paths.len());
        for (j, (w, path)) in sip.paths.iter().enumerate() {
            stars.push(StarEdge {
                w: *w,
                work: m_work + j,
                segments: path.clone(),
            });
            star_pairs.push((m_work + j, v));
            orig_of.push(g.edge_between(v, *w).unwrap());
        }
        // The dual here is uncontracted, so the class representative is a
        // face id of the trace directly.
        insert_star(&mut plan, &fs, v, &stars, sip.newface)?;
        let cuts = manage_subdivisions(&mut plan, &star_pairs)?;
        for c in cuts {
            let j = star_pairs.iter().position(|&(s, _)| s == c.work).unwrap();
            let w = sip.paths[j].0;
            let (mut working, mut interior) = (c.pieces, c.interior);
            if w < v {
                working.reverse();
                interior.reverse();
            }
            registry.push(Chain {
                orig: orig_of[m_work + j],
                working,
                interior,
            });
        }
        merge_mergeable(&mut plan, &mut registry)?;
        es = extract_with_bookkeeping(&plan, orig_of.clone(), registry.clone(), n)?;
        orig_of = es.edge_orig.clone();
        registry = es.chains.clone();
    }
    if es.chains.is_empty() {
        es.remap_to(g)
    } else {
        Ok(es)
    }
}

/// Spring layout: stress majorization towards unit graph distances
/// (Kamada-Kawai energy), then lift the straight-line drawing.
pub fn spring_init(g: &Graph) -> Result<EmbeddingState> {
    if g.num_vertices() == 0 {
        return EmbeddingState::planar_from_cyclic(g.clone(), &[]);
    }
    from_straight_line_drawing(g, &spring_coords(g)?, 0)
}

/// The stress-majorised positions used by `spring_init`.
pub fn spring_coords(g: &Graph) -> Result<LayoutCoords> {
    let n = g.num_vertices();
    if !g.is_connected() {
        return Err(Error::Domain(
            "spring layout requires a connected graph".into(),
        ));
    }
    // All-pairs BFS distances.
    let mut dist = vec![vec![0usize; n]; n];
    for s in 0..n {
        let mut d = vec![usize::MAX; n];
        let mut q = std::collections::VecDeque::new();
        d[s] = 0;
        q.push_back(s);
        while let Some(x) = q.pop_front() {
            for &(y, _) in g.adjacency(x) {
                if d[y] == usize::MAX {
                    d[y] = d[x] + 1;
                    q.push_back(y);
                }
            }
        }
        dist[s] = d;
    }
    // Start from the circle layout and run stress majorization with ideal
    // edge length 1 and weights 1/d^2.
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n.max(1) as f64;
            (t.cos(), t.sin())
        })
        .collect();
    let tol = 1e-4;
    let max_iter = 200 * n;
    for _ in 0..max_iter {
        let mut max_delta = 0.0f64;
        for i in 0..n {
            let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = dist[i][j] as f64;
                let w = 1.0 / (d * d);
                let dx = pos[i].0 - pos[j].0;
                let dy = pos[i].1 - pos[j].1;
                let len = (dx * dx + dy * dy).sqrt().max(1e-9);
                sx += w * (pos[j].0 + d * dx / len);
                sy += w * (pos[j].1 + d * dy / len);
                sw += w;
            }
            if sw == 0.0 {
                continue;
            }
            let nx = sx / sw;
            let ny = sy / sw;
            let delta = ((nx - pos[i].0).powi(2) + (ny - pos[i].1).powi(2)).sqrt();
            if delta > max_delta {
                max_delta = delta;
            }
            pos[i] = (nx, ny);
        }
        if max_delta < tol {
            break;
        }
    }
    Ok(LayoutCoords::new(pos))
}

/// Parse "label x y" lines into labelled coordinates.
pub fn parse_coords(text: &str) -> Result<Vec<(u64, f64, f64)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 'label x y', got {} fields", parts.len()),
            });
        }
        let label: u64 = parts[0].parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("bad vertex label '{}'", parts[0]),
        })?;
        let x: f64 = parts[1].parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("bad coordinate '{}'", parts[1]),
        })?;
        let y: f64 = parts[2].parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("bad coordinate '{}'", parts[2]),
        })?;
        out.push((label, x, y));
    }
    Ok(out)
}

/// User-supplied straight-line drawing, coordinates indexed by vertex id.
pub fn user_init_coords(g: &Graph, coords: &LayoutCoords) -> Result<EmbeddingState> {
    from_straight_line_drawing(g, coords, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};

    fn binom4(n: usize) -> usize {
        if n < 4 {
            0
        } else {
            n * (n - 1) * (n - 2) * (n - 3) / 24
        }
    }

    #[test]
    fn circle_complete_graphs_match_binomial() {
        for n in 4..=12 {
            let g = generate(Family::Complete { n }).unwrap();
            let es = circle_init(&g).unwrap();
            assert_eq!(es.num_crossings(), binom4(n), "K{n}");
            assert!(es.validate().is_empty(), "K{n}");
        }
    }

    #[test]
    fn circle_combinatorial_count_agrees_with_drawing() {
        let g = generate(Family::Petersen { j: 7, k: 2 }).unwrap();
        let es = circle_init(&g).unwrap();
        assert_eq!(es.num_crossings(), circle_crossing_count(&g));
    }

    #[test]
    fn planar_init_k4_is_planar() {
        let g = generate(Family::Complete { n: 4 }).unwrap();
        let es = planar_init(&g).unwrap();
        assert_eq!(es.num_crossings(), 0);
        assert!(es.validate().is_empty());
    }

    #[test]
    fn planar_init_k6_stays_low() {
        let g = generate(Family::Complete { n: 6 }).unwrap();
        let es = planar_init(&g).unwrap();
        assert!(es.num_crossings() <= 5, "got {}", es.num_crossings());
        assert!(es.validate().is_empty());
    }

    #[test]
    fn planar_init_beats_circle_on_completes() {
        for n in 5..=12 {
            let g = generate(Family::Complete { n }).unwrap();
            let p = planar_init(&g).unwrap().num_crossings();
            let c = circle_init(&g).unwrap().num_crossings();
            assert!(p <= c, "K{n}: planar {p} vs circle {c}");
        }
    }

    #[test]
    fn planar_init_tree_trivial() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (1, 3), (1, 4)]).unwrap();
        let es = planar_init(&g).unwrap();
        assert_eq!(es.num_crossings(), 0);
        assert!(es.validate().is_empty());
    }

    #[test]
    fn spring_small_planars() {
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert_eq!(spring_init(&c4).unwrap().num_crossings(), 0);
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(spring_init(&p4).unwrap().num_crossings(), 0);
    }

    #[test]
    fn parse_coords_rejects_garbage() {
        assert!(parse_coords("1 0.0").is_err());
        assert!(parse_coords("a 0.0 1.0").is_err());
        let ok = parse_coords("# comment\n0 0.0 1.0\n1 2 3\n").unwrap();
        assert_eq!(ok.len(), 2);
    }
}
