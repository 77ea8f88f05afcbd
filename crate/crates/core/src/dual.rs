//! Star insertion into a fixed embedding, solved by shortest paths in the
//! dual of the planarisation.
//!
//! Removing a vertex star is simulated on the dual alone: contracting the
//! dual edges of every removed segment merges the faces that would coalesce,
//! so candidate vertices can be scored without touching the embedding.

use crate::embed::{DualGraph, FaceSet, Planarisation};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};

/// Outcome of one star insertion computation.
#[derive(Debug, Clone)]
pub struct SipResult {
    /// Crossings the re-inserted star incurs (sum of dual distances).
    pub new_cr: usize,
    /// Representative base-face id of the chosen insertion face class.
    pub newface: usize,
    /// Per neighbour (in the order given): planarised-edge ids crossed on the
    /// way from the insertion face to that neighbour.
    pub paths: Vec<(VertexId, Vec<usize>)>,
}

/// Contract away the dual edges of all segments of the given working edges,
/// yielding the dual of the planarisation with those edges removed.
pub fn remove_vertex_dual(
    dual: &DualGraph,
    plan: &Planarisation,
    edges: &[EdgeId],
) -> DualGraph {
    let mut doomed = vec![false; plan.num_pedges()];
    for p in 0..plan.num_pedges() {
        if plan.pedge_is_alive(p) && edges.contains(&plan.pedge(p).work) {
            doomed[p] = true;
        }
    }
    let mut out = dual.clone();
    for (p, &kill) in doomed.iter().enumerate() {
        if !kill {
            continue;
        }
        if let Some((a, b)) = out.seg_faces[p] {
            out.union(a, b);
            out.seg_faces[p] = None;
        }
    }
    out
}

/// Adjacency over face classes: for each class representative, its neighbour
/// classes with the lowest-id segment realising each, sorted by class id.
struct ClassAdj {
    adj: Vec<Vec<(usize, usize)>>,
}

impl ClassAdj {
    fn build(dual: &mut DualGraph) -> ClassAdj {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); dual.num_base_faces()];
        for p in 0..dual.seg_faces.len() {
            if let Some((a, b)) = dual.seg_faces[p] {
                let (ca, cb) = (dual.find(a), dual.find(b));
                if ca != cb {
                    adj[ca].push((cb, p));
                    adj[cb].push((ca, p));
                }
            }
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup_by_key(|x| x.0); // parallel segments collapse to one dual edge
        }
        ClassAdj { adj }
    }

    fn bfs_multi(&self, sources: &[usize], dist: &mut [usize]) {
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            if dist[s] == usize::MAX {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(c) = queue.pop_front() {
            for &(d, _) in &self.adj[c] {
                if dist[d] == usize::MAX {
                    dist[d] = dist[c] + 1;
                    queue.push_back(d);
                }
            }
        }
    }

    /// BFS with parent pointers: (predecessor class, via segment).
    fn bfs_tree(&self, source: usize, dist: &mut [usize], via: &mut [(usize, usize)]) {
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(c) = queue.pop_front() {
            for &(d, p) in &self.adj[c] {
                if dist[d] == usize::MAX {
                    dist[d] = dist[c] + 1;
                    via[d] = (c, p);
                    queue.push_back(d);
                }
            }
        }
    }
}

/// Face classes incident to working vertex `w`, via its corners in the full
/// planarisation.  Faces are read off the full trace so that corners of
/// removed segments still contribute (their base faces are merged into the
/// surrounding class).
fn incident_classes(
    plan: &Planarisation,
    fs: &FaceSet,
    dual: &mut DualGraph,
    w: VertexId,
) -> Vec<usize> {
    let mut out: Vec<usize> = plan
        .darts_at(w)
        .into_iter()
        .map(|d| dual.find(fs.face_of[d]))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn reconstruct(
    plan: &Planarisation,
    fs: &FaceSet,
    dual: &mut DualGraph,
    adjdist: &[usize],
    via: &[(usize, usize)],
    neighbours: &[VertexId],
    newface: usize,
) -> Result<(usize, Vec<(VertexId, Vec<usize>)>)> {
    let mut total = 0usize;
    let mut paths = Vec::with_capacity(neighbours.len());
    for &w in neighbours {
        let classes = incident_classes(plan, fs, dual, w);
        if classes.is_empty() {
            return Err(Error::Consistency(format!(
                "neighbour {w} has no incident faces"
            )));
        }
        let mut best = usize::MAX;
        let mut best_class = usize::MAX;
        for &c in &classes {
            if adjdist[c] < best || (adjdist[c] == best && c < best_class) {
                best = adjdist[c];
                best_class = c;
            }
        }
        if best == usize::MAX {
            return Err(Error::Consistency(format!(
                "neighbour {w} unreachable in the dual"
            )));
        }
        total += best;
        let mut segs = Vec::with_capacity(best);
        let mut c = best_class;
        while c != newface {
            let (pc, p) = via[c];
            segs.push(p);
            c = pc;
        }
        segs.reverse(); // from the insertion face outwards
        paths.push((w, segs));
    }
    Ok((total, paths))
}

/// Optimal star insertion for the given neighbour set: the insertion face
/// minimising the summed dual distances to all neighbours (ties to the
/// lowest face id), with the realising shortest paths.
pub fn sip_fixed(
    plan: &Planarisation,
    fs: &FaceSet,
    dual: &mut DualGraph,
    neighbours: &[VertexId],
) -> Result<SipResult> {
    let nf = dual.num_base_faces();
    if nf == 0 {
        return Err(Error::Consistency("planarisation has no faces".into()));
    }
    let reps = dual.class_reps();
    let adj = ClassAdj::build(dual);
    let mut sums = vec![0u64; nf];
    let mut reachable = vec![true; nf];
    for &w in neighbours {
        let classes = incident_classes(plan, fs, dual, w);
        if classes.is_empty() {
            return Err(Error::Consistency(format!(
                "neighbour {w} has no incident faces"
            )));
        }
        let mut dist = vec![usize::MAX; nf];
        adj.bfs_multi(&classes, &mut dist);
        for &r in &reps {
            if dist[r] == usize::MAX {
                reachable[r] = false;
            } else {
                sums[r] += dist[r] as u64;
            }
        }
    }
    let mut newface = usize::MAX;
    let mut best = u64::MAX;
    for &r in &reps {
        if reachable[r] && sums[r] < best {
            best = sums[r];
            newface = r;
        }
    }
    if newface == usize::MAX {
        return Err(Error::Consistency(
            "no face can reach every neighbour".into(),
        ));
    }
    let mut dist = vec![usize::MAX; nf];
    let mut via = vec![(usize::MAX, usize::MAX); nf];
    adj.bfs_tree(newface, &mut dist, &mut via);
    let (total, paths) = reconstruct(plan, fs, dual, &dist, &via, neighbours, newface)?;
    debug_assert_eq!(total as u64, best);
    Ok(SipResult {
        new_cr: total,
        newface,
        paths,
    })
}

/// Cheaper variant: fix the insertion face to the class with the largest
/// boundary (most incident segment sides, ties to the lowest face id) and run
/// a single BFS from it.
pub fn sip_biggest_face(
    plan: &Planarisation,
    fs: &FaceSet,
    dual: &mut DualGraph,
    neighbours: &[VertexId],
) -> Result<SipResult> {
    let nf = dual.num_base_faces();
    if nf == 0 {
        return Err(Error::Consistency("planarisation has no faces".into()));
    }
    let mut size = vec![0usize; nf];
    for p in 0..dual.seg_faces.len() {
        if let Some((a, b)) = dual.seg_faces[p] {
            let (ca, cb) = (dual.find(a), dual.find(b));
            size[ca] += 1;
            size[cb] += 1;
        }
    }
    let reps = dual.class_reps();
    let mut newface = usize::MAX;
    let mut best = 0usize;
    for &r in &reps {
        if newface == usize::MAX || size[r] > best {
            best = size[r];
            newface = r;
        }
    }
    let adj = ClassAdj::build(dual);
    let mut dist = vec![usize::MAX; nf];
    let mut via = vec![(usize::MAX, usize::MAX); nf];
    adj.bfs_tree(newface, &mut dist, &mut via);
    let (total, paths) = reconstruct(plan, fs, dual, &dist, &via, neighbours, newface)?;
    Ok(SipResult {
        new_cr: total,
        newface,
        paths,
    })
}

/// Slow, independent re-computation of the optimal star insertion cost for
/// re-inserting vertex `v` of `g` into `es` minus its star.  Used only as a
/// test oracle against `sip_fixed`: it merges faces with a plain loop-based
/// union-find and runs one full BFS per candidate face instead of the
/// multi-source sweep.
pub fn sip_reference_oracle(
    es: &crate::embed::EmbeddingState,
    g: &crate::graph::Graph,
    v: VertexId,
) -> Result<usize> {
    let plan = Planarisation::build(es)?;
    let fs = plan.trace_faces()?;
    let nf = fs.boundary.len();
    // Working edges of v's star.
    let mut star_edges = Vec::new();
    for &(_, orig) in g.adjacency(v) {
        star_edges.extend(es.working_edges_of(orig));
    }
    // Merge the two sides of every removed segment.
    let mut parent: Vec<usize> = (0..nf).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut removed = vec![false; plan.num_pedges()];
    for p in 0..plan.num_pedges() {
        if plan.pedge_is_alive(p) && star_edges.contains(&plan.pedge(p).work) {
            removed[p] = true;
            let (a, b) = (
                root(&mut parent, fs.face_of[2 * p]),
                root(&mut parent, fs.face_of[2 * p + 1]),
            );
            parent[a.max(b)] = a.min(b);
        }
    }
    // Dual adjacency over merged faces, one entry per surviving segment.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for p in 0..plan.num_pedges() {
        if !plan.pedge_is_alive(p) || removed[p] {
            continue;
        }
        let (a, b) = (
            root(&mut parent, fs.face_of[2 * p]),
            root(&mut parent, fs.face_of[2 * p + 1]),
        );
        if a != b {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    // Each neighbour's incident merged faces.
    let mut nbr_faces: Vec<Vec<usize>> = Vec::new();
    for &(w, _) in g.adjacency(v) {
        let mut faces: Vec<usize> = plan
            .darts_at(w)
            .into_iter()
            .map(|d| root(&mut parent, fs.face_of[d]))
            .collect();
        faces.sort_unstable();
        faces.dedup();
        if faces.is_empty() {
            return Err(Error::Consistency(format!(
                "neighbour {w} has no incident faces"
            )));
        }
        nbr_faces.push(faces);
    }
    // Try every merged face as the insertion face.
    let mut best = u64::MAX;
    for f in 0..nf {
        if root(&mut parent, f) != f {
            continue;
        }
        let mut dist = vec![usize::MAX; nf];
        let mut queue = std::collections::VecDeque::new();
        dist[f] = 0;
        queue.push_back(f);
        while let Some(c) = queue.pop_front() {
            for &d in &adj[c] {
                if dist[d] == usize::MAX {
                    dist[d] = dist[c] + 1;
                    queue.push_back(d);
                }
            }
        }
        let mut total = 0u64;
        let mut ok = true;
        for faces in &nbr_faces {
            match faces.iter().map(|&c| dist[c]).min().unwrap() {
                usize::MAX => {
                    ok = false;
                    break;
                }
                d => total += d as u64,
            }
        }
        if ok && total < best {
            best = total;
        }
    }
    if best == u64::MAX {
        return Err(Error::Consistency(
            "no face can reach every neighbour".into(),
        ));
    }
    Ok(best as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{build_dual, EmbeddingState, Planarisation};
    use crate::graph::Graph;

    /// K4 minus one vertex's star: re-inserting the hub of a wheel into its
    /// own face costs nothing.
    #[test]
    fn reinsert_into_triangle() {
        // Triangle 0-1-2; vertex 3 removed beforehand (graph holds only the
        // triangle, vertex 3 is bare). Inserting a star to {0,1,2} is free
        // from either face.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let es = EmbeddingState::planar_from_cyclic(
            g,
            &[vec![0, 1], vec![0, 2], vec![1, 2], vec![]],
        )
        .unwrap();
        let plan = Planarisation::build(&es).unwrap();
        let fs = plan.trace_faces().unwrap();
        let mut dual = build_dual(&plan, &fs);
        let sip = sip_fixed(&plan, &fs, &mut dual, &[0, 1, 2]).unwrap();
        assert_eq!(sip.new_cr, 0);
        assert_eq!(sip.newface, 0); // tie broken to the lowest face id
        assert!(sip.paths.iter().all(|(_, p)| p.is_empty()));
    }

    /// A hub joined to every corner of a 4-cycle fits inside one face.
    #[test]
    fn star_into_square_is_free() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let es = EmbeddingState::planar_from_cyclic(
            g,
            &[vec![0, 3], vec![0, 1], vec![1, 2], vec![2, 3]],
        )
        .unwrap();
        let plan = Planarisation::build(&es).unwrap();
        let fs = plan.trace_faces().unwrap();
        let mut dual = build_dual(&plan, &fs);
        let sip = sip_fixed(&plan, &fs, &mut dual, &[0, 1, 2, 3]).unwrap();
        assert_eq!(sip.new_cr, 0);
    }

    /// K5 from a one-crossing K5 drawing minus a vertex: inserting the fifth
    /// vertex into a planar K4 costs exactly one crossing.
    #[test]
    fn k5_completion_costs_one() {
        // Planar K4 (vertex 3 inner), plus bare vertex 4.
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let es = EmbeddingState::planar_from_cyclic(
            g,
            &[
                vec![0, 1, 2],
                vec![0, 4, 3],
                vec![3, 5, 1],
                vec![4, 2, 5],
                vec![],
            ],
        )
        .unwrap();
        let plan = Planarisation::build(&es).unwrap();
        let fs = plan.trace_faces().unwrap();
        let mut dual = build_dual(&plan, &fs);
        let sip = sip_fixed(&plan, &fs, &mut dual, &[0, 1, 2, 3]).unwrap();
        assert_eq!(sip.new_cr, 1);
        let crossed: usize = sip.paths.iter().map(|(_, p)| p.len()).sum();
        assert_eq!(crossed, 1);
    }

    /// Contracting a removed star's dual edges merges its faces.
    #[test]
    fn removal_merges_faces() {
        // K4, remove inner vertex 3: the three inner faces merge with each
        // other into the inside of the triangle.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let es = EmbeddingState::planar_from_cyclic(
            g,
            &[
                vec![0, 1, 2],
                vec![0, 4, 3],
                vec![3, 5, 1],
                vec![4, 2, 5],
            ],
        )
        .unwrap();
        let plan = Planarisation::build(&es).unwrap();
        let fs = plan.trace_faces().unwrap();
        let dual = build_dual(&plan, &fs);
        let mut removed = remove_vertex_dual(&dual, &plan, &[2, 4, 5]);
        assert_eq!(removed.class_reps().len(), 2); // triangle: inside + outside
        let sip = sip_fixed(&plan, &fs, &mut removed, &[0, 1, 2]).unwrap();
        assert_eq!(sip.new_cr, 0);
    }
}
