//! Straight-line drawings and their conversion to combinatorial embeddings.
//!
//! `from_straight_line_drawing` computes all pairwise segment crossings in
//! O(m^2), orders them along each edge and derives rotation and orientation
//! data. Degenerate configurations (coincident points, vertices on foreign
//! segments, triple crossing points, overlapping collinear edges) are resolved
//! by retrying with a tiny seeded jitter; persistent degeneracy is an error.

use super::{CrossingEntry, EmbeddingState};
use crate::error::{Error, Result};
use crate::graph::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Vertex coordinates of a straight-line drawing, indexed by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutCoords {
    pub pos: Vec<(f64, f64)>,
}

impl LayoutCoords {
    pub fn new(pos: Vec<(f64, f64)>) -> Self {
        LayoutCoords { pos }
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    /// Diagonal of the bounding box (0 for a single point).
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &self.pos {
            lo.0 = lo.0.min(x);
            lo.1 = lo.1.min(y);
            hi.0 = hi.0.max(x);
            hi.1 = hi.1.max(y);
        }
        if self.pos.is_empty() {
            return 0.0;
        }
        ((hi.0 - lo.0).powi(2) + (hi.1 - lo.1).powi(2)).sqrt()
    }
}

/// Relative jitter magnitude (times the bounding-box diagonal) on the first
/// retry; later retries escalate it tenfold each, up to `JITTER_REL_MAX`.
/// Highly concurrent layouts (e.g. all main diagonals of a regular polygon
/// meeting in its centre) need the larger magnitudes to pull the crossing
/// parameters apart further than `PARAM_SEP`.
const JITTER_REL: f64 = 1e-9;
const JITTER_REL_MAX: f64 = 1e-5;
/// Retries with fresh jitter before giving up on a degenerate drawing.
const MAX_JITTER_RETRIES: usize = 12;
/// Relative tolerance for "a point touches a foreign segment".
const CONTACT_REL: f64 = 1e-12;
/// Minimum separation of crossing parameters along one edge.
const PARAM_SEP: f64 = 1e-11;

fn cross(ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    ax * by - ay * bx
}

/// Signed area orientation of c relative to the directed line a -> b.
fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    cross(b.0 - a.0, b.1 - a.1, c.0 - a.0, c.1 - a.1)
}

struct Degenerate;

/// One conversion attempt over fixed coordinates.
fn try_convert(
    g: &Graph,
    pos: &[(f64, f64)],
    diag: f64,
) -> std::result::Result<EmbeddingState, Degenerate> {
    let n = g.num_vertices();
    let m = g.num_edges();
    let eps_pos = CONTACT_REL * diag;
    let eps_area = CONTACT_REL * diag * diag;
    // Distinct vertex positions.
    for i in 0..n {
        for j in (i + 1)..n {
            let (dx, dy) = (pos[i].0 - pos[j].0, pos[i].1 - pos[j].1);
            if (dx * dx + dy * dy).sqrt() <= eps_pos {
                return Err(Degenerate);
            }
        }
    }
    // Vertices must stay clear of segments they are not an endpoint of.
    for e in 0..m {
        let (u, v) = g.edge(e);
        let (a, b) = (pos[u], pos[v]);
        let len2 = (b.0 - a.0).powi(2) + (b.1 - a.1).powi(2);
        for w in 0..n {
            if w == u || w == v {
                continue;
            }
            let t = ((pos[w].0 - a.0) * (b.0 - a.0) + (pos[w].1 - a.1) * (b.1 - a.1)) / len2;
            let tc = t.clamp(0.0, 1.0);
            let (px, py) = (a.0 + tc * (b.0 - a.0), a.1 + tc * (b.1 - a.1));
            let d = ((pos[w].0 - px).powi(2) + (pos[w].1 - py).powi(2)).sqrt();
            if d <= eps_pos {
                return Err(Degenerate);
            }
        }
    }
    // Pairwise crossings. For each edge: (parameter from smaller endpoint,
    // partner edge, orientation sign in this edge's frame).
    let mut per_edge: Vec<Vec<(f64, usize, i8)>> = vec![Vec::new(); m];
    for e1 in 0..m {
        let (u1, v1) = g.edge(e1);
        for e2 in (e1 + 1)..m {
            let (u2, v2) = g.edge(e2);
            if u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2 {
                // Adjacent edges may not overlap: their directions away from
                // the shared endpoint must differ.
                let s = if u1 == u2 || u1 == v2 { u1 } else { v1 };
                let p1 = if u1 == s { v1 } else { u1 };
                let p2 = if u2 == s { v2 } else { u2 };
                let o = orient(pos[s], pos[p1], pos[p2]);
                let dot = (pos[p1].0 - pos[s].0) * (pos[p2].0 - pos[s].0)
                    + (pos[p1].1 - pos[s].1) * (pos[p2].1 - pos[s].1);
                if o.abs() <= eps_area && dot > 0.0 {
                    return Err(Degenerate);
                }
                continue;
            }
            let (a1, b1) = (pos[u1], pos[v1]);
            let (a2, b2) = (pos[u2], pos[v2]);
            let o1 = orient(a1, b1, a2);
            let o2 = orient(a1, b1, b2);
            let o3 = orient(a2, b2, a1);
            let o4 = orient(a2, b2, b1);
            // Near-degenerate only matters if the near-collinear endpoint
            // projects into the other segment; that case was caught by the
            // vertex-clearance test above, so tiny magnitudes here mean the
            // contact is outside the segment and the pair does not cross.
            if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
                if o1.abs() <= eps_area
                    || o2.abs() <= eps_area
                    || o3.abs() <= eps_area
                    || o4.abs() <= eps_area
                {
                    return Err(Degenerate);
                }
                let t1 = o3 / (o3 - o4); // along e1 from u1
                let t2 = o1 / (o1 - o2); // along e2 from u2
                if !(PARAM_SEP..=1.0 - PARAM_SEP).contains(&t1)
                    || !(PARAM_SEP..=1.0 - PARAM_SEP).contains(&t2)
                {
                    return Err(Degenerate);
                }
                let d1 = (b1.0 - a1.0, b1.1 - a1.1);
                let d2 = (b2.0 - a2.0, b2.1 - a2.1);
                // +1 iff clockwise around the crossing the directions read
                // u1, u2, v1, v2.
                let s = if cross(d1.0, d1.1, d2.0, d2.1) < 0.0 { 1 } else { -1 };
                per_edge[e1].push((t1, e2, s));
                per_edge[e2].push((t2, e1, -s));
            }
        }
    }
    // Order crossings along each edge; coincident parameters mean a triple
    // point (or worse) and force a retry.
    for list in per_edge.iter_mut() {
        list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in list.windows(2) {
            if (w[1].0 - w[0].0).abs() <= PARAM_SEP {
                return Err(Degenerate);
            }
        }
    }
    // Clockwise rotation at each vertex: screen-style clockwise with y up is
    // descending angle order.
    let mut cyclic: Vec<Vec<usize>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut inc: Vec<(f64, usize)> = g
            .adjacency(v)
            .iter()
            .map(|&(w, e)| {
                let ang = (pos[w].1 - pos[v].1).atan2(pos[w].0 - pos[v].0);
                (ang, e)
            })
            .collect();
        inc.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        for w in inc.windows(2) {
            if (w[0].0 - w[1].0).abs() <= 1e-12 {
                return Err(Degenerate);
            }
        }
        cyclic.push(inc.into_iter().map(|(_, e)| e).collect());
    }
    let mut es = EmbeddingState::planar_from_cyclic(g.clone(), &cyclic)
        .map_err(|_| Degenerate)?;
    let mut total = 0usize;
    for (e, list) in per_edge.into_iter().enumerate() {
        total += list.len();
        es.crossings.order[e] = list
            .into_iter()
            .map(|(_, other, s)| CrossingEntry {
                other,
                orientation: s,
            })
            .collect();
    }
    es.crossings.total = total / 2;
    Ok(es)
}

/// Interpret a straight-line drawing of `g` as a combinatorial embedding.
/// `seed` drives the jitter used to escape degenerate configurations.
pub fn from_straight_line_drawing(
    g: &Graph,
    coords: &LayoutCoords,
    seed: u64,
) -> Result<EmbeddingState> {
    if coords.len() != g.num_vertices() {
        return Err(Error::Geometry(format!(
            "{} coordinates for {} vertices",
            coords.len(),
            g.num_vertices()
        )));
    }
    if !coords.pos.iter().all(|p| p.0.is_finite() && p.1.is_finite()) {
        return Err(Error::Geometry("non-finite coordinate".into()));
    }
    let diag = coords.bbox_diagonal();
    if coords.len() > 1 && diag == 0.0 {
        return Err(Error::Geometry("all coordinates coincide".into()));
    }
    let diag = diag.max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for attempt in 0..=MAX_JITTER_RETRIES {
        let pos: Vec<(f64, f64)> = if attempt == 0 {
            coords.pos.clone()
        } else {
            let j = (JITTER_REL * 10f64.powi(attempt as i32 - 1)).min(JITTER_REL_MAX) * diag;
            coords
                .pos
                .iter()
                .map(|&(x, y)| {
                    (
                        x + rng.gen_range(-j..=j),
                        y + rng.gen_range(-j..=j),
                    )
                })
                .collect()
        };
        if let Ok(es) = try_convert(g, &pos, diag) {
            // Multi-crossing working pairs cannot arise from straight lines,
            // but a hostile drawing could still be inconsistent; reject it.
            let violations = es.validate();
            if violations.is_empty() {
                return Ok(es);
            }
        }
    }
    Err(Error::Geometry(
        "drawing is degenerate and jitter retries were exhausted".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_crossing() {
        let g = Graph::from_edges(4, &[(0, 2), (1, 3)]).unwrap();
        let coords = LayoutCoords::new(vec![(0.0, 0.0), (0.0, 2.0), (2.0, 2.0), (2.0, 0.0)]);
        let es = from_straight_line_drawing(&g, &coords, 7).unwrap();
        assert_eq!(es.num_crossings(), 1);
        assert_eq!(es.crossings.order[0][0].orientation, 1);
        assert_eq!(es.crossings.order[1][0].orientation, -1);
    }

    #[test]
    fn planar_square() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let coords = LayoutCoords::new(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let es = from_straight_line_drawing(&g, &coords, 0).unwrap();
        assert_eq!(es.num_crossings(), 0);
        assert!(es.validate().is_empty());
    }

    #[test]
    fn triple_point_resolved_by_jitter() {
        // Three long edges through the origin: a triple crossing point that
        // only jitter can untangle.
        let g = Graph::from_edges(6, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        let coords = LayoutCoords::new(vec![
            (1.0, 0.0),
            (0.5, 0.866_025_403_784),
            (-0.5, 0.866_025_403_784),
            (-1.0, 0.0),
            (-0.5, -0.866_025_403_784),
            (0.5, -0.866_025_403_784),
        ]);
        let es = from_straight_line_drawing(&g, &coords, 42).unwrap();
        assert_eq!(es.num_crossings(), 3);
        assert!(es.validate().is_empty());
    }

    #[test]
    fn coincident_vertices_rejected() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let coords = LayoutCoords::new(vec![(1.0, 1.0), (1.0, 1.0)]);
        assert!(from_straight_line_drawing(&g, &coords, 1).is_err());
    }
}
