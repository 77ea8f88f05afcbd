//! Realising a planned star insertion inside the planarisation, and the
//! subdivision bookkeeping that keeps every working edge pair crossing at
//! most once.
//!
//! The insertion paths form a tree rooted at the insertion face. Within each
//! face the chords from the entry segment to their targets nest without
//! crossing exactly when, along the entry, paths appear in descending order
//! of their target's boundary position; the recursion below derives from
//! this the rotation at the new vertex, the crossing order along every
//! crossed segment, and the local rotation at every new dummy.

use crate::embed::{Dart, FaceSet, Planarisation};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, VertexId};
use std::collections::BTreeMap;

/// One planned star edge: target vertex, the working edge id the new edge
/// will carry, and the planarised segments its path crosses (in order from
/// the insertion face).
#[derive(Debug, Clone)]
pub struct StarEdge {
    pub w: VertexId,
    pub work: EdgeId,
    pub segments: Vec<usize>,
}

struct PathPlan {
    w: VertexId,
    work: EdgeId,
    /// Crossed darts, each seen from the face the path is in before crossing.
    darts: Vec<Dart>,
    /// Final face and the boundary index of the chosen corner at w.
    face: usize,
    corner_idx: usize,
    /// Dart with origin w after which the terminal dart is spliced (cw).
    anchor: Dart,
}

/// Splice a new hub vertex `z` with the given star edges into the
/// planarisation. `fs` must be the current faces (hub absent), `newface` the
/// insertion face id. The rotation of `z`, all new dummies and all terminal
/// corners are wired so that the star edges do not cross each other.
pub fn insert_star(
    plan: &mut Planarisation,
    fs: &FaceSet,
    z: VertexId,
    star: &[StarEdge],
    newface: usize,
) -> Result<()> {
    // Plan each path: resolve segments to directed crossings and pick the
    // terminal corner (lowest boundary index at w in the final face).
    let mut plans = Vec::with_capacity(star.len());
    for se in star {
        let mut cur = newface;
        let mut darts = Vec::with_capacity(se.segments.len());
        for &s in &se.segments {
            if !plan.pedge_is_alive(s) {
                return Err(Error::Consistency(format!("path crosses dead segment {s}")));
            }
            let (d0, d1) = (2 * s, 2 * s + 1);
            let d = match (fs.face_of[d0] == cur, fs.face_of[d1] == cur) {
                (true, false) => d0,
                (false, true) => d1,
                (true, true) => {
                    return Err(Error::Consistency(format!(
                        "path crosses bridge segment {s}"
                    )))
                }
                (false, false) => {
                    return Err(Error::Consistency(format!(
                        "path segment {s} does not border face {cur}"
                    )))
                }
            };
            darts.push(d);
            cur = fs.face_of[Planarisation::twin(d)];
        }
        let cycle = &fs.boundary[cur];
        let corner_idx = cycle
            .iter()
            .position(|&d| plan.origin(d) == se.w)
            .ok_or_else(|| {
                Error::Consistency(format!("vertex {} not on final face {cur}", se.w))
            })?;
        let d_prev = cycle[(corner_idx + cycle.len() - 1) % cycle.len()];
        plans.push(PathPlan {
            w: se.w,
            work: se.work,
            darts,
            face: cur,
            corner_idx,
            anchor: Planarisation::twin(d_prev),
        });
    }
    // Boundary position of every dart.
    let mut pos_in_face = vec![usize::MAX; 2 * plan.num_pedges()];
    for cycle in &fs.boundary {
        for (i, &d) in cycle.iter().enumerate() {
            pos_in_face[d] = i;
        }
    }
    // Entry order at the root plus crossing order along every crossed dart.
    let mut tau: BTreeMap<Dart, Vec<usize>> = BTreeMap::new();
    let items: Vec<(usize, usize)> = (0..plans.len()).map(|i| (i, 0)).collect();
    let sigma = order_region(plan, fs, &pos_in_face, &plans, newface, None, items, &mut tau)?;
    // Split crossed segments, creating the dummies in order along each one.
    #[derive(Clone, Copy)]
    struct Tok {
        x: VertexId,
        /// Side darts of the dummy along the crossed dart's direction:
        /// xa towards its origin, xb towards its head.
        xa: Dart,
        xb: Dart,
    }
    let mut toks: Vec<Vec<Option<Tok>>> =
        plans.iter().map(|p| vec![None; p.darts.len()]).collect();
    let mut fwd: BTreeMap<Dart, Dart> = BTreeMap::new();
    for (&d, tokens) in &tau {
        let s = d / 2;
        let along: Vec<usize> = if d % 2 == 0 {
            tokens.clone()
        } else {
            tokens.iter().rev().copied().collect()
        };
        let mut cur = s;
        let mut recs: Vec<(VertexId, usize)> = Vec::with_capacity(along.len());
        for &pi in &along {
            let x = plan.alloc_vertex(Some((plan.pedge(cur).work, plans[pi].work)));
            let (pa, pb) = plan.split_pedge(cur, x);
            fwd.insert(2 * cur, 2 * pa);
            fwd.insert(2 * cur + 1, 2 * pb + 1);
            recs.push((x, pa));
            cur = pb;
        }
        for i in 0..recs.len() {
            let (x, pa) = recs[i];
            let near = 2 * pa + 1;
            let far = if i + 1 < recs.len() {
                2 * recs[i + 1].1
            } else {
                2 * cur
            };
            let (xa, xb) = if d % 2 == 0 { (near, far) } else { (far, near) };
            let pi = along[i];
            let depth = plans[pi]
                .darts
                .iter()
                .position(|&dd| dd == d)
                .expect("token dart missing from its path");
            toks[pi][depth] = Some(Tok { x, xa, xb });
        }
    }
    // Wire the paths.
    if !plan.vertex_is_alive(z) {
        plan.revive_vertex(z);
    } else if !plan.darts_at(z).is_empty() {
        return Err(Error::Consistency(format!("hub vertex {z} is not bare")));
    }
    let resolve = |fwd: &BTreeMap<Dart, Dart>, mut d: Dart| {
        while let Some(&n) = fwd.get(&d) {
            d = n;
        }
        d
    };
    let mut first_darts = Vec::with_capacity(sigma.len());
    for &pi in &sigma {
        let pp = &plans[pi];
        let mut nodes = vec![z];
        for t in &toks[pi] {
            nodes.push(t.expect("path crossing without dummy").x);
        }
        nodes.push(pp.w);
        let pedges: Vec<usize> = nodes
            .windows(2)
            .map(|ab| plan.alloc_pedge(ab[0], ab[1], pp.work))
            .collect();
        first_darts.push(2 * pedges[0]);
        for j in 1..nodes.len() - 1 {
            let t = toks[pi][j - 1].unwrap();
            // The dummy is bare; wire its whole rotation at once.
            // Clockwise around it: towards the crossed segment's origin,
            // towards the previous path node, towards the crossed segment's
            // head, towards the next path node.
            plan.link_cycle(t.x, &[t.xa, 2 * pedges[j - 1] + 1, t.xb, 2 * pedges[j]]);
        }
        let anchor = resolve(&fwd, pp.anchor);
        plan.insert_after(anchor, 2 * pedges[pedges.len() - 1] + 1);
    }
    plan.link_cycle(z, &first_darts);
    Ok(())
}

/// Order the paths entering one face by the boundary position of their next
/// target, descending (the nesting condition); recurse into crossed
/// segments. Returns the entry order along this face's entry segment and
/// fills `tau` with the crossing order along each crossed dart's direction.
#[allow(clippy::too_many_arguments)]
fn order_region(
    plan: &Planarisation,
    fs: &FaceSet,
    pos_in_face: &[usize],
    plans: &[PathPlan],
    face: usize,
    anchor2: Option<usize>,
    items: Vec<(usize, usize)>,
    tau: &mut BTreeMap<Dart, Vec<usize>>,
) -> Result<Vec<usize>> {
    let len = fs.boundary[face].len();
    // Doubled boundary positions: dart at index p sits at 2p+1, the corner
    // before it at 2p; targets sharing a position form one group.
    let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (pi, depth) in items {
        let pp = &plans[pi];
        let pos2 = if depth < pp.darts.len() {
            let d = pp.darts[depth];
            if fs.face_of[d] != face {
                return Err(Error::Consistency(format!(
                    "path detours outside face {face}"
                )));
            }
            2 * pos_in_face[d] + 1
        } else {
            if pp.face != face {
                return Err(Error::Consistency(format!(
                    "path terminates outside face {face}"
                )));
            }
            2 * pp.corner_idx
        };
        groups.entry(pos2).or_default().push((pi, depth));
    }
    let mut ordered: Vec<(usize, usize)> = groups
        .keys()
        .map(|&pos2| {
            let rel = match anchor2 {
                Some(a) => (pos2 + 2 * len - a) % (2 * len),
                None => pos2,
            };
            (rel, pos2)
        })
        .collect();
    ordered.sort_unstable_by(|a, b| b.cmp(a));
    let mut sigma = Vec::new();
    for (_, pos2) in ordered {
        let group = groups.remove(&pos2).unwrap();
        if pos2 % 2 == 1 {
            // Crossing group: recurse through the dart at index (pos2-1)/2.
            let d = fs.boundary[face][(pos2 - 1) / 2];
            let t = Planarisation::twin(d);
            let child_face = fs.face_of[t];
            let child_anchor = 2 * pos_in_face[t] + 1;
            let next: Vec<(usize, usize)> =
                group.iter().map(|&(pi, depth)| (pi, depth + 1)).collect();
            let chi = order_region(
                plan,
                fs,
                pos_in_face,
                plans,
                child_face,
                Some(child_anchor),
                next,
                tau,
            )?;
            // Along d's own direction the crossing points appear in reverse
            // of the entry order seen from the far side.
            tau.insert(d, chi.iter().rev().copied().collect());
            sigma.extend(chi);
        } else {
            // Terminal corner: a single path (one star edge per neighbour).
            if group.len() != 1 {
                return Err(Error::Consistency(
                    "two paths terminate at one corner".into(),
                ));
            }
            sigma.push(group[0].0);
        }
    }
    Ok(sigma)
}

// ---------------------------------------------------------------------------
// Subdivision management.
// ---------------------------------------------------------------------------

/// Record of one freshly cut star edge: the working edge that was split, the
/// piece ids in order from the hub, and the interior subdivision vertices
/// (planarisation slots) between consecutive pieces.
#[derive(Debug, Clone)]
pub struct CutChain {
    pub work: EdgeId,
    pub pieces: Vec<EdgeId>,
    pub interior: Vec<VertexId>,
}

/// Cut newly inserted star edges so that no working pair crosses twice:
/// between every two consecutive crossings with the same partner edge a
/// subdivision vertex is required, and a minimal set of cut points covering
/// all such gaps is chosen greedily. `star` lists (working edge id, hub end).
pub fn manage_subdivisions(
    plan: &mut Planarisation,
    star: &[(EdgeId, VertexId)],
) -> Result<Vec<CutChain>> {
    let mut next_work = (0..plan.num_pedges())
        .filter(|&p| plan.pedge_is_alive(p))
        .map(|p| plan.pedge(p).work + 1)
        .max()
        .unwrap_or(0);
    let star_works: Vec<EdgeId> = star.iter().map(|&(s, _)| s).collect();
    let mut out = Vec::new();
    for &(s, z) in star {
        let (chain_pedges, partners) = walk_star_chain(plan, s, z)?;
        // Crossing positions per partner.
        let mut by_partner: BTreeMap<EdgeId, Vec<usize>> = BTreeMap::new();
        for (pos, &f) in partners.iter().enumerate() {
            by_partner.entry(f).or_default().push(pos);
        }
        // Slot t cuts between crossings t-1 and t; every consecutive pair of
        // same-partner crossings spans an interval of admissible slots.
        let mut intervals: Vec<(usize, usize)> = Vec::new();
        for (&f, positions) in &by_partner {
            if positions.len() > 1 && star_works.contains(&f) {
                return Err(Error::Consistency(format!(
                    "star edges {s} and {f} cross each other"
                )));
            }
            for pair in positions.windows(2) {
                intervals.push((pair[0] + 1, pair[1]));
            }
        }
        if intervals.is_empty() {
            continue;
        }
        // Minimal stabbing: sort by right end, cut there when uncovered.
        intervals.sort_unstable_by_key(|&(lo, hi)| (hi, lo));
        let mut cuts: Vec<usize> = Vec::new();
        for (lo, hi) in intervals {
            if cuts.last().map_or(true, |&c| c < lo) {
                cuts.push(hi);
            }
        }
        // Apply the cuts and reassign piece work ids along the chain.
        let mut interior = Vec::with_capacity(cuts.len());
        let mut final_seq: Vec<(usize, bool)> = Vec::new(); // (pedge, piece boundary after)
        for (t, &pe) in chain_pedges.iter().enumerate() {
            if cuts.binary_search(&t).is_ok() {
                let nv = plan.alloc_vertex(None);
                let (pa, pb) = plan.split_pedge(pe, nv);
                plan.link_cycle(nv, &[2 * pa + 1, 2 * pb]);
                interior.push(nv);
                final_seq.push((pa, true));
                final_seq.push((pb, false));
            } else {
                final_seq.push((pe, false));
            }
        }
        let mut pieces = vec![s];
        let mut piece = 0usize;
        for (pe, boundary_after) in final_seq {
            plan.set_work(pe, pieces[piece]);
            if boundary_after {
                pieces.push(next_work);
                next_work += 1;
                piece += 1;
            }
        }
        out.push(CutChain {
            work: s,
            pieces,
            interior,
        });
    }
    Ok(out)
}

/// Follow working edge `work` through the planarisation starting at `from`,
/// returning its segments in order and the partner edge of each crossing.
fn walk_star_chain(
    plan: &Planarisation,
    work: EdgeId,
    from: VertexId,
) -> Result<(Vec<usize>, Vec<EdgeId>)> {
    let starts: Vec<Dart> = plan
        .darts_at(from)
        .into_iter()
        .filter(|&d| plan.work_of(d) == work)
        .collect();
    if starts.len() != 1 {
        return Err(Error::Consistency(format!(
            "edge {work} has {} ends at vertex {from}",
            starts.len()
        )));
    }
    let mut d = starts[0];
    let mut pedges = vec![d / 2];
    let mut partners = Vec::new();
    loop {
        let h = plan.head(d);
        let conts: Vec<Dart> = plan
            .darts_at(h)
            .into_iter()
            .filter(|&x| plan.work_of(x) == work && x != Planarisation::twin(d))
            .collect();
        if plan.is_dummy(h) {
            let partner: Vec<EdgeId> = plan
                .darts_at(h)
                .into_iter()
                .filter(|&x| plan.work_of(x) != work)
                .map(|x| plan.work_of(x))
                .collect();
            if conts.len() != 1 || partner.len() != 2 || partner[0] != partner[1] {
                return Err(Error::Consistency(format!(
                    "dummy {h} malformed on edge {work}"
                )));
            }
            partners.push(partner[0]);
            d = conts[0];
            pedges.push(d / 2);
        } else if conts.is_empty() {
            return Ok((pedges, partners));
        } else if conts.len() == 1 && plan.darts_at(h).len() == 2 {
            // Interior subdivision vertex of this chain.
            d = conts[0];
            pedges.push(d / 2);
        } else {
            return Err(Error::Consistency(format!(
                "edge {work} branches at vertex {h}"
            )));
        }
    }
}

/// Crossing partners of a registered chain, plus whether any piece crosses
/// another piece of the same chain. Used to decide whether merging the chain
/// back would recreate a multi-crossing.
pub fn chain_can_merge(plan: &Planarisation, pieces: &[EdgeId]) -> bool {
    let mut partners: Vec<EdgeId> = Vec::new();
    for p in 0..plan.num_pedges() {
        if !plan.pedge_is_alive(p) || !pieces.contains(&plan.pedge(p).work) {
            continue;
        }
        for d in [2 * p, 2 * p + 1] {
            let x = plan.origin(d);
            if plan.is_dummy(x) {
                let w = plan.pedge(p).work;
                let others: Vec<EdgeId> = plan
                    .darts_at(x)
                    .into_iter()
                    .map(|dd| plan.work_of(dd))
                    .filter(|&f| f != w)
                    .collect();
                if let Some(&f) = others.first() {
                    if pieces.contains(&f) {
                        return false; // chain crosses itself
                    }
                    partners.push(f);
                }
            }
        }
    }
    // Every crossing dummy lies between two piece segments, so each actual
    // crossing contributes its partner twice; a partner seen more than twice
    // would cross the merged edge more than once.
    partners.sort_unstable();
    let mut i = 0;
    while i < partners.len() {
        let j = partners[i..]
            .iter()
            .take_while(|&&f| f == partners[i])
            .count();
        if j != 2 {
            return false;
        }
        i += j;
    }
    true
}

/// Merge a registered chain back into a single working edge (the first
/// piece's id); interior subdivision vertices are dissolved.
pub fn merge_chain(
    plan: &mut Planarisation,
    pieces: &[EdgeId],
    interior: &[VertexId],
) -> Result<()> {
    for p in 0..plan.num_pedges() {
        if plan.pedge_is_alive(p) && pieces[1..].contains(&plan.pedge(p).work) {
            plan.set_work(p, pieces[0]);
        }
    }
    for &v in interior {
        plan.dissolve_degree2(v)?;
    }
    Ok(())
}
