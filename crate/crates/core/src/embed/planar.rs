//! Half-edge planarisation of an embedding state.
//!
//! Every crossing becomes a degree-4 dummy vertex, so the planarisation is a
//! plane multigraph whose faces can be traced directly from the rotation.
//! Darts (directed half-edges) are numbered 2p and 2p+1 for planarised edge p;
//! the face successor of a dart d is `next_cw[twin(d)]`, which walks the face
//! lying to the left of d.

use super::{CrossingEntry, CrossingState, EmbeddingState, Violation};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};

pub type Dart = usize;

/// One edge of the planarisation: a segment of the working edge `work`.
#[derive(Debug, Clone, Copy)]
pub struct PEdge {
    pub a: VertexId,
    pub b: VertexId,
    pub work: EdgeId,
}

#[derive(Debug, Clone)]
pub struct Planarisation {
    /// Number of working-graph vertex slots; dummies get ids >= this.
    pub n_work: usize,
    pedges: Vec<PEdge>,
    pedge_alive: Vec<bool>,
    vert_alive: Vec<bool>,
    /// Per vertex: Some iff the vertex is a crossing dummy.
    dummy_pair: Vec<Option<(EdgeId, EdgeId)>>,
    next_cw: Vec<Dart>,
    prev_cw: Vec<Dart>,
    first_dart: Vec<Option<Dart>>,
    /// Original build dart standing in for each current dart's left side;
    /// lets callers map faces across dummy dissolution (see `delete_working_vertex`).
    heritage: Vec<Dart>,
}

/// The faces of a planarisation: one id per traced boundary walk.
#[derive(Debug, Clone)]
pub struct FaceSet {
    /// Face id per dart (usize::MAX for dead darts).
    pub face_of: Vec<usize>,
    /// Boundary darts of each face in traversal order (face on the left).
    pub boundary: Vec<Vec<Dart>>,
}

impl FaceSet {
    pub fn num_faces(&self) -> usize {
        self.boundary.len()
    }
}

impl Planarisation {
    // -- dart primitives ---------------------------------------------------

    pub fn twin(d: Dart) -> Dart {
        d ^ 1
    }

    pub fn pedge_of(d: Dart) -> usize {
        d / 2
    }

    pub fn origin(&self, d: Dart) -> VertexId {
        let p = &self.pedges[d / 2];
        if d % 2 == 0 {
            p.a
        } else {
            p.b
        }
    }

    pub fn head(&self, d: Dart) -> VertexId {
        self.origin(Self::twin(d))
    }

    pub fn work_of(&self, d: Dart) -> EdgeId {
        self.pedges[d / 2].work
    }

    pub fn pedge(&self, p: usize) -> &PEdge {
        &self.pedges[p]
    }

    pub fn num_pedges(&self) -> usize {
        self.pedges.len()
    }

    pub fn pedge_is_alive(&self, p: usize) -> bool {
        self.pedge_alive[p]
    }

    pub fn vertex_is_alive(&self, v: VertexId) -> bool {
        self.vert_alive[v]
    }

    pub fn num_vertex_slots(&self) -> usize {
        self.vert_alive.len()
    }

    pub fn is_dummy(&self, v: VertexId) -> bool {
        self.dummy_pair[v].is_some()
    }

    pub fn next_cw(&self, d: Dart) -> Dart {
        self.next_cw[d]
    }

    pub fn prev_cw(&self, d: Dart) -> Dart {
        self.prev_cw[d]
    }

    /// Face successor: next dart of the face on the left of `d`.
    pub fn face_next(&self, d: Dart) -> Dart {
        self.next_cw[Self::twin(d)]
    }

    pub fn heritage(&self, d: Dart) -> Dart {
        self.heritage[d]
    }

    /// Darts with origin `v`, in clockwise order.
    pub fn darts_at(&self, v: VertexId) -> Vec<Dart> {
        let mut out = Vec::new();
        if let Some(start) = self.first_dart[v] {
            let mut d = start;
            loop {
                out.push(d);
                d = self.next_cw[d];
                if d == start {
                    break;
                }
            }
        }
        out
    }

    /// Alive dart of planarised edge `p` whose origin is `v`.
    pub fn dart_of(&self, p: usize, v: VertexId) -> Dart {
        debug_assert!(self.pedge_alive[p]);
        if self.pedges[p].a == v {
            2 * p
        } else {
            debug_assert_eq!(self.pedges[p].b, v);
            2 * p + 1
        }
    }

    // -- construction ------------------------------------------------------

    /// Planarise an embedding state: one dummy per crossing, numbered in
    /// discovery order (ascending (edge id, position) of the smaller edge).
    pub fn build(es: &EmbeddingState) -> Result<Self> {
        let g = &es.graph;
        let m = g.num_edges();
        let n = g.num_vertices();
        let cs = &es.crossings;
        if cs.order.len() != m {
            return Err(Error::Consistency("crossing lists do not match edge count".into()));
        }
        // Assign dummy vertex ids.
        let mut dummy_at: Vec<Vec<usize>> = cs.order.iter().map(|l| vec![usize::MAX; l.len()]).collect();
        let mut dummy_pair: Vec<Option<(EdgeId, EdgeId)>> = vec![None; n];
        let mut dummy_pos: Vec<(usize, usize)> = Vec::new(); // (pos in e1, pos in e2)
        for e in 0..m {
            for i in 0..cs.order[e].len() {
                if dummy_at[e][i] != usize::MAX {
                    continue;
                }
                let o = cs.order[e][i].other;
                if o >= m || o == e {
                    return Err(Error::Consistency(format!(
                        "edge {e} lists an invalid crossing partner {o}"
                    )));
                }
                let j = cs.order[o]
                    .iter()
                    .position(|c| c.other == e)
                    .ok_or_else(|| {
                        Error::Consistency(format!("edges {e} and {o} have asymmetric crossing lists"))
                    })?;
                let x = dummy_pair.len();
                dummy_at[e][i] = x;
                dummy_at[o][j] = x;
                dummy_pair.push(Some((e, o)));
                dummy_pos.push((i, j));
            }
        }
        let total_verts = dummy_pair.len();
        // Planarised edges per working edge, in order from the smaller endpoint.
        let mut pedges: Vec<PEdge> = Vec::new();
        let mut chain: Vec<Vec<usize>> = Vec::with_capacity(m);
        for e in 0..m {
            let (u, v) = g.edge(e);
            let mut nodes = Vec::with_capacity(cs.order[e].len() + 2);
            nodes.push(u);
            nodes.extend(dummy_at[e].iter().copied());
            nodes.push(v);
            let mut ch = Vec::with_capacity(nodes.len() - 1);
            for w in nodes.windows(2) {
                ch.push(pedges.len());
                pedges.push(PEdge {
                    a: w[0],
                    b: w[1],
                    work: e,
                });
            }
            chain.push(ch);
        }
        let nd = 2 * pedges.len();
        let mut p = Planarisation {
            n_work: n,
            pedge_alive: vec![true; pedges.len()],
            vert_alive: vec![true; total_verts],
            dummy_pair,
            next_cw: vec![usize::MAX; nd],
            prev_cw: vec![usize::MAX; nd],
            first_dart: vec![None; total_verts],
            heritage: (0..nd).collect(),
            pedges,
        };
        // Rotations at working vertices follow the embedding's cyclic orders.
        for v in 0..n {
            let cyc = es.cyclic_at(v).map_err(|_| {
                Error::Consistency(format!("corrupt rotation at vertex {v}"))
            })?;
            let darts: Vec<Dart> = cyc
                .iter()
                .map(|&e| {
                    let pe = if es.rotation[e].u == v {
                        chain[e][0]
                    } else {
                        *chain[e].last().unwrap()
                    };
                    p.dart_of(pe, v)
                })
                .collect();
            p.link_cycle(v, &darts);
        }
        // Rotations at dummies follow the stored orientation signs.
        for x in n..total_verts {
            let (e1, e2) = p.dummy_pair[x].unwrap();
            let (i1, i2) = dummy_pos[x - n];
            let s = cs.order[e1][i1].orientation;
            if s != 1 && s != -1 {
                return Err(Error::Consistency(format!(
                    "crossing of edges {e1} and {e2} has orientation {s}"
                )));
            }
            let tu1 = p.dart_of(chain[e1][i1], x);
            let tv1 = p.dart_of(chain[e1][i1 + 1], x);
            let tu2 = p.dart_of(chain[e2][i2], x);
            let tv2 = p.dart_of(chain[e2][i2 + 1], x);
            let cyc = if s == 1 {
                [tu1, tu2, tv1, tv2]
            } else {
                [tu1, tv2, tv1, tu2]
            };
            p.link_cycle(x, &cyc);
        }
        Ok(p)
    }

    pub(crate) fn link_cycle(&mut self, v: VertexId, darts: &[Dart]) {
        if darts.is_empty() {
            self.first_dart[v] = None;
            return;
        }
        for (i, &d) in darts.iter().enumerate() {
            let nxt = darts[(i + 1) % darts.len()];
            self.next_cw[d] = nxt;
            self.prev_cw[nxt] = d;
        }
        self.first_dart[v] = Some(darts[0]);
    }

    // -- face tracing ------------------------------------------------------

    pub fn trace_faces(&self) -> Result<FaceSet> {
        let nd = 2 * self.pedges.len();
        let mut face_of = vec![usize::MAX; nd];
        let mut boundary: Vec<Vec<Dart>> = Vec::new();
        let total_alive = 2 * self.pedge_alive.iter().filter(|&&a| a).count();
        for start in 0..nd {
            if !self.pedge_alive[start / 2] || face_of[start] != usize::MAX {
                continue;
            }
            let id = boundary.len();
            let mut cycle = Vec::new();
            let mut d = start;
            loop {
                if face_of[d] != usize::MAX {
                    return Err(Error::Consistency(format!(
                        "corrupt rotation at vertex {}",
                        self.origin(d)
                    )));
                }
                face_of[d] = id;
                cycle.push(d);
                if cycle.len() > total_alive {
                    return Err(Error::Consistency(format!(
                        "corrupt rotation at vertex {}",
                        self.origin(d)
                    )));
                }
                d = self.face_next(d);
                if d == start {
                    break;
                }
            }
            boundary.push(cycle);
        }
        Ok(FaceSet { face_of, boundary })
    }

    /// Euler identity n - m + f = 2 for every connected component that has at
    /// least one edge (components are independent spheres).
    pub fn euler_violations(&self, fs: &FaceSet) -> Vec<Violation> {
        let nv = self.vert_alive.len();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (p, pe) in self.pedges.iter().enumerate() {
            if !self.pedge_alive[p] {
                continue;
            }
            let (ra, rb) = (find(&mut parent, pe.a), find(&mut parent, pe.b));
            if ra != rb {
                let (lo, hi) = (ra.min(rb), ra.max(rb));
                parent[hi] = lo;
            }
        }
        let mut verts = vec![0usize; nv];
        let mut edges = vec![0usize; nv];
        let mut faces = vec![0usize; nv];
        let mut has_edge = vec![false; nv];
        for (p, pe) in self.pedges.iter().enumerate() {
            if self.pedge_alive[p] {
                let r = find(&mut parent, pe.a);
                edges[r] += 1;
                has_edge[r] = true;
            }
        }
        for v in 0..nv {
            if self.vert_alive[v] {
                let r = find(&mut parent, v);
                verts[r] += 1;
            }
        }
        for cyc in &fs.boundary {
            let r = find(&mut parent, self.origin(cyc[0]));
            faces[r] += 1;
        }
        let mut out = Vec::new();
        let mut comp = 0usize;
        for r in 0..nv {
            if find(&mut parent, r) != r || !has_edge[r] {
                continue;
            }
            if verts[r] + faces[r] != edges[r] + 2 {
                out.push(Violation::Euler {
                    component: comp,
                    vertices: verts[r],
                    edges: edges[r],
                    faces: faces[r],
                });
            }
            comp += 1;
        }
        out
    }

    // -- rotation splicing -------------------------------------------------

    pub(crate) fn unlink_dart(&mut self, d: Dart) {
        let v = self.origin(d);
        if self.next_cw[d] == d {
            self.first_dart[v] = None;
        } else {
            let (p, n) = (self.prev_cw[d], self.next_cw[d]);
            self.next_cw[p] = n;
            self.prev_cw[n] = p;
            if self.first_dart[v] == Some(d) {
                self.first_dart[v] = Some(n);
            }
        }
    }

    /// Insert dart `d` immediately clockwise after `pos` (same origin vertex).
    pub(crate) fn insert_after(&mut self, pos: Dart, d: Dart) {
        debug_assert_eq!(self.origin(pos), self.origin(d));
        let n = self.next_cw[pos];
        self.next_cw[pos] = d;
        self.prev_cw[d] = pos;
        self.next_cw[d] = n;
        self.prev_cw[n] = d;
    }

    /// `new` takes `old`'s exact place in its origin's rotation. If `old`
    /// was never linked (its endpoint is still bare, e.g. a dummy whose
    /// rotation is wired later), there is no slot to take over.
    pub(crate) fn replace_dart(&mut self, old: Dart, new: Dart) {
        let v = self.origin(old);
        debug_assert_eq!(v, self.origin(new));
        if self.next_cw[old] == usize::MAX {
            return;
        }
        if self.next_cw[old] == old {
            self.first_dart[v] = Some(new);
            self.next_cw[new] = new;
            self.prev_cw[new] = new;
        } else {
            let (p, n) = (self.prev_cw[old], self.next_cw[old]);
            self.next_cw[p] = new;
            self.prev_cw[new] = p;
            self.next_cw[new] = n;
            self.prev_cw[n] = new;
            if self.first_dart[v] == Some(old) {
                self.first_dart[v] = Some(new);
            }
        }
    }

    pub(crate) fn alloc_pedge(&mut self, a: VertexId, b: VertexId, work: EdgeId) -> usize {
        let p = self.pedges.len();
        self.pedges.push(PEdge { a, b, work });
        self.pedge_alive.push(true);
        self.heritage.push(2 * p);
        self.heritage.push(2 * p + 1);
        self.next_cw.push(usize::MAX);
        self.next_cw.push(usize::MAX);
        self.prev_cw.push(usize::MAX);
        self.prev_cw.push(usize::MAX);
        p
    }

    pub(crate) fn kill_pedge(&mut self, p: usize) {
        self.pedge_alive[p] = false;
    }

    /// New bare vertex; `pair` marks it as a crossing dummy.
    pub(crate) fn alloc_vertex(&mut self, pair: Option<(EdgeId, EdgeId)>) -> VertexId {
        let v = self.vert_alive.len();
        self.vert_alive.push(true);
        self.dummy_pair.push(pair);
        self.first_dart.push(None);
        v
    }

    pub(crate) fn revive_vertex(&mut self, v: VertexId) {
        debug_assert!(!self.vert_alive[v]);
        self.vert_alive[v] = true;
        self.first_dart[v] = None;
    }

    /// Split planarised edge `p` = (a, b) at a fresh vertex `x`, giving
    /// (a, x) and (x, b); both halves keep `p`'s rotation slots at a and b.
    pub(crate) fn split_pedge(&mut self, p: usize, x: VertexId) -> (usize, usize) {
        debug_assert!(self.pedge_alive[p]);
        let PEdge { a, b, work } = self.pedges[p];
        let pa = self.alloc_pedge(a, x, work);
        let pb = self.alloc_pedge(x, b, work);
        self.heritage[2 * pa] = self.heritage[2 * p];
        self.heritage[2 * pa + 1] = self.heritage[2 * p + 1];
        self.heritage[2 * pb] = self.heritage[2 * p];
        self.heritage[2 * pb + 1] = self.heritage[2 * p + 1];
        self.replace_dart(2 * p, 2 * pa); // a -> x takes (a -> b)'s slot
        self.replace_dart(2 * p + 1, 2 * pb + 1); // b -> x takes (b -> a)'s slot
        self.kill_pedge(p);
        (pa, pb)
    }

    pub(crate) fn set_work(&mut self, p: usize, work: EdgeId) {
        self.pedges[p].work = work;
    }

    /// Remove a degree-2 vertex by merging its two incident segments (which
    /// must carry the same working edge) into one. Returns (merged, old1,
    /// old2) planarised-edge ids.
    pub(crate) fn dissolve_degree2(&mut self, x: VertexId) -> Result<(usize, usize, usize)> {
        let darts = self.darts_at(x);
        if darts.len() != 2 {
            return Err(Error::Consistency(format!(
                "cannot dissolve vertex {x} of degree {}",
                darts.len()
            )));
        }
        let (d1, d2) = (darts[0], darts[1]);
        let (p1, p2) = (d1 / 2, d2 / 2);
        if self.pedges[p1].work != self.pedges[p2].work {
            return Err(Error::Consistency(format!(
                "vertex {x} joins segments of two different edges"
            )));
        }
        let a = self.head(d1);
        let b = self.head(d2);
        let q = self.alloc_pedge(a, b, self.pedges[p1].work);
        self.heritage[2 * q] = self.heritage[Self::twin(d1)];
        self.heritage[2 * q + 1] = self.heritage[Self::twin(d2)];
        self.replace_dart(Self::twin(d1), 2 * q);
        self.replace_dart(Self::twin(d2), 2 * q + 1);
        self.kill_pedge(p1);
        self.kill_pedge(p2);
        self.vert_alive[x] = false;
        self.first_dart[x] = None;
        self.dummy_pair[x] = None;
        Ok((q, p1, p2))
    }

    // -- vertex deletion ---------------------------------------------------

    /// Remove the given working vertices and all segments of the given
    /// working edges (a star's edges plus any subdivision chain interiors);
    /// dummies left with degree two are dissolved (their partner edge's two
    /// segments merge). Returns the planarised-edge remap: old id -> surviving
    /// id, or usize::MAX for removed segments.
    pub fn delete_working_vertices(
        &mut self,
        verts: &[VertexId],
        edges: &[EdgeId],
    ) -> Result<Vec<usize>> {
        let mut doomed_work = vec![false; self.pedges.iter().map(|p| p.work + 1).max().unwrap_or(0)];
        for &e in edges {
            if e < doomed_work.len() {
                doomed_work[e] = true;
            }
        }
        let mut remap: Vec<usize> = (0..self.pedges.len()).collect();
        let mut touched_dummies: Vec<VertexId> = Vec::new();
        for p in 0..self.pedges.len() {
            if !self.pedge_alive[p] || !doomed_work.get(self.pedges[p].work).copied().unwrap_or(false)
            {
                continue;
            }
            for d in [2 * p, 2 * p + 1] {
                let x = self.origin(d);
                self.unlink_dart(d);
                if self.is_dummy(x) {
                    touched_dummies.push(x);
                }
            }
            self.kill_pedge(p);
            remap[p] = usize::MAX;
        }
        for &v in verts {
            self.vert_alive[v] = false;
            self.first_dart[v] = None;
        }
        touched_dummies.sort_unstable();
        touched_dummies.dedup();
        for x in touched_dummies {
            let darts = self.darts_at(x);
            match darts.len() {
                0 => {
                    self.vert_alive[x] = false;
                    self.dummy_pair[x] = None;
                }
                2 => {
                    let (q, p1, p2) = self.dissolve_degree2(x)?;
                    while remap.len() < self.pedges.len() {
                        let i = remap.len();
                        remap.push(i);
                    }
                    remap[p1] = q;
                    remap[p2] = q;
                }
                k => {
                    return Err(Error::Consistency(format!(
                        "dummy {x} left with degree {k} after deletion"
                    )));
                }
            }
        }
        while remap.len() < self.pedges.len() {
            let i = remap.len();
            remap.push(i);
        }
        // Resolve merge chains (a segment can be merged repeatedly).
        for p in 0..remap.len() {
            let mut r = remap[p];
            while r != usize::MAX && r != remap[r] {
                r = remap[r];
            }
            remap[p] = r;
        }
        Ok(remap)
    }

    // -- extraction --------------------------------------------------------

    /// Read the embedding back off the planarisation with fresh canonical
    /// numbering: alive working vertices in ascending slot order become
    /// 0..n, alive working edges in ascending work-id order become 0..m.
    /// Bookkeeping fields of the returned state (`num_real_vertices`,
    /// `edge_orig`, `chains`) are defaults for the caller to translate.
    pub fn extract_canonical(&self) -> Result<Extraction> {
        let slots = self.vert_alive.len();
        let mut vertex_map = vec![usize::MAX; slots];
        let mut n = 0usize;
        for v in 0..slots {
            if self.vert_alive[v] && !self.is_dummy(v) {
                vertex_map[v] = n;
                n += 1;
            }
        }
        // Alive working edges and their chain endpoints.
        let max_work = self
            .pedges
            .iter()
            .enumerate()
            .filter(|&(p, _)| self.pedge_alive[p])
            .map(|(_, pe)| pe.work + 1)
            .max()
            .unwrap_or(0);
        let mut ends: Vec<Vec<VertexId>> = vec![Vec::new(); max_work];
        for (p, pe) in self.pedges.iter().enumerate() {
            if !self.pedge_alive[p] {
                continue;
            }
            for x in [pe.a, pe.b] {
                if !self.is_dummy(x) {
                    ends[pe.work].push(x);
                }
            }
        }
        let mut edge_map = vec![usize::MAX; max_work];
        let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
        for w in 0..max_work {
            if ends[w].is_empty() {
                continue;
            }
            if ends[w].len() != 2 {
                return Err(Error::Consistency(format!(
                    "working edge {w} has {} chain endpoints",
                    ends[w].len()
                )));
            }
            let (a, b) = (vertex_map[ends[w][0]], vertex_map[ends[w][1]]);
            if a == usize::MAX || b == usize::MAX {
                return Err(Error::Consistency(format!(
                    "working edge {w} touches a dead vertex"
                )));
            }
            edge_map[w] = pairs.len();
            pairs.push((a.min(b), a.max(b)));
        }
        let graph = Graph::from_edges(n, &pairs)?;
        let m = graph.num_edges();
        // Inverse vertex map for walking.
        let mut plan_of = vec![usize::MAX; n];
        for (pv, &nv) in vertex_map.iter().enumerate() {
            if nv != usize::MAX {
                plan_of[nv] = pv;
            }
        }
        // Cyclic orders at working vertices.
        let mut cyclic: Vec<Vec<EdgeId>> = Vec::with_capacity(n);
        for v in 0..n {
            let cyc: Vec<EdgeId> = self
                .darts_at(plan_of[v])
                .iter()
                .map(|&d| edge_map[self.work_of(d)])
                .collect();
            if cyc.len() != graph.degree(v) {
                return Err(Error::Consistency(format!(
                    "vertex {v} has {} planarised ends but degree {}",
                    cyc.len(),
                    graph.degree(v)
                )));
            }
            cyclic.push(cyc);
        }
        let rotation = super::records_from_cyclic(&graph, &cyclic)?;
        // Walk each working edge from its smaller endpoint, recording the
        // back/forward darts at every dummy passed.
        #[derive(Clone, Copy, Default)]
        struct Passage {
            back: Dart,
            fwd: Dart,
            set: bool,
        }
        let mut passages: Vec<[Passage; 2]> = vec![Default::default(); slots];
        let mut pass_edges: Vec<[EdgeId; 2]> = vec![[usize::MAX; 2]; slots];
        let mut order: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); m]; // (dummy, partner)
        for e in 0..m {
            let (u, v) = graph.edge(e);
            let starts: Vec<Dart> = self
                .darts_at(plan_of[u])
                .into_iter()
                .filter(|&d| edge_map[self.work_of(d)] == e)
                .collect();
            if starts.len() != 1 {
                return Err(Error::Consistency(format!(
                    "edge {e} has {} segment ends at vertex {u}",
                    starts.len()
                )));
            }
            let mut d = starts[0];
            loop {
                let h = self.head(d);
                if !self.is_dummy(h) {
                    if vertex_map[h] != v {
                        return Err(Error::Consistency(format!(
                            "edge {e} chain ends at vertex {h}, expected {v}"
                        )));
                    }
                    break;
                }
                let work = self.work_of(d);
                let cont: Vec<Dart> = self
                    .darts_at(h)
                    .into_iter()
                    .filter(|&x| self.work_of(x) == work && x != Self::twin(d))
                    .collect();
                if cont.len() != 1 {
                    return Err(Error::Consistency(format!(
                        "dummy {h} does not continue edge {e} uniquely"
                    )));
                }
                let partners: Vec<EdgeId> = self
                    .darts_at(h)
                    .into_iter()
                    .filter(|&x| self.work_of(x) != work)
                    .map(|x| self.work_of(x))
                    .collect();
                if partners.len() != 2 || partners[0] != partners[1] {
                    return Err(Error::Consistency(format!(
                        "dummy {h} is not a crossing of two edges"
                    )));
                }
                let partner = edge_map[partners[0]];
                if partner == usize::MAX {
                    return Err(Error::Consistency(format!(
                        "dummy {h} crosses a dead working edge"
                    )));
                }
                let slot = if !passages[h][0].set { 0 } else { 1 };
                passages[h][slot] = Passage {
                    back: Self::twin(d),
                    fwd: cont[0],
                    set: true,
                };
                pass_edges[h][slot] = e;
                order[e].push((h, partner));
                d = cont[0];
            }
        }
        // Turn passages into signed crossing entries.
        let mut lists: Vec<Vec<CrossingEntry>> = vec![Vec::new(); m];
        for e in 0..m {
            for &(x, partner) in &order[e] {
                let me = if pass_edges[x][0] == e { 0 } else { 1 };
                let other = 1 - me;
                if !passages[x][me].set || !passages[x][other].set {
                    return Err(Error::Consistency(format!(
                        "dummy {x} was not traversed by both edges"
                    )));
                }
                let (be, fe) = (passages[x][me].back, passages[x][me].fwd);
                let (bo, fo) = (passages[x][other].back, passages[x][other].fwd);
                let seq = [
                    self.next_cw[be],
                    self.next_cw[self.next_cw[be]],
                    self.next_cw[self.next_cw[self.next_cw[be]]],
                ];
                let orientation = if seq == [bo, fe, fo] {
                    1
                } else if seq == [fo, fe, bo] {
                    -1
                } else {
                    return Err(Error::Consistency(format!(
                        "dummy {x} has an inconsistent rotation"
                    )));
                };
                lists[e].push(CrossingEntry {
                    other: partner,
                    orientation,
                });
            }
        }
        let crossings = CrossingState {
            total: lists.iter().map(|l| l.len()).sum::<usize>() / 2,
            order: lists,
        };
        let state = EmbeddingState {
            num_real_vertices: n,
            edge_orig: (0..m).collect(),
            chains: Vec::new(),
            rotation,
            crossings,
            graph,
        };
        Ok(Extraction {
            state,
            vertex_map,
            edge_map,
        })
    }
}

/// Result of `Planarisation::extract_canonical`.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub state: EmbeddingState,
    /// Planarisation vertex slot -> new vertex id (usize::MAX when dead or a
    /// crossing dummy).
    pub vertex_map: Vec<VertexId>,
    /// Old working edge id -> new edge id (usize::MAX when gone).
    pub edge_map: Vec<EdgeId>,
}

/// Spec-facing wrappers.
pub fn planarise(es: &EmbeddingState) -> Result<Planarisation> {
    Planarisation::build(es)
}

pub fn trace_faces(p: &Planarisation) -> Result<FaceSet> {
    p.trace_faces()
}

// ---------------------------------------------------------------------------
// Dual graph over face classes.
// ---------------------------------------------------------------------------

/// Dual of a planarisation, with a union-find over base faces so that vertex
/// removal can be simulated by contraction without touching the embedding.
#[derive(Debug, Clone)]
pub struct DualGraph {
    parent: Vec<usize>,
    /// Per planarised edge: its two incident base faces, or None once the
    /// segment has been contracted away.
    pub seg_faces: Vec<Option<(usize, usize)>>,
}

impl DualGraph {
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Union keeping the smaller face id as representative.
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }

    pub fn num_base_faces(&self) -> usize {
        self.parent.len()
    }

    /// Representatives of all live face classes, ascending.
    pub fn class_reps(&mut self) -> Vec<usize> {
        (0..self.parent.len()).filter(|&f| self.find(f) == f).collect()
    }
}

pub fn build_dual(p: &Planarisation, fs: &FaceSet) -> DualGraph {
    let seg_faces = (0..p.num_pedges())
        .map(|pe| {
            if p.pedge_is_alive(pe) {
                Some((fs.face_of[2 * pe], fs.face_of[2 * pe + 1]))
            } else {
                None
            }
        })
        .collect();
    DualGraph {
        parent: (0..fs.num_faces()).collect(),
        seg_faces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::EmbeddingState;
    use crate::graph::Graph;

    fn planar_state(n: usize, edges: &[(usize, usize)], cyclic: &[Vec<usize>]) -> EmbeddingState {
        let g = Graph::from_edges(n, edges).unwrap();
        EmbeddingState::planar_from_cyclic(g, cyclic).unwrap()
    }

    #[test]
    fn triangle_two_faces() {
        // Edges: 0=(0,1), 1=(0,2), 2=(1,2).
        let es = planar_state(
            3,
            &[(0, 1), (0, 2), (1, 2)],
            &[vec![0, 1], vec![0, 2], vec![1, 2]],
        );
        assert!(es.validate().is_empty());
        let p = Planarisation::build(&es).unwrap();
        let fs = p.trace_faces().unwrap();
        assert_eq!(fs.num_faces(), 2);
        assert!(fs.boundary.iter().all(|b| b.len() == 3));
    }

    #[test]
    fn k4_planar_four_faces() {
        // K4 drawn with vertex 3 inside triangle 0-1-2.
        // Edges: 0=(0,1) 1=(0,2) 2=(0,3) 3=(1,2) 4=(1,3) 5=(2,3).
        let es = planar_state(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            &[
                vec![0, 1, 2],
                vec![0, 4, 3],
                vec![3, 5, 1],
                vec![4, 2, 5],
            ],
        );
        assert!(es.validate().is_empty(), "{:?}", es.validate());
        let p = Planarisation::build(&es).unwrap();
        let fs = p.trace_faces().unwrap();
        assert_eq!(fs.num_faces(), 4);
    }

    /// Two independent edges crossing once: planarisation has 5 vertices,
    /// 4 segments and a single face.
    fn crossing_x() -> EmbeddingState {
        let g = Graph::from_edges(4, &[(0, 2), (1, 3)]).unwrap();
        let mut es = EmbeddingState::planar_from_cyclic(
            g,
            &[vec![0], vec![1], vec![0], vec![1]],
        )
        .unwrap();
        es.crossings.order[0].push(crate::embed::CrossingEntry { other: 1, orientation: 1 });
        es.crossings.order[1].push(crate::embed::CrossingEntry { other: 0, orientation: -1 });
        es.crossings.total = 1;
        es
    }

    #[test]
    fn single_crossing_euler() {
        let es = crossing_x();
        assert!(es.validate().is_empty(), "{:?}", es.validate());
        let p = Planarisation::build(&es).unwrap();
        assert_eq!(p.num_vertex_slots(), 5);
        let fs = p.trace_faces().unwrap();
        assert_eq!(fs.num_faces(), 1);
        assert!(p.euler_violations(&fs).is_empty());
    }

    #[test]
    fn extract_roundtrip_crossing() {
        let es = crossing_x();
        let p = Planarisation::build(&es).unwrap();
        let ex = p.extract_canonical().unwrap();
        assert_eq!(ex.state.rotation, es.rotation);
        assert_eq!(ex.state.crossings, es.crossings);
        assert!(ex.state.validate().is_empty());
        assert_eq!(&ex.edge_map, &[0, 1]);
    }

    #[test]
    fn delete_vertex_dissolves_dummy() {
        // Edge (0,1) crosses edge (2,3); edge (2,4) keeps vertex 2 busy.
        let g = Graph::from_edges(5, &[(0, 1), (2, 3), (2, 4)]).unwrap();
        let mut es = EmbeddingState::planar_from_cyclic(
            g,
            &[vec![0], vec![0], vec![1, 2], vec![1], vec![2]],
        )
        .unwrap();
        es.crossings.order[0].push(crate::embed::CrossingEntry { other: 1, orientation: 1 });
        es.crossings.order[1].push(crate::embed::CrossingEntry { other: 0, orientation: -1 });
        es.crossings.total = 1;
        assert!(es.validate().is_empty(), "{:?}", es.validate());
        let mut p = Planarisation::build(&es).unwrap();
        let remap = p.delete_working_vertices(&[0], &[0]).unwrap();
        // Edge 0's single... segments are gone; edge 1's two segments merged.
        assert!(!p.vertex_is_alive(0));
        let alive: Vec<usize> = (0..p.num_pedges()).filter(|&q| p.pedge_is_alive(q)).collect();
        assert_eq!(alive.len(), 2); // merged (2,3) plus (2,4)
        let merged = alive
            .iter()
            .copied()
            .find(|&q| p.pedge(q).work == 1)
            .unwrap();
        // Both old segments of edge 1 forward to the merged replacement.
        assert_eq!(remap[2], merged);
        assert_eq!(remap[3], merged);
        let fs = p.trace_faces().unwrap();
        assert!(p.euler_violations(&fs).is_empty());
    }

    #[test]
    fn rotation_doc_roundtrip() {
        let es = crossing_x();
        let doc = es.to_doc(None).unwrap();
        let json = serde_json::to_string(&doc).unwrap();
        let doc2: crate::embed::RotationDoc = serde_json::from_str(&json).unwrap();
        let es2 = EmbeddingState::from_doc(&doc2).unwrap();
        assert_eq!(es2.rotation, es.rotation);
        assert_eq!(es2.crossings, es.crossings);
    }
}
