//! Simple undirected graphs: ingestion, relabelling, decomposition.

use crate::error::{Error, Result};
use std::collections::HashMap;

pub type VertexId = usize;
pub type EdgeId = usize;

/// A simple undirected graph. No self-loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    /// adj[v] = (neighbour, edge id), in edge-insertion order.
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Build from an edge list; rejects self-loops and duplicates.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        if u >= self.n || v >= self.n {
            return Err(Error::Domain(format!(
                "edge ({u},{v}) out of range for {} vertices",
                self.n
            )));
        }
        if u == v {
            return Err(Error::Domain(format!("self-loop at vertex {u}")));
        }
        if self.adj[u].iter().any(|&(w, _)| w == v) {
            return Err(Error::Domain(format!("duplicate edge ({u},{v})")));
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let id = self.edges.len();
        self.edges.push((a, b));
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        Ok(id)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    /// The endpoint of `e` that is not `v`.
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn adjacency(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn neighbours(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adj[v].iter().map(|&(w, _)| w)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u].iter().any(|&(w, _)| w == v)
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.adj[u].iter().find(|&&(w, _)| w == v).map(|&(_, e)| e)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(w, _) in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Connected components as (subgraph, local -> parent vertex map).
    pub fn connected_components(&self) -> Vec<(Graph, Vec<VertexId>)> {
        let mut comp = vec![usize::MAX; self.n];
        let mut ncomp = 0;
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = ncomp;
            ncomp += 1;
            comp[s] = c;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = c;
                        stack.push(w);
                    }
                }
            }
        }
        let mut verts: Vec<Vec<VertexId>> = vec![Vec::new(); ncomp];
        for v in 0..self.n {
            verts[comp[v]].push(v);
        }
        let mut out = Vec::with_capacity(ncomp);
        for vs in verts {
            let mut local = HashMap::new();
            for (i, &v) in vs.iter().enumerate() {
                local.insert(v, i);
            }
            let mut g = Graph::new(vs.len());
            for &(u, v) in &self.edges {
                if let (Some(&lu), Some(&lv)) = (local.get(&u), local.get(&v)) {
                    g.add_edge(lu, lv).unwrap();
                }
            }
            out.push((g, vs));
        }
        out
    }
}

/// Bijective relabelling of 0..n-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<VertexId>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn new(map: Vec<VertexId>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &x in &map {
            if x >= n || seen[x] {
                return Err(Error::Domain("mapping is not a bijection on 0..n-1".into()));
            }
            seen[x] = true;
        }
        Ok(Permutation { map })
    }

    pub fn random<R: rand::Rng>(n: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut map: Vec<VertexId> = (0..n).collect();
        map.shuffle(rng);
        Permutation { map }
    }

    pub fn apply(&self, v: VertexId) -> VertexId {
        self.map[v]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { map: inv }
    }
}

/// Relabel the vertices of `g` by `p`. Edge order is preserved.
pub fn apply_permutation(g: &Graph, p: &Permutation) -> Result<Graph> {
    if p.len() != g.num_vertices() {
        return Err(Error::Domain(format!(
            "permutation size {} does not match vertex count {}",
            p.len(),
            g.num_vertices()
        )));
    }
    let mut out = Graph::new(g.num_vertices());
    for &(u, v) in g.edges() {
        out.add_edge(p.apply(u), p.apply(v))?;
    }
    Ok(out)
}

/// Statistics and label bookkeeping from edge-list ingestion.
#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    /// internal id -> external label.
    pub labels: Vec<u64>,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
    /// External labels of vertices that ended up isolated (self-loop only).
    pub isolated_removed: Vec<u64>,
}

/// Parse an edge-list text: lines "u v", `#` comments, blank lines ignored.
/// External labels are compacted to 0..n-1 in first-seen order.
pub fn load_edge_list(text: &str) -> Result<(Graph, LoadReport)> {
    let mut raw_edges: Vec<(u64, u64)> = Vec::new();
    let mut first_seen: Vec<u64> = Vec::new();
    let mut seen: HashMap<u64, ()> = HashMap::new();
    let mut report = LoadReport::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            tok.ok_or_else(|| Error::Parse {
                line: lineno + 1,
                msg: "expected two vertex labels".into(),
            })?
            .parse::<u64>()
            .map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("invalid vertex label in {line:?}"),
            })
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("trailing tokens in {line:?}"),
            });
        }
        for &x in &[u, v] {
            if !seen.contains_key(&x) {
                seen.insert(x, ());
                first_seen.push(x);
            }
        }
        raw_edges.push((u, v));
    }
    // Filter self-loops and duplicates, keeping counts.
    let mut kept: Vec<(u64, u64)> = Vec::new();
    let mut have: HashMap<(u64, u64), ()> = HashMap::new();
    for (u, v) in raw_edges {
        if u == v {
            report.self_loops_dropped += 1;
            continue;
        }
        let key = if u < v { (u, v) } else { (v, u) };
        if have.contains_key(&key) {
            report.duplicates_collapsed += 1;
            continue;
        }
        have.insert(key, ());
        kept.push(key);
    }
    // Labels used by kept edges, in first-seen order; the rest are isolated.
    let mut used: HashMap<u64, ()> = HashMap::new();
    for &(u, v) in &kept {
        used.insert(u, ());
        used.insert(v, ());
    }
    let mut id_of: HashMap<u64, usize> = HashMap::new();
    for &label in &first_seen {
        if used.contains_key(&label) {
            id_of.insert(label, report.labels.len());
            report.labels.push(label);
        } else {
            report.isolated_removed.push(label);
        }
    }
    let mut g = Graph::new(report.labels.len());
    for (u, v) in kept {
        g.add_edge(id_of[&u], id_of[&v])?;
    }
    Ok((g, report))
}

/// Maximal biconnected components as (subgraph, local -> parent vertex map).
/// Cut vertices appear in several components; the edge sets partition E(g).
pub fn biconnected_components(g: &Graph) -> Vec<(Graph, Vec<VertexId>)> {
    let n = g.num_vertices();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0usize;
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut groups: Vec<Vec<EdgeId>> = Vec::new();

    // Iterative DFS; frame = (vertex, parent edge, adjacency cursor).
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        let mut stack: Vec<(VertexId, Option<EdgeId>, usize)> = vec![(root, None, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (v, pe, ref mut cursor)) = stack.last_mut() {
            if *cursor < g.degree(v) {
                let (w, e) = g.adjacency(v)[*cursor];
                *cursor += 1;
                if Some(e) == pe {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, Some(e), 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&mut (u, _, _)) = stack.last_mut() {
                    if low[v] >= disc[u] {
                        // u is a cut vertex (or root); pop a component.
                        let mut comp = Vec::new();
                        while let Some(&e) = edge_stack.last() {
                            let (a, b) = g.edge(e);
                            if disc[a] >= disc[v] || disc[b] >= disc[v] {
                                comp.push(edge_stack.pop().unwrap());
                            } else {
                                break;
                            }
                        }
                        comp.reverse();
                        if !comp.is_empty() {
                            groups.push(comp);
                        }
                    }
                    low[u] = low[u].min(low[v]);
                }
            }
        }
    }

    let mut out = Vec::with_capacity(groups.len());
    for comp in groups {
        let mut vs: Vec<VertexId> = Vec::new();
        for &e in &comp {
            let (a, b) = g.edge(e);
            vs.push(a);
            vs.push(b);
        }
        vs.sort_unstable();
        vs.dedup();
        let mut local = HashMap::new();
        for (i, &v) in vs.iter().enumerate() {
            local.insert(v, i);
        }
        let mut sub = Graph::new(vs.len());
        for &e in &comp {
            let (a, b) = g.edge(e);
            sub.add_edge(local[&a], local[&b]).unwrap();
        }
        out.push((sub, vs));
    }
    out
}

/// Any chordless cycle of `g`, or None iff `g` is acyclic.
///
/// Scans edges in index order and returns the shortest cycle through the
/// first edge that lies on one; shortest cycles through an edge are chordless.
pub fn find_chordless_cycle(g: &Graph) -> Option<Vec<VertexId>> {
    for e in 0..g.num_edges() {
        let (u, v) = g.edge(e);
        // BFS from u to v avoiding edge e.
        let n = g.num_vertices();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[u] = true;
        queue.push_back(u);
        'bfs: while let Some(x) = queue.pop_front() {
            for &(y, f) in g.adjacency(x) {
                if f == e || seen[y] {
                    continue;
                }
                seen[y] = true;
                parent[y] = x;
                if y == v {
                    break 'bfs;
                }
                queue.push_back(y);
            }
        }
        if seen[v] {
            let mut cycle = vec![v];
            let mut x = v;
            while x != u {
                x = parent[x];
                cycle.push(x);
            }
            cycle.reverse();
            return Some(cycle);
        }
    }
    None
}
