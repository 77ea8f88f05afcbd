//! Combinatorial embedding state: rotation system plus crossing bookkeeping.
//!
//! An embedding of the working graph is stored as one record per edge (the
//! four clockwise/anticlockwise neighbour indices around its endpoints),
//! together with per-edge crossing order lists and crossing orientations.
//! The planarisation (crossings replaced by degree-4 dummy vertices) is
//! derived from this state in `planar`.

mod geometry;
mod planar;

pub use geometry::{from_straight_line_drawing, LayoutCoords};
pub use planar::{
    build_dual, planarise, trace_faces, Dart, DualGraph, Extraction, FaceSet, PEdge, Planarisation,
};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use serde::{Deserialize, Serialize};

/// Rotation record for one edge (u, v) with u < v: the edge ids immediately
/// clockwise and anticlockwise around each endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRecord {
    pub u: VertexId,
    pub v: VertexId,
    pub cw_u: EdgeId,
    pub ccw_u: EdgeId,
    pub cw_v: EdgeId,
    pub ccw_v: EdgeId,
}

impl EdgeRecord {
    pub fn cw_at(&self, x: VertexId) -> EdgeId {
        if x == self.u {
            self.cw_u
        } else {
            debug_assert_eq!(x, self.v);
            self.cw_v
        }
    }

    pub fn ccw_at(&self, x: VertexId) -> EdgeId {
        if x == self.u {
            self.ccw_u
        } else {
            debug_assert_eq!(x, self.v);
            self.ccw_v
        }
    }
}

/// One crossing on an edge's order list: the partner edge and the stored
/// orientation sign as seen from this list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingEntry {
    pub other: EdgeId,
    /// +1 iff clockwise around the dummy vertex the end directions read
    /// u1, u2, v1, v2 (u1 < v1 the endpoints of the list-owning edge,
    /// u2 < v2 those of the partner). The partner's list stores the
    /// negated sign for the same crossing.
    pub orientation: i8,
}

/// Crossing order and orientation lists (one list per working edge, ordered
/// from the endpoint with the smaller label), plus the crossing count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CrossingState {
    pub order: Vec<Vec<CrossingEntry>>,
    pub total: usize,
}

impl CrossingState {
    pub fn empty(num_edges: usize) -> Self {
        CrossingState {
            order: vec![Vec::new(); num_edges],
            total: 0,
        }
    }

    pub fn recount(&self) -> usize {
        let entries: usize = self.order.iter().map(|l| l.len()).sum();
        entries / 2
    }
}

/// A chain of working edges produced by subdividing one original edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub orig: EdgeId,
    /// Working edge ids along the chain, starting at the original edge's
    /// smaller endpoint.
    pub working: Vec<EdgeId>,
    /// Interior subdivision vertices in the same order.
    pub interior: Vec<VertexId>,
}

/// A combinatorial embedding of the working graph, with crossing lists.
///
/// The working graph equals the underlying graph except while subdivision
/// chains are registered; subdivision vertices have ids >= `num_real_vertices`.
#[derive(Debug, Clone)]
pub struct EmbeddingState {
    pub graph: Graph,
    pub rotation: Vec<EdgeRecord>,
    pub crossings: CrossingState,
    pub num_real_vertices: usize,
    /// Working edge id -> original edge id.
    pub edge_orig: Vec<EdgeId>,
    pub chains: Vec<Chain>,
}

/// A single validation failure; violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    BadRecord { edge: EdgeId, msg: String },
    RotationClosure { vertex: VertexId },
    RotationInverse { vertex: VertexId, edge: EdgeId },
    CrossingSymmetry { e1: EdgeId, e2: EdgeId },
    OrientationSign { e1: EdgeId, e2: EdgeId },
    MultiCrossing { e1: EdgeId, e2: EdgeId },
    SelfCrossing { edge: EdgeId },
    TotalMismatch { stored: usize, computed: usize },
    Euler { component: usize, vertices: usize, edges: usize, faces: usize },
    Planarise { msg: String },
}

impl EmbeddingState {
    /// Embedding with no crossings from per-vertex clockwise cyclic orders.
    pub fn planar_from_cyclic(graph: Graph, cyclic: &[Vec<EdgeId>]) -> Result<Self> {
        let m = graph.num_edges();
        let n = graph.num_vertices();
        let rotation = records_from_cyclic(&graph, cyclic)?;
        Ok(EmbeddingState {
            rotation,
            crossings: CrossingState::empty(m),
            num_real_vertices: n,
            edge_orig: (0..m).collect(),
            chains: Vec::new(),
            graph,
        })
    }

    pub fn num_crossings(&self) -> usize {
        self.crossings.total
    }

    pub fn has_subdivisions(&self) -> bool {
        !self.chains.is_empty()
    }

    /// Working edges carrying the given original edge, in chain order.
    pub fn working_edges_of(&self, orig: EdgeId) -> Vec<EdgeId> {
        for c in &self.chains {
            if c.orig == orig {
                return c.working.clone();
            }
        }
        // Identity outside chains: locate by edge_orig.
        self.edge_orig
            .iter()
            .enumerate()
            .filter(|&(_, &o)| o == orig)
            .map(|(e, _)| e)
            .collect()
    }

    /// Clockwise cyclic order of edges around `v`, from the rotation records.
    pub fn cyclic_at(&self, v: VertexId) -> std::result::Result<Vec<EdgeId>, Violation> {
        let deg = self.graph.degree(v);
        if deg == 0 {
            return Ok(Vec::new());
        }
        let start = self.graph.adjacency(v)[0].1;
        let mut out = Vec::with_capacity(deg);
        let mut e = start;
        loop {
            out.push(e);
            if out.len() > deg {
                return Err(Violation::RotationClosure { vertex: v });
            }
            e = self.rotation[e].cw_at(v);
            if e == start {
                break;
            }
        }
        if out.len() != deg {
            return Err(Violation::RotationClosure { vertex: v });
        }
        let mut seen = out.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != deg {
            return Err(Violation::RotationClosure { vertex: v });
        }
        Ok(out)
    }

    /// Crossings on the edges incident to vertex `v` (each counted once, also
    /// when both crossing edges are incident to `v`). Chains are expanded.
    pub fn crossings_at_vertex(&self, v: VertexId, orig_graph: &Graph) -> usize {
        let mut incident = vec![false; self.graph.num_edges()];
        for &(_, orig_e) in orig_graph.adjacency(v) {
            for we in self.working_edges_of(orig_e) {
                incident[we] = true;
            }
        }
        let mut total = 0usize;
        let mut within = 0usize;
        for (e, flag) in incident.iter().enumerate() {
            if !flag {
                continue;
            }
            total += self.crossings.order[e].len();
            within += self.crossings.order[e]
                .iter()
                .filter(|c| incident[c.other])
                .count();
        }
        total - within / 2
    }

    /// All embedding invariants; empty iff the state is consistent.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let g = &self.graph;
        for (e, r) in self.rotation.iter().enumerate() {
            let (u, v) = g.edge(e);
            if r.u != u || r.v != v || r.u >= r.v {
                out.push(Violation::BadRecord {
                    edge: e,
                    msg: format!("record endpoints ({},{}) vs graph ({u},{v})", r.u, r.v),
                });
            }
        }
        if !out.is_empty() {
            return out;
        }
        // Rotation closure and cw/ccw inversity.
        for v in 0..g.num_vertices() {
            match self.cyclic_at(v) {
                Ok(cyc) => {
                    for (i, &e) in cyc.iter().enumerate() {
                        let next = cyc[(i + 1) % cyc.len()];
                        if self.rotation[next].ccw_at(v) != e {
                            out.push(Violation::RotationInverse { vertex: v, edge: next });
                        }
                    }
                }
                Err(viol) => out.push(viol),
            }
        }
        // Crossing list symmetry, signs, multiplicity.
        let m = g.num_edges();
        for e1 in 0..m {
            for entry in &self.crossings.order[e1] {
                let e2 = entry.other;
                if e2 == e1 {
                    out.push(Violation::SelfCrossing { edge: e1 });
                    continue;
                }
                if e2 >= m {
                    out.push(Violation::CrossingSymmetry { e1, e2 });
                    continue;
                }
                // Crossings between edges sharing an endpoint are permitted:
                // an insertion path may cross a far segment of an edge
                // incident to its target, and a later iteration removes it.
                if e1 < e2 {
                    let here = self.crossings.order[e1]
                        .iter()
                        .filter(|c| c.other == e2)
                        .count();
                    let there = self.crossings.order[e2]
                        .iter()
                        .filter(|c| c.other == e1)
                        .count();
                    if here != there {
                        out.push(Violation::CrossingSymmetry { e1, e2 });
                    } else if here > 1 {
                        out.push(Violation::MultiCrossing { e1, e2 });
                    } else {
                        let s1 = entry.orientation;
                        let s2 = self.crossings.order[e2]
                            .iter()
                            .find(|c| c.other == e1)
                            .map(|c| c.orientation)
                            .unwrap_or(0);
                        if s1 * s2 != -1 {
                            out.push(Violation::OrientationSign { e1, e2 });
                        }
                    }
                }
            }
        }
        let computed = self.crossings.recount();
        if computed != self.crossings.total {
            out.push(Violation::TotalMismatch {
                stored: self.crossings.total,
                computed,
            });
        }
        if !out.is_empty() {
            return out;
        }
        // Euler identity on the planarisation, per connected component.
        match planar::Planarisation::build(self) {
            Ok(p) => match p.trace_faces() {
                Ok(fs) => out.extend(p.euler_violations(&fs)),
                Err(e) => out.push(Violation::Planarise { msg: e.to_string() }),
            },
            Err(e) => out.push(Violation::Planarise { msg: e.to_string() }),
        }
        out
    }

    pub fn require_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Re-key the state onto `target`, whose edge set must equal the working
    /// graph's (as unordered endpoint pairs). Used to translate an embedding
    /// built with private edge ids back onto the caller's graph.
    pub fn remap_to(&self, target: &Graph) -> Result<EmbeddingState> {
        if self.has_subdivisions() {
            return Err(Error::Consistency(
                "cannot remap an embedding with live subdivisions".into(),
            ));
        }
        if target.num_vertices() != self.graph.num_vertices()
            || target.num_edges() != self.graph.num_edges()
        {
            return Err(Error::Consistency("remap target size mismatch".into()));
        }
        let mut to_new = vec![usize::MAX; self.graph.num_edges()];
        for (e, &(u, v)) in self.graph.edges().iter().enumerate() {
            let t = target.edge_between(u, v).ok_or_else(|| {
                Error::Consistency(format!("remap target missing edge ({u},{v})"))
            })?;
            to_new[e] = t;
        }
        let m = target.num_edges();
        let mut rotation = vec![
            EdgeRecord {
                u: 0,
                v: 0,
                cw_u: 0,
                ccw_u: 0,
                cw_v: 0,
                ccw_v: 0
            };
            m
        ];
        for (e, r) in self.rotation.iter().enumerate() {
            rotation[to_new[e]] = EdgeRecord {
                u: r.u,
                v: r.v,
                cw_u: to_new[r.cw_u],
                ccw_u: to_new[r.ccw_u],
                cw_v: to_new[r.cw_v],
                ccw_v: to_new[r.ccw_v],
            };
        }
        let mut order = vec![Vec::new(); m];
        for (e, list) in self.crossings.order.iter().enumerate() {
            order[to_new[e]] = list
                .iter()
                .map(|c| CrossingEntry {
                    other: to_new[c.other],
                    orientation: c.orientation,
                })
                .collect();
        }
        Ok(EmbeddingState {
            graph: target.clone(),
            rotation,
            crossings: CrossingState {
                order,
                total: self.crossings.total,
            },
            num_real_vertices: target.num_vertices(),
            edge_orig: (0..m).collect(),
            chains: Vec::new(),
        })
    }
}

/// Build rotation records from per-vertex clockwise cyclic edge orders.
pub fn records_from_cyclic(graph: &Graph, cyclic: &[Vec<EdgeId>]) -> Result<Vec<EdgeRecord>> {
    let m = graph.num_edges();
    let mut rotation: Vec<EdgeRecord> = graph
        .edges()
        .iter()
        .map(|&(u, v)| EdgeRecord {
            u,
            v,
            cw_u: usize::MAX,
            ccw_u: usize::MAX,
            cw_v: usize::MAX,
            ccw_v: usize::MAX,
        })
        .collect();
    for v in 0..graph.num_vertices() {
        let cyc = &cyclic[v];
        if cyc.len() != graph.degree(v) {
            return Err(Error::Consistency(format!(
                "cyclic order at vertex {v} has {} edges, degree is {}",
                cyc.len(),
                graph.degree(v)
            )));
        }
        for (i, &e) in cyc.iter().enumerate() {
            let cw = cyc[(i + 1) % cyc.len()];
            let ccw = cyc[(i + cyc.len() - 1) % cyc.len()];
            let r = &mut rotation[e];
            if v == r.u {
                r.cw_u = cw;
                r.ccw_u = ccw;
            } else if v == r.v {
                r.cw_v = cw;
                r.ccw_v = ccw;
            } else {
                return Err(Error::Consistency(format!(
                    "edge {e} listed at vertex {v} but is not incident"
                )));
            }
        }
    }
    for (e, r) in rotation.iter().enumerate() {
        if r.cw_u == usize::MAX || r.cw_v == usize::MAX {
            return Err(Error::Consistency(format!(
                "edge {e} missing from a cyclic order"
            )));
        }
    }
    let _ = m;
    Ok(rotation)
}

// ---------------------------------------------------------------------------
// Canonical rotation-system exchange format (JSON).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationDoc {
    pub schema_version: u32,
    pub num_vertices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<u64>>,
    pub edges: Vec<EdgeDoc>,
    pub crossings: Vec<CrossingDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub cw_u: usize,
    pub ccw_u: usize,
    pub cw_v: usize,
    pub ccw_v: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingDoc {
    pub e1: usize,
    pub e2: usize,
    /// Position of this crossing in e1's order list.
    pub pos1: usize,
    /// Position in e2's order list.
    pub pos2: usize,
    /// Sign as stored on e1's side (e1 < e2).
    pub orientation: i8,
}

pub const ROTATION_SCHEMA_VERSION: u32 = 1;

impl EmbeddingState {
    pub fn to_doc(&self, labels: Option<Vec<u64>>) -> Result<RotationDoc> {
        if self.has_subdivisions() {
            return Err(Error::Consistency(
                "cannot export an embedding with live subdivisions".into(),
            ));
        }
        let edges = self
            .rotation
            .iter()
            .enumerate()
            .map(|(id, r)| EdgeDoc {
                id,
                u: r.u,
                v: r.v,
                cw_u: r.cw_u,
                ccw_u: r.ccw_u,
                cw_v: r.cw_v,
                ccw_v: r.ccw_v,
            })
            .collect();
        let mut crossings = Vec::with_capacity(self.crossings.total);
        for (e1, list) in self.crossings.order.iter().enumerate() {
            for (pos1, c) in list.iter().enumerate() {
                if c.other < e1 {
                    continue;
                }
                let e2 = c.other;
                let pos2 = self.crossings.order[e2]
                    .iter()
                    .position(|x| x.other == e1)
                    .ok_or_else(|| Error::Consistency("asymmetric crossing list".into()))?;
                crossings.push(CrossingDoc {
                    e1,
                    e2,
                    pos1,
                    pos2,
                    orientation: c.orientation,
                });
            }
        }
        Ok(RotationDoc {
            schema_version: ROTATION_SCHEMA_VERSION,
            num_vertices: self.graph.num_vertices(),
            labels,
            edges,
            crossings,
        })
    }

    /// Rebuild an embedding from a rotation document; rejects inconsistent
    /// documents through `validate()`.
    pub fn from_doc(doc: &RotationDoc) -> Result<EmbeddingState> {
        if doc.schema_version != ROTATION_SCHEMA_VERSION {
            return Err(Error::Consistency(format!(
                "unsupported rotation schema version {}",
                doc.schema_version
            )));
        }
        let mut g = Graph::new(doc.num_vertices);
        for (i, e) in doc.edges.iter().enumerate() {
            if e.id != i {
                return Err(Error::Consistency("edge ids must be 0..m in order".into()));
            }
            g.add_edge(e.u, e.v)?;
        }
        let rotation: Vec<EdgeRecord> = doc
            .edges
            .iter()
            .map(|e| EdgeRecord {
                u: e.u.min(e.v),
                v: e.u.max(e.v),
                cw_u: e.cw_u,
                ccw_u: e.ccw_u,
                cw_v: e.cw_v,
                ccw_v: e.ccw_v,
            })
            .collect();
        let m = doc.edges.len();
        for r in &rotation {
            for x in [r.cw_u, r.ccw_u, r.cw_v, r.ccw_v] {
                if x >= m {
                    return Err(Error::Consistency("rotation index out of range".into()));
                }
            }
        }
        let mut order: Vec<Vec<Option<CrossingEntry>>> = vec![Vec::new(); m];
        for c in &doc.crossings {
            if c.e1 >= m || c.e2 >= m || c.e1 >= c.e2 || c.orientation.abs() != 1 {
                return Err(Error::Consistency("bad crossing record".into()));
            }
            for (e, pos, other, sign) in [
                (c.e1, c.pos1, c.e2, c.orientation),
                (c.e2, c.pos2, c.e1, -c.orientation),
            ] {
                if order[e].len() <= pos {
                    order[e].resize(pos + 1, None);
                }
                if order[e][pos].is_some() {
                    return Err(Error::Consistency(format!(
                        "duplicate crossing position {pos} on edge {e}"
                    )));
                }
                order[e][pos] = Some(CrossingEntry {
                    other,
                    orientation: sign,
                });
            }
        }
        let mut filled = Vec::with_capacity(m);
        for (e, list) in order.into_iter().enumerate() {
            let mut l = Vec::with_capacity(list.len());
            for (pos, item) in list.into_iter().enumerate() {
                l.push(item.ok_or_else(|| {
                    Error::Consistency(format!("gap at position {pos} of edge {e}'s order"))
                })?);
            }
            filled.push(l);
        }
        let total = doc.crossings.len();
        let state = EmbeddingState {
            num_real_vertices: g.num_vertices(),
            edge_orig: (0..m).collect(),
            chains: Vec::new(),
            rotation,
            crossings: CrossingState {
                order: filled,
                total,
            },
            graph: g,
        };
        state.require_valid()?;
        Ok(state)
    }
}
