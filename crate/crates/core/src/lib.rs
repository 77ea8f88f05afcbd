//! Crossing minimisation by iterative star re-insertion.
//!
//! The crate represents drawings of a graph combinatorially (rotation system
//! plus crossing lists), plans re-insertions of a vertex star by shortest
//! paths in the dual of the planarisation, and wraps the local search in a
//! multi-start harness.

pub mod dual;
pub mod embed;
pub mod error;
pub mod generate;
pub mod graph;
pub mod heuristic;
pub mod init;
pub mod insert;
pub mod report;

pub use embed::{
    build_dual, from_straight_line_drawing, planarise, trace_faces, CrossingEntry, CrossingState,
    DualGraph, EdgeRecord, EmbeddingState, FaceSet, LayoutCoords, Planarisation, Violation,
};
pub use error::{Error, Result};
pub use generate::{generate, Family};
pub use graph::{
    apply_permutation, biconnected_components, load_edge_list, EdgeId, Graph, LoadReport,
    Permutation, VertexId,
};
