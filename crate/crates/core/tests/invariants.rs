//! Property tests: structural invariants of embeddings produced by the
//! initialisers and the improvement loop, plus agreement of the fast star
//! insertion solver with an independent reference implementation.

use crossmin::dual::{remove_vertex_dual, sip_fixed, sip_reference_oracle};
use crossmin::embed::Planarisation;
use crossmin::graph::Graph;
use crossmin::heuristic::{run, HeuristicConfig};
use crossmin::init::{circle_crossing_count, circle_init, planar_init};
use crossmin::{build_dual, EmbeddingState};
use proptest::prelude::*;

/// Random connected graph with 3..=10 vertices and at most 20 edges:
/// a random spanning tree plus random extra edges.
fn connected_graph() -> impl Strategy<Value = Graph> {
    (3usize..=10)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
            let extra = proptest::collection::vec(
                (any::<prop::sample::Index>(), any::<prop::sample::Index>()),
                0..=(20 - (n - 1)).min(2 * n),
            );
            (Just(n), tree, extra)
        })
        .prop_map(|(n, tree, extra)| {
            let mut edges = Vec::new();
            for (i, p) in tree.iter().enumerate() {
                let child = i + 1;
                edges.push((p.index(child), child));
            }
            for (a, b) in extra {
                let (u, v) = (a.index(n), b.index(n));
                if u != v && !edges.contains(&(u.min(v), u.max(v))) {
                    edges.push((u.min(v), u.max(v)));
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
}

/// `sip_fixed` on the contracted dual, set up exactly as the improvement
/// loop does it.
fn fast_sip_cost(es: &EmbeddingState, g: &Graph, v: usize) -> usize {
    let plan = Planarisation::build(es).unwrap();
    let fs = plan.trace_faces().unwrap();
    let dual = build_dual(&plan, &fs);
    let mut works = Vec::new();
    for &(_, orig) in g.adjacency(v) {
        works.extend(es.working_edges_of(orig));
    }
    let mut removed = remove_vertex_dual(&dual, &plan, &works);
    let mut nbrs: Vec<usize> = g.adjacency(v).iter().map(|&(w, _)| w).collect();
    nbrs.sort_unstable();
    sip_fixed(&plan, &fs, &mut removed, &nbrs).unwrap().new_cr
}

proptest! {
    /// The circle initialiser is valid and its crossing total matches the
    /// purely combinatorial interleaving count.
    #[test]
    fn circle_init_is_valid(g in connected_graph()) {
        let es = circle_init(&g).unwrap();
        prop_assert!(es.validate().is_empty());
        prop_assert_eq!(es.num_crossings(), circle_crossing_count(&g));
        prop_assert!(!es.has_subdivisions());
    }

    /// The planar initialiser is valid and never worse than the circle one.
    #[test]
    fn planar_init_is_valid(g in connected_graph()) {
        let es = planar_init(&g).unwrap();
        prop_assert!(es.validate().is_empty());
        prop_assert!(es.num_crossings() <= circle_crossing_count(&g));
    }

    /// A full improvement run keeps every invariant, never increases the
    /// crossing count, and ends subdivision-free on the original graph.
    #[test]
    fn improvement_run_invariants(g in connected_graph()) {
        let es = circle_init(&g).unwrap();
        let initial = es.num_crossings();
        let cfg = HeuristicConfig { verify: true, ..Default::default() };
        let (fin, stats) = run(&g, es, &cfg).unwrap();
        prop_assert!(fin.validate().is_empty());
        prop_assert!(!fin.has_subdivisions());
        prop_assert_eq!(fin.graph.num_edges(), g.num_edges());
        prop_assert_eq!(stats.initial_cr, initial);
        prop_assert!(stats.final_cr <= initial);
        prop_assert_eq!(fin.num_crossings(), stats.final_cr);
        prop_assert!(stats.iterations <= initial.max(1));
    }

    /// The fast star insertion solver agrees with the slow per-face oracle
    /// for every vertex of the graph.
    #[test]
    fn sip_matches_reference(g in connected_graph()) {
        let es = circle_init(&g).unwrap();
        for v in 0..g.num_vertices() {
            let fast = fast_sip_cost(&es, &g, v);
            let slow = sip_reference_oracle(&es, &g, v).unwrap();
            prop_assert_eq!(fast, slow, "vertex {}", v);
        }
    }

    /// Exporting a final embedding to the rotation document and re-importing
    /// it reproduces the same rotation and crossing data.
    #[test]
    fn rotation_doc_round_trip(g in connected_graph()) {
        let es = circle_init(&g).unwrap();
        let cfg = HeuristicConfig::default();
        let (fin, _) = run(&g, es, &cfg).unwrap();
        let doc = fin.to_doc(None).unwrap();
        let json = serde_json::to_string(&doc).unwrap();
        let back: crossmin::embed::RotationDoc = serde_json::from_str(&json).unwrap();
        let re = EmbeddingState::from_doc(&back).unwrap();
        prop_assert_eq!(re.num_crossings(), fin.num_crossings());
        prop_assert_eq!(&re.rotation, &fin.rotation);
        prop_assert_eq!(&re.crossings.order, &fin.crossings.order);
    }
}
