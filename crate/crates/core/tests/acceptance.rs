//! End-to-end acceptance gate. Each numbered check prints one PASS/FAIL
//! line; the test fails at the end if any check failed.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use crossmin::dual::{remove_vertex_dual, sip_fixed, sip_reference_oracle};
use crossmin::embed::Planarisation;
use crossmin::graph::Graph;
use crossmin::heuristic::MinScheme;
use crossmin::init::circle_init;
use crossmin::report::{conjecture_h, conjecture_z, sweep, InitScheme, SweepConfig};
use crossmin::{build_dual, generate, EmbeddingState, Family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALL_INITS: [InitScheme; 3] = [InitScheme::Circle, InitScheme::Planar, InitScheme::Spring];
const ALL_SCHEMES: [MinScheme; 3] = [MinScheme::First, MinScheme::Best, MinScheme::BiggestFace];

struct Gate {
    failures: Vec<String>,
    /// Errors or subdivision leaks observed in any verified sweep of
    /// checks 1-3 (shared evidence for checks 6 and 7).
    verified_run_problems: Vec<String>,
}

impl Gate {
    fn record(&mut self, criterion: usize, label: &str, ok: bool, detail: String) {
        println!(
            "criterion {criterion} ({label}): {} — {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures.push(format!("criterion {criterion}: {detail}"));
        }
    }

    /// Verified sweep used by checks 1-3: `verify` turns on the per-iteration
    /// invariant suite and the final independent local-optimality sweep
    /// inside the improvement loop, so checks 6 and 7 fail loudly here.
    fn verified_sweep(
        &mut self,
        g: &Graph,
        init: InitScheme,
        min_scheme: MinScheme,
        what: &str,
    ) -> Option<usize> {
        let cfg = SweepConfig {
            init,
            min_scheme,
            verify: true,
            ..Default::default()
        };
        match sweep(g, &cfg) {
            Ok(out) => {
                if out.best_embedding.has_subdivisions() {
                    self.verified_run_problems
                        .push(format!("{what}: subdivision vertices in final output"));
                }
                Some(out.report.best_cr)
            }
            Err(e) => {
                self.verified_run_problems.push(format!("{what}: {e}"));
                None
            }
        }
    }
}

fn criterion_1(gate: &mut Gate) {
    let mut bad = Vec::new();
    for n in 5..=12usize {
        let g = generate(Family::Complete { n }).unwrap();
        let got = gate.verified_sweep(&g, InitScheme::Planar, MinScheme::First, &format!("K{n}"));
        if got != Some(conjecture_h(n)) {
            bad.push(format!("K{n}: got {got:?}, want {}", conjecture_h(n)));
        }
    }
    gate.record(
        1,
        "complete graphs n=5..12, planar/first",
        bad.is_empty(),
        if bad.is_empty() {
            "best_cr = H(n) for all n".into()
        } else {
            bad.join("; ")
        },
    );
}

fn criterion_2(gate: &mut Gate) {
    let mut bad = Vec::new();
    for n in 13..=20usize {
        let g = generate(Family::Complete { n }).unwrap();
        let h = conjecture_h(n);
        for init in ALL_INITS {
            for ms in ALL_SCHEMES {
                let what = format!("K{n} {}/{:?}", init.label(), ms);
                let got = gate.verified_sweep(&g, init, ms, &what);
                let ok = match got {
                    None => false,
                    Some(b) => {
                        if init == InitScheme::Planar && ms == MinScheme::First {
                            b == h
                        } else {
                            // Exact or within 0.05% relative deviation.
                            b >= h && 100.0 * (b - h) as f64 / h as f64 <= 0.05
                        }
                    }
                };
                if !ok {
                    bad.push(format!("{what}: got {got:?}, want {h}"));
                }
            }
        }
    }
    gate.record(
        2,
        "complete graphs n=13..20, all nine combinations",
        bad.is_empty(),
        if bad.is_empty() {
            "best_cr = H(n) within tolerance for all combinations".into()
        } else {
            bad.join("; ")
        },
    );
}

fn criterion_3(gate: &mut Gate) {
    let mut bad = Vec::new();
    for n1 in 3..=8usize {
        for n2 in n1..=8usize {
            let g = generate(Family::CompleteBipartite { n1, n2 }).unwrap();
            let z = conjecture_z(n1, n2);
            let got = gate.verified_sweep(
                &g,
                InitScheme::Planar,
                MinScheme::First,
                &format!("K{n1},{n2}"),
            );
            if got != Some(z) {
                bad.push(format!("K{n1},{n2}: got {got:?}, want {z}"));
            }
        }
    }
    gate.record(
        3,
        "complete bipartite graphs 3<=n1<=n2<=8",
        bad.is_empty(),
        if bad.is_empty() {
            "best_cr = Z(n1,n2) for all sizes".into()
        } else {
            bad.join("; ")
        },
    );
}

fn criterion_4(gate: &mut Gate) {
    let mut bad = Vec::new();
    for n in 4..=12usize {
        let g = generate(Family::Complete { n }).unwrap();
        let want = n * (n - 1) * (n - 2) * (n - 3) / 24;
        match circle_init(&g) {
            Ok(es) => {
                if es.num_crossings() != want {
                    bad.push(format!("K{n}: {} vs C(n,4)={want}", es.num_crossings()));
                }
            }
            Err(e) => bad.push(format!("K{n}: {e}")),
        }
    }
    gate.record(
        4,
        "circle embedding of K_n has C(n,4) crossings",
        bad.is_empty(),
        if bad.is_empty() {
            "exact for n=4..12".into()
        } else {
            bad.join("; ")
        },
    );
}

/// `sip_fixed` on the contracted dual, set up as the improvement loop does.
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

fn random_connected_graph(rng: &mut ChaCha8Rng) -> Graph {
    let n = rng.gen_range(3..=10usize);
    let mut edges = Vec::new();
    for child in 1..n {
        edges.push((rng.gen_range(0..child), child));
    }
    for _ in 0..rng.gen_range(0..=(20 - (n - 1))) {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && !edges.contains(&(u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

fn criterion_5(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    let mut bad = Vec::new();
    let mut vertices_checked = 0usize;
    for i in 0..500 {
        let g = random_connected_graph(&mut rng);
        let es = circle_init(&g).unwrap();
        for v in 0..g.num_vertices() {
            let fast = fast_sip_cost(&es, &g, v);
            let slow = sip_reference_oracle(&es, &g, v).unwrap();
            vertices_checked += 1;
            if fast != slow {
                bad.push(format!("graph {i} vertex {v}: fast {fast} vs oracle {slow}"));
            }
        }
    }
    gate.record(
        5,
        "star insertion solver matches reference oracle",
        bad.is_empty(),
        if bad.is_empty() {
            format!("500 random graphs, {vertices_checked} vertex insertions agree")
        } else {
            bad.join("; ")
        },
    );
}

fn criterion_6_and_7(gate: &mut Gate) {
    let problems = gate.verified_run_problems.clone();
    gate.record(
        6,
        "invariant suite on every accepted iteration of criteria 1-3",
        problems.is_empty(),
        if problems.is_empty() {
            "no violations in any verified run".into()
        } else {
            problems.join("; ")
        },
    );
    gate.record(
        7,
        "independent local-optimality sweep at termination",
        problems.is_empty(),
        if problems.is_empty() {
            "no vertex admits a strict improvement in any final embedding".into()
        } else {
            problems.join("; ")
        },
    );
}

fn criterion_8(gate: &mut Gate) {
    let graphs: Vec<(String, Graph)> = vec![
        ("K8".into(), generate(Family::Complete { n: 8 }).unwrap()),
        (
            "K4,5".into(),
            generate(Family::CompleteBipartite { n1: 4, n2: 5 }).unwrap(),
        ),
        (
            "Petersen(5,2)".into(),
            generate(Family::Petersen { j: 5, k: 2 }).unwrap(),
        ),
    ];
    let mut bad = Vec::new();
    for (name, g) in &graphs {
        let run = |parallel: bool| {
            let cfg = SweepConfig {
                perms: 20,
                seed: 99,
                parallel,
                ..Default::default()
            };
            sweep(g, &cfg).unwrap()
        };
        let (a, b, c) = (run(false), run(false), run(true));
        let docs: Vec<_> = [&a, &b, &c]
            .iter()
            .map(|o| o.best_embedding.to_doc(None).unwrap())
            .collect();
        if a.report.canonical_json().unwrap() != b.report.canonical_json().unwrap()
            || b.report.canonical_json().unwrap() != c.report.canonical_json().unwrap()
        {
            bad.push(format!("{name}: sweep reports differ"));
        }
        if docs[0] != docs[1] || docs[1] != docs[2] {
            bad.push(format!("{name}: rotation exports differ"));
        }
    }
    gate.record(
        8,
        "determinism of repeated serial and parallel sweeps",
        bad.is_empty(),
        if bad.is_empty() {
            "identical reports and rotation exports across reruns".into()
        } else {
            bad.join("; ")
        },
    );
}

#[test]
fn acceptance() {
    let mut gate = Gate {
        failures: Vec::new(),
        verified_run_problems: Vec::new(),
    };
    criterion_1(&mut gate);
    criterion_2(&mut gate);
    criterion_3(&mut gate);
    criterion_4(&mut gate);
    criterion_5(&mut gate);
    criterion_6_and_7(&mut gate);
    criterion_8(&mut gate);
    assert!(
        gate.failures.is_empty(),
        "acceptance failures:\n{}",
        gate.failures.join("\n")
    );
}
