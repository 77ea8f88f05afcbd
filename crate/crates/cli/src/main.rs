//! Command-line driver: load or generate a graph, run a permutation sweep
//! of the crossing-minimisation heuristic, report, and export.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use crossmin::graph::load_edge_list;
use crossmin::init::{circle_coords, spring_coords};
use crossmin::report::{
    conjecture_h, conjecture_z, emit_svg, parse_min_scheme, sweep, InitScheme, SweepConfig,
};
use crossmin::{generate, Error, Family, Graph};

#[derive(Parser)]
#[command(
    name = "crossmin",
    version,
    about = "Heuristic crossing minimisation by iterative star re-insertion"
)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "gen"])))]
struct Cli {
    /// Edge-list file: one "u v" pair per line, '#' starts a comment.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Generated graph family with its parameters:
    /// complete N | complete_bipartite N1 N2 | cycle_product I J | petersen J K.
    #[arg(long, num_args = 2..=3, value_name = "FAMILY ARGS")]
    gen: Option<Vec<String>>,

    /// Initial embedding scheme.
    #[arg(long, default_value = "planar", value_parser = ["circle", "planar", "spring"])]
    init: String,

    /// Minimisation scheme: scan order of the vertex re-insertion.
    #[arg(long, default_value = "first", value_parser = ["first", "best", "bf"])]
    scheme: String,

    /// Number of random vertex permutations to sweep.
    #[arg(long, default_value_t = 100)]
    perms: usize,

    /// Master seed for the permutation stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Consecutive non-improving biggest-face scans before the bf scheme
    /// switches to first permanently.
    #[arg(long, default_value_t = 10)]
    bf_threshold: usize,

    /// Known crossing number to report deviation against (complete and
    /// complete-bipartite generators attach their conjectured value
    /// automatically).
    #[arg(long = "ref", value_name = "VALUE")]
    reference: Option<usize>,

    /// Output file prefix; exports are written as PREFIX.json,
    /// PREFIX.rotation.json and PREFIX.svg.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Comma-separated export formats (requires --out). `svg` draws the
    /// initial straight-line layout and needs a coordinate-based scheme
    /// (circle or spring).
    #[arg(long, value_delimiter = ',', requires = "out", value_parser = ["json", "rotation", "svg"])]
    emit: Vec<String>,
}

fn parse_gen(args: &[String]) -> Result<(Family, Option<usize>), String> {
    let num = |s: &String| -> Result<usize, String> {
        s.parse::<usize>()
            .map_err(|_| format!("'{s}' is not a valid size"))
    };
    match (args[0].as_str(), args.len() - 1) {
        ("complete", 1) => {
            let n = num(&args[1])?;
            Ok((Family::Complete { n }, Some(conjecture_h(n))))
        }
        ("complete_bipartite", 2) => {
            let (n1, n2) = (num(&args[1])?, num(&args[2])?);
            Ok((
                Family::CompleteBipartite { n1, n2 },
                Some(conjecture_z(n1, n2)),
            ))
        }
        ("cycle_product", 2) => {
            let (i, j) = (num(&args[1])?, num(&args[2])?);
            Ok((Family::CycleProduct { i, j }, None))
        }
        ("petersen", 2) => {
            let (j, k) = (num(&args[1])?, num(&args[2])?);
            Ok((Family::Petersen { j, k }, None))
        }
        (fam, argc) => Err(format!(
            "unknown generator '{fam}' with {argc} argument(s); expected \
             complete N, complete_bipartite N1 N2, cycle_product I J or petersen J K"
        )),
    }
}

/// Exit code contract: 0 success, 2 parse error, 3 validation/domain error.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Json(_) => 2,
        _ => 3,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code_for(&e))
}

fn load_graph(cli: &Cli) -> Result<(Graph, Option<Vec<u64>>, Option<usize>), ExitCode> {
    if let Some(path) = &cli.input {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return Err(ExitCode::from(2));
            }
        };
        let (g, load) = load_edge_list(&text).map_err(fail)?;
        if load.self_loops_dropped > 0 {
            eprintln!("note: dropped {} self-loop(s)", load.self_loops_dropped);
        }
        if load.duplicates_collapsed > 0 {
            eprintln!(
                "note: collapsed {} duplicate edge(s)",
                load.duplicates_collapsed
            );
        }
        if !load.isolated_removed.is_empty() {
            eprintln!(
                "note: removed isolated vertices {:?}",
                load.isolated_removed
            );
        }
        Ok((g, Some(load.labels), None))
    } else {
        let args = cli.gen.as_ref().unwrap();
        let (family, auto_ref) = parse_gen(args).map_err(|msg| {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        })?;
        let g = generate(family).map_err(fail)?;
        Ok((g, None, auto_ref))
    }
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    let (g, labels, auto_ref) = load_graph(&cli)?;
    let init = InitScheme::parse(&cli.init).expect("validated by clap");
    let cfg = SweepConfig {
        init,
        min_scheme: parse_min_scheme(&cli.scheme).expect("validated by clap"),
        bf_failure_threshold: cli.bf_threshold,
        perms: cli.perms,
        seed: cli.seed,
        reference: cli.reference.or(auto_ref),
        ..Default::default()
    };
    let outcome = sweep(&g, &cfg).map_err(fail)?;
    let report = &outcome.report;

    println!(
        "graph: {} vertices, {} edges",
        report.num_vertices, report.num_edges
    );
    println!(
        "sweep: {} permutation(s), init={}, scheme={}, seed={}",
        report.perms, report.init_scheme, report.min_scheme, report.seed
    );
    println!(
        "best crossings: {} (permutation {})",
        report.best_cr, report.best_perm
    );
    match (&report.reference, &report.deviation) {
        (Some(r), Some(d)) => println!("reference: {r}, deviation: {d}"),
        _ => {}
    }
    let (init_ms, loop_ms) = report
        .runs
        .iter()
        .fold((0.0, 0.0), |(a, b), r| (a + r.init_time_ms, b + r.loop_time_ms));
    println!("time: {init_ms:.1} ms initialising, {loop_ms:.1} ms in the main loop");

    if let Some(prefix) = &cli.out {
        let formats: Vec<&str> = if cli.emit.is_empty() {
            vec!["json"]
        } else {
            cli.emit.iter().map(|s| s.as_str()).collect()
        };
        for f in formats {
            let path = match f {
                "json" => {
                    let p = prefix.with_extension("json");
                    std::fs::write(&p, report.to_json().map_err(fail)?).map_err(|e| fail(e.into()))?;
                    p
                }
                "rotation" => {
                    let doc = outcome
                        .best_embedding
                        .to_doc(labels.clone())
                        .map_err(fail)?;
                    let p = prefix.with_extension("rotation.json");
                    let text = serde_json::to_string_pretty(&doc)
                        .map_err(|e| fail(Error::Json(e)))?;
                    std::fs::write(&p, text).map_err(|e| fail(e.into()))?;
                    p
                }
                "svg" => {
                    let coords = match init {
                        InitScheme::Circle => circle_coords(&g),
                        InitScheme::Spring => spring_coords(&g).map_err(fail)?,
                        InitScheme::Planar => {
                            eprintln!(
                                "error: svg export draws the initial straight-line layout, \
                                 but the planar scheme builds its embedding combinatorially \
                                 and has no coordinates; use --init circle or --init spring"
                            );
                            return Err(ExitCode::from(3));
                        }
                    };
                    let p = prefix.with_extension("svg");
                    std::fs::write(&p, emit_svg(&g, &coords).map_err(fail)?)
                        .map_err(|e| fail(e.into()))?;
                    p
                }
                _ => unreachable!("validated by clap"),
            };
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
