//! `genpf` command-line interface.
//!
//! Every command reads instance or scenario JSON, runs the corresponding
//! library operation and prints one report document to stdout. Exit code 0
//! means success, 2 a negative verdict (reducible, infeasible, verification
//! failure), 1 an error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use genpf::corpus::{random_irreducible_system, CorpusParams};
use genpf::irreducibility::{test_irreducible, ReducibilityWitness};
use genpf::json::{system_from_json, system_to_json};
use genpf::lp::{self, ArithmeticMode};
use genpf::numeric::{parse_rational, rat_to_f64};
use genpf::oracle::enumerate_solve;
use genpf::solver::{solve, GapMode, PfSolution, SearchTrace, SolverConfig};
use genpf::system::{GainSystem, Selection};
use genpf::verify::{verify_solution, verify_threshold};
use genpf::Error;

mod report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser)]
#[command(name = "genpf", version, about = "Generalized Perron-Frobenius solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for the report on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance: optimal beta, root and assignment.
    Solve {
        instance: PathBuf,
        /// Bracket width for the binary search.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Bracket to the theoretical gap in exact arithmetic
        /// (integer gains only; expensive beyond tiny systems).
        #[arg(long)]
        exact: bool,
        /// Write the search trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Decide irreducibility by cluster merging.
    CheckIrreducible {
        instance: PathBuf,
        /// Write the constraint graph in DOT form to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate every hidden square subsystem (ground truth).
    Oracle {
        instance: PathBuf,
        /// Maximum number of selections to enumerate.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Ask the feasibility oracle at one beta.
    Feasible {
        instance: PathBuf,
        /// Target beta, as a decimal or "p/q".
        #[arg(long)]
        beta: String,
        /// Decide in exact rational arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Generate instances from application scenarios.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Re-check a solution document against its instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Wireless power control: receivers, transmitters, path loss.
    PowerControl {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Round gains to rationals with denominator at most this.
        #[arg(long)]
        max_denominator: Option<u64>,
    },
    /// Input-output economy: industries and commodities.
    Economy {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Seeded random irreducible instance.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 2)]
        min_entities: usize,
        #[arg(long, default_value_t = 4)]
        max_entities: usize,
        #[arg(long, default_value_t = 9)]
        max_affectors: usize,
        #[arg(long, default_value_t = 1)]
        min_gain: i64,
        #[arg(long, default_value_t = 9)]
        max_gain: i64,
        /// Probability of a repressor gain per non-supporter pair.
        #[arg(long, default_value_t = 0.6)]
        density: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn read_instance(path: &Path) -> Result<(GainSystem, String), Error> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8_lossy(&bytes);
    let system = system_from_json(&text)?;
    Ok((system, report::input_sha256(&bytes)))
}

fn emit(format: Format, report: &Value, text: String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(report).expect("serializing report")
        ),
        Format::Text => println!("{text}"),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Solve {
            instance,
            tol,
            exact,
            trace,
        } => cmd_solve(cli.format, instance, *tol, *exact, trace.as_deref()),
        Command::CheckIrreducible { instance, dot } => {
            cmd_check_irreducible(cli.format, instance, dot.as_deref())
        }
        Command::Oracle { instance, budget } => cmd_oracle(cli.format, instance, *budget),
        Command::Feasible {
            instance,
            beta,
            exact,
        } => cmd_feasible(cli.format, instance, beta, *exact),
        Command::Gen { what } => cmd_gen(cli.format, what),
        Command::Verify { instance, solution } => cmd_verify(cli.format, instance, solution),
    }
}

fn cmd_solve(
    format: Format,
    instance: &Path,
    tol: f64,
    exact: bool,
    trace: Option<&Path>,
) -> Result<ExitCode, Error> {
    let (system, hash) = read_instance(instance)?;
    let violations = system.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidSystem(violations));
    }
    let (reduced, removed) = system.remove_redundant_affectors()?;
    let cfg = SolverConfig {
        tau: tol,
        gap_mode: if exact {
            GapMode::Theoretical
        } else {
            GapMode::Practical
        },
        ..SolverConfig::default()
    };
    let config_echo = json!({
        "tol": tol,
        "gap_mode": if exact { "theoretical" } else { "practical" },
        "max_retries": cfg.max_retries,
        "exact_verification": cfg.exact_verification,
        "tie_break": "lowest-index",
    });
    match solve(&reduced, &cfg) {
        Ok(sol) => {
            let expanded = expand_solution(&sol, &removed, system.affectors());
            if let Some(path) = trace {
                std::fs::write(
                    path,
                    serde_json::to_string_pretty(&report::trace_value(&sol))
                        .expect("serializing trace"),
                )
                .map_err(|e| Error::Parse(format!("cannot write trace: {e}")))?;
            }
            let result = report::solution_value(&expanded, &removed);
            let doc = report::run_report("solve", Some(hash), config_echo, "float+exact", None, result);
            let text = format!(
                "beta* = {} (root {})\nselection = {:?}\nx = {:?}",
                expanded.beta_star,
                expanded.root,
                expanded.selection.affectors(),
                expanded.x
            );
            emit(format, &doc, text);
            Ok(ExitCode::SUCCESS)
        }
        Err(Error::Reducible(rep)) => {
            let result = json!({
                "reducible": true,
                "witness": witness_value(rep.witness.as_ref()),
                "rounds": rep.rounds,
            });
            let doc = report::run_report("solve", Some(hash), config_echo, "exact", None, result);
            emit(format, &doc, format!("system is reducible: {}", rep.summary()));
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e),
    }
}

/// Re-expands a solution over the reduced system to the original affector
/// indексing, inserting zeros at removed columns.
fn expand_solution(sol: &PfSolution, removed: &[usize], original_m: usize) -> PfSolution {
    if removed.is_empty() {
        return sol.clone();
    }
    let mut map = Vec::new(); // reduced index -> original index
    for j in 0..original_m {
        if !removed.contains(&j) {
            map.push(j);
        }
    }
    let mut x = vec![0.0; original_m];
    for (k, &v) in sol.x.iter().enumerate() {
        x[map[k]] = v;
    }
    let selection = Selection::complete(
        &sol.selection
            .affectors()
            .iter()
            .map(|&a| map[a])
            .collect::<Vec<_>>(),
    );
    PfSolution {
        x,
        selection,
        ..sol.clone()
    }
}

fn witness_value(witness: Option<&ReducibilityWitness>) -> Value {
    match witness {
        None => Value::Null,
        Some(ReducibilityWitness::OverlappingSupporters { affector, entities }) => json!({
            "kind": "overlapping-supporters",
            "affector": affector,
            "entities": [entities.0, entities.1],
        }),
        Some(ReducibilityWitness::ReducibleSelection(sel)) => json!({
            "kind": "reducible-selection",
            "selection": sel.affectors(),
        }),
        Some(ReducibilityWitness::StuckClusterGraph { partition, edges }) => json!({
            "kind": "stuck-cluster-graph",
            "round": partition.round,
            "clusters": partition.clusters,
            "edges": edges,
        }),
    }
}

fn cmd_check_irreducible(
    format: Format,
    instance: &Path,
    dot: Option<&Path>,
) -> Result<ExitCode, Error> {
    let (system, hash) = read_instance(instance)?;
    let (reduced, removed) = system.remove_redundant_affectors()?;
    if let Some(path) = dot {
        let graph = genpf::graph::build_constraint_graph(&reduced);
        std::fs::write(path, graph.to_dot())
            .map_err(|e| Error::Parse(format!("cannot write dot file: {e}")))?;
    }
    let report_data = test_irreducible(&reduced)?;
    let result = json!({
        "irreducible": report_data.irreducible,
        "rounds": report_data.rounds,
        "witness": witness_value(report_data.witness.as_ref()),
        "removed_affectors": removed,
    });
    let doc = report::run_report(
        "check-irreducible",
        Some(hash),
        json!({}),
        "exact",
        None,
        result,
    );
    emit(format, &doc, report_data.summary());
    Ok(if report_data.irreducible {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_oracle(format: Format, instance: &Path, budget: u64) -> Result<ExitCode, Error> {
    let (system, hash) = read_instance(instance)?;
    let (reduced, _) = system.remove_redundant_affectors()?;
    let oracle = enumerate_solve(&reduced, budget)?;
    let result = json!({
        "best_beta": report::number(
            oracle.best_beta,
            None,
        ),
        "best_root": report::number(
            oracle.best_root,
            oracle.best_root_interval.as_ref().map(|(lo, hi)| (lo, hi)),
        ),
        "optimal_selections": oracle
            .optimal_selections
            .iter()
            .map(|s| s.affectors())
            .collect::<Vec<_>>(),
        "table": oracle.table.iter().map(|e| json!({
            "selection": e.selection.affectors(),
            "root": e.root,
        })).collect::<Vec<_>>(),
        "enumerated": oracle.enumerated,
    });
    let doc = report::run_report(
        "oracle",
        Some(hash),
        json!({ "budget": budget }),
        "float+exact",
        None,
        result,
    );
    let text = format!(
        "best beta = {} over {} selections",
        oracle.best_beta, oracle.enumerated
    );
    emit(format, &doc, text);
    Ok(ExitCode::SUCCESS)
}

fn cmd_feasible(
    format: Format,
    instance: &Path,
    beta: &str,
    exact: bool,
) -> Result<ExitCode, Error> {
    let (system, hash) = read_instance(instance)?;
    let beta = parse_rational(beta)?;
    let mode = if exact {
        ArithmeticMode::Exact
    } else {
        ArithmeticMode::Float
    };
    let verdict = lp::feasible(&system, &beta, mode)?;
    let result = json!({
        "feasible": verdict.feasible,
        "beta": rat_to_f64(&beta),
        "witness": verdict.witness,
        "max_violation": verdict.max_violation,
        "mode": verdict.mode.to_string(),
    });
    let doc = report::run_report(
        "feasible",
        Some(hash),
        json!({ "beta": genpf::numeric::format_rational(&beta), "exact": exact }),
        &verdict.mode.to_string(),
        None,
        result,
    );
    let text = format!(
        "beta = {} is {}",
        rat_to_f64(&beta),
        if verdict.feasible { "feasible" } else { "infeasible" }
    );
    emit(format, &doc, text);
    Ok(if verdict.feasible {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_gen(format: Format, what: &GenCommand) -> Result<ExitCode, Error> {
    let (command, system, output, hash, seed, config) = match what {
        GenCommand::PowerControl {
            spec,
            output,
            max_denominator,
        } => {
            let bytes = std::fs::read(spec)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", spec.display())))?;
            let scenario: genpf::apps::MisoScenario = serde_json::from_slice(&bytes)
                .map_err(|e| Error::Parse(format!("invalid scenario: {e}")))?;
            let system = genpf::apps::miso_to_system(&scenario, *max_denominator)?;
            (
                "gen power-control",
                system,
                output,
                Some(report::input_sha256(&bytes)),
                None,
                json!({ "max_denominator": max_denominator }),
            )
        }
        GenCommand::Economy { spec, output } => {
            let bytes = std::fs::read(spec)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", spec.display())))?;
            let scenario: genpf::apps::EconomyScenario = serde_json::from_slice(&bytes)
                .map_err(|e| Error::Parse(format!("invalid scenario: {e}")))?;
            let system = genpf::apps::economy_to_system(&scenario)?;
            (
                "gen economy",
                system,
                output,
                Some(report::input_sha256(&bytes)),
                None,
                json!({}),
            )
        }
        GenCommand::Random {
            seed,
            output,
            min_entities,
            max_entities,
            max_affectors,
            min_gain,
            max_gain,
            density,
        } => {
            let params = CorpusParams {
                entities: (*min_entities, *max_entities),
                supporters_per_entity: (1, 3),
                max_affectors: *max_affectors,
                gain_range: (*min_gain, *max_gain),
                repressor_density: *density,
            };
            let (system, rejected) = random_irreducible_system(*seed, &params)?;
            (
                "gen random",
                system,
                output,
                None,
                Some(*seed),
                json!({
                    "entities": [min_entities, max_entities],
                    "max_affectors": max_affectors,
                    "gains": [min_gain, max_gain],
                    "density": density,
                    "rejected_candidates": rejected,
                }),
            )
        }
    };
    std::fs::write(output, system_to_json(&system))
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", output.display())))?;
    let result = json!({
        "output": output.display().to_string(),
        "n": system.entities(),
        "m": system.affectors(),
    });
    let doc = report::run_report(command, hash, config, "exact", seed, result);
    let text = format!(
        "wrote {} ({} entities, {} affectors)",
        output.display(),
        system.entities(),
        system.affectors()
    );
    emit(format, &doc, text);
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(format: Format, instance: &Path, solution: &Path) -> Result<ExitCode, Error> {
    let (system, hash) = read_instance(instance)?;
    let bytes = std::fs::read(solution)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", solution.display())))?;
    let doc: Value = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Parse(format!("invalid solution JSON: {e}")))?;
    // Accept either a full run report or the bare result object.
    let result = doc.get("result").unwrap_or(&doc);
    let beta_star = result
        .pointer("/beta_star/decimal")
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse("solution lacks beta_star.decimal".into()))?;
    let x: Vec<f64> = result
        .get("x")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("solution lacks x".into()))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| Error::Parse("non-numeric x entry".into())))
        .collect::<Result<_, _>>()?;
    let selection: Vec<usize> = result
        .get("selection")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("solution lacks selection".into()))?
        .iter()
        .map(|v| {
            v.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| Error::Parse("non-integer selection entry".into()))
        })
        .collect::<Result<_, _>>()?;

    let residuals = lp::residuals(&system, &x, beta_star)?;
    let claimed = PfSolution {
        beta_star,
        root: 1.0 / beta_star,
        x,
        selection: Selection::complete(&selection),
        residuals,
        exact: None,
        trace: SearchTrace::default(),
        elimination: Vec::new(),
        tau_used: 0.0,
        retries_used: 0,
        log2_theoretical_gap: 0.0,
        tau_meets_theoretical_gap: false,
        pf_iterations: 0,
        pf_residual: 0.0,
    };
    let mut checks = verify_solution(&system, &claimed)?.checks;
    checks.extend(verify_threshold(&system, beta_star, 1e-9)?.checks);
    let passed = checks.iter().all(|c| c.passed);
    let result = json!({
        "passed": passed,
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
    });
    let doc = report::run_report("verify", Some(hash), json!({}), "float+exact", None, result);
    let text = if passed {
        "solution verifies".to_string()
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        format!("verification failed: {failed:?}")
    };
    emit(format, &doc, text);
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}
