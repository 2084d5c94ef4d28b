use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fk_coarse::config::{parse_text, SCHEMA};
use fk_coarse::reproduce::ReproduceError;
use fk_coarse::{
    exit_code, records, reproduce, Experiment, ExperimentConfig, EXIT_CONFIG, EXIT_FAILURE,
    EXIT_OK, EXIT_VIOLATION,
};

#[derive(Parser)]
#[command(
    name = "fk-coarse",
    version,
    about = "Experiments on random-cluster measures in random media"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Configuration file; defaults apply to absent keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key=value` override, dotted keys; may repeat.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Master seed; overrides a `seed` key in the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Exact edge marginals of a small box, free and wired.
    Enumerate(RunArgs),
    /// Exhaustive inequality checks over small bond animals.
    Verify(RunArgs),
    /// Averaged conditional law of the three-vertex counterexample.
    DlrFailure(RunArgs),
    /// Probability of a unique large crossing cluster.
    Crossing(RunArgs),
    /// Crossing-cluster density against the theta bracket.
    Density(RunArgs),
    /// Finite-volume theta estimates.
    Theta(RunArgs),
    /// Connectivity in a slab under free boundary conditions.
    Slab(RunArgs),
    /// Block product measure against the averaged free measure.
    PsiDomination(RunArgs),
    /// Phase labels of dilute Ising samples and their invariants.
    PhaseLabels(RunArgs),
    /// Brute-force audit of the (L, L')-coverings.
    CoveringCheck(RunArgs),
    /// Double connections and pivotal bonds against flow oracles.
    PivotalAudit(RunArgs),
    /// Heat-bath frequencies and kernels on the unit square.
    SamplerCheck(RunArgs),
    /// Edwards-Sokal marginals and the Swendsen-Wang kernel.
    EsCheck(RunArgs),
    /// Renormalisation constants and the Legendre transform.
    Constants(RunArgs),
    /// Re-run a result file and compare every record.
    Reproduce { file: PathBuf },
    /// Print every configuration key with its default.
    Schema,
}

fn run_experiment(experiment: Experiment, args: RunArgs) -> i32 {
    let text = match &args.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return EXIT_CONFIG;
            }
        },
        None => String::new(),
    };
    let mut overrides = Vec::new();
    for s in &args.set {
        match s.split_once('=') {
            Some((k, v)) => overrides.push((k.trim().to_string(), v.to_string())),
            None => {
                eprintln!("error: --set expects key=value, got `{s}`");
                return EXIT_CONFIG;
            }
        }
    }
    let cfg = match parse_text(&text)
        .and_then(|raw| ExperimentConfig::build(experiment, &raw, &overrides, args.seed))
    {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = fk_coarse::execute(&cfg);
    let code = exit_code(&result);
    match result {
        Ok(outcome) => match records::write_outcome(&args.out, &cfg, &outcome) {
            Ok(a) => {
                for r in &outcome.records {
                    match r.std_err {
                        Some(se) => println!("{} = {} ± {}", r.metric, r.value, se),
                        None => println!("{} = {}", r.metric, r.value),
                    }
                }
                for v in &outcome.violations {
                    eprintln!("violation: {v}");
                }
                eprintln!("wrote {} and {}", a.jsonl.display(), a.csv.display());
                code
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_FAILURE
            }
        },
        Err(e) => {
            eprintln!(
                "{}: {e}",
                if code == EXIT_CONFIG {
                    "config error"
                } else {
                    "error"
                }
            );
            code
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(w) = std::env::var(fk_coarse::WORKERS_ENV) {
        match w.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!(
                    "config error: {} must be a positive integer",
                    fk_coarse::WORKERS_ENV
                );
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
    }
    let code = match cli.command {
        Command::Enumerate(a) => run_experiment(Experiment::Enumerate, a),
        Command::Verify(a) => run_experiment(Experiment::Verify, a),
        Command::DlrFailure(a) => run_experiment(Experiment::DlrFailure, a),
        Command::Crossing(a) => run_experiment(Experiment::Crossing, a),
        Command::Density(a) => run_experiment(Experiment::Density, a),
        Command::Theta(a) => run_experiment(Experiment::Theta, a),
        Command::Slab(a) => run_experiment(Experiment::Slab, a),
        Command::PsiDomination(a) => run_experiment(Experiment::PsiDomination, a),
        Command::PhaseLabels(a) => run_experiment(Experiment::PhaseLabels, a),
        Command::CoveringCheck(a) => run_experiment(Experiment::CoveringCheck, a),
        Command::PivotalAudit(a) => run_experiment(Experiment::PivotalAudit, a),
        Command::SamplerCheck(a) => run_experiment(Experiment::SamplerCheck, a),
        Command::EsCheck(a) => run_experiment(Experiment::EsCheck, a),
        Command::Constants(a) => run_experiment(Experiment::Constants, a),
        Command::Reproduce { file } => match reproduce(&file) {
            Ok(r) if r.identical() => {
                println!(
                    "{}: {} records reproduced identically",
                    r.experiment, r.records
                );
                EXIT_OK
            }
            Ok(r) => {
                for d in &r.diffs {
                    println!("{d}");
                }
                eprintln!("{}: {} differences", r.experiment, r.diffs.len());
                EXIT_VIOLATION
            }
            Err(ReproduceError::Run(e)) => {
                eprintln!("error: rerun failed: {e}");
                exit_code(&Err(e))
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_FAILURE
            }
        },
        Command::Schema => {
            for d in SCHEMA {
                println!("{:<26} {:<48} {}", d.key, d.default, d.doc);
            }
            EXIT_OK
        }
    };
    ExitCode::from(code as u8)
}
