use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracprog::netsim::{run_batch, run_experiment, Algorithm, RunSummary, ScenarioConfig, ScenarioKind};
use fracprog::{FpError, Result};

/// Fractional-programming experiments on cellular scenarios.
#[derive(Parser)]
#[command(name = "fpsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// SISO power control on the seven-cell hexagonal layout.
    Power(RunArgs),
    /// MIMO beamforming on the seven-cell hexagonal layout.
    Beamform(RunArgs),
    /// Energy efficiency; `--broadcast` selects the multi-receiver case.
    Ee {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        broadcast: bool,
    },
    /// Deterministic textbook fixtures.
    Textbook(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with dotted keys, applied over the scenario defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// direct | closed | fixed-point | dinkelbach | nested | maxmin | utility
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value = "fpsim-out")]
    out: PathBuf,
    /// Run this many consecutive seeds, starting at the configured one.
    #[arg(long)]
    seeds: Option<usize>,
}

fn build_config(kind: ScenarioKind, args: &RunArgs) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::defaults(kind);
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| FpError::Io(format!("{}: {e}", path.display())))?;
        cfg.apply_toml(&text)?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    if let Some(algo) = &args.algo {
        cfg.algorithm = algo.parse::<Algorithm>()?;
    }
    if let Some(tol) = args.tol {
        cfg.tol = tol;
    }
    if let Some(n) = args.max_iters {
        cfg.max_iters = n;
    }
    if args.seeds.is_some() && cfg.seed.is_none() {
        cfg.seed = Some(0);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(s: &RunSummary) {
    let label = s.fixture.as_deref().map(|f| format!("{}/{f}", s.scenario)).unwrap_or_else(|| s.scenario.clone());
    let seed = s.seed.map(|v| format!(" seed={v}")).unwrap_or_default();
    println!(
        "{label}{seed} algo={} objective={:.6} {} iterations={} residual={:.3e} converged={}",
        s.algorithm, s.final_objective_display, s.display_unit, s.iterations, s.stationarity_residual, s.converged
    );
}

fn run(cli: Cli) -> Result<bool> {
    let (kind, args) = match &cli.command {
        Command::Power(a) => (ScenarioKind::SisoHex, a),
        Command::Beamform(a) => (ScenarioKind::MimoHex, a),
        Command::Ee { run, broadcast: false } => (ScenarioKind::EeSingle, run),
        Command::Ee { run, broadcast: true } => (ScenarioKind::EeBroadcast, run),
        Command::Textbook(a) => (ScenarioKind::Textbook, a),
    };
    let cfg = build_config(kind, args)?;
    match args.seeds {
        Some(0) => Err(FpError::config("--seeds", "must be at least 1")),
        Some(n) => {
            let mut converged = true;
            let mut first_error = None;
            for (seed, result) in run_batch(&cfg, &args.out, n) {
                match result {
                    Ok(summaries) => {
                        summaries.iter().for_each(report);
                        converged &= summaries.iter().all(|s| s.converged);
                    }
                    Err(e) => {
                        eprintln!("seed {seed}: {e}");
                        first_error.get_or_insert(e);
                    }
                }
            }
            first_error.map_or(Ok(converged), Err)
        }
        None => {
            let summaries = run_experiment(&cfg, &args.out)?;
            summaries.iter().for_each(report);
            Ok(summaries.iter().all(|s| s.converged))
        }
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which here means non-convergence.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("fpsim: {e}");
            ExitCode::from(1)
        }
    }
}
