//! Experiment orchestration: build the scenario, run the selected solver,
//! write the trace CSV and the JSON summary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::beamforming::{bf_closed_form_solve, bf_direct_solve, BeamformerSet};
use crate::energy::{ee_nested_solve, ee_single_link_dinkelbach, ee_single_link_qt};
use crate::error::{FpError, Result};
use crate::netsim::config::{Algorithm, ScenarioConfig, ScenarioKind};
use crate::netsim::scenario::{
    generate_ee_broadcast, generate_ee_single, generate_mimo_hex, generate_siso_hex, hash_reals, mimo_hash, siso_hash,
};
use crate::netsim::textbook::{self, ErrorRow};
use crate::netsim::units::nats_to_mbps;
use crate::numerics::RngStream;
use crate::par;
use crate::power::{
    best_of_starts, pc_closed_form_solve, pc_direct_solve, pc_fixed_point_solve, pc_maxmin_solve, pc_utility_solve,
    weighted_sum_rate, PcSolution, PowerVector, SisoNetwork, Utility,
};
use crate::trace::IterationTrace;

/// Offset inside the logarithm of the proportional-fair utility, in nats.
pub const LOG_UTILITY_EPS: f64 = 1e-6;

/// Start grid side for the two-dimensional textbook example.
pub const TWO_DIM_GRID: usize = 10;

/// How trace objectives are reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    /// Rate in nats per channel use, shown in Mbps.
    Rate { bandwidth_hz: f64 },
    /// Minimum SINR (linear); reported as the minimum link rate.
    MinSinr { bandwidth_hz: f64 },
    /// Nats per joule per hertz, shown in Mbit/J.
    Efficiency { bandwidth_hz: f64 },
    /// Dimensionless objective, shown as is.
    Plain,
}

impl Metric {
    pub fn nats(&self, objective: f64) -> f64 {
        match self {
            Metric::MinSinr { .. } => objective.ln_1p(),
            _ => objective,
        }
    }

    pub fn display(&self, objective: f64) -> f64 {
        match *self {
            Metric::Rate { bandwidth_hz } | Metric::Efficiency { bandwidth_hz } => nats_to_mbps(objective, bandwidth_hz),
            Metric::MinSinr { bandwidth_hz } => nats_to_mbps(objective.ln_1p(), bandwidth_hz),
            Metric::Plain => objective,
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            Metric::Rate { .. } => "Mbps",
            Metric::MinSinr { .. } => "Mbps (minimum link)",
            Metric::Efficiency { .. } => "Mbit/J",
            Metric::Plain => "objective",
        }
    }
}

/// Result of one solver run before anything is written.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Subdirectory for multi-fixture runs, `None` for the single run of a scenario.
    pub fixture: Option<&'static str>,
    pub trace: IterationTrace,
    pub converged: bool,
    pub metric: Metric,
    pub instance_hash: Option<String>,
    pub errors: Option<Vec<ErrorRow>>,
    /// Additional named values, e.g. baselines, in the trace's nats.
    pub extra: BTreeMap<String, f64>,
}

impl Outcome {
    fn new(trace: IterationTrace, converged: bool, metric: Metric) -> Self {
        Self {
            fixture: None,
            trace,
            converged,
            metric,
            instance_hash: None,
            errors: None,
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub fixture: Option<String>,
    pub algorithm: String,
    pub seed: Option<u64>,
    pub instance_hash: Option<String>,
    pub final_objective_nats: f64,
    pub final_objective_display: f64,
    pub display_unit: String,
    pub iterations: usize,
    pub wall_time_ms: f64,
    pub converged: bool,
    pub stationarity_residual: f64,
    pub trace_file: String,
    pub errors_file: Option<String>,
    pub extra: BTreeMap<String, f64>,
}

fn power_start(cfg: &ScenarioConfig, net: &SisoNetwork, solve: impl Fn(&PowerVector) -> Result<PcSolution> + Sync + Send) -> Result<PcSolution> {
    if cfg.starts > 1 {
        best_of_starts(net, cfg.starts, cfg.seed.unwrap_or(0), solve)
    } else {
        solve(&PowerVector::half_power(net))
    }
}

fn run_siso(cfg: &ScenarioConfig, rng: &mut RngStream) -> Result<Outcome> {
    let net = generate_siso_hex(cfg, rng)?;
    let (tol, iters) = (cfg.tol, cfg.max_iters);
    let rate = Metric::Rate { bandwidth_hz: cfg.bandwidth_hz };
    let mut out = match cfg.algorithm {
        Algorithm::Direct => {
            let s = power_start(cfg, &net, |p0| pc_direct_solve(&net, p0, tol, iters))?;
            Outcome::new(s.trace, s.converged, rate)
        }
        Algorithm::Closed => {
            let s = power_start(cfg, &net, |p0| pc_closed_form_solve(&net, p0, tol, iters))?;
            Outcome::new(s.trace, s.converged, rate)
        }
        Algorithm::FixedPoint => {
            let s = pc_fixed_point_solve(&net, &PowerVector::half_power(&net), tol, iters)?;
            Outcome::new(s.trace, s.converged, rate)
        }
        Algorithm::MaxMin => {
            let s = pc_maxmin_solve(&net, &PowerVector::half_power(&net), tol, iters)?;
            Outcome::new(s.trace, s.converged, Metric::MinSinr { bandwidth_hz: cfg.bandwidth_hz })
        }
        Algorithm::Utility => {
            let u: Vec<Utility> = (0..net.links()).map(|_| Utility::log_rate(LOG_UTILITY_EPS)).collect();
            let s = power_start(cfg, &net, |p0| pc_utility_solve(&net, &u, p0, tol, iters))?;
            Outcome::new(s.trace, s.converged, Metric::Plain)
        }
        other => return Err(unsupported(other, cfg.kind)),
    };
    out.extra.insert(
        "max_power_rate_nats".into(),
        weighted_sum_rate(&PowerVector::uniform(&net, net.p_max() / net.bands() as f64), &net),
    );
    out.instance_hash = Some(siso_hash(&net));
    Ok(out)
}

fn run_mimo(cfg: &ScenarioConfig, rng: &mut RngStream) -> Result<Outcome> {
    let net = generate_mimo_hex(cfg, rng)?;
    let v0 = BeamformerSet::dominant(&net);
    let s = match cfg.algorithm {
        Algorithm::Direct => bf_direct_solve(&net, &v0, cfg.tol, cfg.max_iters)?,
        Algorithm::Closed => bf_closed_form_solve(&net, &v0, cfg.tol, cfg.max_iters)?,
        other => return Err(unsupported(other, cfg.kind)),
    };
    let mut out = Outcome::new(s.trace, s.converged, Metric::Rate { bandwidth_hz: cfg.bandwidth_hz });
    out.instance_hash = Some(mimo_hash(&net));
    Ok(out)
}

fn run_ee_single(cfg: &ScenarioConfig) -> Result<Outcome> {
    let link = generate_ee_single(cfg)?;
    let s = match cfg.algorithm {
        Algorithm::Direct => ee_single_link_qt(&link, link.p_max, cfg.tol, cfg.max_iters)?,
        Algorithm::Dinkelbach => ee_single_link_dinkelbach(&link, link.p_max, cfg.tol, cfg.max_iters)?,
        other => return Err(unsupported(other, cfg.kind)),
    };
    let mut out = Outcome::new(s.trace, s.converged, Metric::Efficiency { bandwidth_hz: cfg.bandwidth_hz });
    out.instance_hash = Some(hash_reals([link.gain, link.noise, link.p_max, link.p_on]));
    out.extra.insert("power_watts".into(), s.p);
    Ok(out)
}

fn run_ee_broadcast(cfg: &ScenarioConfig, rng: &mut RngStream) -> Result<Outcome> {
    let net = generate_ee_broadcast(cfg, rng)?;
    match cfg.algorithm {
        Algorithm::Nested => {}
        Algorithm::Dinkelbach => {
            return Err(FpError::Usage(
                "Dinkelbach's transform is not offered for the broadcast efficiency problem: \
                 its parametric subproblem is not concave in the beamformers"
                    .into(),
            ))
        }
        other => return Err(unsupported(other, cfg.kind)),
    }
    let s = ee_nested_solve(&net, &BeamformerSet::dominant(net.as_mimo()), cfg.tol, cfg.max_iters)?;
    let mut out = Outcome::new(s.trace, s.converged, Metric::Efficiency { bandwidth_hz: cfg.bandwidth_hz });
    out.instance_hash = Some(mimo_hash(net.as_mimo()));
    out.extra.insert("transmit_power_watts".into(), s.v.bs_power(net.as_mimo(), 0));
    Ok(out)
}

/// The textbook fixtures: convergence rate of the quadratic transform from
/// `y0 = 0.1`, Dinkelbach's method from `x0 = 2`, and the two-dimensional
/// example from a grid of starts.
fn run_textbook(cfg: &ScenarioConfig) -> Result<Vec<Outcome>> {
    let (rows, objectives) = textbook::qt_error_sequence(0.1, 100);
    let mut trace = IterationTrace::new();
    for (x_obj, row) in objectives.iter().zip(&rows) {
        // Distance of x_t from the maximizer stands in for the residual.
        let x = (2.0 * row.y).powf(-2.0 / 3.0);
        trace.push(*x_obj, (1.0 - x * x).abs() / (x * x + 1.0).powi(2));
    }
    let mut qt = Outcome::new(trace, true, Metric::Plain);
    qt.fixture = Some("qt_rate");
    qt.errors = Some(rows);

    let (rows, sol) = textbook::dinkelbach_sequence(2.0, 1e-15, cfg.max_iters)?;
    let mut dk = Outcome::new(sol.trace, sol.converged, Metric::Plain);
    dk.fixture = Some("dinkelbach");
    dk.errors = Some(rows);

    let starts = textbook::two_dim_start_grid(TWO_DIM_GRID);
    let runs = par::map(&starts, |x0| textbook::two_dim_solve(*x0, cfg.tol.min(1e-12), cfg.max_iters.max(2000)));
    let runs: Vec<_> = runs.into_iter().collect::<Result<_>>()?;
    let values: Vec<f64> = runs.iter().map(|s| s.trace.final_objective()).collect();
    let best = (0..runs.len()).fold(0, |b, k| if values[k] > values[b] { k } else { b });
    let worst = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let all_converged = runs.iter().all(|s| s.converged);
    let mut two_dim = Outcome::new(runs[best].trace.clone(), all_converged, Metric::Plain);
    two_dim.fixture = Some("two_dim");
    two_dim.extra.insert("best_x1".into(), runs[best].x[0]);
    two_dim.extra.insert("best_x2".into(), runs[best].x[1]);
    two_dim.extra.insert("worst_objective".into(), worst);
    two_dim.extra.insert("starts".into(), starts.len() as f64);
    Ok(vec![qt, dk, two_dim])
}

fn unsupported(algo: Algorithm, kind: ScenarioKind) -> FpError {
    FpError::Usage(format!("algorithm `{algo}` is not available for `{kind}`"))
}

/// Validates `cfg` and runs it without touching the file system.
pub fn execute(cfg: &ScenarioConfig) -> Result<Vec<Outcome>> {
    cfg.validate()?;
    let mut rng = RngStream::new(cfg.seed.unwrap_or(0));
    Ok(match cfg.kind {
        ScenarioKind::SisoHex => vec![run_siso(cfg, &mut rng)?],
        ScenarioKind::MimoHex => vec![run_mimo(cfg, &mut rng)?],
        ScenarioKind::EeSingle => vec![run_ee_single(cfg)?],
        ScenarioKind::EeBroadcast => vec![run_ee_broadcast(cfg, &mut rng)?],
        ScenarioKind::Textbook => run_textbook(cfg)?,
    })
}

#[derive(Serialize)]
struct TraceRow {
    iter: usize,
    objective_nats: f64,
    objective_display: f64,
    residual: f64,
    elapsed_ms: f64,
}

#[derive(Serialize)]
struct ErrorCsvRow {
    iter: usize,
    y: f64,
    error: f64,
    error_ratio: Option<f64>,
}

fn csv_error(path: &Path, e: csv::Error) -> FpError {
    FpError::Io(format!("{}: {e}", path.display()))
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `trace.csv`, optional `errors.csv`, and `summary.json` into `dir`.
pub fn write_outcome(cfg: &ScenarioConfig, outcome: &Outcome, dir: &Path) -> Result<RunSummary> {
    fs::create_dir_all(dir)?;
    let m = outcome.metric;
    write_rows(
        &dir.join("trace.csv"),
        outcome.trace.records().iter().map(|r| TraceRow {
            iter: r.iteration,
            objective_nats: m.nats(r.objective),
            objective_display: m.display(r.objective),
            residual: r.residual,
            elapsed_ms: r.elapsed.as_secs_f64() * 1e3,
        }),
    )?;
    let errors_file = match &outcome.errors {
        Some(rows) => {
            write_rows(
                &dir.join("errors.csv"),
                rows.iter().map(|r| ErrorCsvRow {
                    iter: r.iter,
                    y: r.y,
                    error: r.error,
                    error_ratio: r.ratio,
                }),
            )?;
            Some("errors.csv".to_string())
        }
        None => None,
    };
    let f = outcome.trace.final_objective();
    let summary = RunSummary {
        scenario: cfg.kind.name().into(),
        fixture: outcome.fixture.map(str::to_string),
        algorithm: cfg.algorithm.name().into(),
        seed: cfg.seed,
        instance_hash: outcome.instance_hash.clone(),
        final_objective_nats: m.nats(f),
        final_objective_display: m.display(f),
        display_unit: m.unit().into(),
        iterations: outcome.trace.iterations(),
        wall_time_ms: outcome.trace.total_elapsed().as_secs_f64() * 1e3,
        converged: outcome.converged,
        stationarity_residual: outcome.trace.final_residual(),
        trace_file: "trace.csv".into(),
        errors_file,
        extra: outcome.extra.clone(),
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| FpError::Io(e.to_string()))?;
    fs::write(dir.join("summary.json"), json + "\n")?;
    Ok(summary)
}

/// Runs `cfg` and writes its artifacts under `out`; multi-fixture runs get
/// one subdirectory per fixture.
pub fn run_experiment(cfg: &ScenarioConfig, out: &Path) -> Result<Vec<RunSummary>> {
    execute(cfg)?
        .iter()
        .map(|o| {
            let dir: PathBuf = match o.fixture {
                Some(name) => out.join(name),
                None => out.to_path_buf(),
            };
            write_outcome(cfg, o, &dir)
        })
        .collect()
}

/// Runs seeds `seed, seed + 1, ..., seed + count - 1` in parallel, each into
/// `out/seed_<s>`. Results are in seed order.
pub fn run_batch(cfg: &ScenarioConfig, out: &Path, count: usize) -> Vec<(u64, Result<Vec<RunSummary>>)> {
    let first = cfg.seed.unwrap_or(0);
    par::map_range(count, |k| {
        let seed = first + k as u64;
        let cfg = ScenarioConfig {
            seed: Some(seed),
            ..cfg.clone()
        };
        (seed, run_experiment(&cfg, &out.join(format!("seed_{seed}"))))
    })
}
