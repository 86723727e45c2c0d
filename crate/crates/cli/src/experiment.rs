//! A single run: data preparation, time stepping, diagnostics and output.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vfd_core::dataprep::{self, ForcingDescriptor, KERNEL_NAME};
use vfd_core::diagnostics::{self, Verdict};
use vfd_core::oracle::ExactSolution;
use vfd_core::stepper::{self, RunFailure};
use vfd_core::{
    BoundaryMode, DiscreteDomain, Field, RegularizedGamma, RunConfig, RunOutput, Sources, State,
};

use crate::config::{ConfigError, ExperimentConfig, InitialConfig};
use crate::output;

/// Everything a run needs, built from the configuration.
pub struct Prepared {
    pub domain: DiscreteDomain,
    pub gamma: RegularizedGamma,
    pub run: RunConfig,
    pub forcing: ForcingDescriptor,
    pub initial: State,
    /// `int log^- prepared / (1 + int log^- raw)` when data were prepared.
    pub log_approx_constant: Option<f64>,
}

pub fn sample_initial(
    init: &InitialConfig,
    domain: &DiscreteDomain,
    exact: Option<&ExactSolution>,
) -> Result<Vec<f64>, ConfigError> {
    let coords = domain.coords();
    Ok(match init {
        InitialConfig::Constant { value } => vec![*value; domain.len()],
        InitialConfig::Cosine {
            base,
            amplitude,
            wavenumber,
        } => coords
            .iter()
            .map(|c| base + amplitude * (wavenumber * c[0]).cos() * (wavenumber * c[1]).cos())
            .collect(),
        InitialConfig::Spike {
            depth,
            width,
            center,
            background,
        } => coords
            .iter()
            .map(|c| {
                let s = (c[0] - center[0]).hypot(c[1] - center[1]) / width;
                if s < 1.0 {
                    let b = (1.0 - s * s) * (1.0 - s * s);
                    background - (background - depth) * b
                } else {
                    *background
                }
            })
            .collect(),
        InitialConfig::Csv { path } => output::read_initial(path, domain.len())?,
        InitialConfig::Exact => {
            let exact = exact.ok_or_else(|| {
                ConfigError("initial.kind = \"exact\" without an exact solution".into())
            })?;
            exact
                .nodal(0.0, domain)
                .map_err(|e| ConfigError(format!("initial: {e}")))?
        }
    })
}

pub fn perturb(values: &mut [f64], amplitude: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in values {
        *v *= 1.0 + amplitude * rng.random_range(-1.0..1.0);
    }
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, ConfigError> {
    prepare_from(cfg, &cfg.initial)
}

/// Like [`prepare`] with a different initial datum (the partner of a
/// contraction pair).
pub fn prepare_from(cfg: &ExperimentConfig, init: &InitialConfig) -> Result<Prepared, ConfigError> {
    let domain = cfg.build_domain()?;
    let run = cfg.run_config()?;
    let gamma = cfg.gamma()?;
    let exact = cfg.exact_solution(&domain)?;
    let forcing = cfg.build_forcing(&domain)?;
    let mut raw = sample_initial(init, &domain, exact.as_ref())?;
    if let Some(p) = &cfg.perturbation {
        perturb(&mut raw, p.amplitude, cfg.seed);
    }
    let (initial, log_approx_constant) = match cfg.strategy() {
        None => {
            if raw.iter().any(|&v| !(v > 0.0)) {
                return Err(ConfigError(
                    "initial data must be strictly positive unless a dataprep strategy is set"
                        .into(),
                ));
            }
            (
                State::new(&domain, raw).map_err(|e| ConfigError(format!("initial: {e}")))?,
                None,
            )
        }
        Some(strategy) => {
            let field = Field::from_nodal(&domain, raw.clone())
                .map_err(|e| ConfigError(format!("initial: {e}")))?;
            let state = dataprep::prepare_initial(&domain, &field, strategy, cfg.dataprep.n)
                .map_err(|e| ConfigError(format!("dataprep: {e}")))?;
            let c = dataprep::log_approx_constant(&domain, &raw, &state.theta);
            (state, Some(c))
        }
    };
    Ok(Prepared {
        domain,
        gamma,
        run,
        forcing,
        initial,
        log_approx_constant,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Versions {
    pub vfd_cli: &'static str,
    pub vfd_core: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Self {
            vfd_cli: env!("CARGO_PKG_VERSION"),
            vfd_core: vfd_core::VERSION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowInfo {
    pub theta_lower: f64,
    pub theta_upper: f64,
    /// Interval on which the regularised law equals `-1/theta`.
    pub exact_on: [f64; 2],
    pub exited: bool,
    pub exit_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassCheck {
    pub verdict: &'static str,
    pub initial: f64,
    pub max_relative_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyCheck {
    pub verdict: &'static str,
    pub max_excess: f64,
    pub max_step_increase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpCheck {
    pub p: f64,
    pub verdict: &'static str,
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdicts {
    pub overall: &'static str,
    pub mass: MassCheck,
    pub energy: EnergyCheck,
    pub lp: Vec<LpCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    /// `c` in `E(t) + int_0^t D <= E_0 + c int_0^t ||f||_{6/5}^2` for forced runs.
    pub energy_forcing: Option<f64>,
    pub log_poincare_c1: f64,
    pub log_poincare_c2: f64,
    pub log_approx: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizationEntry {
    pub tau: f64,
    pub sup_u: f64,
    pub sup_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotEntry {
    pub file: String,
    pub requested: f64,
    pub time: f64,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub status: &'static str,
    pub error: Option<String>,
    pub versions: Versions,
    pub config: ExperimentConfig,
    pub kernel: &'static str,
    pub steps: usize,
    pub rejected_steps: usize,
    pub final_time: f64,
    pub window: WindowInfo,
    pub verdicts: Verdicts,
    pub constants: Constants,
    pub regularization: Vec<RegularizationEntry>,
    pub snapshots: Vec<SnapshotEntry>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.status == "ok" && self.verdicts.overall == "pass"
    }
}

pub struct RunReport {
    pub summary: Summary,
    pub output: RunOutput,
    /// Every accepted state, initial state first; filled on request only.
    pub trajectory: Vec<State>,
    pub domain: DiscreteDomain,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub keep_trajectory: bool,
}

fn max_relative_drift(output: &RunOutput) -> f64 {
    let m0 = output.initial.mass;
    let scale = m0.abs().max(f64::MIN_POSITIVE);
    output
        .records
        .iter()
        .map(|r| (r.mass - m0).abs() / scale)
        .fold(0.0, f64::max)
}

fn summarize(
    cfg: &ExperimentConfig,
    prep: &Prepared,
    out: &RunOutput,
    error: Option<String>,
    snapshots: Vec<SnapshotEntry>,
) -> Summary {
    let d = &cfg.diagnostics;
    let run = &prep.run;
    let dirichlet = run.bc_mode == BoundaryMode::DirichletOracle;

    let drift = max_relative_drift(out);
    let mass_verdict = if prep.forcing.is_mean_free() && !dirichlet {
        Verdict::from_bool(drift <= d.mass_tol)
    } else {
        Verdict::Report
    };
    let budget = diagnostics::energy_budget_check(
        &out.initial,
        &out.records,
        run.beta,
        d.energy_tol,
        d.step_tol,
    );
    let energy_verdict = if dirichlet {
        Verdict::Report
    } else {
        budget.verdict
    };
    let lp: Vec<LpCheck> = run
        .lp_exponents
        .iter()
        .filter_map(|&p| {
            diagnostics::lp_conservation_check(&out.initial, &out.records, p, run.boundary_mass())
        })
        .map(|l| LpCheck {
            p: l.p,
            verdict: l.verdict.label(),
            sup: l.sup,
        })
        .collect();
    let failed = error.is_some()
        || mass_verdict == Verdict::Fail
        || energy_verdict == Verdict::Fail
        || lp.iter().any(|l| l.verdict == Verdict::Fail.label());
    let (c1, c2) = diagnostics::log_poincare_constants(&out.records, prep.domain.measure());

    Summary {
        status: if error.is_some() { "failed" } else { "ok" },
        error,
        versions: Versions::current(),
        config: cfg.clone(),
        kernel: KERNEL_NAME,
        steps: out.records.len(),
        rejected_steps: out.rejected_steps,
        final_time: out.final_state.time,
        window: WindowInfo {
            theta_lower: run.window.0,
            theta_upper: run.window.1,
            exact_on: [prep.gamma.lower_knot(), prep.gamma.upper_knot()],
            exited: out.window_exit.is_some(),
            exit_time: out.window_exit,
        },
        verdicts: Verdicts {
            overall: if failed { "fail" } else { "pass" },
            mass: MassCheck {
                verdict: mass_verdict.label(),
                initial: out.initial.mass,
                max_relative_drift: drift,
            },
            energy: EnergyCheck {
                verdict: energy_verdict.label(),
                max_excess: budget.max_excess,
                max_step_increase: budget.max_step_increase,
            },
            lp,
        },
        constants: Constants {
            energy_forcing: budget.empirical_constant,
            log_poincare_c1: c1,
            log_poincare_c2: c2,
            log_approx: prep.log_approx_constant,
        },
        regularization: diagnostics::regularization_probe(&out.initial, &out.records, &d.tau)
            .into_iter()
            .map(|r| RegularizationEntry {
                tau: r.tau,
                sup_u: r.sup_u,
                sup_theta: r.sup_theta,
            })
            .collect(),
        snapshots,
    }
}

const SNAPSHOT_SLACK: f64 = 1e-12;

/// Runs one experiment and writes `series.csv`, `summary.json` and the
/// requested `fields_*.csv` into `out_dir`. A solver failure is not an
/// error here: the partial outputs are written and the summary says
/// `"failed"`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
    options: RunOptions,
) -> Result<RunReport> {
    let prep = prepare(cfg)?;
    execute(cfg, prep, out_dir, options)
}

pub fn execute(
    cfg: &ExperimentConfig,
    prep: Prepared,
    out_dir: &Path,
    options: RunOptions,
) -> Result<RunReport> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    let mut requested: Vec<(usize, f64)> = cfg
        .diagnostics
        .snapshots
        .iter()
        .copied()
        .enumerate()
        .collect();
    requested.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut pending = requested.into_iter().peekable();
    let mut snaps: Vec<(usize, f64, State)> = Vec::new();
    while let Some(&(k, t)) = pending.peek() {
        if t > prep.initial.time + SNAPSHOT_SLACK {
            break;
        }
        snaps.push((k, t, prep.initial.clone()));
        pending.next();
    }
    let mut trajectory = Vec::new();
    if options.keep_trajectory {
        trajectory.push(prep.initial.clone());
    }

    let result = stepper::run_with(
        &prep.run,
        prep.initial.clone(),
        &prep.forcing,
        &prep.domain,
        &prep.gamma,
        |state, _| {
            while let Some(&(k, t)) = pending.peek() {
                if t > state.time + SNAPSHOT_SLACK {
                    break;
                }
                snaps.push((k, t, state.clone()));
                pending.next();
            }
            if options.keep_trajectory {
                trajectory.push(state.clone());
            }
        },
    );
    let (out, error) = match result {
        Ok(out) => (out, None),
        Err(RunFailure { error, partial }) => {
            log::error!("run failed: {error}");
            (partial, Some(error.to_string()))
        }
    };

    output::write_series(
        &out_dir.join("series.csv"),
        &out.initial,
        &out.records,
        &prep.run.lp_exponents,
    )?;
    snaps.sort_by_key(|s| s.0);
    let mut entries = Vec::with_capacity(snaps.len());
    for (k, t, state) in &snaps {
        let file = format!("fields_{k:03}.csv");
        output::write_fields(&out_dir.join(&file), state, &prep.domain, &prep.gamma)?;
        entries.push(SnapshotEntry {
            file,
            requested: *t,
            time: state.time,
        });
    }
    let summary = summarize(cfg, &prep, &out, error, entries);
    output::write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(RunReport {
        summary,
        output: out,
        trajectory,
        domain: prep.domain,
    })
}

/// Output directory: the command line wins over the config file.
pub fn output_dir(cli: Option<&Path>, cfg: &ExperimentConfig, fallback: &str) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(fallback))
}
