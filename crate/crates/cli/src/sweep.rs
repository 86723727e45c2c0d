//! Parameter sweeps: independent runs executed concurrently, one
//! subdirectory each, collected into `sweep_summary.csv`.

use std::path::{Path, PathBuf};

use anyhow::Result;
use rayon::prelude::*;
use vfd_core::diagnostics;

use crate::config::{
    ConfigError, DomainConfig, ExperimentConfig, InitialConfig, SweepMode, SweepPoint,
};
use crate::experiment::{self, RunOptions, RunReport};
use crate::output::{self, fmt_f64};

/// Outcome of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChildResult {
    pub index: usize,
    pub dir: PathBuf,
    pub point: SweepPoint,
    pub config: Option<ExperimentConfig>,
    /// `ok`, `failed` (solver) or `invalid` (configuration or I/O).
    pub status: &'static str,
    /// 0 for success, 1 for a failed run or verdict, 2 for invalid input.
    pub exit_code: u8,
    pub steps: usize,
    pub final_time: f64,
    pub mass_drift: f64,
    pub mass_verdict: &'static str,
    pub energy_verdict: &'static str,
    pub overall: &'static str,
    pub contraction: Option<(&'static str, f64)>,
    /// Final bulk temperature, kept for the penalized table.
    pub final_theta: Vec<f64>,
    pub error: Option<String>,
}

/// Row of the penalized study: bulk `L^1` distance of the final state to
/// the previous penalty level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenalizedRow {
    pub penalty: f64,
    pub boundary_mass: f64,
    pub l1_to_previous: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub children: Vec<ChildResult>,
    pub penalized: Option<Vec<PenalizedRow>>,
    /// Whether successive penalized differences decrease.
    pub penalized_cauchy: Option<bool>,
    pub exit_code: u8,
}

fn child_from_report(
    index: usize,
    dir: PathBuf,
    point: SweepPoint,
    cfg: ExperimentConfig,
    r: &RunReport,
) -> ChildResult {
    let s = &r.summary;
    ChildResult {
        index,
        dir,
        point,
        config: Some(cfg),
        status: s.status,
        exit_code: if s.passed() { 0 } else { 1 },
        steps: s.steps,
        final_time: s.final_time,
        mass_drift: s.verdicts.mass.max_relative_drift,
        mass_verdict: s.verdicts.mass.verdict,
        energy_verdict: s.verdicts.energy.verdict,
        overall: s.verdicts.overall,
        contraction: None,
        final_theta: r.output.final_state.theta.clone(),
        error: s.error.clone(),
    }
}

fn invalid_child(
    index: usize,
    dir: PathBuf,
    point: SweepPoint,
    config: Option<ExperimentConfig>,
    e: &anyhow::Error,
) -> ChildResult {
    ChildResult {
        index,
        dir,
        point,
        config,
        status: "invalid",
        exit_code: if e.downcast_ref::<ConfigError>().is_some() {
            2
        } else {
            1
        },
        steps: 0,
        final_time: f64::NAN,
        mass_drift: f64::NAN,
        mass_verdict: "",
        energy_verdict: "",
        overall: "fail",
        contraction: None,
        final_theta: Vec::new(),
        error: Some(format!("{e:#}")),
    }
}

fn run_pair(
    cfg: &ExperimentConfig,
    partner: &InitialConfig,
    dir: &Path,
) -> Result<(RunReport, RunReport, diagnostics::Contraction)> {
    let opts = RunOptions {
        keep_trajectory: true,
    };
    let first = experiment::run_experiment(cfg, &dir.join("first"), opts)?;
    let prep = experiment::prepare_from(cfg, partner)?;
    let second = experiment::execute(cfg, prep, &dir.join("second"), opts)?;
    let alpha = cfg.run_config()?.boundary_mass();
    let c = diagnostics::l1_contraction_check(
        &first.trajectory,
        &second.trajectory,
        alpha,
        &first.domain,
        cfg.diagnostics.contraction_tol,
    )?;
    let rows: Vec<Vec<String>> = c
        .distances
        .iter()
        .map(|&(t, d)| vec![fmt_f64(t), fmt_f64(d)])
        .collect();
    output::write_table(&dir.join("contraction.csv"), &["t", "l1_distance"], &rows)?;
    Ok((first, second, c))
}

fn run_child(
    base: &ExperimentConfig,
    index: usize,
    point: SweepPoint,
    out_dir: &Path,
) -> ChildResult {
    let dir = out_dir.join(format!("point_{index:03}"));
    let cfg = match base.at(&point) {
        Ok(c) => c,
        Err(e) => return invalid_child(index, dir, point, None, &e.into()),
    };
    let mode = base.sweep.as_ref().map(|s| s.mode).unwrap_or_default();
    match mode {
        SweepMode::ContractionPair => {
            let partner = base
                .sweep
                .as_ref()
                .and_then(|s| s.partner.clone())
                .expect("validated partner");
            match run_pair(&cfg, &partner, &dir) {
                Ok((first, second, c)) => {
                    let mut child = child_from_report(index, dir, point, cfg, &first);
                    if !second.summary.passed() {
                        child.exit_code = 1;
                        child.status = second.summary.status;
                        child.error = second.summary.error.clone();
                    }
                    if c.verdict == diagnostics::Verdict::Fail {
                        child.exit_code = 1;
                    }
                    child.contraction = Some((c.verdict.label(), c.max_increase));
                    child
                }
                Err(e) => invalid_child(index, dir, point, Some(cfg), &e),
            }
        }
        SweepMode::Grid | SweepMode::Penalized => {
            match experiment::run_experiment(&cfg, &dir, RunOptions::default()) {
                Ok(r) => child_from_report(index, dir, point, cfg, &r),
                Err(e) => invalid_child(index, dir, point, Some(cfg), &e),
            }
        }
    }
}

fn penalized_table(
    children: &[ChildResult],
    base: &ExperimentConfig,
) -> Result<(Vec<PenalizedRow>, bool)> {
    let domain = base.build_domain()?;
    let mut rows = Vec::with_capacity(children.len());
    let mut prev: Option<&ChildResult> = None;
    for c in children {
        let penalty = c.point.penalty.unwrap_or(f64::NAN);
        let usable = |r: &ChildResult| r.status == "ok" && r.final_theta.len() == domain.len();
        let l1 = match prev {
            Some(p) if usable(p) && usable(c) => Some(diagnostics::l1_distance(
                &p.final_theta,
                &c.final_theta,
                0.0,
                &domain,
            )),
            _ => None,
        };
        rows.push(PenalizedRow {
            penalty,
            boundary_mass: 1.0 / penalty,
            l1_to_previous: prev.map(|_| l1.unwrap_or(f64::NAN)),
        });
        prev = Some(c);
    }
    let diffs: Vec<f64> = rows.iter().filter_map(|r| r.l1_to_previous).collect();
    let cauchy = diffs.iter().all(|d| d.is_finite()) && diffs.windows(2).all(|w| w[1] < w[0]);
    Ok((rows, cauchy))
}

const SUMMARY_HEADER: [&str; 22] = [
    "point",
    "dir",
    "alpha",
    "beta",
    "dt",
    "nodes",
    "n",
    "depth",
    "epsilon",
    "penalty",
    "status",
    "exit_code",
    "steps",
    "final_time",
    "mass_drift",
    "mass_verdict",
    "energy_verdict",
    "overall",
    "contraction_verdict",
    "contraction_max_increase",
    "l1_to_previous",
    "error",
];

fn summary_row(c: &ChildResult, l1_prev: Option<f64>) -> Vec<String> {
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let (alpha, beta, dt, nodes, n, depth, epsilon, penalty) = match &c.config {
        Some(cfg) => {
            let nodes = match cfg.domain {
                DomainConfig::Interval { nodes, .. } | DomainConfig::Annulus { nodes, .. } => nodes,
                DomainConfig::Disk { radial, .. } => radial,
            };
            let depth = match cfg.initial {
                InitialConfig::Spike { depth, .. } => Some(depth),
                _ => None,
            };
            (
                fmt_f64(cfg.run.alpha),
                fmt_f64(cfg.run.beta),
                fmt_f64(cfg.run.dt),
                nodes.to_string(),
                cfg.dataprep.n.to_string(),
                opt(depth),
                opt(cfg.forcing.epsilon()),
                opt(cfg.run.penalty),
            )
        }
        None => Default::default(),
    };
    vec![
        c.index.to_string(),
        c.dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        alpha,
        beta,
        dt,
        nodes,
        n,
        depth,
        epsilon,
        penalty,
        c.status.to_string(),
        c.exit_code.to_string(),
        c.steps.to_string(),
        fmt_f64(c.final_time),
        fmt_f64(c.mass_drift),
        c.mass_verdict.to_string(),
        c.energy_verdict.to_string(),
        c.overall.to_string(),
        c.contraction.map(|x| x.0.to_string()).unwrap_or_default(),
        opt(c.contraction.map(|x| x.1)),
        opt(l1_prev),
        c.error.clone().unwrap_or_default(),
    ]
}

/// Runs every sweep point on a pool of `threads` workers (0 = one per core).
/// Child failures are recorded and do not stop the sweep.
pub fn run_sweep(cfg: &ExperimentConfig, out_dir: &Path, threads: usize) -> Result<SweepOutcome> {
    std::fs::create_dir_all(out_dir)?;
    let points = cfg.sweep_points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?;
    let children: Vec<ChildResult> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| run_child(cfg, i, *p, out_dir))
            .collect()
    });

    let penalized = cfg
        .sweep
        .as_ref()
        .is_some_and(|s| s.mode == SweepMode::Penalized);
    let (table, cauchy) = if penalized {
        let (rows, cauchy) = penalized_table(&children, cfg)?;
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    fmt_f64(r.penalty),
                    fmt_f64(r.boundary_mass),
                    r.l1_to_previous.map(fmt_f64).unwrap_or_default(),
                ]
            })
            .collect();
        output::write_table(
            &out_dir.join("penalized_table.csv"),
            &["n", "boundary_mass", "l1_to_previous"],
            &cells,
        )?;
        (Some(rows), Some(cauchy))
    } else {
        (None, None)
    };

    let rows: Vec<Vec<String>> = children
        .iter()
        .enumerate()
        .map(|(i, c)| summary_row(c, table.as_ref().and_then(|t| t[i].l1_to_previous)))
        .collect();
    output::write_table(&out_dir.join("sweep_summary.csv"), &SUMMARY_HEADER, &rows)?;

    let mut exit_code = children.iter().map(|c| c.exit_code).max().unwrap_or(0);
    if cauchy == Some(false) {
        exit_code = exit_code.max(1);
    }
    Ok(SweepOutcome {
        children,
        penalized: table,
        penalized_cauchy: cauchy,
        exit_code,
    })
}
