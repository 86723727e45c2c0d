//! Subcommand implementations. Each returns the process exit code:
//! 0 on success, 1 for a failed run or check, 2 for invalid input.

use std::path::{Path, PathBuf};

use anyhow::Result;
use vfd_core::moser::{self, MoserSchedule};

use crate::config::{self, ConfigError, ExperimentConfig};
use crate::experiment::{self, RunOptions};
use crate::output::write_table;
use crate::studies;
use crate::sweep;

/// Flags shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Globals {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps; 0 uses one per core.
    pub threads: usize,
    pub seed: Option<u64>,
}

pub const MOSER_NOT_CLOSING: &str = "H=1, iteration does not close";

fn load(globals: &Globals) -> Result<ExperimentConfig> {
    let path = globals
        .config
        .as_deref()
        .ok_or_else(|| ConfigError("--config PATH is required".into()))?;
    let mut cfg = config::load(path)?;
    if let Some(seed) = globals.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

pub fn run(globals: &Globals) -> Result<u8> {
    let cfg = load(globals)?;
    if cfg.sweep.is_some() {
        log::warn!("the config has a [sweep] section; `run` ignores it");
    }
    let mut single = cfg.clone();
    single.sweep = None;
    let dir = experiment::output_dir(globals.out.as_deref(), &single, "vfd-run");
    let report = experiment::run_experiment(&single, &dir, RunOptions::default())?;
    let s = &report.summary;
    println!(
        "{}: {} steps to t = {}, mass {} (drift {:.3e}), energy {}, overall {}",
        dir.display(),
        s.steps,
        s.final_time,
        s.verdicts.mass.verdict,
        s.verdicts.mass.max_relative_drift,
        s.verdicts.energy.verdict,
        s.verdicts.overall
    );
    if let Some(e) = &s.error {
        eprintln!(
            "error: solver failure: {e} (partial outputs kept in {})",
            dir.display()
        );
    }
    Ok(if s.passed() { 0 } else { 1 })
}

pub fn sweep(globals: &Globals) -> Result<u8> {
    let cfg = load(globals)?;
    if cfg.sweep.is_none() {
        return Err(ConfigError("the config has no [sweep] section".into()).into());
    }
    let dir = experiment::output_dir(globals.out.as_deref(), &cfg, "vfd-sweep");
    let outcome = sweep::run_sweep(&cfg, &dir, globals.threads)?;
    for c in &outcome.children {
        println!(
            "{:>4} {:<10} {:<8} exit {}{}",
            c.index,
            c.dir
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            c.status,
            c.exit_code,
            c.error
                .as_deref()
                .map(|e| format!("  {e}"))
                .unwrap_or_default()
        );
    }
    if let Some(rows) = &outcome.penalized {
        println!(
            "\n{:>10} {:>14} {:>16}",
            "n", "boundary mass", "L1 to previous"
        );
        for r in rows {
            let d = r
                .l1_to_previous
                .map(|d| format!("{d:.6e}"))
                .unwrap_or_else(|| "-".into());
            println!("{:>10} {:>14.6e} {:>16}", r.penalty, r.boundary_mass, d);
        }
        if let Some(c) = outcome.penalized_cauchy {
            println!("successive differences decreasing: {c}");
        }
    }
    println!("sweep summary: {}", dir.join("sweep_summary.csv").display());
    Ok(outcome.exit_code)
}

pub fn verify_oracle(globals: &Globals) -> Result<u8> {
    let dir = globals
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("vfd-oracle"));
    let report = studies::verify_oracle()?;
    studies::print_oracle_report(&report);
    studies::write_oracle_report(&report, &dir)?;
    let ok = report.passed();
    println!(
        "{}",
        if ok {
            "all ratios within range"
        } else {
            "some ratios out of range"
        }
    );
    Ok(if ok { 0 } else { 1 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserArgs<'a> {
    pub epsilon: f64,
    pub p0: Option<f64>,
    pub i_max: usize,
    pub tau: f64,
    pub variant: &'a str,
}

pub fn moser_table(globals: &Globals, args: MoserArgs<'_>) -> Result<u8> {
    let variant = studies::parse_variant(args.variant).ok_or_else(|| {
        ConfigError(format!(
            "unknown variant {:?} (use u, theta or theta-boundary)",
            args.variant
        ))
    })?;
    let p0 = args
        .p0
        .unwrap_or_else(|| variant.initial_exponent(args.epsilon));
    let schedule = MoserSchedule::with_initial_exponent(args.epsilon, args.tau, variant, p0)
        .map_err(|e| ConfigError(e.to_string()))?;
    if !schedule.closes() {
        eprintln!("warning: {MOSER_NOT_CLOSING}");
    }
    let rows = studies::moser_rows(&schedule, args.i_max)?;
    println!("{}", studies::MOSER_HEADER.join(","));
    for r in &rows {
        println!("{}", r.join(","));
    }
    if schedule.closes() {
        let report = moser::bound_products(&schedule, args.i_max, 1e-10);
        eprintln!(
            "H = {:.6}, K = {:.6}, product {:.6e} (log bound {:.6e})",
            schedule.growth(),
            schedule.k_eps(),
            report.product(),
            report.log_bound
        );
    }
    if let Some(dir) = &globals.out {
        std::fs::create_dir_all(dir)?;
        write_table(&dir.join("moser_table.csv"), &studies::MOSER_HEADER, &rows)?;
    }
    Ok(0)
}

/// Exit code for an error that escaped a subcommand.
pub fn error_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        2
    } else {
        1
    }
}

/// Helper for callers that only have a path.
pub fn globals_for(config: &Path, out: &Path) -> Globals {
    Globals {
        config: Some(config.to_path_buf()),
        out: Some(out.to_path_buf()),
        ..Globals::default()
    }
}
