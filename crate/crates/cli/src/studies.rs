//! Convergence ladders against the reference solutions and the Moser
//! schedule table.

use std::path::Path;

use anyhow::Result;
use vfd_core::moser::{self, MoserSchedule, Variant};
use vfd_core::oracle::{
    make_manufactured, pde_residual_probe, ExactSolution, ManufacturedProfile, ProbeOrder,
};
use vfd_core::stepper::run;
use vfd_core::{BoundaryMode, DiscreteDomain, RegularizedGamma, RunConfig, State};

use crate::output::{fmt_f64, write_table};

/// One level of a convergence ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRow {
    pub h: f64,
    pub dt: f64,
    pub nodes: usize,
    pub max_error: f64,
    /// `error(previous level) / error(this level)`.
    pub ratio: Option<f64>,
}

fn with_ratios(rows: &mut [LadderRow]) {
    for k in 1..rows.len() {
        rows[k].ratio = Some(rows[k - 1].max_error / rows[k].max_error);
    }
}

fn max_nodal_error(
    exact: &ExactSolution,
    cfg: &RunConfig,
    domain: &DiscreteDomain,
    gamma: &RegularizedGamma,
) -> Result<f64> {
    let initial = State::new(domain, exact.nodal(0.0, domain)?)?;
    let out = run(cfg, initial, exact, domain, gamma)?;
    let reference = exact.nodal(out.final_state.time, domain)?;
    Ok(out
        .final_state
        .theta
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

pub const ANNULUS_WINDOW: (f64, f64) = (0.3, 2.0);

/// Dirichlet runs on the shell `1 <= r <= 3` against `2 sqrt(T - t) / r`
/// with `T = 1`, `dt = h^2`, up to `t_end`.
pub fn annulus_ladder(levels: &[usize], t_end: f64) -> Result<Vec<LadderRow>> {
    let exact = ExactSolution::SingularRadial { extinction: 1.0 };
    let gamma = RegularizedGamma::new(ANNULUS_WINDOW.0, ANNULUS_WINDOW.1)?;
    let mut rows = Vec::with_capacity(levels.len());
    for &nodes in levels {
        let domain = DiscreteDomain::annulus(1.0, 3.0, nodes)?;
        let h = domain.spacing();
        let cfg = RunConfig {
            alpha: 0.0,
            beta: 0.0,
            bc_mode: BoundaryMode::DirichletOracle,
            dt: h * h,
            t_end,
            window: ANNULUS_WINDOW,
            ..RunConfig::default()
        };
        rows.push(LadderRow {
            h,
            dt: cfg.dt,
            nodes,
            max_error: max_nodal_error(&exact, &cfg, &domain, &gamma)?,
            ratio: None,
        });
    }
    with_ratios(&mut rows);
    Ok(rows)
}

pub const MMS_WINDOW: (f64, f64) = (1.0, 3.0);

/// The shipped manufactured solution on the unit disk with
/// `alpha = beta = 1`; each level is `(radial, angular, dt)`.
pub fn mms_ladder(levels: &[(usize, usize, f64)], t_end: f64) -> Result<Vec<LadderRow>> {
    let gamma = RegularizedGamma::new(MMS_WINDOW.0, MMS_WINDOW.1)?;
    let mut rows = Vec::with_capacity(levels.len());
    for &(radial, angular, dt) in levels {
        let domain = DiscreteDomain::disk(1.0, radial, angular)?;
        let exact = make_manufactured(ManufacturedProfile::shipped(), &domain, 1.0, 1.0)?;
        let cfg = RunConfig {
            alpha: 1.0,
            beta: 1.0,
            dt,
            t_end,
            window: MMS_WINDOW,
            ..RunConfig::default()
        };
        rows.push(LadderRow {
            h: domain.spacing(),
            dt,
            nodes: domain.len(),
            max_error: max_nodal_error(&exact, &cfg, &domain, &gamma)?,
            ratio: None,
        });
    }
    with_ratios(&mut rows);
    Ok(rows)
}

/// Residual of the singular solution under the fourth-order probe at
/// spacings `hs`, over a fixed set of shell points and times.
pub fn probe_ladder(hs: &[f64]) -> Result<Vec<(f64, f64, Option<f64>)>> {
    let exact = ExactSolution::SingularRadial { extinction: 1.0 };
    let samples: Vec<(f64, [f64; 2])> = [0.1, 0.3, 0.5]
        .iter()
        .flat_map(|&t| [1.25, 1.5, 2.0, 2.5, 2.75].map(|r| (t, [r, 0.0])))
        .collect();
    let mut rows: Vec<(f64, f64, Option<f64>)> = Vec::with_capacity(hs.len());
    for &h in hs {
        let res = pde_residual_probe(&exact, &samples, h, ProbeOrder::Fourth)?;
        let ratio = rows.last().map(|p| p.1 / res);
        rows.push((h, res, ratio));
    }
    Ok(rows)
}

/// Everything `verify-oracle` computes.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub annulus: Vec<LadderRow>,
    pub mms_space: Vec<LadderRow>,
    pub mms_time: Vec<LadderRow>,
    pub probe: Vec<(f64, f64, Option<f64>)>,
}

pub const ANNULUS_RATIO: (f64, f64) = (3.4, 4.6);
pub const SPACE_RATIO: (f64, f64) = (2.8, 5.2);
pub const TIME_RATIO: (f64, f64) = (1.4, 2.6);
pub const PROBE_RATIO: (f64, f64) = (12.0, 20.0);

fn ratios_within<'a>(ratios: impl IntoIterator<Item = &'a Option<f64>>, range: (f64, f64)) -> bool {
    ratios
        .into_iter()
        .flatten()
        .all(|r| (range.0..=range.1).contains(r))
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        ratios_within(self.annulus.iter().map(|r| &r.ratio), ANNULUS_RATIO)
            && ratios_within(self.mms_space.iter().map(|r| &r.ratio), SPACE_RATIO)
            && ratios_within(self.mms_time.iter().map(|r| &r.ratio), TIME_RATIO)
            && ratios_within(self.probe.iter().map(|r| &r.2), PROBE_RATIO)
    }
}

pub fn verify_oracle() -> Result<OracleReport> {
    Ok(OracleReport {
        annulus: annulus_ladder(&[41, 81, 161], 0.5)?,
        mms_space: mms_ladder(&[(8, 16, 4e-3), (16, 32, 1e-3)], 0.5)?,
        mms_time: mms_ladder(&[(16, 32, 0.04), (16, 32, 0.02)], 0.5)?,
        probe: probe_ladder(&[0.04, 0.02, 0.01])?,
    })
}

fn ladder_cells(rows: &[LadderRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.nodes.to_string(),
                fmt_f64(r.h),
                fmt_f64(r.dt),
                fmt_f64(r.max_error),
                r.ratio.map(fmt_f64).unwrap_or_default(),
            ]
        })
        .collect()
}

const LADDER_HEADER: [&str; 5] = ["nodes", "h", "dt", "max_error", "ratio"];

pub fn write_oracle_report(report: &OracleReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_table(
        &dir.join("oracle_annulus.csv"),
        &LADDER_HEADER,
        &ladder_cells(&report.annulus),
    )?;
    write_table(
        &dir.join("oracle_mms_space.csv"),
        &LADDER_HEADER,
        &ladder_cells(&report.mms_space),
    )?;
    write_table(
        &dir.join("oracle_mms_time.csv"),
        &LADDER_HEADER,
        &ladder_cells(&report.mms_time),
    )?;
    let probe: Vec<Vec<String>> = report
        .probe
        .iter()
        .map(|(h, r, q)| vec![fmt_f64(*h), fmt_f64(*r), q.map(fmt_f64).unwrap_or_default()])
        .collect();
    write_table(
        &dir.join("oracle_probe.csv"),
        &["h", "residual", "ratio"],
        &probe,
    )?;
    Ok(())
}

pub fn print_oracle_report(report: &OracleReport) {
    let ladder = |title: &str, rows: &[LadderRow], range: (f64, f64)| {
        println!("{title} (expected ratio in [{}, {}])", range.0, range.1);
        println!(
            "{:>8} {:>12} {:>12} {:>14} {:>8}",
            "nodes", "h", "dt", "max error", "ratio"
        );
        for r in rows {
            let ratio = r
                .ratio
                .map(|q| format!("{q:.3}"))
                .unwrap_or_else(|| "-".into());
            println!(
                "{:>8} {:>12.4e} {:>12.4e} {:>14.6e} {:>8}",
                r.nodes, r.h, r.dt, r.max_error, ratio
            );
        }
        println!();
    };
    ladder(
        "annulus, exact radial solution",
        &report.annulus,
        ANNULUS_RATIO,
    );
    ladder(
        "disk, manufactured solution, space",
        &report.mms_space,
        SPACE_RATIO,
    );
    ladder(
        "disk, manufactured solution, time",
        &report.mms_time,
        TIME_RATIO,
    );
    println!(
        "residual probe (expected ratio in [{}, {}])",
        PROBE_RATIO.0, PROBE_RATIO.1
    );
    for (h, r, q) in &report.probe {
        let ratio = q.map(|q| format!("{q:.3}")).unwrap_or_else(|| "-".into());
        println!("{h:>12.4e} {r:>14.6e} {ratio:>8}");
    }
}

pub fn parse_variant(name: &str) -> Option<Variant> {
    [
        Variant::UIteration,
        Variant::ThetaIteration,
        Variant::ThetaBoundaryIteration,
    ]
    .into_iter()
    .find(|v| v.name() == name)
}

pub const MOSER_HEADER: [&str; 8] = [
    "i",
    "p",
    "growth",
    "rho",
    "p_next_solved",
    "time_shift",
    "factor",
    "partial_product",
];

pub fn moser_rows(schedule: &MoserSchedule, i_max: usize) -> Result<Vec<Vec<String>>> {
    Ok(moser::schedule_table(schedule, i_max)?
        .iter()
        .map(|r| {
            vec![
                r.i.to_string(),
                fmt_f64(r.p),
                fmt_f64(r.growth),
                fmt_f64(r.rho),
                fmt_f64(r.p_next_solved),
                fmt_f64(r.time_shift),
                fmt_f64(r.factor),
                fmt_f64(r.partial_product),
            ]
        })
        .collect())
}
