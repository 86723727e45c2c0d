//! CSV readers and writers. Floats are written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use vfd_core::{Constitutive, DiagnosticsRecord, DiscreteDomain, State};

use crate::config::ConfigError;

pub fn fmt_f64(v: f64) -> String {
    // no negative zero in the tables
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn fmt_p(p: f64) -> String {
    format!("{p}")
}

/// Header of `series.csv`: fixed columns followed by `lp_<p>` and
/// `boundary_lp_<p>` for every configured exponent.
pub fn series_header(lp: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = [
        "t",
        "dt",
        "newton_iterations",
        "energy",
        "mass",
        "bulk_mass",
        "sup_theta",
        "inf_theta",
        "sup_u",
        "grad_u_sq",
        "surface_dissipation",
        "dissipation",
        "log_minus",
        "v_l1",
        "grad_v_l1",
        "dtheta_dt_l2",
        "forcing_l65",
        "u_form_residual",
        "window_ok",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(lp.iter().map(|&p| format!("lp_{}", fmt_p(p))));
    h.extend(lp.iter().map(|&p| format!("boundary_lp_{}", fmt_p(p))));
    h
}

fn series_row(r: &DiagnosticsRecord, lp: &[f64]) -> Vec<String> {
    let mut row = vec![
        fmt_f64(r.t),
        fmt_f64(r.dt),
        r.newton_iterations.to_string(),
        fmt_f64(r.energy),
        fmt_f64(r.mass),
        fmt_f64(r.bulk_mass),
        fmt_f64(r.sup_theta),
        fmt_f64(r.inf_theta),
        fmt_f64(r.sup_u),
        fmt_f64(r.grad_u_sq),
        fmt_f64(r.surface_dissipation),
        fmt_f64(r.dissipation),
        fmt_f64(r.log_minus),
        fmt_f64(r.v_l1),
        fmt_f64(r.grad_v_l1),
        fmt_f64(r.dtheta_dt_l2),
        fmt_f64(r.forcing_l65),
        r.u_form_residual.map(fmt_f64).unwrap_or_default(),
        r.window_ok.to_string(),
    ];
    let pick = |norms: &[(f64, f64)], p: f64| {
        norms
            .iter()
            .find(|(q, _)| *q == p)
            .map(|&(_, v)| fmt_f64(v))
            .unwrap_or_default()
    };
    row.extend(lp.iter().map(|&p| pick(&r.lp_norms, p)));
    row.extend(lp.iter().map(|&p| pick(&r.boundary_lp_norms, p)));
    row
}

/// One row per record, the initial record first.
pub fn write_series(
    path: &Path,
    initial: &DiagnosticsRecord,
    records: &[DiagnosticsRecord],
    lp: &[f64],
) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(series_header(lp))?;
    for r in std::iter::once(initial).chain(records) {
        w.write_record(series_row(r, lp))?;
    }
    w.flush()?;
    Ok(())
}

/// Nodal snapshot with columns `t,node,x,y,theta,u,boundary`.
pub fn write_fields<G: Constitutive + ?Sized>(
    path: &Path,
    state: &State,
    domain: &DiscreteDomain,
    gamma: &G,
) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["t", "node", "x", "y", "theta", "u", "boundary"])?;
    let t = fmt_f64(state.time);
    for (i, (&theta, c)) in state.theta.iter().zip(domain.coords()).enumerate() {
        w.write_record([
            t.clone(),
            i.to_string(),
            fmt_f64(c[0]),
            fmt_f64(c[1]),
            fmt_f64(theta),
            fmt_f64(gamma.value(theta)),
            domain.boundary_slot(i).is_some().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    f.flush()?;
    Ok(())
}

/// Writes a table of already formatted cells.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn config_err(path: &Path, e: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("{}: {e}", path.display()))
}

/// Reads nodal initial data: the `theta` column if present, else the first.
pub fn read_initial(path: &Path, nodes: usize) -> Result<Vec<f64>, ConfigError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| config_err(path, e))?;
    let col = r
        .headers()
        .map_err(|e| config_err(path, e))?
        .iter()
        .position(|h| h.trim() == "theta")
        .unwrap_or(0);
    let mut values = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| config_err(path, e))?;
        let cell = rec.get(col).unwrap_or("").trim();
        let v = cell
            .parse::<f64>()
            .map_err(|e| config_err(path, format!("row {}: {e}", line + 2)))?;
        values.push(v);
    }
    if values.len() != nodes {
        return Err(config_err(
            path,
            format!("{} values for {} nodes", values.len(), nodes),
        ));
    }
    Ok(values)
}

/// Reads forcing samples: one header row, then rows `t, f_0, ..., f_{N-1}`.
pub fn read_samples(path: &Path, nodes: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>), ConfigError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| config_err(path, e))?;
    let mut times = Vec::new();
    let mut slices = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| config_err(path, e))?;
        let row: Vec<f64> = rec
            .iter()
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| config_err(path, format!("row {}: {e}", line + 2)))?;
        if row.len() != nodes + 1 {
            return Err(config_err(
                path,
                format!(
                    "row {} has {} values, expected t plus {nodes}",
                    line + 2,
                    row.len()
                ),
            ));
        }
        times.push(row[0]);
        slices.push(row[1..].to_vec());
    }
    Ok((times, slices))
}
