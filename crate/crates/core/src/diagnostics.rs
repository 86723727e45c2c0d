//! Per-step monitored quantities and post-run verdicts.
//!
//! Every record field is a pure function of the accepted state, the previous
//! state, the forcing and the configuration, so recomputation reproduces it
//! bit for bit.

use crate::domain::DiscreteDomain;
use crate::error::{Error, Result};
use crate::nonlinearity::Constitutive;
use crate::stepper::{BoundaryMode, RunConfig, State};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// Step size that produced this state (0 for the initial record).
    pub dt: f64,
    pub newton_iterations: usize,
    /// `int (theta - log theta) + alpha int_Gamma (eta - log eta)`; NaN if
    /// some node is not positive.
    pub energy: f64,
    /// `int theta + alpha int_Gamma eta`.
    pub mass: f64,
    /// Bulk mean `m_Omega(theta)`.
    pub bulk_mass: f64,
    /// `(p, ||theta||_p)` over the bulk.
    pub lp_norms: Vec<(f64, f64)>,
    /// `(p, ||eta||_{p,Gamma})`.
    pub boundary_lp_norms: Vec<(f64, f64)>,
    pub sup_theta: f64,
    pub inf_theta: f64,
    /// `||u||_inf` with `u = gamma_R(theta)`.
    pub sup_u: f64,
    /// `||grad u||^2`.
    pub grad_u_sq: f64,
    /// `(grad_Gamma u, grad_Gamma eta)_Gamma`, the discrete counterpart of
    /// `||grad_Gamma log eta||^2`.
    pub surface_dissipation: f64,
    /// `||grad u||^2 + beta * surface_dissipation`.
    pub dissipation: f64,
    /// `int log^- theta`.
    pub log_minus: f64,
    /// `||1/theta||_1`.
    pub v_l1: f64,
    /// `||grad (1/theta)||_1`.
    pub grad_v_l1: f64,
    /// `||(theta^{n+1} - theta^n) / dt||_2` (0 for the initial record).
    pub dtheta_dt_l2: f64,
    /// `||f||_{6/5}` at this time level.
    pub forcing_l65: f64,
    pub u_form_residual: Option<f64>,
    pub window_ok: bool,
}

/// Outcome of a monitored inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Nothing to assert; an empirical quantity is reported instead.
    Report,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Report => "report",
        }
    }
}

/// `E(theta, eta) = int (theta - log theta) + alpha int_Gamma (eta - log eta)`.
pub fn energy(theta: &[f64], alpha: f64, domain: &DiscreteDomain) -> Result<f64> {
    if let Some(&bad) = theta.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::OutOfDomain {
            what: "energy density r - log r",
            value: bad,
        });
    }
    let density: Vec<f64> = theta.iter().map(|&t| t - t.ln()).collect();
    Ok(
        domain.integrate_bulk(&density)
            + alpha * domain.integrate_boundary(&domain.trace(&density)),
    )
}

fn lp_norm(weights: &[f64], values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let s: f64 = weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * v.abs().powf(p))
        .sum();
    s.powf(1.0 / p)
}

/// Weighted `L^1` distance `||a - b||_1 + alpha ||a - b||_{1,Gamma}`.
pub fn l1_distance(a: &[f64], b: &[f64], alpha: f64, domain: &DiscreteDomain) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    domain.integrate_bulk(&diff) + alpha * domain.integrate_boundary(&domain.trace(&diff))
}

/// Residual of the `u`-form `u_t = u^2 (Delta u + f)` at interior vertices.
/// `None` when either state leaves the exactness window.
pub fn u_form_residual<G: Constitutive + ?Sized>(
    state: &State,
    previous: &State,
    dt: f64,
    f: &[f64],
    domain: &DiscreteDomain,
    gamma: &G,
) -> Option<f64> {
    let inside = |s: &State| s.theta.iter().all(|&t| gamma.in_window(t));
    if !inside(state) || !inside(previous) || dt <= 0.0 {
        return None;
    }
    let u = state.u(gamma);
    let u_prev = previous.u(gamma);
    let mut flux = vec![0.0; u.len()];
    domain.apply_stiffness(&u, &mut flux);
    let weights = domain.bulk_weights();
    let worst = (0..u.len())
        .filter(|&i| domain.boundary_slot(i).is_none())
        .map(|i| {
            let lap = flux[i] / weights[i];
            ((u[i] - u_prev[i]) / dt - u[i] * u[i] * (lap + f[i])).abs()
        })
        .fold(0.0, f64::max);
    Some(worst)
}

fn base_record<G: Constitutive + ?Sized>(
    state: &State,
    f: &[f64],
    cfg: &RunConfig,
    domain: &DiscreteDomain,
    gamma: &G,
) -> DiagnosticsRecord {
    let alpha = match cfg.bc_mode {
        BoundaryMode::Dynamic => cfg.boundary_mass(),
        _ => 0.0,
    };
    let beta = match cfg.bc_mode {
        BoundaryMode::Dynamic => cfg.beta,
        _ => 0.0,
    };
    let theta = &state.theta;
    let eta = domain.trace(theta);
    let u = state.u(gamma);
    let u_eta = domain.trace(&u);
    let v: Vec<f64> = theta.iter().map(|t| 1.0 / t).collect();
    let log_minus: Vec<f64> = theta.iter().map(|t| (-t.ln()).max(0.0)).collect();
    let grad_u_sq = domain.gradient_pairing(&u, &u);
    let surface_dissipation = domain.boundary_gradient_pairing(&u_eta, &eta);
    let bw = domain.bulk_weights();
    let gw = domain.boundary_weights();
    DiagnosticsRecord {
        t: state.time,
        dt: 0.0,
        newton_iterations: 0,
        energy: energy(theta, alpha, domain).unwrap_or(f64::NAN),
        mass: domain.integrate_bulk(theta) + alpha * domain.integrate_boundary(&eta),
        bulk_mass: domain.integrate_bulk(theta) / domain.measure(),
        lp_norms: cfg
            .lp_exponents
            .iter()
            .map(|&p| (p, lp_norm(bw, theta, p)))
            .collect(),
        boundary_lp_norms: cfg
            .lp_exponents
            .iter()
            .map(|&p| (p, lp_norm(gw, &eta, p)))
            .collect(),
        sup_theta: theta.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        inf_theta: theta.iter().copied().fold(f64::INFINITY, f64::min),
        sup_u: u.iter().fold(0.0, |m, x| m.max(x.abs())),
        grad_u_sq,
        surface_dissipation,
        dissipation: grad_u_sq + beta * surface_dissipation,
        log_minus: domain.integrate_bulk(&log_minus),
        v_l1: domain.integrate_bulk(&v.iter().map(|x| x.abs()).collect::<Vec<_>>()),
        grad_v_l1: domain.gradient_l1(&v),
        dtheta_dt_l2: 0.0,
        forcing_l65: lp_norm(bw, f, 1.2),
        u_form_residual: None,
        window_ok: state.window_ok,
    }
}

pub fn initial_record<G: Constitutive + ?Sized>(
    state: &State,
    f: &[f64],
    cfg: &RunConfig,
    domain: &DiscreteDomain,
    gamma: &G,
) -> DiagnosticsRecord {
    base_record(state, f, cfg, domain, gamma)
}

#[allow(clippy::too_many_arguments)]
pub fn step_record<G: Constitutive + ?Sized>(
    state: &State,
    previous: &State,
    dt: f64,
    newton_iterations: usize,
    f: &[f64],
    cfg: &RunConfig,
    domain: &DiscreteDomain,
    gamma: &G,
) -> DiagnosticsRecord {
    let mut r = base_record(state, f, cfg, domain, gamma);
    r.dt = dt;
    r.newton_iterations = newton_iterations;
    let rate: Vec<f64> = state
        .theta
        .iter()
        .zip(&previous.theta)
        .map(|(a, b)| (a - b) / dt)
        .collect();
    r.dtheta_dt_l2 = lp_norm(domain.bulk_weights(), &rate, 2.0);
    r.u_form_residual = u_form_residual(state, previous, dt, f, domain, gamma);
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBudget {
    pub verdict: Verdict,
    /// `max_t [E(t) + int_0^t D - E_0]` (with `D` halved in `||grad u||^2`
    /// when forced).
    pub max_excess: f64,
    /// Largest single-step increase of the energy.
    pub max_step_increase: f64,
    /// `(LHS - E_0) / ||f||^2_{L^2 L^{6/5}}`, forced runs only.
    pub empirical_constant: Option<f64>,
}

/// Checks `E(t) + int_0^t dissipation <= E_0 (+ c ||f||^2)`.
///
/// Unforced runs must satisfy the inequality within `tol` and the energy must
/// not increase by more than `step_tol` in any step. Forced runs only report
/// the constant `c` that the data require.
pub fn energy_budget_check(
    initial: &DiagnosticsRecord,
    records: &[DiagnosticsRecord],
    beta: f64,
    tol: f64,
    step_tol: f64,
) -> EnergyBudget {
    let forced = records.iter().any(|r| r.forcing_l65 > 0.0);
    let e0 = initial.energy;
    let mut dissipated = 0.0;
    let mut forcing_sq = 0.0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_step_increase = f64::NEG_INFINITY;
    let mut prev = e0;
    for r in records {
        let d = if forced {
            0.5 * r.grad_u_sq + beta * r.surface_dissipation
        } else {
            r.dissipation
        };
        dissipated += r.dt * d;
        forcing_sq += r.dt * r.forcing_l65 * r.forcing_l65;
        max_excess = max_excess.max(r.energy + dissipated - e0);
        max_step_increase = max_step_increase.max(r.energy - prev);
        prev = r.energy;
    }
    if records.is_empty() {
        max_excess = 0.0;
        max_step_increase = 0.0;
    }
    if forced {
        EnergyBudget {
            verdict: Verdict::Report,
            max_excess,
            max_step_increase,
            empirical_constant: Some(max_excess.max(0.0) / forcing_sq),
        }
    } else {
        EnergyBudget {
            verdict: Verdict::from_bool(max_excess <= tol && max_step_increase <= step_tol),
            max_excess,
            max_step_increase,
            empirical_constant: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProfile {
    pub p: f64,
    /// `(t, ||theta||_p + alpha ||eta||_{p,Gamma})`, initial time included.
    pub profile: Vec<(f64, f64)>,
    pub sup: f64,
    pub verdict: Verdict,
}

/// Time profile of the combined `L^p` norm; the verdict only asserts that
/// it stays finite.
pub fn lp_conservation_check(
    initial: &DiagnosticsRecord,
    records: &[DiagnosticsRecord],
    p: f64,
    alpha: f64,
) -> Option<LpProfile> {
    let pick = |r: &DiagnosticsRecord| {
        let bulk = r.lp_norms.iter().find(|(q, _)| *q == p)?.1;
        let bnd = r.boundary_lp_norms.iter().find(|(q, _)| *q == p)?.1;
        Some((r.t, bulk + alpha * bnd))
    };
    let profile: Vec<(f64, f64)> = std::iter::once(initial)
        .chain(records)
        .map(pick)
        .collect::<Option<_>>()?;
    let sup = profile.iter().fold(0.0_f64, |m, &(_, v)| m.max(v));
    Some(LpProfile {
        p,
        verdict: Verdict::from_bool(sup.is_finite()),
        profile,
        sup,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationRow {
    pub tau: f64,
    /// `sup_{t >= tau} ||u(t)||_inf`.
    pub sup_u: f64,
    /// `sup_{t >= tau} sup theta(t)`.
    pub sup_theta: f64,
}

/// Sup of `|u|` and `theta` after each waiting time `tau`. `tau = 0` includes
/// the initial datum.
pub fn regularization_probe(
    initial: &DiagnosticsRecord,
    records: &[DiagnosticsRecord],
    taus: &[f64],
) -> Vec<RegularizationRow> {
    taus.iter()
        .map(|&tau| {
            let mut row = RegularizationRow {
                tau,
                sup_u: f64::NEG_INFINITY,
                sup_theta: f64::NEG_INFINITY,
            };
            for r in std::iter::once(initial).chain(records) {
                if r.t >= tau - 1e-12 {
                    row.sup_u = row.sup_u.max(r.sup_u);
                    row.sup_theta = row.sup_theta.max(r.sup_theta);
                }
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contraction {
    /// `(t, D(t))` with `D = ||theta_1 - theta_2||_1 + alpha ||eta_1 - eta_2||_{1,Gamma}`.
    pub distances: Vec<(f64, f64)>,
    /// Largest per-step increase of `D`.
    pub max_increase: f64,
    pub verdict: Verdict,
}

/// Compares two trajectories sampled at the same times (initial states
/// first) and checks that their weighted `L^1` distance never grows by more
/// than `tol` in one step and never exceeds `D(0) + tol`.
pub fn l1_contraction_check(
    first: &[State],
    second: &[State],
    alpha: f64,
    domain: &DiscreteDomain,
    tol: f64,
) -> Result<Contraction> {
    if first.len() != second.len() {
        return Err(Error::Config(format!(
            "trajectories have different lengths ({} and {})",
            first.len(),
            second.len()
        )));
    }
    let mut distances = Vec::with_capacity(first.len());
    for (a, b) in first.iter().zip(second) {
        if (a.time - b.time).abs() > 1e-12 * a.time.abs().max(1.0) {
            return Err(Error::Config(format!(
                "trajectories are sampled at different times ({} vs {})",
                a.time, b.time
            )));
        }
        distances.push((a.time, l1_distance(&a.theta, &b.theta, alpha, domain)));
    }
    let max_increase = distances
        .windows(2)
        .map(|w| w[1].1 - w[0].1)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let d0 = distances.first().map_or(0.0, |d| d.1);
    let bounded = distances.iter().all(|&(_, d)| d <= d0 + tol);
    Ok(Contraction {
        verdict: Verdict::from_bool(max_increase <= tol && bounded),
        distances,
        max_increase,
    })
}

/// Smallest constants compatible with the log-Poincaré inequality
/// `||v||_1 <= |Omega| e^{C1 K} + C2/|Omega| ||grad v||_1` over all records,
/// once with `C2 = 0` and once with `C1 = 0`.
pub fn log_poincare_constants(records: &[DiagnosticsRecord], measure: f64) -> (f64, f64) {
    let mut c1 = 0.0_f64;
    let mut c2 = 0.0_f64;
    for r in records {
        let ratio = r.v_l1 / measure;
        if ratio > 1.0 {
            if r.log_minus > 0.0 {
                c1 = c1.max(ratio.ln() / r.log_minus);
            } else {
                c1 = f64::INFINITY;
            }
            if r.grad_v_l1 > 0.0 {
                c2 = c2.max(measure * (r.v_l1 - measure) / r.grad_v_l1);
            } else {
                c2 = f64::INFINITY;
            }
        }
    }
    (c1, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::RegularizedGamma;
    use crate::stepper::{run, run_with, Unforced};
    use std::f64::consts::E;

    #[test]
    fn energy_of_constants() {
        let d = DiscreteDomain::unit_interval(11).unwrap();
        let e = energy(&[1.0; 11], 0.5, &d).unwrap();
        assert!((e - (1.0 + 0.5 * 2.0)).abs() < 1e-14);
        let e = energy(&[E; 11], 0.5, &d).unwrap();
        assert!((e - (E - 1.0) * 2.0).abs() < 1e-14);
        assert!(energy(
            &[1.0, 0.0, 1.0],
            0.0,
            &DiscreteDomain::unit_interval(3).unwrap()
        )
        .is_err());
    }

    #[test]
    fn energy_of_two_level_field_matches_direct_sum() {
        let d = DiscreteDomain::unit_interval(5).unwrap();
        let theta = [0.5, 0.5, 2.0, 2.0, 2.0];
        let alpha = 0.3;
        // weights h/2, h, h, h, h/2 with h = 1/4; endpoints weight 1 on Gamma
        let h = 0.25;
        let w = [h / 2.0, h, h, h, h / 2.0];
        let mut expected = 0.0;
        for (t, wi) in theta.iter().zip(w) {
            expected += wi * (t - f64::ln(*t));
        }
        expected += alpha * ((0.5 - f64::ln(0.5)) + (2.0 - f64::ln(2.0)));
        assert!((energy(&theta, alpha, &d).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn energy_is_minimised_by_one_among_constants() {
        let d = DiscreteDomain::disk(1.0, 4, 8).unwrap();
        let at_one = energy(&vec![1.0; d.len()], 1.0, &d).unwrap();
        assert!((at_one - (d.measure() + d.boundary_measure())).abs() < 1e-12);
        for c in [0.2, 0.9, 1.1, 3.0] {
            assert!(energy(&vec![c; d.len()], 1.0, &d).unwrap() > at_one);
        }
    }

    fn relaxing_run() -> (
        Vec<State>,
        DiagnosticsRecord,
        Vec<DiagnosticsRecord>,
        DiscreteDomain,
    ) {
        let d = DiscreteDomain::unit_interval(41).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let cfg = RunConfig {
            alpha: 0.5,
            dt: 0.005,
            t_end: 0.2,
            ..Default::default()
        };
        let theta: Vec<f64> = d
            .coords()
            .iter()
            .map(|c| 1.0 + 0.5 * (6.0 * c[0]).sin())
            .collect();
        let s = State::new(&d, theta).unwrap();
        let mut states = vec![s.clone()];
        let out = run_with(&cfg, s, &Unforced, &d, &g, |s, _| states.push(s.clone())).unwrap();
        (states, out.initial, out.records, d)
    }

    #[test]
    fn unforced_energy_budget_holds() {
        let (_, initial, records, _) = relaxing_run();
        let budget = energy_budget_check(&initial, &records, 0.0, 1e-8, 1e-10);
        assert_eq!(budget.verdict, Verdict::Pass, "{budget:?}");
        assert!(budget.max_step_increase < 0.0);
    }

    #[test]
    fn steady_state_budget_is_tight() {
        let d = DiscreteDomain::unit_interval(9).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let cfg = RunConfig {
            dt: 0.1,
            t_end: 1.0,
            ..Default::default()
        };
        let out = run(
            &cfg,
            State::new(&d, vec![1.3; 9]).unwrap(),
            &Unforced,
            &d,
            &g,
        )
        .unwrap();
        let budget = energy_budget_check(&out.initial, &out.records, 0.0, 1e-8, 1e-10);
        assert_eq!(budget.max_excess, 0.0);
        assert_eq!(budget.verdict, Verdict::Pass);
    }

    #[test]
    fn mass_norm_is_the_l1_norm_without_boundary() {
        let d = DiscreteDomain::unit_interval(21).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let cfg = RunConfig {
            alpha: 0.0,
            beta: 0.0,
            bc_mode: BoundaryMode::Neumann,
            dt: 0.01,
            t_end: 0.1,
            ..Default::default()
        };
        let theta: Vec<f64> = d.coords().iter().map(|c| 1.0 + 0.3 * c[0]).collect();
        let out = run(&cfg, State::new(&d, theta).unwrap(), &Unforced, &d, &g).unwrap();
        let profile = lp_conservation_check(&out.initial, &out.records, 1.0, 0.0).unwrap();
        let m0 = profile.profile[0].1;
        for (_, v) in &profile.profile {
            assert!((v - m0).abs() < 1e-12 * m0);
        }
        assert!((m0 - out.initial.mass).abs() < 1e-14);
        assert!(lp_conservation_check(&out.initial, &out.records, 3.0, 0.0).is_none());
    }

    #[test]
    fn identical_trajectories_do_not_separate() {
        let (states, ..) = relaxing_run();
        let d = DiscreteDomain::unit_interval(41).unwrap();
        let c = l1_contraction_check(&states, &states, 0.5, &d, 1e-9).unwrap();
        assert!(c.distances.iter().all(|&(_, v)| v == 0.0));
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(l1_contraction_check(&states, &states[1..], 0.5, &d, 1e-9).is_err());
    }

    #[test]
    fn regularization_probe_on_constant_data() {
        let d = DiscreteDomain::unit_interval(9).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let cfg = RunConfig {
            dt: 0.05,
            t_end: 0.5,
            ..Default::default()
        };
        let out = run(
            &cfg,
            State::new(&d, vec![0.8; 9]).unwrap(),
            &Unforced,
            &d,
            &g,
        )
        .unwrap();
        let table = regularization_probe(&out.initial, &out.records, &[0.0, 0.1, 0.25]);
        for row in table {
            assert_eq!(row.sup_u, 1.25);
            assert_eq!(row.sup_theta, 0.8);
        }
    }

    #[test]
    fn u_form_residual_vanishes_at_rest_and_scales_with_dt() {
        let d = DiscreteDomain::unit_interval(9).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let s = State::new(&d, vec![1.1; 9]).unwrap();
        assert_eq!(u_form_residual(&s, &s, 0.1, &[0.0; 9], &d, &g), Some(0.0));

        let d = DiscreteDomain::unit_interval(41).unwrap();
        let theta: Vec<f64> = d
            .coords()
            .iter()
            .map(|c| 1.0 + 0.3 * (3.0 * c[0]).cos())
            .collect();
        let residual_after = |dt: f64| {
            let cfg = RunConfig {
                dt,
                t_end: 0.02,
                ..Default::default()
            };
            let out = run(
                &cfg,
                State::new(&d, theta.clone()).unwrap(),
                &Unforced,
                &d,
                &g,
            )
            .unwrap();
            out.records.last().unwrap().u_form_residual.unwrap()
        };
        let ratio = residual_after(0.002) / residual_after(0.001);
        assert!((1.4..2.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn log_poincare_constants_are_reported() {
        let (_, _, records, d) = relaxing_run();
        let (c1, c2) = log_poincare_constants(&records, d.measure());
        assert!(c1.is_finite() && c1 >= 0.0);
        assert!(c2.is_finite() && c2 >= 0.0);
    }
}
