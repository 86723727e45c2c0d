//! Backward-Euler time stepping of the coupled bulk/boundary system.
//!
//! The unknown is the nodal temperature `theta` (bulk vertices, boundary
//! vertices included). At a boundary vertex the half-cell balance and the
//! boundary evolution law are added, which eliminates the normal flux:
//!
//! ```text
//! (|V_i| + alpha |Gamma_i|) (theta_i - theta_i^n) / dt
//!     = (A u)_i + beta (B eta)_i + |V_i| f_i + |Gamma_i| g_i,     u = gamma_R(theta)
//! ```
//!
//! Summing all rows, the flux terms cancel exactly, so the total
//! `int theta + alpha int_Gamma eta` changes only by the integrated forcing.
//! Each step is solved by damped Newton on `theta`.

use crate::diagnostics::{self, DiagnosticsRecord};
use crate::domain::{DiscreteDomain, Field};
use crate::error::{check_len, Error, Result};
use crate::linalg::BandedMatrix;
use crate::newton::{newton_solve, NewtonReport, NewtonSettings, NonlinearSystem};
use crate::nonlinearity::Constitutive;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// `alpha eta_t - beta Delta_Gamma eta = -d_n u (+ g)`.
    Dynamic,
    /// Homogeneous Neumann condition, `alpha = beta = 0`.
    Neumann,
    /// Boundary values pinned to data supplied by [`Sources::boundary_values`].
    DirichletOracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub dt_min: f64,
    pub bc_mode: BoundaryMode,
    /// `(theta_lower, theta_upper)`; the regularised law is exact on
    /// `[theta_lower / 2, 2 theta_upper]`.
    pub window: (f64, f64),
    /// Penalised study mode for `alpha = 0, beta > 0`: the boundary carries
    /// mass `1/n` instead of `alpha`.
    pub boundary_penalty: Option<f64>,
    /// Exponents `p` of the recorded `L^p` norms.
    pub lp_exponents: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            dt: 1e-3,
            t_end: 1.0,
            newton_tol: 1e-12,
            newton_max_iter: 30,
            dt_min: 1e-12,
            bc_mode: BoundaryMode::Dynamic,
            window: (0.5, 2.0),
            boundary_penalty: None,
            lp_exponents: vec![1.0, 2.0, 4.0],
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return bad(format!(
                "alpha and beta must be non-negative, got {} and {}",
                self.alpha, self.beta
            ));
        }
        if !(self.dt > 0.0 && self.dt_min > 0.0 && self.dt >= self.dt_min) {
            return bad(format!(
                "need 0 < dt_min <= dt, got dt = {} and dt_min = {}",
                self.dt, self.dt_min
            ));
        }
        if !(self.t_end >= 0.0) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return bad("Newton tolerance and iteration cap must be positive".into());
        }
        if let Some(n) = self.boundary_penalty {
            if !(n >= 1.0) {
                return bad(format!("boundary penalty n must be >= 1, got {n}"));
            }
            if self.alpha != 0.0 || self.beta <= 0.0 {
                return bad("the penalised boundary mode requires alpha = 0 and beta > 0".into());
            }
        }
        match self.bc_mode {
            BoundaryMode::Neumann if self.alpha != 0.0 || self.beta != 0.0 => {
                bad("Neumann mode requires alpha = beta = 0".into())
            }
            BoundaryMode::Dynamic if self.alpha == 0.0 && self.beta == 0.0 => {
                bad("alpha = beta = 0 is the Neumann problem; set bc_mode accordingly".into())
            }
            BoundaryMode::Dynamic if self.alpha == 0.0 && self.boundary_penalty.is_none() => {
                bad("beta > 0 with alpha = 0 is only available in the penalised study mode".into())
            }
            _ => Ok(()),
        }
    }

    /// Mass carried by the boundary: `alpha`, or `1/n` in penalised mode.
    pub fn boundary_mass(&self) -> f64 {
        match self.boundary_penalty {
            Some(n) if self.alpha == 0.0 => 1.0 / n,
            _ => self.alpha,
        }
    }

    pub fn newton_settings(&self) -> NewtonSettings {
        NewtonSettings {
            tol: self.newton_tol,
            max_iter: self.newton_max_iter,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    /// Nodal temperature; the boundary trace `eta` is its restriction.
    pub theta: Vec<f64>,
    pub time: f64,
    /// False once any node has left the exactness window of `gamma_R`.
    pub window_ok: bool,
}

impl State {
    pub fn new(domain: &DiscreteDomain, theta: Vec<f64>) -> Result<Self> {
        check_len(domain.len(), theta.len())?;
        Ok(Self {
            theta,
            time: 0.0,
            window_ok: true,
        })
    }

    pub fn eta(&self, domain: &DiscreteDomain) -> Vec<f64> {
        domain.trace(&self.theta)
    }

    pub fn u<G: Constitutive + ?Sized>(&self, gamma: &G) -> Vec<f64> {
        self.theta.iter().map(|&t| gamma.value(t)).collect()
    }

    pub fn field(&self, domain: &DiscreteDomain) -> Field {
        Field {
            values: self.theta.clone(),
            boundary_values: self.eta(domain),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.theta.iter().all(|&t| t > 0.0)
    }
}

/// Time-dependent data driving a run.
pub trait Sources {
    /// Bulk forcing `f(t)` at every vertex.
    fn bulk(&self, t: f64, domain: &DiscreteDomain) -> Vec<f64>;

    /// Boundary source `g(t)`; only manufactured-solution runs have one.
    fn boundary_source(&self, _t: f64, _domain: &DiscreteDomain) -> Option<Vec<f64>> {
        None
    }

    /// Prescribed boundary values for [`BoundaryMode::DirichletOracle`].
    fn boundary_values(&self, _t: f64, _domain: &DiscreteDomain) -> Option<Vec<f64>> {
        None
    }

    /// Whether the bulk forcing has zero spatial mean at all times.
    fn is_mean_free(&self) -> bool;
}

/// No forcing at all.
#[derive(Debug, Clone, Copy, Default)]
pub struct Unforced;

impl Sources for Unforced {
    fn bulk(&self, _t: f64, domain: &DiscreteDomain) -> Vec<f64> {
        vec![0.0; domain.len()]
    }
    fn is_mean_free(&self) -> bool {
        true
    }
}

/// Nonlinear system of one backward-Euler step.
pub struct StepSystem<'a, G: ?Sized> {
    domain: &'a DiscreteDomain,
    gamma: &'a G,
    previous: &'a [f64],
    dt: f64,
    beta: f64,
    // |V_i| + alpha |Gamma_i|
    mass: Vec<f64>,
    // |V_i| f_i + |Gamma_i| g_i
    source: Vec<f64>,
    // boundary slot -> pinned value
    pinned: Option<Vec<f64>>,
}

impl<'a, G: Constitutive + ?Sized> StepSystem<'a, G> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        domain: &'a DiscreteDomain,
        gamma: &'a G,
        previous: &'a [f64],
        dt: f64,
        boundary_mass: f64,
        beta: f64,
        bulk_source: &[f64],
        boundary_source: Option<&[f64]>,
        pinned: Option<Vec<f64>>,
    ) -> Result<Self> {
        check_len(domain.len(), previous.len())?;
        check_len(domain.len(), bulk_source.len())?;
        let mut mass = domain.bulk_weights().to_vec();
        let mut source: Vec<f64> = mass.iter().zip(bulk_source).map(|(v, f)| v * f).collect();
        for (k, &node) in domain.boundary_nodes().iter().enumerate() {
            mass[node] += boundary_mass * domain.boundary_weights()[k];
        }
        if let Some(g) = boundary_source {
            check_len(domain.boundary_len(), g.len())?;
            for (k, &node) in domain.boundary_nodes().iter().enumerate() {
                source[node] += domain.boundary_weights()[k] * g[k];
            }
        }
        if let Some(p) = &pinned {
            check_len(domain.boundary_len(), p.len())?;
        }
        let beta = if domain.has_surface_diffusion() {
            beta
        } else {
            0.0
        };
        Ok(Self {
            domain,
            gamma,
            previous,
            dt,
            beta,
            mass,
            source,
            pinned,
        })
    }
}

impl<G: Constitutive + ?Sized> NonlinearSystem for StepSystem<'_, G> {
    fn dim(&self) -> usize {
        self.domain.len()
    }

    fn residual(&self, x: &[f64], out: &mut [f64]) {
        let d = self.domain;
        let u: Vec<f64> = x.iter().map(|&t| self.gamma.value(t)).collect();
        let mut flux = vec![0.0; x.len()];
        d.apply_stiffness(&u, &mut flux);
        for i in 0..x.len() {
            out[i] = self.mass[i] * (x[i] - self.previous[i]) / self.dt - flux[i] - self.source[i];
        }
        if self.beta > 0.0 {
            let eta = d.trace(x);
            let mut surface = vec![0.0; eta.len()];
            d.apply_boundary_stiffness(&eta, &mut surface);
            for (k, &node) in d.boundary_nodes().iter().enumerate() {
                out[node] -= self.beta * surface[k];
            }
        }
        if let Some(p) = &self.pinned {
            for (k, &node) in d.boundary_nodes().iter().enumerate() {
                out[node] = self.mass[node] * (x[node] - p[k]) / self.dt;
            }
        }
    }

    fn jacobian(&self, x: &[f64]) -> BandedMatrix {
        let d = self.domain;
        let band = d.bandwidth();
        let mut jac = BandedMatrix::zeros(x.len(), band, band);
        let slope: Vec<f64> = x.iter().map(|&t| self.gamma.derivative(t)).collect();
        for (i, m) in self.mass.iter().enumerate() {
            jac.add(i, i, m / self.dt);
        }
        for f in d.faces() {
            jac.add(f.a, f.a, f.coeff * slope[f.a]);
            jac.add(f.a, f.b, -f.coeff * slope[f.b]);
            jac.add(f.b, f.b, f.coeff * slope[f.b]);
            jac.add(f.b, f.a, -f.coeff * slope[f.a]);
        }
        if self.beta > 0.0 {
            let nodes = d.boundary_nodes();
            for f in d.boundary_faces() {
                let (a, b) = (nodes[f.a], nodes[f.b]);
                let c = self.beta * f.coeff;
                jac.add(a, a, c);
                jac.add(a, b, -c);
                jac.add(b, b, c);
                jac.add(b, a, -c);
            }
        }
        if self.pinned.is_some() {
            for &node in d.boundary_nodes() {
                jac.set_identity_row(node);
                jac.add(node, node, self.mass[node] / self.dt - 1.0);
            }
        }
        jac
    }

    /// Largest nodal residual per unit mass, times `dt`: the size of the
    /// remaining defect measured in units of `theta`.
    fn norm(&self, residual: &[f64]) -> f64 {
        residual
            .iter()
            .zip(&self.mass)
            .fold(0.0, |m, (r, w)| m.max((r * self.dt / w).abs()))
    }
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: State,
    /// Step size actually taken.
    pub dt: f64,
    /// Attempts rejected (and halved) before acceptance.
    pub rejections: usize,
    pub newton: NewtonReport,
}

/// Forcing data evaluated at the new time level.
pub struct StepData {
    pub bulk: Vec<f64>,
    pub boundary_source: Option<Vec<f64>>,
    pub boundary_values: Option<Vec<f64>>,
}

impl StepData {
    pub fn sample<S: Sources + ?Sized>(
        sources: &S,
        cfg: &RunConfig,
        t: f64,
        domain: &DiscreteDomain,
    ) -> Self {
        Self {
            bulk: sources.bulk(t, domain),
            boundary_source: match cfg.bc_mode {
                BoundaryMode::Dynamic => sources.boundary_source(t, domain),
                _ => None,
            },
            boundary_values: match cfg.bc_mode {
                BoundaryMode::DirichletOracle => sources.boundary_values(t, domain),
                _ => None,
            },
        }
    }
}

/// One backward-Euler step of size `dt` without any step-size control.
pub fn solve_step<G: Constitutive + ?Sized>(
    state: &State,
    dt: f64,
    cfg: &RunConfig,
    data: &StepData,
    domain: &DiscreteDomain,
    gamma: &G,
) -> Result<(State, NewtonReport)> {
    let (boundary_mass, beta) = match cfg.bc_mode {
        BoundaryMode::Dynamic => (cfg.boundary_mass(), cfg.beta),
        _ => (0.0, 0.0),
    };
    let pinned = match cfg.bc_mode {
        BoundaryMode::DirichletOracle => Some(data.boundary_values.clone().ok_or_else(|| {
            Error::Config("Dirichlet oracle mode needs prescribed boundary values".into())
        })?),
        _ => None,
    };
    let system = StepSystem::new(
        domain,
        gamma,
        &state.theta,
        dt,
        boundary_mass,
        beta,
        &data.bulk,
        data.boundary_source.as_deref(),
        pinned,
    )?;
    let (theta, report) = newton_solve(&system, state.theta.clone(), &cfg.newton_settings())?;
    let window_ok = state.window_ok && theta.iter().all(|&t| gamma.in_window(t));
    Ok((
        State {
            theta,
            time: state.time + dt,
            window_ok,
        },
        report,
    ))
}

/// Advances `state` by `dt`, halving the step on Newton failure until it
/// succeeds or drops below `cfg.dt_min`.
pub fn step<G: Constitutive + ?Sized, S: Sources + ?Sized>(
    state: &State,
    dt: f64,
    cfg: &RunConfig,
    sources: &S,
    domain: &DiscreteDomain,
    gamma: &G,
) -> Result<StepOutcome> {
    let mut dt = dt;
    let mut rejections = 0;
    loop {
        // the first attempt may be a short final step
        if rejections > 0 && dt < cfg.dt_min {
            return Err(Error::StepUnderflow {
                dt,
                dt_min: cfg.dt_min,
                time: state.time,
            });
        }
        let data = StepData::sample(sources, cfg, state.time + dt, domain);
        match solve_step(state, dt, cfg, &data, domain, gamma) {
            Ok((next, newton)) => {
                return Ok(StepOutcome {
                    state: next,
                    dt,
                    rejections,
                    newton,
                })
            }
            Err(Error::NoConvergence { .. }) | Err(Error::Singular { .. }) => {
                log::debug!("step rejected at t = {} with dt = {dt:e}", state.time);
                rejections += 1;
                dt *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub initial: DiagnosticsRecord,
    /// One record per accepted step.
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: State,
    pub rejected_steps: usize,
    /// Time of the first step that left the exactness window.
    pub window_exit: Option<f64>,
}

/// A hard failure together with everything computed before it.
#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: Error,
    pub partial: RunOutput,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} (after {} accepted steps)",
            self.error,
            self.partial.records.len()
        )
    }
}

impl std::error::Error for RunFailure {}

pub fn run<G: Constitutive + ?Sized, S: Sources + ?Sized>(
    cfg: &RunConfig,
    initial: State,
    sources: &S,
    domain: &DiscreteDomain,
    gamma: &G,
) -> std::result::Result<RunOutput, RunFailure> {
    run_with(cfg, initial, sources, domain, gamma, |_, _| {})
}

/// Like [`run`], calling `observer` after every accepted step.
pub fn run_with<G, S, F>(
    cfg: &RunConfig,
    initial: State,
    sources: &S,
    domain: &DiscreteDomain,
    gamma: &G,
    mut observer: F,
) -> std::result::Result<RunOutput, RunFailure>
where
    G: Constitutive + ?Sized,
    S: Sources + ?Sized,
    F: FnMut(&State, &DiagnosticsRecord),
{
    let first_data = sources.bulk(initial.time, domain);
    let initial_record = diagnostics::initial_record(&initial, &first_data, cfg, domain, gamma);
    let mut out = RunOutput {
        initial: initial_record,
        records: Vec::new(),
        final_state: initial,
        rejected_steps: 0,
        window_exit: None,
    };
    let fail = |error: Error, partial: RunOutput| Err(RunFailure { error, partial });
    if let Err(e) = cfg.validate() {
        return fail(e, out);
    }
    if let Err(e) = check_len(domain.len(), out.final_state.theta.len()) {
        return fail(e, out);
    }
    if !out.final_state.is_positive() {
        return fail(
            Error::Config("initial temperature must be strictly positive".into()),
            out,
        );
    }

    let t_end = cfg.t_end;
    let eps = 1e-12 * t_end.max(1.0);
    let mut dt = cfg.dt;
    while out.final_state.time < t_end - eps {
        let remaining = t_end - out.final_state.time;
        let attempt = if remaining < dt + eps { remaining } else { dt };
        let outcome = match step(&out.final_state, attempt, cfg, sources, domain, gamma) {
            Ok(o) => o,
            Err(e) => return fail(e, out),
        };
        out.rejected_steps += outcome.rejections;
        let mut next = outcome.state;
        if attempt == remaining && outcome.rejections == 0 {
            // land exactly on t_end
            next.time = t_end;
        }
        let f = sources.bulk(next.time, domain);
        let record = diagnostics::step_record(
            &next,
            &out.final_state,
            outcome.dt,
            outcome.newton.iterations,
            &f,
            cfg,
            domain,
            gamma,
        );
        if !next.window_ok && out.window_exit.is_none() {
            out.window_exit = Some(next.time);
            log::warn!("left the exactness window of gamma_R at t = {}", next.time);
        }
        observer(&next, &record);
        out.records.push(record);
        out.final_state = next;
        dt = if outcome.rejections > 0 {
            outcome.dt
        } else {
            (dt * 1.5).min(cfg.dt)
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::{LinearResponse, RegularizedGamma, SingularGamma};

    fn bump(domain: &DiscreteDomain) -> Vec<f64> {
        domain
            .coords()
            .iter()
            .map(|[x, y]| 1.0 + 0.4 * (3.0 * x).cos() * (1.0 + 0.5 * y))
            .collect()
    }

    fn mass(domain: &DiscreteDomain, theta: &[f64], alpha: f64) -> f64 {
        domain.integrate_bulk(theta) + alpha * domain.integrate_boundary(&domain.trace(theta))
    }

    #[test]
    fn constants_are_fixed_points() {
        let d = DiscreteDomain::disk(1.0, 6, 10).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let cfg = RunConfig {
            alpha: 0.7,
            beta: 1.3,
            ..Default::default()
        };
        let s = State::new(&d, vec![1.7; d.len()]).unwrap();
        let out = step(&s, 0.01, &cfg, &Unforced, &d, &g).unwrap();
        assert!(out.state.theta.iter().all(|&t| t == 1.7));
        assert_eq!(out.newton.iterations, 0);
    }

    #[test]
    fn mass_is_conserved_with_dynamic_boundary() {
        let d = DiscreteDomain::disk(1.0, 8, 12).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let cfg = RunConfig {
            alpha: 0.8,
            beta: 0.5,
            dt: 0.01,
            ..Default::default()
        };
        let s = State::new(&d, bump(&d)).unwrap();
        let m0 = mass(&d, &s.theta, 0.8);
        let out = step(&s, 0.01, &cfg, &Unforced, &d, &g).unwrap();
        let m1 = mass(&d, &out.state.theta, 0.8);
        assert!((m1 - m0).abs() <= 1e-13 * m0, "{m0} {m1}");
    }

    #[test]
    fn linear_law_needs_one_newton_iteration() {
        let d = DiscreteDomain::unit_interval(25).unwrap();
        let cfg = RunConfig {
            alpha: 1.0,
            ..Default::default()
        };
        let s = State::new(&d, bump(&d)).unwrap();
        let data = StepData::sample(&Unforced, &cfg, 0.01, &d);
        let (_, report) =
            solve_step(&s, 0.01, &cfg, &data, &d, &LinearResponse { slope: 1.0 }).unwrap();
        assert_eq!(report.iterations, 1);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let d = DiscreteDomain::unit_interval(10).unwrap();
        let g = RegularizedGamma::new(0.4, 1.2).unwrap();
        let prev = bump(&d);
        let f: Vec<f64> = (0..10).map(|i| 0.1 * i as f64 - 0.45).collect();
        let sys = StepSystem::new(&d, &g, &prev, 0.05, 1.0, 0.0, &f, None, None).unwrap();
        // evaluate away from the knots, partly outside the window
        let x: Vec<f64> = (0..10).map(|i| 0.15 + 0.3 * i as f64).collect();
        let jac = sys.jacobian(&x).to_dense();
        let h = 1e-6;
        for j in 0..10 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let mut rp = vec![0.0; 10];
            let mut rm = vec![0.0; 10];
            sys.residual(&xp, &mut rp);
            sys.residual(&xm, &mut rm);
            for i in 0..10 {
                let fd = (rp[i] - rm[i]) / (2.0 * h);
                let scale = jac[i][j].abs().max(1.0);
                assert!(
                    (fd - jac[i][j]).abs() <= 1e-5 * scale,
                    "({i},{j}): {fd} vs {}",
                    jac[i][j]
                );
            }
        }
    }

    #[test]
    fn surface_diffusion_jacobian_matches_finite_differences() {
        let d = DiscreteDomain::disk(1.0, 3, 5).unwrap();
        let g = RegularizedGamma::new(0.4, 1.2).unwrap();
        let prev = bump(&d);
        let f = vec![0.0; d.len()];
        let sys = StepSystem::new(&d, &g, &prev, 0.05, 0.5, 2.0, &f, None, None).unwrap();
        let x: Vec<f64> = prev.iter().map(|v| v * 1.1).collect();
        let jac = sys.jacobian(&x).to_dense();
        let n = d.len();
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += 1e-6;
            xm[j] -= 1e-6;
            let (mut rp, mut rm) = (vec![0.0; n], vec![0.0; n]);
            sys.residual(&xp, &mut rp);
            sys.residual(&xm, &mut rm);
            for i in 0..n {
                let fd = (rp[i] - rm[i]) / 2e-6;
                assert!((fd - jac[i][j]).abs() <= 1e-5 * jac[i][j].abs().max(1.0));
            }
        }
    }

    #[test]
    fn regularisation_is_invisible_inside_the_window() {
        let d = DiscreteDomain::unit_interval(30).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let prev = bump(&d);
        let f = vec![0.0; d.len()];
        let x: Vec<f64> = prev.iter().map(|v| v * 1.01).collect();
        let a = StepSystem::new(&d, &g, &prev, 0.01, 1.0, 0.0, &f, None, None).unwrap();
        let b = StepSystem::new(&d, &SingularGamma, &prev, 0.01, 1.0, 0.0, &f, None, None).unwrap();
        let (mut ra, mut rb) = (vec![0.0; 30], vec![0.0; 30]);
        a.residual(&x, &mut ra);
        b.residual(&x, &mut rb);
        assert_eq!(ra, rb);
    }

    #[test]
    fn newton_converges_quadratically_after_perturbation() {
        let d = DiscreteDomain::unit_interval(40).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let prev = bump(&d);
        let f = vec![0.0; d.len()];
        let sys = StepSystem::new(&d, &g, &prev, 0.002, 1.0, 0.0, &f, None, None).unwrap();
        let settings = NewtonSettings {
            tol: 1e-14,
            ..Default::default()
        };
        let (x, _) = newton_solve(&sys, prev.clone(), &settings).unwrap();
        let perturbed: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| v + 0.05 * ((i * 7) as f64).sin())
            .collect();
        let (_, report) = newton_solve(&sys, perturbed, &settings).unwrap();
        let r = &report.residuals;
        let ratios: Vec<f64> = r.windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.len() >= 2, "{r:?}");
        // superlinear: successive contraction factors shrink
        for w in ratios.windows(2) {
            if w[1] > 0.0 {
                assert!(w[1] < w[0], "{r:?}");
            }
        }
        assert!(ratios.last().unwrap() < &1e-2, "{r:?}");
    }

    #[test]
    fn invalid_configurations() {
        let mut cfg = RunConfig {
            alpha: 0.0,
            beta: 1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.boundary_penalty = Some(10.0);
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.boundary_mass(), 0.1);
        let cfg = RunConfig {
            alpha: 0.0,
            beta: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig {
            bc_mode: BoundaryMode::Neumann,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_horizon_returns_initial_state() {
        let d = DiscreteDomain::unit_interval(10).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let cfg = RunConfig {
            t_end: 0.0,
            ..Default::default()
        };
        let s = State::new(&d, bump(&d)).unwrap();
        let out = run(&cfg, s.clone(), &Unforced, &d, &g).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.final_state, s);
    }

    #[test]
    fn constant_run_has_identical_records() {
        let d = DiscreteDomain::unit_interval(12).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let cfg = RunConfig {
            dt: 0.01,
            t_end: 1.0,
            ..Default::default()
        };
        let s = State::new(&d, vec![1.25; 12]).unwrap();
        let out = run(&cfg, s, &Unforced, &d, &g).unwrap();
        assert_eq!(out.records.len(), 100);
        let first = &out.records[0];
        for r in &out.records {
            assert_eq!(r.energy, first.energy);
            assert_eq!(r.mass, first.mass);
            assert_eq!(r.sup_theta, first.sup_theta);
            assert_eq!(r.dissipation, 0.0);
        }
    }

    #[test]
    fn non_positive_initial_data_is_a_hard_failure() {
        let d = DiscreteDomain::unit_interval(12).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let mut theta = vec![1.0; 12];
        theta[4] = 0.0;
        let s = State::new(&d, theta).unwrap();
        let err = run(&RunConfig::default(), s, &Unforced, &d, &g).unwrap_err();
        assert!(matches!(err.error, Error::Config(_)));
    }

    #[test]
    fn step_underflow_is_reported() {
        let d = DiscreteDomain::unit_interval(12).unwrap();
        let g = RegularizedGamma::new(0.5, 2.0).unwrap();
        let cfg = RunConfig {
            newton_max_iter: 1,
            newton_tol: 1e-300,
            dt: 0.1,
            dt_min: 0.01,
            ..Default::default()
        };
        let s = State::new(&d, bump(&d)).unwrap();
        let err = step(&s, 0.1, &cfg, &Unforced, &d, &g).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }));
    }
}
