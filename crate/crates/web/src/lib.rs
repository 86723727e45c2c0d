//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exposed: a steppable simulation on an interval or a
//! disk, samples of the regularised constitutive law, and the partial
//! products of the Moser bound.

use vfd_core::diagnostics::energy;
use vfd_core::moser::{self, MoserSchedule, Variant};
use vfd_core::stepper::{self, Unforced};
use vfd_core::{Constitutive, DiscreteDomain, RegularizedGamma, RunConfig, State};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Unforced run started from a cold spot of depth `depth` in a unit
/// background.
#[wasm_bindgen]
pub struct Simulation {
    domain: DiscreteDomain,
    gamma: RegularizedGamma,
    cfg: RunConfig,
    state: State,
    steps: usize,
}

#[wasm_bindgen]
impl Simulation {
    /// `kind` is `"interval"` or `"disk"`; `resolution` is the node count of
    /// the interval or the number of radial cells of the disk.
    #[wasm_bindgen(constructor)]
    pub fn new(
        kind: &str,
        resolution: usize,
        alpha: f64,
        beta: f64,
        dt: f64,
        depth: f64,
    ) -> Result<Simulation, JsError> {
        let domain = match kind {
            "interval" => DiscreteDomain::unit_interval(resolution),
            "disk" => DiscreteDomain::disk(1.0, resolution, 2 * resolution),
            other => return Err(JsError::new(&format!("unknown domain {other:?}"))),
        }
        .map_err(js_err)?;
        if !(depth > 0.0 && depth < 1.0) {
            return Err(JsError::new("depth must lie in (0, 1)"));
        }
        let centre = if kind == "interval" {
            [0.5, 0.0]
        } else {
            [0.0, 0.0]
        };
        let width = if kind == "interval" { 0.05 } else { 0.3 };
        let theta = domain
            .coords()
            .iter()
            .map(|c| {
                let s = (c[0] - centre[0]).hypot(c[1] - centre[1]) / width;
                if s < 1.0 {
                    1.0 - (1.0 - depth) * (1.0 - s * s).powi(2)
                } else {
                    1.0
                }
            })
            .collect();
        let window = (depth, 1.0);
        let cfg = RunConfig {
            alpha,
            beta,
            dt,
            t_end: f64::INFINITY,
            window,
            ..RunConfig::default()
        };
        cfg.validate().map_err(js_err)?;
        let gamma = RegularizedGamma::new(window.0, window.1).map_err(js_err)?;
        let state = State::new(&domain, theta).map_err(js_err)?;
        Ok(Simulation {
            domain,
            gamma,
            cfg,
            state,
            steps: 0,
        })
    }

    /// Advances `count` backward-Euler steps.
    pub fn step(&mut self, count: usize) -> Result<(), JsError> {
        for _ in 0..count {
            let out = stepper::step(
                &self.state,
                self.cfg.dt,
                &self.cfg,
                &Unforced,
                &self.domain,
                &self.gamma,
            )
            .map_err(js_err)?;
            self.state = out.state;
            self.steps += 1;
        }
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.state.time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn theta(&self) -> Vec<f64> {
        self.state.theta.clone()
    }

    /// `u = gamma_R(theta)` at every node.
    pub fn u(&self) -> Vec<f64> {
        self.state.u(&self.gamma)
    }

    pub fn x(&self) -> Vec<f64> {
        self.domain.coords().iter().map(|c| c[0]).collect()
    }

    pub fn y(&self) -> Vec<f64> {
        self.domain.coords().iter().map(|c| c[1]).collect()
    }

    pub fn energy(&self) -> f64 {
        energy(&self.state.theta, self.cfg.boundary_mass(), &self.domain).unwrap_or(f64::NAN)
    }

    pub fn mass(&self) -> f64 {
        let bulk = self.domain.integrate_bulk(&self.state.theta);
        bulk + self.cfg.boundary_mass()
            * self
                .domain
                .integrate_boundary(&self.state.eta(&self.domain))
    }
}

/// `gamma_R` and `-1/r` at `samples` points spread logarithmically over
/// `[lower / 4, 4 upper]`, flattened as `r, gamma_R(r), -1/r` triples.
#[wasm_bindgen]
pub fn gamma_curve(lower: f64, upper: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let g = RegularizedGamma::new(lower, upper).map_err(js_err)?;
    let (a, b) = ((lower / 4.0).ln(), (4.0 * upper).ln());
    let n = samples.max(2);
    let mut out = Vec::with_capacity(3 * n);
    for k in 0..n {
        let r = (a + (b - a) * k as f64 / (n - 1) as f64).exp();
        out.extend([r, g.value(r), -1.0 / r]);
    }
    Ok(out)
}

/// Partial products of the Moser bound for the `u` iteration, followed by
/// the exponents `p_i`, both of length `i_max`.
#[wasm_bindgen]
pub fn moser_products(epsilon: f64, tau: f64, i_max: usize) -> Result<Vec<f64>, JsError> {
    let schedule = MoserSchedule::new(epsilon, tau, Variant::UIteration).map_err(js_err)?;
    let report = moser::bound_products(&schedule, i_max, 1e-10);
    let mut out = report.partial_products;
    out.extend(
        moser::exponent_sequence(&schedule, i_max)
            .into_iter()
            .take(i_max),
    );
    Ok(out)
}

/// Growth factor `H` of the exponent sequence.
#[wasm_bindgen]
pub fn growth_factor(epsilon: f64) -> f64 {
    moser::growth_factor(epsilon)
}
