//! Damped Newton iteration for square nonlinear systems with banded
//! Jacobians.

use crate::error::{Error, Result};
use crate::linalg::BandedMatrix;

/// A residual map `F: R^n -> R^n` with its exact Jacobian.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;
    fn residual(&self, x: &[f64], out: &mut [f64]);
    fn jacobian(&self, x: &[f64]) -> BandedMatrix;
    /// Norm used for the stopping test and the line search.
    fn norm(&self, residual: &[f64]) -> f64 {
        residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 30,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Residual norm before the first and after every iteration.
    pub residuals: Vec<f64>,
}

/// Newton's method with backtracking: the step is halved while the residual
/// norm fails to decrease, at most `max_halvings` times.
pub fn newton_solve<S: NonlinearSystem + ?Sized>(
    system: &S,
    initial: Vec<f64>,
    settings: &NewtonSettings,
) -> Result<(Vec<f64>, NewtonReport)> {
    let n = system.dim();
    let mut x = initial;
    let mut r = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial_r = vec![0.0; n];
    system.residual(&x, &mut r);
    let mut norm = system.norm(&r);
    let mut report = NewtonReport {
        iterations: 0,
        residuals: vec![norm],
    };
    while norm > settings.tol {
        if report.iterations == settings.max_iter || !norm.is_finite() {
            return Err(Error::NoConvergence {
                iterations: report.iterations,
                residual: norm,
            });
        }
        let mut step: Vec<f64> = r.iter().map(|v| -v).collect();
        system.jacobian(&x).solve(&mut step)?;

        let mut lambda = 1.0;
        let mut halvings = 0;
        loop {
            for ((t, xi), s) in trial.iter_mut().zip(&x).zip(&step) {
                *t = xi + lambda * s;
            }
            system.residual(&trial, &mut trial_r);
            let trial_norm = system.norm(&trial_r);
            if trial_norm < norm || halvings == settings.max_halvings {
                norm = trial_norm;
                break;
            }
            lambda *= 0.5;
            halvings += 1;
        }
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut r, &mut trial_r);
        report.iterations += 1;
        report.residuals.push(norm);
    }
    Ok((x, report))
}
