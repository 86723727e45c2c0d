//! Exponent bookkeeping of the Moser iteration used for the `L^infinity`
//! regularisation estimates: growth factors, interpolation exponents,
//! waiting-time schedules and the convergence of the iterated bounds.
//!
//! Summability of the forcing is `L^{3+eps}` with conjugate exponent
//! `r = (3+eps)/(2+eps)`. Each step interpolates between `L^infinity L^p` and
//! `L^{p+s} L^{3(p+s)}` (with `s = 2` for the `u` iteration and `s = -2` for
//! the temperature iterations), which multiplies the exponent by
//! `H = (9+4 eps)/(9+3 eps)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Iteration on `u = -1/theta` starting from `p0 = 1`.
    UIteration,
    /// Iteration on `theta` with surface diffusion, from `p0 = 3 + eps`.
    ThetaIteration,
    /// Iteration on `theta` without surface diffusion, from `p0 = 4 + eps`.
    ThetaBoundaryIteration,
}

impl Variant {
    pub fn initial_exponent(self, epsilon: f64) -> f64 {
        match self {
            Variant::UIteration => 1.0,
            Variant::ThetaIteration => 3.0 + epsilon,
            Variant::ThetaBoundaryIteration => 4.0 + epsilon,
        }
    }

    /// `(a, b)` in the interpolation system: the iteration pairs `p_i + a`
    /// with `p_{i+1} + b`.
    fn shifts(self) -> (f64, f64) {
        match self {
            Variant::UIteration => (2.0, 1.0),
            _ => (-2.0, -1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::UIteration => "u",
            Variant::ThetaIteration => "theta",
            Variant::ThetaBoundaryIteration => "theta-boundary",
        }
    }
}

/// `K_eps = (9 + 5 eps) / (9 + 3 eps)`.
pub fn k_epsilon(eps: f64) -> f64 {
    (9.0 + 5.0 * eps) / (9.0 + 3.0 * eps)
}

/// `H = (9 + 4 eps) / (9 + 3 eps)`.
pub fn growth_factor(eps: f64) -> f64 {
    (9.0 + 4.0 * eps) / (9.0 + 3.0 * eps)
}

/// Conjugate exponent of `3 + eps`.
pub fn conjugate_exponent(eps: f64) -> f64 {
    (3.0 + eps) / (2.0 + eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserSchedule {
    pub epsilon: f64,
    pub p0: f64,
    pub tau: f64,
    pub variant: Variant,
}

impl MoserSchedule {
    pub fn new(epsilon: f64, tau: f64, variant: Variant) -> Result<Self> {
        Self::with_initial_exponent(epsilon, tau, variant, variant.initial_exponent(epsilon))
    }

    pub fn with_initial_exponent(
        epsilon: f64,
        tau: f64,
        variant: Variant,
        p0: f64,
    ) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::Config(format!(
                "epsilon must lie in [0, 1), got {epsilon}"
            )));
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::Config(format!("tau must lie in (0, 1), got {tau}")));
        }
        let (a, _) = variant.shifts();
        if !(p0 >= 1.0 && p0 + a > 0.0) {
            return Err(Error::OutOfDomain {
                what: "initial Moser exponent",
                value: p0,
            });
        }
        Ok(Self {
            epsilon,
            p0,
            tau,
            variant,
        })
    }

    pub fn growth(&self) -> f64 {
        growth_factor(self.epsilon)
    }

    pub fn k_eps(&self) -> f64 {
        k_epsilon(self.epsilon)
    }

    /// False when `H = 1`, i.e. the exponents never grow.
    pub fn closes(&self) -> bool {
        self.growth() > 1.0
    }
}

/// `p_i = p0 H^i` for `i = 0..=i_max`.
pub fn exponent_sequence(schedule: &MoserSchedule, i_max: usize) -> Vec<f64> {
    let h = schedule.growth();
    let mut p = schedule.p0;
    let mut out = Vec::with_capacity(i_max + 1);
    for _ in 0..=i_max {
        out.push(p);
        p *= h;
    }
    out
}

/// Interpolation exponent of the `u` iteration,
/// `rho = q K / (1 + q K)` with `q = p/(p+2)`.
pub fn rho_exponent(p: f64, eps: f64) -> Result<f64> {
    rho_for(Variant::UIteration, p, eps)
}

/// Closed-form interpolation exponent for any variant.
pub fn rho_for(variant: Variant, p: f64, eps: f64) -> Result<f64> {
    let (a, _) = variant.shifts();
    if !(p >= 1.0 && p + a > 0.0) {
        return Err(Error::OutOfDomain {
            what: "Moser exponent p",
            value: p,
        });
    }
    let qk = p / (p + a) * k_epsilon(eps);
    Ok(qk / (1.0 + qk))
}

/// Solves the interpolation system
///
/// ```text
/// (1 - rho)/(p + a)                     = 1 / (2 (p' + b))
/// rho/p + (1 - rho)/(3 (p + a))         = 1 / (r (p' + b))
/// ```
///
/// for `(rho, p')`. It is linear in `rho` and `y = 1/(p' + b)`.
pub fn solve_interpolation_system(variant: Variant, p: f64, eps: f64) -> Result<(f64, f64)> {
    let (a, b) = variant.shifts();
    if !(p >= 1.0 && p + a > 0.0) {
        return Err(Error::OutOfDomain {
            what: "Moser exponent p",
            value: p,
        });
    }
    let r = conjugate_exponent(eps);
    let pa = p + a;
    // [ 1/pa                 1/2  ] [rho]   [  1/pa      ]
    // [ 1/p - 1/(3 pa)      -1/r  ] [ y ] = [ -1/(3 pa)  ]
    let (m11, m12, r1) = (1.0 / pa, 0.5, 1.0 / pa);
    let (m21, m22, r2) = (1.0 / p - 1.0 / (3.0 * pa), -1.0 / r, -1.0 / (3.0 * pa));
    let det = m11 * m22 - m12 * m21;
    let rho = (r1 * m22 - m12 * r2) / det;
    let y = (m11 * r2 - m21 * r1) / det;
    Ok((rho, 1.0 / y - b))
}

/// Largest absolute residual of the interpolation system at the given
/// triple.
pub fn interpolation_residual(variant: Variant, p: f64, rho: f64, p_next: f64, eps: f64) -> f64 {
    let (a, b) = variant.shifts();
    let r = conjugate_exponent(eps);
    let first = (1.0 - rho) / (p + a) - 1.0 / (2.0 * (p_next + b));
    let second = rho / p + (1.0 - rho) / (3.0 * (p + a)) - 1.0 / (r * (p_next + b));
    first.abs().max(second.abs())
}

/// Whether `(4+eps) H(eps') <= 2 ((4+eps) - 2)`, the condition that keeps
/// `p_{i+1} <= 2 (p_i - 2)` along the boundary iteration.
pub fn boundary_iteration_feasible(eps: f64, eps_prime: f64) -> bool {
    (4.0 + eps) * growth_factor(eps_prime) <= 2.0 * ((4.0 + eps) - 2.0)
}

/// Checks `p_{i+1} <= 2 (p_i - 2)` directly for `i < steps`, with
/// `p_i = (4 + eps) H(eps')^i`.
pub fn boundary_iteration_holds(eps: f64, eps_prime: f64, steps: usize) -> bool {
    let h = growth_factor(eps_prime);
    let mut p = 4.0 + eps;
    (0..steps).all(|_| {
        let next = p * h;
        let ok = next <= 2.0 * (p - 2.0);
        p = next;
        ok
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeShifts {
    /// `t_i = 3 tau / (pi^2 i^2)` for `i = 1..=i_max`.
    pub shifts: Vec<f64>,
    pub partial_sum: f64,
    /// Upper bound `3 tau / (pi^2 i_max)` on the omitted tail.
    pub tail_bound: f64,
}

pub fn time_shift_schedule(tau: f64, i_max: usize) -> TimeShifts {
    let c = 3.0 * tau / (PI * PI);
    let shifts: Vec<f64> = (1..=i_max).map(|i| c / (i as f64 * i as f64)).collect();
    // smallest terms first
    let partial_sum = shifts.iter().rev().sum();
    TimeShifts {
        shifts,
        partial_sum,
        tail_bound: if i_max == 0 {
            tau / 2.0
        } else {
            c / i_max as f64
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport {
    /// `eta_k = (H^k + 2) / H^k` for `k = 1..=i_max`.
    pub factors: Vec<f64>,
    /// `prod_{k <= i} eta_k`.
    pub partial_products: Vec<f64>,
    /// `H^{-k} prod_{j > k} eta_j` for `k = 1..=i_max`.
    pub weights: Vec<f64>,
    pub log_product: f64,
    /// `2 / (H - 1)`, an upper bound for `log_product` (infinite if `H = 1`).
    pub log_bound: f64,
    /// First `i` with `|P_i - P_{i-1}| <= tol P_i`.
    pub cauchy_index: Option<usize>,
    /// Exponent of the generic constant `c` in the final bound: every
    /// `zeta_k` carries one `log c`, so the bound scales like `c^s` with
    /// `s` the sum of the weights.
    pub c_exponent: f64,
    pub diverges: bool,
}

impl ProductReport {
    pub fn product(&self) -> f64 {
        self.partial_products.last().copied().unwrap_or(1.0)
    }

    pub fn converged_by(&self, i: usize) -> bool {
        self.cauchy_index.is_some_and(|k| k <= i)
    }
}

pub fn bound_products(schedule: &MoserSchedule, i_max: usize, tol: f64) -> ProductReport {
    let h = schedule.growth();
    let mut factors = Vec::with_capacity(i_max);
    let mut partial_products = Vec::with_capacity(i_max);
    let mut hk = 1.0;
    let mut product = 1.0;
    let mut log_product = 0.0;
    let mut cauchy_index = None;
    for i in 1..=i_max {
        hk *= h;
        let eta = (hk + 2.0) / hk;
        let next = product * eta;
        if cauchy_index.is_none() && (next - product).abs() <= tol * next {
            cauchy_index = Some(i);
        }
        product = next;
        log_product += (2.0 / hk).ln_1p();
        factors.push(eta);
        partial_products.push(product);
    }
    let mut weights = vec![0.0; i_max];
    let mut tail = 1.0;
    for k in (1..=i_max).rev() {
        weights[k - 1] = h.powi(-(k as i32)) * tail;
        tail *= factors[k - 1];
    }
    let diverges = h <= 1.0;
    if diverges {
        log::warn!("H = 1: the Moser iteration does not close");
    }
    ProductReport {
        c_exponent: weights.iter().sum(),
        factors,
        partial_products,
        weights,
        log_product,
        log_bound: if diverges {
            f64::INFINITY
        } else {
            2.0 / (h - 1.0)
        },
        cauchy_index: if diverges { None } else { cauchy_index },
        diverges,
    }
}

/// `sum_k zeta_{k-1} H^{-k} prod_{j>k} eta_j` with
/// `zeta_i = log(c (i^{2H} tau^{-H} + H^{i+1} F + 1))`.
pub fn weighted_log_sum(
    schedule: &MoserSchedule,
    report: &ProductReport,
    c: f64,
    forcing: f64,
) -> f64 {
    let h = schedule.growth();
    report
        .weights
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let i = k as f64;
            let b = c
                * (i.powf(2.0 * h) * schedule.tau.powf(-h) + h.powi(k as i32 + 1) * forcing + 1.0);
            b.ln() * w
        })
        .sum()
}

/// One row of the printed schedule table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserRow {
    pub i: usize,
    pub p: f64,
    pub growth: f64,
    pub rho: f64,
    /// `p_{i+1}` from solving the interpolation system numerically.
    pub p_next_solved: f64,
    /// `t_i`; zero for `i = 0`.
    pub time_shift: f64,
    /// `eta_i`; one for `i = 0`.
    pub factor: f64,
    pub partial_product: f64,
}

pub fn schedule_table(schedule: &MoserSchedule, i_max: usize) -> Result<Vec<MoserRow>> {
    let ps = exponent_sequence(schedule, i_max);
    let shifts = time_shift_schedule(schedule.tau, i_max);
    let products = bound_products(schedule, i_max, 0.0);
    ps.iter()
        .enumerate()
        .map(|(i, &p)| {
            let (rho, p_next_solved) =
                solve_interpolation_system(schedule.variant, p, schedule.epsilon)?;
            Ok(MoserRow {
                i,
                p,
                growth: schedule.growth(),
                rho,
                p_next_solved,
                time_shift: if i == 0 { 0.0 } else { shifts.shifts[i - 1] },
                factor: if i == 0 { 1.0 } else { products.factors[i - 1] },
                partial_product: if i == 0 {
                    1.0
                } else {
                    products.partial_products[i - 1]
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_at_the_ends() {
        assert_eq!(k_epsilon(0.0), 1.0);
        assert!((k_epsilon(1.0) - 7.0 / 6.0).abs() < 1e-15);
        assert_eq!(growth_factor(0.0), 1.0);
        assert!((growth_factor(1.0) - 13.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn u_sequence_with_eps_one() {
        let s = MoserSchedule::with_initial_exponent(0.5, 0.5, Variant::UIteration, 1.0).unwrap();
        let p = exponent_sequence(&s, 2);
        assert_eq!(p[0], 1.0);
        let h = growth_factor(0.5);
        assert!((p[2] - h * h).abs() < 1e-15);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn initial_exponents() {
        assert_eq!(
            MoserSchedule::new(0.3, 0.5, Variant::UIteration)
                .unwrap()
                .p0,
            1.0
        );
        assert_eq!(
            MoserSchedule::new(0.3, 0.5, Variant::ThetaIteration)
                .unwrap()
                .p0,
            3.3
        );
        assert_eq!(
            MoserSchedule::new(0.3, 0.5, Variant::ThetaBoundaryIteration)
                .unwrap()
                .p0,
            4.3
        );
        assert!(MoserSchedule::new(1.0, 0.5, Variant::UIteration).is_err());
        assert!(MoserSchedule::new(0.3, 1.0, Variant::UIteration).is_err());
        assert!(
            MoserSchedule::with_initial_exponent(0.3, 0.5, Variant::ThetaIteration, 2.0).is_err()
        );
    }

    #[test]
    fn rho_requires_p_at_least_one() {
        assert!(matches!(
            rho_exponent(0.5, 0.2),
            Err(Error::OutOfDomain { .. })
        ));
        let rho = rho_exponent(1.0, 0.2).unwrap();
        assert!(rho > 0.0 && rho < 1.0);
    }

    #[test]
    fn system_solution_matches_closed_form_for_all_variants() {
        for variant in [
            Variant::UIteration,
            Variant::ThetaIteration,
            Variant::ThetaBoundaryIteration,
        ] {
            let s = MoserSchedule::new(0.4, 0.5, variant).unwrap();
            let p = s.p0 * 1.7;
            let (rho, next) = solve_interpolation_system(variant, p, 0.4).unwrap();
            assert!((rho - rho_for(variant, p, 0.4).unwrap()).abs() < 1e-14);
            assert!((next - growth_factor(0.4) * p).abs() < 1e-12 * p);
            assert!(interpolation_residual(variant, p, rho, next, 0.4) < 1e-14);
        }
    }

    #[test]
    fn time_shifts() {
        let s = time_shift_schedule(0.4, 10);
        assert!((s.shifts[0] - 1.2 / (PI * PI)).abs() < 1e-16);
        assert!(s.shifts.windows(2).all(|w| w[1] < w[0]));
        assert!(s.partial_sum < 0.2);
        assert!(0.2 - s.partial_sum <= s.tail_bound);
    }

    #[test]
    fn products_without_growth_diverge() {
        let s = MoserSchedule::new(0.0, 0.5, Variant::UIteration).unwrap();
        assert!(!s.closes());
        let r = bound_products(&s, 50, 1e-10);
        assert!(r.diverges);
        assert_eq!(r.cauchy_index, None);
        assert!(r.factors.iter().all(|&e| e == 3.0));
    }

    #[test]
    fn products_respect_the_log_bound() {
        let s = MoserSchedule::new(0.5, 0.5, Variant::UIteration).unwrap();
        let r = bound_products(&s, 2000, 1e-10);
        assert!(r.log_product <= r.log_bound);
        assert!((r.product().ln() - r.log_product).abs() < 1e-9 * r.log_product);
        assert!(r.factors.last().unwrap() - 1.0 < 1e-30);
        // the last weight has an empty product
        let h = growth_factor(0.5);
        assert!((r.weights[1999] / h.powi(-2000) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_rows() {
        let s = MoserSchedule::new(0.5, 0.5, Variant::UIteration).unwrap();
        let rows = schedule_table(&s, 5).unwrap();
        assert_eq!(rows.len(), 6);
        for w in rows.windows(2) {
            assert!((w[0].p_next_solved - w[1].p).abs() < 1e-12);
            assert_eq!(w[0].growth, w[1].growth);
        }
    }
}
