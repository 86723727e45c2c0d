use proptest::prelude::*;
use vfd_core::moser::*;

proptest! {
    #[test]
    fn closed_form_identities(eps in 0.0..1.0_f64, p in 1.0..500.0_f64) {
        let k = k_epsilon(eps);
        let h = growth_factor(eps);
        prop_assert!((h - (k + 1.0) / 2.0).abs() <= 1e-15);
        prop_assert!((k - (2.0 / conjugate_exponent(eps) - 1.0 / 3.0)).abs() <= 1e-14);
        let rho = rho_exponent(p, eps).unwrap();
        prop_assert!(rho > 0.0 && rho < 1.0);
        let q = p / (p + 2.0) * k;
        prop_assert!((1.0 - rho - 1.0 / (1.0 + q)).abs() <= 1e-14);
        prop_assert!(interpolation_residual(Variant::UIteration, p, rho, h * p, eps) <= 1e-14);
    }

    #[test]
    fn numerical_system_reproduces_the_recursion(eps in 0.01..1.0_f64, i in 0usize..60) {
        let s = MoserSchedule::new(eps, 0.5, Variant::UIteration).unwrap();
        let p = exponent_sequence(&s, i + 1);
        let (_, next) = solve_interpolation_system(Variant::UIteration, p[i], eps).unwrap();
        prop_assert!((next - p[i + 1]).abs() <= 1e-12 * p[i + 1]);
    }

    #[test]
    fn growth_exceeds_one_for_positive_eps(eps in 1e-6..1.0_f64) {
        prop_assert!(growth_factor(eps) > 1.0);
        let k = k_epsilon(eps);
        prop_assert!(k > 1.0 && k < 5.0 / 3.0);
    }

    #[test]
    fn boundary_iteration_is_feasible(eps in 1e-6..1.0_f64) {
        prop_assert!(boundary_iteration_feasible(eps, eps));
        prop_assert!(boundary_iteration_holds(eps, eps, 500));
    }
}

#[test]
fn time_shifts_sum_to_half_tau() {
    for tau in [0.1, 0.5, 0.9] {
        let s = time_shift_schedule(tau, 1_000_000);
        assert!((s.partial_sum - tau / 2.0).abs() <= 1e-6 * tau);
        assert!(s.partial_sum < tau / 2.0);
        assert!(tau / 2.0 - s.partial_sum <= s.tail_bound);
    }
}

#[test]
fn product_regression_anchor() {
    let s = MoserSchedule::new(0.5, 0.5, Variant::UIteration).unwrap();
    let r = bound_products(&s, 200, 1e-10);
    let anchor = 1.492_309_762_084_402_2e13;
    assert!(
        (r.product() / anchor - 1.0).abs() < 1e-12,
        "{}",
        r.product()
    );
    assert!(r.log_product <= r.log_bound);
    // factors decay to one
    assert!(r.factors.windows(2).all(|w| w[1] < w[0]));
    assert!(r.factors[199] - 1.0 < 1e-3);
}

#[test]
fn cauchy_index_of_the_partial_products() {
    // eta_i - 1 = 2 H^{-i}, so the relative increment drops below 1e-10 only
    // once H^i > 2e10
    let s = MoserSchedule::new(0.5, 0.5, Variant::UIteration).unwrap();
    let r = bound_products(&s, 2000, 1e-10);
    let h = growth_factor(0.5);
    let predicted = ((2e10_f64 + 2.0).ln() / h.ln()).ceil() as usize;
    let found = r.cauchy_index.unwrap();
    assert!(found.abs_diff(predicted) <= 1, "{found} vs {predicted}");
}

#[test]
fn weighted_sum_scales_with_log_c() {
    let s = MoserSchedule::new(0.5, 0.5, Variant::UIteration).unwrap();
    let r = bound_products(&s, 300, 1e-10);
    let base = weighted_log_sum(&s, &r, 1.0, 0.3);
    let scaled = weighted_log_sum(&s, &r, std::f64::consts::E, 0.3);
    assert!((scaled - base - r.c_exponent).abs() < 1e-9 * r.c_exponent);
}
