use proptest::prelude::*;
use vfd_core::dataprep::Strategy;
use vfd_core::dataprep::*;
use vfd_core::{DiscreteDomain, Field};

fn l1(d: &DiscreteDomain, a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect();
    d.integrate_bulk(&diff)
}

fn l2(d: &DiscreteDomain, a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).collect();
    d.integrate_bulk(&diff).sqrt()
}

#[test]
fn smoothing_respects_bounds_and_combined_mass() {
    let d = DiscreteDomain::disk(1.0, 16, 24).unwrap();
    let values: Vec<f64> = d
        .coords()
        .iter()
        .map(|&[x, y]| 1.5 + 0.9 * (4.0 * x).sin() * y.cos())
        .collect();
    let eta: Vec<f64> = (0..d.boundary_len())
        .map(|k| 1.0 + 0.5 * ((k * 3) % 5) as f64 / 4.0)
        .collect();
    let lo = values
        .iter()
        .chain(&eta)
        .copied()
        .fold(f64::INFINITY, f64::min);
    let hi = values.iter().chain(&eta).copied().fold(0.0, f64::max);
    let raw = Field::new(&d, values, eta).unwrap();
    for n in [1, 10, 100] {
        let out = elliptic_smooth(&d, &raw, n).unwrap();
        assert!(out.iter().all(|&v| v >= lo && v <= hi));
        let total = d
            .integrate_dm(&Field::from_nodal(&d, out).unwrap(), 1.0)
            .unwrap();
        assert!((total - d.integrate_dm(&raw, 1.0).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn weak_smoothing_is_close_to_identity() {
    let d = DiscreteDomain::unit_interval(101).unwrap();
    let values: Vec<f64> = d
        .coords()
        .iter()
        .map(|c| 2.0 + (3.0 * c[0]).sin())
        .collect();
    let raw = Field::from_nodal(&d, values.clone()).unwrap();
    let out = elliptic_smooth(&d, &raw, 1_000_000).unwrap();
    assert!(l2(&d, &out, &values) < 1e-3);
}

#[test]
fn prepared_data_converge_to_the_raw_field() {
    let d = DiscreteDomain::unit_interval(801).unwrap();
    let values: Vec<f64> = d
        .coords()
        .iter()
        .map(|c| 1.5 + (2.0 * c[0]).cos())
        .collect();
    let raw = Field::from_nodal(&d, values.clone()).unwrap();
    for strategy in [Strategy::Smooth, Strategy::Energy] {
        let errs: Vec<f64> = [10, 20, 40]
            .iter()
            .map(|&n| {
                l1(
                    &d,
                    &prepare_initial(&d, &raw, strategy, n).unwrap().theta,
                    &values,
                )
            })
            .collect();
        // the smoothing error is (1/n) Delta theta0 to leading order, and
        // int |Delta theta0| is about 2.2 here
        for (k, n) in [10.0, 20.0, 40.0].iter().enumerate() {
            assert!(errs[k] * n < 2.5, "{strategy:?}: {errs:?}");
        }
        assert!(errs[0] / errs[2] > 2.0, "{strategy:?}: {errs:?}");
    }
}

#[test]
fn log_integral_of_prepared_data_is_controlled() {
    let d = DiscreteDomain::unit_interval(401).unwrap();
    // integrable logarithmic singularity at x = 0.5
    let values: Vec<f64> = d
        .coords()
        .iter()
        .map(|c| (c[0] - 0.5).abs().max(1e-12))
        .collect();
    let raw = Field::from_nodal(&d, values.clone()).unwrap();
    for n in [10, 100, 1000] {
        let prepared = prepare_initial(&d, &raw, Strategy::Energy, n).unwrap();
        let c = log_approx_constant(&d, &values, &prepared.theta);
        assert!(c.is_finite() && c <= 1.0, "n = {n}: {c}");
        assert!(prepared.theta.iter().all(|&t| t > 0.0));
    }
}

#[test]
fn energy_strategy_handles_vanishing_data() {
    let d = DiscreteDomain::disk(1.0, 8, 12).unwrap();
    let mut raw = Field::constant(&d, 1.0);
    raw.values[0] = 0.0;
    raw.values[5] = -2.0;
    let s = prepare_initial(&d, &raw, Strategy::Energy, 10).unwrap();
    assert!(s.theta.iter().all(|&t| t >= 0.1));
    assert!(prepare_initial(&d, &raw, Strategy::Smooth, 10).is_err());
}

proptest! {
    #[test]
    fn truncation_is_idempotent(values in prop::collection::vec(-10.0..200.0_f64, 1..40), n in 1u32..150) {
        let once = truncate(&values, n).unwrap();
        prop_assert_eq!(truncate(&once, n).unwrap(), once.clone());
        let n = f64::from(n);
        prop_assert!(once.iter().all(|&v| v >= 1.0 / n && v <= n));
    }

    #[test]
    fn mollification_is_a_convex_average(values in prop::collection::vec(0.1..5.0_f64, 41), radius in 0.03..0.3_f64) {
        let d = DiscreteDomain::unit_interval(41).unwrap();
        let out = mollify(&d, &values, radius).unwrap();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(0.0, f64::max);
        prop_assert!(out.iter().all(|&v| v >= lo - 1e-14 && v <= hi + 1e-14));
    }

    #[test]
    fn projection_removes_the_mean(values in prop::collection::vec(-50.0..50.0_f64, 49)) {
        let d = DiscreteDomain::disk(1.0, 4, 12).unwrap();
        let out = project_zero_mean(&d, &values);
        let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        prop_assert!((d.integrate_bulk(&out) / d.measure()).abs() <= 1e-15 * scale);
    }

    #[test]
    fn smoothing_obeys_the_maximum_principle(values in prop::collection::vec(0.2..3.0_f64, 30), n in 1u32..1000) {
        let d = DiscreteDomain::unit_interval(30).unwrap();
        let raw = Field::from_nodal(&d, values.clone()).unwrap();
        let out = elliptic_smooth(&d, &raw, n).unwrap();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(0.0, f64::max);
        prop_assert!(out.iter().all(|&v| v >= lo * (1.0 - 1e-14) && v <= hi * (1.0 + 1e-14)));
    }
}
