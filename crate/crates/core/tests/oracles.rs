use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vfd_core::oracle::{
    make_manufactured, pde_residual_probe, singular_radial, ExactSolution, ManufacturedProfile,
    ProbeOrder,
};
use vfd_core::stepper::{run, BoundaryMode, RunConfig, State};
use vfd_core::{DiscreteDomain, RegularizedGamma, Sources};

#[test]
fn singular_solution_initial_trace() {
    for t_ext in [0.25, 1.0, 4.0] {
        for r in [0.5, 1.0, 2.5] {
            let v = singular_radial(0.0, r, t_ext).unwrap();
            assert!((v - 2.0 * t_ext.sqrt() / r).abs() < 1e-15);
        }
    }
}

#[test]
fn singular_solution_residual_is_fourth_order() {
    let s = ExactSolution::SingularRadial { extinction: 1.0 };
    let at = [(0.5, [1.5, 0.0])];
    let r1 = pde_residual_probe(&s, &at, 0.02, ProbeOrder::Fourth).unwrap();
    let r2 = pde_residual_probe(&s, &at, 0.01, ProbeOrder::Fourth).unwrap();
    assert!(r1 < 1e-5, "{r1}");
    let ratio = r1 / r2;
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn probe_rejects_the_origin() {
    let s = ExactSolution::SingularRadial { extinction: 1.0 };
    assert!(pde_residual_probe(&s, &[(0.1, [0.0, 0.0])], 0.01, ProbeOrder::Fourth).is_err());
}

#[test]
fn shipped_profile_solves_its_forced_equation() {
    let d = DiscreteDomain::disk(1.0, 4, 8).unwrap();
    let m = make_manufactured(ManufacturedProfile::shipped(), &d, 1.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples: Vec<(f64, [f64; 2])> = (0..100)
        .map(|_| {
            let r = rng.random_range(0.0..1.0_f64).sqrt();
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            (rng.random_range(0.0..1.0), [r * phi.cos(), r * phi.sin()])
        })
        .collect();
    let residual = pde_residual_probe(&m, &samples, 0.02, ProbeOrder::Eighth).unwrap();
    assert!(residual <= 1e-10, "{residual}");
}

#[test]
fn manufactured_forcing_is_not_mean_free() {
    let d = DiscreteDomain::disk(1.0, 8, 16).unwrap();
    let m = make_manufactured(ManufacturedProfile::shipped(), &d, 1.0, 1.0).unwrap();
    assert!(!m.is_mean_free());
    let f = m.bulk(0.3, &d);
    assert!(d.integrate_bulk(&f).abs() > 1e-3);
}

#[test]
fn manufactured_boundary_source_balances_the_boundary_law() {
    // on the unit interval the boundary law reads alpha theta_t + d_n u = g
    let d = DiscreteDomain::unit_interval(11).unwrap();
    let m = make_manufactured(ManufacturedProfile::shipped(), &d, 0.7, 0.0).unwrap();
    let g = m.boundary_source(0.2, &d).unwrap();
    let h = 1e-5;
    for (k, &node) in d.boundary_nodes().iter().enumerate() {
        let x = d.coords()[node][0];
        let n = d.boundary_normals()[k][0];
        let th = |t: f64, x: f64| m.value(t, [x, 0.0]).unwrap();
        let theta_t = (th(0.2 + h, x) - th(0.2 - h, x)) / (2.0 * h);
        let u = |x: f64| -1.0 / th(0.2, x);
        let dn_u = n * (u(x + h) - u(x - h)) / (2.0 * h);
        assert!((0.7 * theta_t + dn_u - g[k]).abs() < 1e-8);
    }
}

fn annulus_error(nodes: usize) -> f64 {
    let d = DiscreteDomain::annulus(1.0, 3.0, nodes).unwrap();
    let exact = ExactSolution::SingularRadial { extinction: 1.0 };
    let h = d.spacing();
    let cfg = RunConfig {
        alpha: 0.0,
        beta: 0.0,
        bc_mode: BoundaryMode::DirichletOracle,
        dt: h * h,
        t_end: 0.5,
        window: (0.3, 2.0),
        ..Default::default()
    };
    let g = RegularizedGamma::new(0.3, 2.0).unwrap();
    let s = State::new(&d, exact.nodal(0.0, &d).unwrap()).unwrap();
    let out = run(&cfg, s, &exact, &d, &g).unwrap();
    let reference = exact.nodal(0.5, &d).unwrap();
    out.final_state
        .theta
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[test]
fn singular_solution_is_recovered_at_second_order() {
    let coarse = annulus_error(41);
    let fine = annulus_error(81);
    let ratio = coarse / fine;
    assert!((3.4..4.6).contains(&ratio), "ratio {ratio}");
}
