//! Approximation of raw data: truncation, mollification, elliptic smoothing
//! of initial values and zero-mean projection of the forcing.

use crate::domain::{DiscreteDomain, Field, Geometry};
use crate::error::{check_len, Error, Result};
use crate::linalg::BandedMatrix;
use crate::oracle::ExactSolution;
use crate::stepper::{Sources, State};

/// Name of the mollifier kernel, recorded in run metadata.
pub const KERNEL_NAME: &str = "polynomial bump (1 - (d/r)^2)^3, reflected at the boundary";

/// Pointwise clamp to `[1/n, n]`.
pub fn truncate(values: &[f64], n: u32) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Config(
            "truncation level n must be at least 1".into(),
        ));
    }
    let n = f64::from(n);
    Ok(values.iter().map(|v| v.max(1.0 / n).min(n)).collect())
}

fn bump(d: f64, radius: f64) -> f64 {
    let s = d / radius;
    if s >= 1.0 {
        0.0
    } else {
        let q = 1.0 - s * s;
        q * q * q
    }
}

// The point itself followed by its mirror images across each boundary
// component.
fn images(geometry: Geometry, p: [f64; 2]) -> Vec<[f64; 2]> {
    match geometry {
        Geometry::Interval { length, .. } => vec![p, [-p[0], 0.0], [2.0 * length - p[0], 0.0]],
        Geometry::RadialAnnulus { inner, outer, .. } => {
            vec![p, [2.0 * inner - p[0], 0.0], [2.0 * outer - p[0], 0.0]]
        }
        Geometry::Disk { radius, .. } => {
            let rho = p[0].hypot(p[1]);
            if rho == 0.0 {
                vec![p]
            } else {
                let s = (2.0 * radius - rho) / rho;
                vec![p, [p[0] * s, p[1] * s]]
            }
        }
    }
}

/// Normalised average against a compactly supported bump of the given
/// radius. Values near the boundary see the field extended by reflection.
///
/// Every output value is a convex combination of input values, so constants
/// are reproduced exactly and bounds are preserved. A radius below the grid
/// spacing returns the input unchanged.
pub fn mollify(domain: &DiscreteDomain, values: &[f64], radius: f64) -> Result<Vec<f64>> {
    check_len(domain.len(), values.len())?;
    if !(radius >= domain.spacing()) {
        log::warn!(
            "mollifier radius {radius} is below the grid spacing {}; data left unchanged",
            domain.spacing()
        );
        return Ok(values.to_vec());
    }
    let coords = domain.coords();
    let weights = domain.bulk_weights();
    let geometry = domain.geometry();
    let copies: Vec<Vec<[f64; 2]>> = coords.iter().map(|&p| images(geometry, p)).collect();
    let out = coords
        .iter()
        .map(|&[x, y]| {
            let mut num = 0.0;
            let mut den = 0.0;
            for (j, imgs) in copies.iter().enumerate() {
                for q in imgs {
                    let k = weights[j] * bump((q[0] - x).hypot(q[1] - y), radius);
                    num += k * values[j];
                    den += k;
                }
            }
            num / den
        })
        .collect();
    Ok(out)
}

/// Solves `theta - (1/n) Delta theta = theta0` in the bulk with the boundary
/// law `-(1/n) d_n theta = -(1/n) Delta_Gamma eta + eta - eta0`.
///
/// In assembled form `(M - (A + B)/n) theta = V theta0 + G eta0`, where the
/// boundary rows carry mass `|V_i| + |Gamma_i|`. Summing the rows shows that
/// `int theta + int_Gamma eta` is preserved, and the M-matrix structure gives
/// the maximum principle.
pub fn elliptic_smooth(domain: &DiscreteDomain, data: &Field, n: u32) -> Result<Vec<f64>> {
    check_len(domain.len(), data.values.len())?;
    check_len(domain.boundary_len(), data.boundary_values.len())?;
    if n == 0 {
        return Err(Error::Config(
            "smoothing parameter n must be at least 1".into(),
        ));
    }
    let eps = 1.0 / f64::from(n);
    let band = domain.bandwidth();
    let mut m = BandedMatrix::zeros(domain.len(), band, band);
    let mut rhs: Vec<f64> = domain
        .bulk_weights()
        .iter()
        .zip(&data.values)
        .map(|(w, v)| w * v)
        .collect();
    for (i, w) in domain.bulk_weights().iter().enumerate() {
        m.add(i, i, *w);
    }
    let nodes = domain.boundary_nodes();
    for (k, (&node, w)) in nodes.iter().zip(domain.boundary_weights()).enumerate() {
        m.add(node, node, *w);
        rhs[node] += w * data.boundary_values[k];
    }
    let mut couple = |a: usize, b: usize, c: f64| {
        m.add(a, a, c);
        m.add(b, b, c);
        m.add(a, b, -c);
        m.add(b, a, -c);
    };
    for f in domain.faces() {
        couple(f.a, f.b, eps * f.coeff);
    }
    for f in domain.boundary_faces() {
        couple(nodes[f.a], nodes[f.b], eps * f.coeff);
    }
    m.solve(&mut rhs)?;
    // The discrete problem preserves the dm-integral exactly; restore it
    // against the round-off of the solve, which grows like n / h.
    let target = domain.integrate_dm(data, 1.0)?;
    let got = domain.integrate_bulk(&rhs) + domain.integrate_boundary(&domain.trace(&rhs));
    let shift = (target - got) / (domain.measure() + domain.boundary_measure());
    for v in &mut rhs {
        *v += shift;
    }
    Ok(rhs)
}

/// `f - m_Omega(f)`.
pub fn project_zero_mean(domain: &DiscreteDomain, f: &[f64]) -> Vec<f64> {
    let mean = domain.integrate_bulk(f) / domain.measure();
    f.iter().map(|v| v - mean).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Elliptic smoothing of the raw pair.
    Smooth,
    /// Truncation, mollification and a boundary collar carrying the
    /// separately prepared boundary datum.
    Energy,
}

/// Weight of the boundary datum at distance `d` from the boundary: 1 up to
/// `1/(2n)`, a smooth cubic descent to 0 at `1/n`.
pub fn collar_weight(d: f64, n: u32) -> f64 {
    let width = 1.0 / f64::from(n);
    let s = (2.0 * d / width - 1.0).clamp(0.0, 1.0);
    1.0 - s * s * (3.0 - 2.0 * s)
}

/// Builds the initial state of a run from raw data `(theta0, eta0)`.
pub fn prepare_initial(
    domain: &DiscreteDomain,
    raw: &Field,
    strategy: Strategy,
    n: u32,
) -> Result<State> {
    check_len(domain.len(), raw.values.len())?;
    check_len(domain.boundary_len(), raw.boundary_values.len())?;
    if n == 0 {
        return Err(Error::Config(
            "approximation index n must be at least 1".into(),
        ));
    }
    let theta = match strategy {
        Strategy::Smooth => {
            let positive = raw
                .values
                .iter()
                .chain(&raw.boundary_values)
                .all(|&v| v > 0.0);
            if !positive {
                return Err(Error::Config(
                    "the smooth strategy needs strictly positive raw data".into(),
                ));
            }
            elliptic_smooth(domain, raw, n)?
        }
        Strategy::Energy => {
            let radius = (1.0 / f64::from(n)).max(2.0 * domain.spacing());
            let bulk = mollify(domain, &truncate(&raw.values, n)?, radius)?;
            let eta = truncate(&raw.boundary_values, n)?;
            bulk.iter()
                .enumerate()
                .map(|(i, &v)| {
                    let (d, k) = domain.boundary_distance(i);
                    let psi = collar_weight(d, n);
                    (1.0 - psi) * v + psi * eta[k]
                })
                .collect()
        }
    };
    assert!(
        theta.iter().all(|&t| t > 0.0),
        "prepared data must be strictly positive"
    );
    State::new(domain, theta)
}

/// `int log^- theta` over the bulk; infinite if some value is not positive.
pub fn log_minus_integral(domain: &DiscreteDomain, values: &[f64]) -> f64 {
    let density: Vec<f64> = values
        .iter()
        .map(|&v| {
            if v > 0.0 {
                (-v.ln()).max(0.0)
            } else {
                f64::INFINITY
            }
        })
        .collect();
    domain.integrate_bulk(&density)
}

/// Smallest `C` with `int log^- prepared <= C (1 + int log^- raw)`.
pub fn log_approx_constant(domain: &DiscreteDomain, raw: &[f64], prepared: &[f64]) -> f64 {
    log_minus_integral(domain, prepared) / (1.0 + log_minus_integral(domain, raw))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingKind {
    Zero,
    /// `amplitude * sin(omega t) * cos(wavenumber x)`, projected to zero mean.
    Sinusoidal {
        amplitude: f64,
        omega: f64,
        wavenumber: f64,
    },
    /// Nodal slices at increasing sample times, linearly interpolated in
    /// time and held constant outside the sampled interval.
    GridSamples {
        times: Vec<f64>,
        slices: Vec<Vec<f64>>,
    },
    /// Bulk and boundary sources of a manufactured solution (not mean free).
    Manufactured(ExactSolution),
}

/// Bulk forcing together with its summability parameter `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingDescriptor {
    kind: ForcingKind,
    epsilon: f64,
}

impl ForcingDescriptor {
    /// Grid samples are projected to zero mean here, once.
    pub fn new(kind: ForcingKind, epsilon: f64, domain: &DiscreteDomain) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        let kind = match kind {
            ForcingKind::GridSamples { times, slices } => {
                if times.is_empty() || times.len() != slices.len() {
                    return Err(Error::Config(format!(
                        "{} sample times for {} forcing slices",
                        times.len(),
                        slices.len()
                    )));
                }
                if times.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config("forcing sample times must increase".into()));
                }
                let mut projected = Vec::with_capacity(slices.len());
                for s in &slices {
                    check_len(domain.len(), s.len())?;
                    projected.push(project_zero_mean(domain, s));
                }
                ForcingKind::GridSamples {
                    times,
                    slices: projected,
                }
            }
            other => other,
        };
        Ok(Self { kind, epsilon })
    }

    pub fn zero() -> Self {
        Self {
            kind: ForcingKind::Zero,
            epsilon: 0.5,
        }
    }

    pub fn kind(&self) -> &ForcingKind {
        &self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Sources for ForcingDescriptor {
    fn bulk(&self, t: f64, domain: &DiscreteDomain) -> Vec<f64> {
        match &self.kind {
            ForcingKind::Zero => vec![0.0; domain.len()],
            ForcingKind::Sinusoidal {
                amplitude,
                omega,
                wavenumber,
            } => {
                let a = amplitude * (omega * t).sin();
                let raw: Vec<f64> = domain
                    .coords()
                    .iter()
                    .map(|c| a * (wavenumber * c[0]).cos())
                    .collect();
                project_zero_mean(domain, &raw)
            }
            ForcingKind::GridSamples { times, slices } => {
                let last = times.len() - 1;
                if t <= times[0] {
                    return slices[0].clone();
                }
                if t >= times[last] {
                    return slices[last].clone();
                }
                let k = times.partition_point(|&s| s <= t) - 1;
                let w = (t - times[k]) / (times[k + 1] - times[k]);
                slices[k]
                    .iter()
                    .zip(&slices[k + 1])
                    .map(|(a, b)| (1.0 - w) * a + w * b)
                    .collect()
            }
            ForcingKind::Manufactured(exact) => exact.bulk(t, domain),
        }
    }

    fn boundary_source(&self, t: f64, domain: &DiscreteDomain) -> Option<Vec<f64>> {
        match &self.kind {
            ForcingKind::Manufactured(exact) => exact.boundary_source(t, domain),
            _ => None,
        }
    }

    fn boundary_values(&self, t: f64, domain: &DiscreteDomain) -> Option<Vec<f64>> {
        match &self.kind {
            ForcingKind::Manufactured(exact) => exact.boundary_values(t, domain),
            _ => None,
        }
    }

    fn is_mean_free(&self) -> bool {
        !matches!(self.kind, ForcingKind::Manufactured(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_examples() {
        assert_eq!(
            truncate(&[1e-4, 5.0, -3.0], 100).unwrap(),
            vec![0.01, 5.0, 0.01]
        );
        assert_eq!(truncate(&[-3.0], 10).unwrap(), vec![0.1]);
        assert_eq!(truncate(&[250.0], 100).unwrap(), vec![100.0]);
        assert!(truncate(&[1.0], 0).is_err());
    }

    #[test]
    fn mollifier_keeps_constants_and_bounds() {
        let d = DiscreteDomain::unit_interval(51).unwrap();
        let c = mollify(&d, &vec![2.5; 51], 0.1).unwrap();
        assert!(c.iter().all(|v| (v - 2.5).abs() < 1e-14));
        let raw: Vec<f64> = (0..51)
            .map(|i| ((i * 37) % 11) as f64 / 10.0 + 0.5)
            .collect();
        let out = mollify(&d, &raw, 0.08).unwrap();
        assert!(out.iter().all(|&v| (0.5..=1.5).contains(&v)));
    }

    #[test]
    fn mollified_step_is_monotone() {
        let d = DiscreteDomain::unit_interval(101).unwrap();
        let step: Vec<f64> = d
            .coords()
            .iter()
            .map(|c| if c[0] < 0.5 { 1.0 } else { 3.0 })
            .collect();
        let out = mollify(&d, &step, 0.1).unwrap();
        assert!(out.windows(2).all(|w| w[1] >= w[0] - 1e-14));
        assert!(out[49] > 1.0 && out[51] < 3.0);
    }

    #[test]
    fn tiny_radius_is_identity() {
        let d = DiscreteDomain::unit_interval(11).unwrap();
        let raw: Vec<f64> = (0..11).map(|i| i as f64).collect();
        assert_eq!(mollify(&d, &raw, 0.01).unwrap(), raw);
    }

    #[test]
    fn disk_mollifier_keeps_constants() {
        let d = DiscreteDomain::disk(1.0, 8, 16).unwrap();
        let out = mollify(&d, &vec![0.7; d.len()], 0.3).unwrap();
        assert!(out.iter().all(|v| (v - 0.7).abs() < 1e-14));
    }

    #[test]
    fn elliptic_smoothing_of_constants() {
        for d in [
            DiscreteDomain::unit_interval(20).unwrap(),
            DiscreteDomain::disk(1.0, 6, 12).unwrap(),
        ] {
            for n in [1, 7, 1000] {
                let out = elliptic_smooth(&d, &Field::constant(&d, 1.9), n).unwrap();
                assert!(out.iter().all(|v| (v - 1.9).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn elliptic_smoothing_preserves_combined_mass() {
        let d = DiscreteDomain::disk(1.0, 10, 16).unwrap();
        let values: Vec<f64> = d
            .coords()
            .iter()
            .map(|[x, y]| 1.0 + x * x + 0.3 * y)
            .collect();
        let eta = vec![0.4; d.boundary_len()];
        let raw = Field::new(&d, values, eta).unwrap();
        let out = elliptic_smooth(&d, &raw, 5).unwrap();
        let before = d.integrate_dm(&raw, 1.0).unwrap();
        let after = d
            .integrate_dm(&Field::from_nodal(&d, out).unwrap(), 1.0)
            .unwrap();
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn zero_mean_projection() {
        let d = DiscreteDomain::disk(1.0, 5, 9).unwrap();
        assert!(project_zero_mean(&d, &vec![7.0; d.len()])
            .iter()
            .all(|v| v.abs() < 1e-14));
        let f: Vec<f64> = d.coords().iter().map(|c| c[0].exp()).collect();
        let once = project_zero_mean(&d, &f);
        let twice = project_zero_mean(&d, &once);
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn collar_weight_profile() {
        assert_eq!(collar_weight(0.0, 10), 1.0);
        assert_eq!(collar_weight(0.05, 10), 1.0);
        assert_eq!(collar_weight(0.1, 10), 0.0);
        assert!((collar_weight(0.075, 10) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn smooth_strategy_on_constants_is_identity() {
        let d = DiscreteDomain::unit_interval(30).unwrap();
        let s = prepare_initial(&d, &Field::constant(&d, 0.6), Strategy::Smooth, 3).unwrap();
        assert!(s.theta.iter().all(|v| (v - 0.6).abs() < 1e-13));
    }

    #[test]
    fn energy_strategy_imposes_the_boundary_datum() {
        let d = DiscreteDomain::unit_interval(101).unwrap();
        let raw = Field::new(&d, vec![1.0; 101], vec![3.0, 0.5]).unwrap();
        let s = prepare_initial(&d, &raw, Strategy::Energy, 20).unwrap();
        assert_eq!(s.theta[0], 3.0);
        assert_eq!(s.theta[100], 0.5);
        assert_eq!(s.theta[50], 1.0);
    }

    #[test]
    fn forcing_validation_and_interpolation() {
        let d = DiscreteDomain::unit_interval(5).unwrap();
        assert!(ForcingDescriptor::new(ForcingKind::Zero, 1.0, &d).is_err());
        let kind = ForcingKind::GridSamples {
            times: vec![0.0, 1.0],
            slices: vec![vec![1.0, 0.0, 0.0, 0.0, 0.0], vec![3.0, 0.0, 0.0, 0.0, 0.0]],
        };
        let f = ForcingDescriptor::new(kind, 0.5, &d).unwrap();
        for t in [-1.0, 0.0, 0.25, 1.0, 2.0] {
            let slice = f.bulk(t, &d);
            assert!(d.integrate_bulk(&slice).abs() < 1e-15);
        }
        let mid = f.bulk(0.5, &d);
        let a = f.bulk(0.0, &d);
        let b = f.bulk(1.0, &d);
        for i in 0..5 {
            assert!((mid[i] - 0.5 * (a[i] + b[i])).abs() < 1e-15);
        }
    }
}
