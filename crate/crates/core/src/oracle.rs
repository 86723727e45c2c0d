//! Exact and manufactured solutions used to measure discretisation error.

use crate::domain::{DiscreteDomain, DomainKind};
use crate::error::{Error, Result};
use crate::stepper::Sources;

/// `2 sqrt((T - t)^+) / r`, the self-similar solution of the unforced
/// equation in three dimensions. It vanishes identically from `t = T` on.
pub fn singular_radial(t: f64, r: f64, extinction: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::OutOfDomain {
            what: "radius of the singular solution",
            value: r,
        });
    }
    Ok(2.0 * (extinction - t).max(0.0).sqrt() / r)
}

/// Space-time profile `base + amplitude sin(omega t + kx x + phase) cos(ky y)`.
///
/// On one-dimensional and radial grids the `y` factor is dropped and `x`
/// stands for the grid coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedProfile {
    pub base: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub kx: f64,
    pub ky: f64,
    pub phase: f64,
}

impl ManufacturedProfile {
    /// The profile used by the convergence studies; it stays in `[1.5, 2.5]`.
    pub fn shipped() -> Self {
        Self {
            base: 2.0,
            amplitude: 0.5,
            omega: 2.0,
            kx: 2.0,
            ky: 1.5,
            phase: 0.3,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            base: value,
            amplitude: 0.0,
            omega: 0.0,
            kx: 0.0,
            ky: 0.0,
            phase: 0.0,
        }
    }
}

/// How a manufactured profile is laid over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `theta(t, x)` on an interval.
    Line,
    /// `theta(t, x, y)` in the plane.
    Plane,
    /// `theta(t, r)` radially symmetric in three dimensions.
    Radial,
}

impl Layout {
    pub fn of(kind: DomainKind) -> Self {
        match kind {
            DomainKind::Interval1D => Layout::Line,
            DomainKind::Disk2D => Layout::Plane,
            DomainKind::RadialAnnulus => Layout::Radial,
        }
    }
}

// Value, time derivative, gradient and Hessian at one point.
struct Jet {
    value: f64,
    dt: f64,
    grad: [f64; 2],
    // [xx, xy, yy]
    hess: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub profile: ManufacturedProfile,
    pub layout: Layout,
    pub alpha: f64,
    pub beta: f64,
}

impl Manufactured {
    fn jet(&self, t: f64, x: f64, y: f64) -> Jet {
        let p = &self.profile;
        let ky = if self.layout == Layout::Plane {
            p.ky
        } else {
            0.0
        };
        let arg = p.omega * t + p.kx * x + p.phase;
        let (s, c) = arg.sin_cos();
        let (ys, yc) = (ky * y).sin_cos();
        let a = p.amplitude;
        Jet {
            value: p.base + a * s * yc,
            dt: a * p.omega * c * yc,
            grad: [a * p.kx * c * yc, -a * ky * s * ys],
            hess: [
                -a * p.kx * p.kx * s * yc,
                -a * p.kx * ky * c * ys,
                -a * ky * ky * s * yc,
            ],
        }
    }

    pub fn value(&self, t: f64, x: f64, y: f64) -> f64 {
        self.jet(t, x, y).value
    }

    /// `Delta u` with `u = -1/theta`.
    fn laplacian_u(&self, j: &Jet, x: f64) -> f64 {
        let th = j.value;
        let [gx, gy] = j.grad;
        let [hxx, _, hyy] = j.hess;
        let grad_sq = gx * gx + gy * gy;
        let base = (hxx + hyy) / (th * th) - 2.0 * grad_sq / (th * th * th);
        match self.layout {
            Layout::Radial => base + 2.0 * gx / (x * th * th),
            _ => base,
        }
    }

    /// `f = theta_t - Delta u`.
    pub fn forcing(&self, t: f64, x: f64, y: f64) -> f64 {
        let j = self.jet(t, x, y);
        j.dt - self.laplacian_u(&j, x)
    }

    /// `g = alpha theta_t - beta Delta_Gamma theta + d_n u` at a boundary
    /// point with outward normal `normal`.
    pub fn boundary_source(&self, t: f64, x: f64, y: f64, normal: [f64; 2]) -> f64 {
        let j = self.jet(t, x, y);
        let th = j.value;
        let dn_u = (normal[0] * j.grad[0] + normal[1] * j.grad[1]) / (th * th);
        let surface = match self.layout {
            Layout::Plane => {
                let [hxx, hxy, hyy] = j.hess;
                let [gx, gy] = j.grad;
                let r2 = x * x + y * y;
                (-x * gx - y * gy + y * y * hxx - 2.0 * x * y * hxy + x * x * hyy) / r2
            }
            _ => 0.0,
        };
        self.alpha * j.dt - self.beta * surface + dn_u
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExactSolution {
    SingularRadial { extinction: f64 },
    Constant { value: f64 },
    Manufactured(Manufactured),
}

/// Builds a manufactured solution for `domain` with boundary parameters
/// `alpha`, `beta`; the profile must stay positive.
pub fn make_manufactured(
    profile: ManufacturedProfile,
    domain: &DiscreteDomain,
    alpha: f64,
    beta: f64,
) -> Result<ExactSolution> {
    if !(profile.base - profile.amplitude.abs() > 0.0) {
        return Err(Error::Config(format!(
            "manufactured profile is not positive: base {} with amplitude {}",
            profile.base, profile.amplitude
        )));
    }
    let layout = Layout::of(domain.kind());
    Ok(ExactSolution::Manufactured(Manufactured {
        profile,
        layout,
        alpha,
        beta,
    }))
}

impl ExactSolution {
    /// Exact value at time `t` and grid coordinates `point`.
    pub fn value(&self, t: f64, point: [f64; 2]) -> Result<f64> {
        match self {
            ExactSolution::SingularRadial { extinction } => {
                singular_radial(t, point[0].hypot(point[1]), *extinction)
            }
            ExactSolution::Constant { value } => Ok(*value),
            ExactSolution::Manufactured(m) => Ok(m.value(t, point[0], point[1])),
        }
    }

    pub fn nodal(&self, t: f64, domain: &DiscreteDomain) -> Result<Vec<f64>> {
        domain.coords().iter().map(|&p| self.value(t, p)).collect()
    }

    fn forcing_at(&self, t: f64, point: [f64; 2]) -> f64 {
        match self {
            ExactSolution::Manufactured(m) => m.forcing(t, point[0], point[1]),
            _ => 0.0,
        }
    }
}

impl Sources for ExactSolution {
    fn bulk(&self, t: f64, domain: &DiscreteDomain) -> Vec<f64> {
        domain
            .coords()
            .iter()
            .map(|&p| self.forcing_at(t, p))
            .collect()
    }

    fn boundary_source(&self, t: f64, domain: &DiscreteDomain) -> Option<Vec<f64>> {
        match self {
            ExactSolution::Manufactured(m) => Some(
                domain
                    .boundary_nodes()
                    .iter()
                    .zip(domain.boundary_normals())
                    .map(|(&i, &n)| {
                        let [x, y] = domain.coords()[i];
                        m.boundary_source(t, x, y, n)
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    fn boundary_values(&self, t: f64, domain: &DiscreteDomain) -> Option<Vec<f64>> {
        domain
            .boundary_nodes()
            .iter()
            .map(|&i| self.value(t, domain.coords()[i]).ok())
            .collect()
    }

    fn is_mean_free(&self) -> bool {
        !matches!(self, ExactSolution::Manufactured(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeOrder {
    Fourth,
    Eighth,
}

impl ProbeOrder {
    // centred weights for offsets -m..=m
    fn first(self) -> &'static [f64] {
        match self {
            ProbeOrder::Fourth => &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
            ProbeOrder::Eighth => &[
                1.0 / 280.0,
                -4.0 / 105.0,
                1.0 / 5.0,
                -4.0 / 5.0,
                0.0,
                4.0 / 5.0,
                -1.0 / 5.0,
                4.0 / 105.0,
                -1.0 / 280.0,
            ],
        }
    }

    fn second(self) -> &'static [f64] {
        match self {
            ProbeOrder::Fourth => &[-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
            ProbeOrder::Eighth => &[
                -1.0 / 560.0,
                8.0 / 315.0,
                -1.0 / 5.0,
                8.0 / 5.0,
                -205.0 / 72.0,
                8.0 / 5.0,
                -1.0 / 5.0,
                8.0 / 315.0,
                -1.0 / 560.0,
            ],
        }
    }
}

// Weights sum to zero, so differencing against the centre value is exact
// for constants.
fn stencil(weights: &[f64], h: f64, power: i32, f: impl Fn(f64) -> f64) -> f64 {
    let m = (weights.len() / 2) as isize;
    let centre = f(0.0);
    let sum: f64 = weights
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0.0)
        .map(|(k, w)| w * (f((k as isize - m) as f64 * h) - centre))
        .sum();
    sum / h.powi(power)
}

/// Largest `|theta_t - Delta u - f|` over the sample points `(t, [x, y])`,
/// with every derivative replaced by a centred difference of spacing `h`.
/// The geometry follows the solution: radial in three dimensions for the
/// singular solution, the solution's own layout for manufactured ones.
pub fn pde_residual_probe(
    solution: &ExactSolution,
    samples: &[(f64, [f64; 2])],
    h: f64,
    order: ProbeOrder,
) -> Result<f64> {
    let layout = match solution {
        ExactSolution::SingularRadial { .. } => Layout::Radial,
        ExactSolution::Constant { .. } => Layout::Plane,
        ExactSolution::Manufactured(m) => m.layout,
    };
    let d1 = order.first();
    let d2 = order.second();
    let mut worst = 0.0_f64;
    for &(t, [x, y]) in samples {
        let theta = |t: f64, x: f64, y: f64| solution.value(t, [x, y]);
        // surface the first domain error before differencing
        theta(t, x, y)?;
        let u = |t: f64, x: f64, y: f64| -1.0 / theta(t, x, y).unwrap_or(f64::NAN);
        let dtheta_dt = stencil(d1, h, 1, |s| theta(t + s, x, y).unwrap_or(f64::NAN));
        let uxx = stencil(d2, h, 2, |s| u(t, x + s, y));
        let lap = match layout {
            Layout::Line => uxx,
            Layout::Plane => uxx + stencil(d2, h, 2, |s| u(t, x, y + s)),
            Layout::Radial => uxx + 2.0 / x * stencil(d1, h, 1, |s| u(t, x + s, y)),
        };
        let f = solution.forcing_at(t, [x, y]);
        worst = worst.max((dtheta_dt - lap - f).abs());
    }
    Ok(worst)
}
