//! The singular constitutive law `u = gamma(theta) = -1/theta` and its
//! globally defined, bi-Lipschitz C² surrogate used by the implicit stepper.

use crate::error::{Error, Result};

/// A monotone constitutive map `theta -> u` with its derivative.
pub trait Constitutive {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
    /// Whether `r` lies where the map coincides with `-1/r`.
    fn in_window(&self, _r: f64) -> bool {
        true
    }
}

/// `gamma(r) = -1/r`, defined for `r > 0` only.
pub fn gamma(r: f64) -> Result<f64> {
    if r > 0.0 {
        Ok(-1.0 / r)
    } else {
        Err(Error::OutOfDomain {
            what: "gamma(r) = -1/r",
            value: r,
        })
    }
}

/// `gamma'(r) = 1/r^2`, defined for `r != 0`.
pub fn gamma_prime(r: f64) -> Result<f64> {
    if r != 0.0 {
        Ok(1.0 / (r * r))
    } else {
        Err(Error::OutOfDomain {
            what: "gamma'(r) = 1/r^2",
            value: r,
        })
    }
}

/// The raw singular law. Only meaningful for positive arguments; used to
/// check that the regularisation is invisible inside its window.
#[derive(Debug, Clone, Copy, Default)]
pub struct SingularGamma;

impl Constitutive for SingularGamma {
    fn value(&self, r: f64) -> f64 {
        -1.0 / r
    }
    fn derivative(&self, r: f64) -> f64 {
        1.0 / (r * r)
    }
}

/// Linear law `u = slope * theta`; turns the stepper into a linear heat
/// solver, which Newton must finish in a single iteration.
#[derive(Debug, Clone, Copy)]
pub struct LinearResponse {
    pub slope: f64,
}

impl Constitutive for LinearResponse {
    fn value(&self, r: f64) -> f64 {
        self.slope * r
    }
    fn derivative(&self, _r: f64) -> f64 {
        self.slope
    }
}

// Cubic Hermite basis on [0, 1]: values, derivatives and antiderivatives.
fn hermite(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    ]
}

fn hermite_slope(t: f64) -> [f64; 4] {
    let t2 = t * t;
    [
        6.0 * t2 - 6.0 * t,
        3.0 * t2 - 4.0 * t + 1.0,
        -6.0 * t2 + 6.0 * t,
        3.0 * t2 - 2.0 * t,
    ]
}

fn hermite_integral(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    [
        0.5 * t4 - t3 + t,
        0.25 * t4 - 2.0 / 3.0 * t3 + 0.5 * t2,
        -0.5 * t4 + t3,
        0.25 * t4 - t3 / 3.0,
    ]
}

/// Derivative profile on one transition interval `[start, start + width]`,
/// a cubic Hermite polynomial in the local variable.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Transition {
    start: f64,
    width: f64,
    // coefficients multiplying the four Hermite basis functions
    coeffs: [f64; 4],
    // gamma_R at `start`
    base: f64,
}

impl Transition {
    fn new(start: f64, width: f64, slopes: (f64, f64), curvatures: (f64, f64)) -> Self {
        Self {
            start,
            width,
            coeffs: [
                slopes.0,
                width * curvatures.0,
                slopes.1,
                width * curvatures.1,
            ],
            base: 0.0,
        }
    }

    fn local(&self, r: f64) -> f64 {
        (r - self.start) / self.width
    }

    fn combine(&self, basis: [f64; 4]) -> f64 {
        basis.iter().zip(&self.coeffs).map(|(b, c)| b * c).sum()
    }

    fn value(&self, r: f64) -> f64 {
        self.base + self.width * self.combine(hermite_integral(self.local(r)))
    }

    fn slope(&self, r: f64) -> f64 {
        self.combine(hermite(self.local(r)))
    }

    fn curvature(&self, r: f64) -> f64 {
        self.combine(hermite_slope(self.local(r))) / self.width
    }

    fn increment(&self) -> f64 {
        self.width * self.combine(hermite_integral(1.0))
    }

    fn max_abs_curvature(&self) -> f64 {
        // the curvature is quadratic in the local variable
        let [_, b, _, d] = self.coeffs;
        let [a0, _, c0, _] = self.coeffs;
        let quad = 6.0 * (a0 - c0) + 3.0 * (b + d);
        let lin = -6.0 * (a0 - c0) - 4.0 * b - 2.0 * d;
        let mut candidates = vec![0.0, 1.0];
        if quad != 0.0 {
            let vertex = -lin / (2.0 * quad);
            if (0.0..=1.0).contains(&vertex) {
                candidates.push(vertex);
            }
        }
        candidates
            .into_iter()
            .map(|t| self.combine(hermite_slope(t)).abs() / self.width)
            .fold(0.0, f64::max)
    }
}

/// C², bi-Lipschitz regularisation of `-1/r`.
///
/// Equal to `-1/r` on `[a, b] = [theta_lower / 2, 2 theta_upper]`. Outside
/// the window the slope profile follows a monotone cubic Hermite transition
/// (width `a/2` below, `b/2` above) onto a constant slope, and the function is
/// its exact antiderivative. Slopes stay in `[m_R, M_R]` with
/// `m_R = 1/(2 b^2)` and `M_R = 3/(2 a^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedGamma {
    lower_knot: f64,
    upper_knot: f64,
    slope_floor: f64,
    slope_cap: f64,
    below: Transition,
    above: Transition,
}

impl RegularizedGamma {
    pub fn new(theta_lower: f64, theta_upper: f64) -> Result<Self> {
        if !(theta_lower > 0.0 && theta_upper.is_finite()) {
            return Err(Error::Config(format!(
                "regularisation window needs 0 < theta_lower, got [{theta_lower}, {theta_upper}]"
            )));
        }
        if theta_lower > theta_upper {
            return Err(Error::Config(format!(
                "inverted regularisation window [{theta_lower}, {theta_upper}]"
            )));
        }
        let a = 0.5 * theta_lower;
        let b = 2.0 * theta_upper;
        let slope_cap = 1.5 / (a * a);
        let slope_floor = 0.5 / (b * b);

        let lower_width = 0.5 * a;
        let mut below = Transition::new(
            a - lower_width,
            lower_width,
            (slope_cap, 1.0 / (a * a)),
            (0.0, -2.0 / (a * a * a)),
        );
        below.base = -1.0 / a - below.increment();

        let upper_width = 0.5 * b;
        let mut above = Transition::new(
            b,
            upper_width,
            (1.0 / (b * b), slope_floor),
            (-2.0 / (b * b * b), 0.0),
        );
        above.base = -1.0 / b;

        Ok(Self {
            lower_knot: a,
            upper_knot: b,
            slope_floor,
            slope_cap,
            below,
            above,
        })
    }

    pub fn lower_knot(&self) -> f64 {
        self.lower_knot
    }

    pub fn upper_knot(&self) -> f64 {
        self.upper_knot
    }

    /// `m_R`.
    pub fn slope_floor(&self) -> f64 {
        self.slope_floor
    }

    /// `M_R`.
    pub fn slope_cap(&self) -> f64 {
        self.slope_cap
    }

    /// The four junction points, in increasing order.
    pub fn knots(&self) -> [f64; 4] {
        [
            self.below.start,
            self.lower_knot,
            self.upper_knot,
            self.above.start + self.above.width,
        ]
    }

    pub fn eval(&self, r: f64) -> f64 {
        let [k0, k1, k2, k3] = self.knots();
        if r < k0 {
            self.below.base + self.slope_cap * (r - k0)
        } else if r < k1 {
            self.below.value(r)
        } else if r <= k2 {
            -1.0 / r
        } else if r <= k3 {
            self.above.value(r)
        } else {
            self.above.base + self.above.increment() + self.slope_floor * (r - k3)
        }
    }

    pub fn prime(&self, r: f64) -> f64 {
        let [k0, k1, k2, k3] = self.knots();
        if r < k0 {
            self.slope_cap
        } else if r < k1 {
            self.below.slope(r)
        } else if r <= k2 {
            1.0 / (r * r)
        } else if r <= k3 {
            self.above.slope(r)
        } else {
            self.slope_floor
        }
    }

    pub fn second(&self, r: f64) -> f64 {
        let [k0, k1, k2, k3] = self.knots();
        if r < k0 || r > k3 {
            0.0
        } else if r < k1 {
            self.below.curvature(r)
        } else if r <= k2 {
            -2.0 / (r * r * r)
        } else {
            self.above.curvature(r)
        }
    }

    /// `sup |gamma_R''|`, attained either at the lower knot or inside a
    /// transition.
    pub fn second_derivative_bound(&self) -> f64 {
        let window = 2.0 / self.lower_knot.powi(3);
        window
            .max(self.below.max_abs_curvature())
            .max(self.above.max_abs_curvature())
    }
}

impl Constitutive for RegularizedGamma {
    fn value(&self, r: f64) -> f64 {
        self.eval(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        self.prime(r)
    }
    fn in_window(&self, r: f64) -> bool {
        (self.lower_knot..=self.upper_knot).contains(&r)
    }
}
