//! Implicit finite-volume solver for the singular diffusion equation
//! `theta_t + Delta(1/theta) = f` with dynamic boundary conditions
//! `alpha eta_t - beta Delta_Gamma eta = -d_n(-1/theta)` on the boundary trace
//! `eta`, together with the diagnostics and reference solutions used to
//! verify it.
//!
//! The main entry points are [`DiscreteDomain`] for the grids,
//! [`RegularizedGamma`] for the constitutive law, [`stepper::run`] for time
//! integration and the [`diagnostics`] verdicts evaluated on its output.

// `!(x > 0.0)` style tests are kept on purpose: they also reject NaN.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::result_large_err
)]

pub mod dataprep;
pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod linalg;
pub mod moser;
pub mod newton;
pub mod nonlinearity;
pub mod oracle;
pub mod stepper;

pub use diagnostics::{DiagnosticsRecord, Verdict};
pub use domain::{DiscreteDomain, DomainKind, Field, Geometry};
pub use error::{Error, Result};
pub use nonlinearity::{Constitutive, RegularizedGamma, SingularGamma};
pub use stepper::{BoundaryMode, RunConfig, RunOutput, Sources, State, Unforced};

/// Version of this crate, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
