//! Numerical checks that normal-form tori are nearly invariant.
//!
//! Points live either in the real elliptic chart `(x, y)` or in the complex
//! coordinates `(q, p)` used by the series code. The flow is integrated in
//! `(q, p)` with fixed-step Gauss methods, and the normal-form transform is
//! evaluated as a truncated polynomial map.

mod chart;
mod drift;
mod integrate;
mod transform;

use thiserror::Error;

use crate::normalform::NormalFormError;
use crate::series::SeriesError;

pub use chart::{involution, EllipticChart, PhasePoint};
pub use drift::{drift_exponent, fit_line, DriftOptions, DriftReport};
pub use integrate::{integrate, integrate_with, step, HamiltonianField, Method, TrajectoryRecord};
pub use transform::{transform_point, Direction, PolynomialMap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("Newton iteration did not converge in {iterations} iterations")]
    NewtonFailure { iterations: usize },
    #[error("point of norm {norm:.3e} lies outside the transform's validity radius {radius:.3e}")]
    OutsideValidity { norm: f64, radius: f64 },
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;
