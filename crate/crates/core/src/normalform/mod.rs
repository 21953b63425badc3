//! Homological equation and normal-form algorithms.
//!
//! All solvers work around the quadratic part `H₀ = Σ α_i q_i p_i`, on which
//! `{H₀, q^a p^b} = ⟨b − a, α⟩ q^a p^b`. Monomials with `a = b` span the
//! kernel and make up the normal form; every other monomial is removed by a
//! generator whose coefficient is divided by its eigenvalue.
//!
//! - [`solve_homological`] and [`solve_homological_unfolded`] solve one
//!   homological equation.
//! - [`birkhoff`] follows the two-degrees-per-stage induction.
//! - [`quadratic_iteration`] doubles the certified order at every stage and
//!   can also run on the unfolded Hamiltonian `H + Σ t_i p_i q_i`.
//! - [`uniqueness_probe`] perturbs the generators by resonant kernel elements
//!   and measures how much `P` moves.

mod birkhoff;
mod homological;
mod quadratic;

use serde::Serialize;
use thiserror::Error;

use crate::series::{SeriesError, TruncatedSeries};

pub use birkhoff::{
    birkhoff, birkhoff_stages, birkhoff_with, certify, frequency_map, normal_part,
    parametric_normal_form, uniqueness_probe, validate_hamiltonian,
};
pub use homological::{
    default_t_box_radius, solve_homological, solve_homological_unfolded, HomologicalSolution,
};
pub use quadratic::{
    quadratic_iteration, quadratic_iteration_traced, quadratic_windows, IterationTrace,
    QuadraticOptions, QuadraticResult,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormalFormError {
    #[error("small divisor: |<j, alpha>| = {divisor:.3e} is below the threshold {threshold:.1e} for j = {witness:?}")]
    SmallDivisor {
        divisor: f64,
        threshold: f64,
        witness: Vec<i32>,
    },
    #[error("t-expansion overflow: ratio {ratio:.3} exceeds 1/2 for j = {witness:?} on the t-box of radius {radius:.3e}")]
    TExpansionOverflow {
        ratio: f64,
        radius: f64,
        witness: Vec<i32>,
    },
    #[error("order {requested} exceeds what truncation degree {degree} supports")]
    OrderOverflow { requested: u32, degree: u32 },
    #[error("invalid hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, NormalFormError>;

/// Output of the normal-form algorithms.
#[derive(Clone, Debug, Serialize)]
pub struct NormalFormResult {
    /// `P(X)` with the action symbols stored as `λ`.
    #[serde(rename = "P")]
    pub normal_form: TruncatedSeries,
    /// Generators in the order they were applied to `H`.
    pub generators: Vec<TruncatedSeries>,
    pub achieved_order: u32,
    /// Smallest divisor met over all solves, `None` when nothing was solved.
    pub min_divisor: Option<f64>,
    /// Largest non-normal coefficient left in degrees `<= achieved_order`.
    pub residual_norm: f64,
}

/// Solver settings shared by the algorithms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalFormOptions {
    pub divisor_threshold: f64,
}

impl Default for NormalFormOptions {
    fn default() -> Self {
        NormalFormOptions {
            divisor_threshold: 1e-12,
        }
    }
}

fn merge_min(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}
