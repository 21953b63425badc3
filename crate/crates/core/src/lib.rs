//! Birkhoff and KAM-versal normal forms of Hamiltonians near elliptic
//! equilibria.
//!
//! The crate is organised bottom-up:
//!
//! - [`series`]: truncated power series in `(t, λ, q, p)` with the canonical
//!   Poisson bracket and Lie-series exponentials;
//! - [`normalform`]: the homological equation, Birkhoff normal forms, the
//!   parametric normal form and a quadratic (order-doubling) scheme;
//! - [`frequency`]: the formal frequency map and the frequency space;
//! - [`arithmetic`]: Bruno sequences, arithmetic classes and density
//!   estimates for the parameter set of invariant tori;
//! - [`dynamics`]: real/complex charts, symplectic integrators and
//!   action-drift measurements;
//! - [`cli`]: job configuration, pipelines and report rendering used by the
//!   `kamnf` binary.

pub mod arithmetic;
pub mod cli;
pub mod dynamics;
pub mod frequency;
pub mod normalform;
pub mod series;
