//! Sparse truncated power series in `C[[t, λ, q, p]]`.
//!
//! The grading puts `q_i, p_i` in degree 1, `λ_i` in degree 2 and `t_i` in
//! degree 0. Because the parameters `t` carry no degree, a second truncation
//! bound on the total `t`-degree keeps every series finite.
//!
//! Invariants of [`TruncatedSeries`]:
//! - every stored term has graded degree `<= degree` and `t`-degree `<= t_degree`
//! - no stored coefficient has magnitude below the drop tolerance
//! - all coefficients are finite

mod action;
mod frequency_vector;
mod json;
mod monomial;
mod poisson;
mod text;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use action::{action_substitute, taylor_mod_i2, to_action_form, ActionTarget, TaylorSplit};
pub use frequency_vector::FrequencyVector;
pub use monomial::{Monomial, Var, MAX_DIM};
pub use text::{format_coefficient, parse_series, ParseError};

/// Upper bound accepted for either truncation degree; keeps exponent sums
/// inside `u8`.
pub const MAX_TRUNCATION: u32 = 120;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("truncation mismatch: (N={}, N_t={}) vs (N={}, N_t={})", left.degree, left.t_degree, right.degree, right.t_degree)]
    TruncationMismatch { left: Truncation, right: Truncation },
    #[error("dimension {0} outside 1..={MAX_DIM}")]
    BadDimension(usize),
    #[error("truncation degree {0} exceeds {MAX_TRUNCATION}")]
    TruncationTooLarge(u32),
    #[error("generator has effective lowest degree {0}; the Lie series would not terminate")]
    NonTerminatingGenerator(u32),
    #[error("series contains non-action variable in term {0}")]
    NotActionForm(String),
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("unsupported precision: {0} bits (only 53-bit double precision is implemented)")]
    UnsupportedPrecision(u32),
    #[error("malformed series: {0}")]
    Malformed(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Floating precision of the coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    bits: u32,
}

impl Precision {
    pub const DOUBLE: Precision = Precision { bits: 53 };

    pub fn from_bits(bits: u32) -> Result<Self> {
        if bits == 53 {
            Ok(Precision::DOUBLE)
        } else {
            Err(SeriesError::UnsupportedPrecision(bits))
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn unit_roundoff(&self) -> f64 {
        f64::EPSILON / 2.0
    }

    pub fn default_drop_tolerance(&self) -> f64 {
        1e-14
    }

    pub fn default_divisor_threshold(&self) -> f64 {
        1e-12
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::DOUBLE
    }
}

/// Dual truncation bounds: graded degree `N` and `t`-degree `N_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub degree: u32,
    pub t_degree: u32,
}

impl Truncation {
    pub fn new(degree: u32, t_degree: u32) -> Result<Self> {
        for d in [degree, t_degree] {
            if d > MAX_TRUNCATION {
                return Err(SeriesError::TruncationTooLarge(d));
            }
        }
        Ok(Truncation { degree, t_degree })
    }

    /// `N_t = N / 2`.
    pub fn graded(degree: u32) -> Result<Self> {
        Self::new(degree, degree / 2)
    }

    pub fn admits(&self, m: &Monomial) -> bool {
        m.graded_degree() <= self.degree && m.t_degree() <= self.t_degree
    }
}

/// Everything needed to build series that can be combined with each other.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSpace {
    pub dim: usize,
    pub truncation: Truncation,
    pub drop_tolerance: f64,
}

impl SeriesSpace {
    pub fn new(dim: usize, truncation: Truncation) -> Result<Self> {
        Self::with_precision(dim, truncation, Precision::DOUBLE)
    }

    pub fn with_precision(
        dim: usize,
        truncation: Truncation,
        precision: Precision,
    ) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(SeriesError::BadDimension(dim));
        }
        Ok(SeriesSpace {
            dim,
            truncation,
            drop_tolerance: precision.default_drop_tolerance(),
        })
    }

    pub fn with_drop_tolerance(mut self, tol: f64) -> Self {
        self.drop_tolerance = tol;
        self
    }

    pub fn zero(&self) -> TruncatedSeries {
        TruncatedSeries {
            space: *self,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(&self, c: Complex64) -> TruncatedSeries {
        self.monomial(Monomial::one(), c)
    }

    pub fn var(&self, v: Var) -> TruncatedSeries {
        self.monomial(Monomial::var(v), Complex64::new(1.0, 0.0))
    }

    /// `c·m`, or zero when `m` lies beyond the truncation.
    pub fn monomial(&self, m: Monomial, c: Complex64) -> TruncatedSeries {
        let mut s = self.zero();
        s.add_term(m, c);
        s
    }

    pub fn from_terms<I>(&self, terms: I) -> TruncatedSeries
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        let mut s = self.zero();
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    fn check_monomial_dim(&self, m: &Monomial) -> bool {
        m.required_dim() <= self.dim
    }
}

/// Sparse truncated series; see the module docs for its invariants.
#[derive(Clone, Debug)]
pub struct TruncatedSeries {
    space: SeriesSpace,
    terms: BTreeMap<Monomial, Complex64>,
}

impl TruncatedSeries {
    pub fn space(&self) -> &SeriesSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn truncation(&self) -> Truncation {
        self.space.truncation
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// Adds `c` to the coefficient of `m`, dropping it when beyond the
    /// truncation and pruning the result.
    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        debug_assert!(
            self.space.check_monomial_dim(&m),
            "monomial {m} exceeds dim"
        );
        if !self.space.truncation.admits(&m) {
            return;
        }
        let tol = self.space.drop_tolerance;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.norm() < tol {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                if c.norm() >= tol {
                    e.insert(c);
                }
            }
        }
    }

    fn prune(&mut self) {
        let tol = self.space.drop_tolerance;
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    pub fn check_compatible(&self, other: &TruncatedSeries) -> Result<()> {
        if self.space.dim != other.space.dim {
            return Err(SeriesError::DimensionMismatch {
                left: self.space.dim,
                right: other.space.dim,
            });
        }
        if self.space.truncation != other.space.truncation {
            return Err(SeriesError::TruncationMismatch {
                left: self.space.truncation,
                right: other.space.truncation,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -*c);
        }
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &TruncatedSeries) -> Result<()> {
        self.check_compatible(other)?;
        for (m, c) in &other.terms {
            self.add_term(*m, *c);
        }
        Ok(())
    }

    pub fn scale(&self, s: Complex64) -> TruncatedSeries {
        let mut out = self.space.zero();
        for (m, c) in &self.terms {
            out.add_term(*m, *c * s);
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> TruncatedSeries {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Coefficientwise product, discarding everything beyond either bound.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let trunc = self.space.truncation;
        let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.graded_degree();
            let ta = ma.t_degree();
            for (mb, cb) in &other.terms {
                // terms iterate in increasing graded degree
                if da + mb.graded_degree() > trunc.degree {
                    break;
                }
                if ta + mb.t_degree() > trunc.t_degree {
                    continue;
                }
                let m = ma
                    .checked_mul(mb)
                    .expect("exponent overflow inside truncation");
                *acc.entry(m).or_default() += ca * cb;
            }
        }
        let mut out = TruncatedSeries {
            space: self.space,
            terms: acc,
        };
        out.prune();
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<TruncatedSeries> {
        let mut out = self.space.constant(Complex64::new(1.0, 0.0));
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn derivative(&self, v: Var) -> TruncatedSeries {
        let mut out = self.space.zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if let Some(low) = m.lower(v) {
                out.add_term(low, *c * e as f64);
            }
        }
        out
    }

    /// Terms whose monomial satisfies `keep`.
    pub fn filter<F: Fn(&Monomial) -> bool>(&self, keep: F) -> TruncatedSeries {
        TruncatedSeries {
            space: self.space,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    pub fn homogeneous(&self, degree: u32) -> TruncatedSeries {
        self.filter(|m| m.graded_degree() == degree)
    }

    pub fn up_to_degree(&self, degree: u32) -> TruncatedSeries {
        self.filter(|m| m.graded_degree() <= degree)
    }

    /// Same terms in a space with a different truncation (terms beyond the
    /// new bounds are dropped).
    pub fn retruncate(&self, truncation: Truncation) -> TruncatedSeries {
        let space = SeriesSpace {
            truncation,
            ..self.space
        };
        space.from_terms(self.terms.iter().map(|(m, c)| (*m, *c)))
    }

    pub fn lowest_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.graded_degree()).min()
    }

    pub fn highest_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.graded_degree()).max()
    }

    /// Lowest degree among terms that involve `q` or `p`. Pure parameter
    /// terms are Casimirs of the bracket and do not count.
    pub fn effective_lowest_degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .filter(|m| !m.is_parameter_only())
            .map(|m| m.graded_degree())
            .min()
    }

    /// Largest coefficient magnitude, zero for the zero series.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn contains_var_family(&self, pred: impl Fn(&Monomial) -> bool) -> bool {
        self.terms.keys().any(pred)
    }

    /// Coefficientwise comparison within `tol` (absolute).
    pub fn approx_eq(&self, other: &TruncatedSeries, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn max_abs_diff(&self, other: &TruncatedSeries) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, c) in &self.terms {
            worst = worst.max((c - other.coefficient(m)).norm());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Complex conjugate of every coefficient.
    pub fn conj(&self) -> TruncatedSeries {
        TruncatedSeries {
            space: self.space,
            terms: self.terms.iter().map(|(m, c)| (*m, c.conj())).collect(),
        }
    }

    /// Evaluates at a point; absent slices are read as zero vectors.
    pub fn evaluate(&self, at: &Assignment<'_>) -> Complex64 {
        let dim = self.space.dim;
        let maxe = self
            .terms
            .keys()
            .flat_map(|m| m.factors().map(|(_, e)| e as usize))
            .max()
            .unwrap_or(0);
        let table = PowerTable::new(dim, maxe, at);
        self.terms.iter().map(|(m, c)| c * table.monomial(m)).sum()
    }
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.iter().eq(other.iter())
    }
}

/// Values for the four variable families during evaluation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Assignment<'a> {
    pub q: &'a [Complex64],
    pub p: &'a [Complex64],
    pub lambda: &'a [Complex64],
    pub t: &'a [Complex64],
}

impl<'a> Assignment<'a> {
    pub fn qp(q: &'a [Complex64], p: &'a [Complex64]) -> Self {
        Assignment {
            q,
            p,
            ..Default::default()
        }
    }

    pub fn lambda(lambda: &'a [Complex64]) -> Self {
        Assignment {
            lambda,
            ..Default::default()
        }
    }
}

struct PowerTable {
    // powers[var_slot][e]
    powers: Vec<Vec<Complex64>>,
    dim: usize,
}

impl PowerTable {
    fn new(dim: usize, maxe: usize, at: &Assignment<'_>) -> Self {
        let blocks = [at.q, at.p, at.lambda, at.t];
        let mut powers = Vec::with_capacity(4 * dim);
        for vals in blocks {
            for i in 0..dim {
                let x = vals.get(i).copied().unwrap_or_default();
                let mut row = Vec::with_capacity(maxe + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                row.push(acc);
                for _ in 0..maxe {
                    acc *= x;
                    row.push(acc);
                }
                powers.push(row);
            }
        }
        PowerTable { powers, dim }
    }

    fn monomial(&self, m: &Monomial) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for (var, e) in m.factors() {
            let block = match var {
                Var::Q(_) => 0,
                Var::P(_) => 1,
                Var::Lambda(_) => 2,
                Var::T(_) => 3,
            };
            v *= self.powers[block * self.dim + var.index()][e as usize];
        }
        v
    }
}

pub use poisson::{lie_exp, lie_exp_counted, poisson_bracket};

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn space(dim: usize, n: u32) -> SeriesSpace {
        SeriesSpace::new(dim, Truncation::graded(n).unwrap()).unwrap()
    }

    #[test]
    fn binomial_square() {
        let s = space(1, 6);
        let f = s.var(Var::Q(0)).add(&s.var(Var::P(0))).unwrap();
        let sq = f.mul(&f).unwrap();
        assert_eq!(sq.len(), 3);
        assert_eq!(sq.coefficient(&Monomial::qp(&[2], &[0])), c(1.0));
        assert_eq!(sq.coefficient(&Monomial::qp(&[1], &[1])), c(2.0));
        assert_eq!(sq.coefficient(&Monomial::qp(&[0], &[2])), c(1.0));
    }

    #[test]
    fn product_beyond_truncation_vanishes() {
        let s = space(1, 5);
        let q3 = s.monomial(Monomial::qp(&[3], &[0]), c(1.0));
        assert!(q3.mul(&q3).unwrap().is_zero());
    }

    #[test]
    fn t_truncation_applies_independently() {
        let s = SeriesSpace::new(1, Truncation::new(4, 1).unwrap()).unwrap();
        let t = s.var(Var::T(0));
        assert!(t.mul(&t).unwrap().is_zero());
        assert_eq!(t.mul(&s.var(Var::Q(0))).unwrap().len(), 1);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = space(1, 4).var(Var::Q(0));
        let b = space(2, 4).var(Var::Q(0));
        assert!(matches!(
            a.mul(&b),
            Err(SeriesError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn small_coefficients_are_pruned() {
        let s = space(1, 4);
        let mut f = s.monomial(Monomial::qp(&[1], &[0]), c(1.0));
        f.add_term(Monomial::qp(&[1], &[0]), c(-1.0 + 1e-16));
        assert!(f.is_zero());
    }

    #[test]
    fn evaluation_matches_hand_value() {
        let s = space(2, 6);
        let f = s.from_terms([
            (Monomial::qp(&[1, 0], &[1, 0]), c(2.0)),
            (Monomial::qp(&[0, 2], &[0, 1]), c(-1.0)),
        ]);
        let q = [c(0.5), c(2.0)];
        let p = [c(3.0), c(0.25)];
        let v = f.evaluate(&Assignment::qp(&q, &p));
        assert!((v - c(2.0 * 1.5 - 4.0 * 0.25)).norm() < 1e-15);
    }

    #[test]
    fn only_double_precision_is_supported() {
        assert!(Precision::from_bits(53).is_ok());
        assert_eq!(
            Precision::from_bits(128),
            Err(SeriesError::UnsupportedPrecision(128))
        );
    }
}
