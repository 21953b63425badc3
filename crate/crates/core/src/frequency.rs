//! Formal frequency map and frequency space.
//!
//! The frequency space `F(H)` is the smallest linear subspace of `Cⁿ`
//! containing the image of `ĝ`. For a truncated map this is the span of the
//! coefficient vectors `(ĝ_1[c], .., ĝ_n[c])` over all `λ`-monomials `c`,
//! which we read off from a singular value decomposition.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::normalform::{parametric_normal_form, IterationTrace, NormalFormError};
use crate::series::{lie_exp, FrequencyVector, Monomial, SeriesError, TruncatedSeries};

/// Default relative rank tolerance.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrequencyError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("iteration trace carries no t-action data; run the unfolded iteration")]
    MissingTActions,
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

pub type Result<T> = std::result::Result<T, FrequencyError>;

#[derive(Clone, Debug)]
pub struct FrequencyMapResult {
    pub ghat: Vec<TruncatedSeries>,
    /// Orthonormal basis of `F(H)`; each vector has its largest component
    /// real and positive.
    pub space_basis: Vec<Vec<Complex64>>,
    pub space_dim: usize,
}

impl Serialize for FrequencyMapResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let basis: Vec<Vec<[f64; 2]>> = self
            .space_basis
            .iter()
            .map(|v| v.iter().map(|c| [c.re, c.im]).collect())
            .collect();
        let mut st = serializer.serialize_struct("FrequencyMapResult", 3)?;
        st.serialize_field("ghat", &self.ghat)?;
        st.serialize_field("basis", &basis)?;
        st.serialize_field("dim", &self.space_dim)?;
        st.end()
    }
}

/// Span of the coefficient vectors of `ghat`, keeping singular values above
/// `tol·σ_max`.
pub fn frequency_space(ghat: &[TruncatedSeries], tol: f64) -> Result<FrequencyMapResult> {
    let n = ghat.len();
    if n == 0 {
        return Err(FrequencyError::InvalidInput("empty frequency map".into()));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(FrequencyError::InvalidInput(format!(
            "rank tolerance must lie in (0, 1), got {tol}"
        )));
    }
    for g in &ghat[1..] {
        ghat[0].check_compatible(g)?;
    }
    let mut rows: BTreeMap<Monomial, Vec<Complex64>> = BTreeMap::new();
    for (i, g) in ghat.iter().enumerate() {
        for (m, c) in g.iter() {
            rows.entry(*m)
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); n])[i] = *c;
        }
    }
    let rows: Vec<Vec<Complex64>> = rows.into_values().collect();
    let space_basis = row_space(&rows, n, tol);
    Ok(FrequencyMapResult {
        ghat: ghat.to_vec(),
        space_dim: space_basis.len(),
        space_basis,
    })
}

fn row_space(rows: &[Vec<Complex64>], n: usize, tol: f64) -> Vec<Vec<Complex64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Vec::new();
    }
    let mut kept: Vec<(f64, Vec<Complex64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol * sigma_max)
        .map(|(k, &s)| {
            let v: Vec<Complex64> = (0..n).map(|c| v_t[(k, c)].conj()).collect();
            (s, normalise_phase(v))
        })
        .collect();
    kept.sort_by(|a, b| b.0.total_cmp(&a.0));
    kept.into_iter().map(|(_, v)| v).collect()
}

fn normalise_phase(v: Vec<Complex64>) -> Vec<Complex64> {
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default();
    if pivot.norm() == 0.0 {
        return v;
    }
    let phase = pivot.conj() / pivot.norm();
    v.into_iter().map(|c| c * phase).collect()
}

/// Largest principal angle between two subspaces given by orthonormal bases.
///
/// Spaces of different dimension are at angle `π/2`; two zero spaces are at
/// angle `0`.
pub fn principal_angle(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    if a.len() != b.len() {
        return FRAC_PI_2;
    }
    if a.is_empty() {
        return 0.0;
    }
    let n = a[0].len();
    let ma = DMatrix::from_fn(n, a.len(), |r, c| a[c][r]);
    let mb = DMatrix::from_fn(n, b.len(), |r, c| b[c][r]);
    let proj = &mb * mb.adjoint();
    let resid = &ma - proj * &ma;
    let s = resid
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .min(1.0);
    s.asin()
}

/// Checks the tangency statement of the unfolded iteration: for every stage
/// and every `i > k` (1-based), each monomial of `u_s(t_i)` must contain
/// some `t_j` with `j > k`. Returns the largest offending coefficient.
pub fn tangency_check(trace: &IterationTrace, k: usize) -> Result<f64> {
    let actions = trace
        .t_actions
        .as_ref()
        .ok_or(FrequencyError::MissingTActions)?;
    let mut worst: f64 = 0.0;
    for stage in actions {
        for action in stage.iter().skip(k) {
            let n = action.dim();
            for (m, c) in action.iter() {
                if !(k..n).any(|j| m.t(j) > 0) {
                    worst = worst.max(c.norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Random `q, p` polynomial of exactly the given graded degree with real
/// coefficients in `[-size, size]`.
fn random_generator(
    like: &TruncatedSeries,
    degree: u32,
    size: f64,
    rng: &mut ChaCha8Rng,
) -> TruncatedSeries {
    let n = like.dim();
    let mut terms = Vec::new();
    let mut exps = vec![0u8; 2 * n];
    fn rec(idx: usize, left: u32, exps: &mut Vec<u8>, out: &mut Vec<Monomial>) {
        if idx + 1 == exps.len() {
            exps[idx] = left as u8;
            let n = exps.len() / 2;
            out.push(Monomial::qp(&exps[..n], &exps[n..]));
            return;
        }
        for e in 0..=left {
            exps[idx] = e as u8;
            rec(idx + 1, left - e, exps, out);
        }
    }
    let mut monomials = Vec::new();
    rec(0, degree, &mut exps, &mut monomials);
    for m in monomials {
        terms.push((m, Complex64::new(rng.gen_range(-size..=size), 0.0)));
    }
    like.space().from_terms(terms)
}

/// Conjugates `h` by `trials` random Lie exponentials of degree
/// `random_generator_degree` (coefficients up to 0.1) and returns the
/// largest principal angle between `F(H)` and the recomputed space.
pub fn automorphism_invariance_check(
    h: &TruncatedSeries,
    alpha: &FrequencyVector,
    k: u32,
    random_generator_degree: u32,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if random_generator_degree < 3 {
        return Err(FrequencyError::InvalidInput(format!(
            "random generators must have degree >= 3, got {random_generator_degree}"
        )));
    }
    let (_, ghat) = parametric_normal_form(h, alpha, k)?;
    let base = frequency_space(&ghat, DEFAULT_RANK_TOL)?;
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let g = random_generator(h, random_generator_degree, 0.1, &mut rng);
        let conjugated = lie_exp(&g, h)?;
        let (_, ghat2) = parametric_normal_form(&conjugated, alpha, k)?;
        let other = frequency_space(&ghat2, DEFAULT_RANK_TOL)?;
        worst = worst.max(principal_angle(&base.space_basis, &other.space_basis));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{parse_series, SeriesSpace, Truncation};

    fn space(n: usize) -> SeriesSpace {
        SeriesSpace::new(n, Truncation::graded(8).unwrap()).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn first_axis() {
        let s = space(2);
        let ghat = vec![parse_series("2*l1", &s).unwrap(), s.zero()];
        let f = frequency_space(&ghat, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.space_dim, 1);
        assert!((f.space_basis[0][0] - c(1.0)).norm() < 1e-14);
        assert!(f.space_basis[0][1].norm() < 1e-14);
        let json = serde_json::to_value(&f).unwrap();
        assert_eq!(json["dim"], 1);
        assert_eq!(json["basis"][0][0][0], 1.0);
    }

    #[test]
    fn zero_map() {
        let s = space(2);
        let f = frequency_space(&[s.zero(), s.zero()], DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.space_dim, 0);
    }

    #[test]
    fn angles() {
        let e1 = vec![vec![c(1.0), c(0.0)]];
        let e2 = vec![vec![c(0.0), c(1.0)]];
        let diag = vec![vec![c(1.0 / 2f64.sqrt()), c(1.0 / 2f64.sqrt())]];
        assert!(principal_angle(&e1, &e1) < 1e-15);
        assert!((principal_angle(&e1, &e2) - FRAC_PI_2).abs() < 1e-12);
        assert!((principal_angle(&e1, &diag) - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert_eq!(principal_angle(&e1, &[]), FRAC_PI_2);
        assert_eq!(principal_angle(&[], &[]), 0.0);
    }

    #[test]
    fn missing_t_actions() {
        let trace = IterationTrace {
            windows: vec![],
            generators: vec![],
            t_actions: None,
            t_box_radius: None,
        };
        assert_eq!(
            tangency_check(&trace, 0),
            Err(FrequencyError::MissingTActions)
        );
    }
}
