#![allow(dead_code)]

use kamnf::series::{FrequencyVector, Monomial, SeriesSpace, TruncatedSeries, Truncation};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(dim: usize, n: u32) -> SeriesSpace {
    SeriesSpace::new(dim, Truncation::graded(n).unwrap()).unwrap()
}

/// All `q, p` monomials of graded degree exactly `d` in `dim` modes.
pub fn qp_monomials(dim: usize, d: u32) -> Vec<Monomial> {
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
    let mut out = Vec::new();
    rec(0, d, &mut vec![0; 2 * dim], &mut out);
    out
}

/// `Σ α_i q_i p_i` plus every degree-3 and degree-4 monomial with a real
/// coefficient uniform in `[-size, size]`.
pub fn random_hamiltonian(
    space: &SeriesSpace,
    alpha: &FrequencyVector,
    size: f64,
    rng: &mut ChaCha8Rng,
) -> TruncatedSeries {
    let mut h = alpha.quadratic_part(space);
    for d in 3..=4 {
        for m in qp_monomials(space.dim, d) {
            h.add_term(m, Complex64::new(rng.gen_range(-size..=size), 0.0));
        }
    }
    h
}

/// Random sparse `q, p` series with degrees in `lo..=hi`.
pub fn random_series(
    space: &SeriesSpace,
    lo: u32,
    hi: u32,
    terms: usize,
    rng: &mut ChaCha8Rng,
) -> TruncatedSeries {
    let mut s = space.zero();
    for _ in 0..terms {
        let d = rng.gen_range(lo..=hi);
        let pool = qp_monomials(space.dim, d);
        let m = pool[rng.gen_range(0..pool.len())];
        s.add_term(
            m,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        );
    }
    s
}

pub fn sqrt2_alpha() -> FrequencyVector {
    FrequencyVector::real(&[1.0, SQRT2]).unwrap()
}

/// `α₁p₁q₁ + α₂p₂q₂ + (p₁q₁)²`
pub fn quartic_example(space: &SeriesSpace) -> TruncatedSeries {
    let mut h = sqrt2_alpha().quadratic_part(space);
    h.add_term(Monomial::qp(&[2, 0], &[2, 0]), Complex64::new(1.0, 0.0));
    h
}

/// Every nonzero `j` in the full box `[-2^K, 2^K]^n` with its level.
pub struct BoxOracle {
    points: Vec<(Vec<i32>, u32)>,
    levels: u32,
}

impl BoxOracle {
    pub fn new(n: usize, levels: u32) -> Self {
        let b = 1i32 << levels;
        let mut points = Vec::new();
        let mut j = vec![-b; n];
        loop {
            let norm2: i64 = j.iter().map(|&x| x as i64 * x as i64).sum();
            if norm2 > 0 && norm2 <= 1i64 << (2 * levels) {
                let level = (0..=levels).find(|&k| norm2 <= 1i64 << (2 * k)).unwrap();
                points.push((j.clone(), level));
            }
            let mut i = 0;
            loop {
                if i == n {
                    return BoxOracle { points, levels };
                }
                j[i] += 1;
                if j[i] <= b {
                    break;
                }
                j[i] = -b;
                i += 1;
            }
        }
    }

    /// `a_k(β) = min |⟨j, β⟩|` over `0 < ‖j‖ <= 2^k`, for `k = 0..=K`.
    pub fn minima(&self, beta: &[f64]) -> Vec<f64> {
        let mut per_level = vec![f64::INFINITY; self.levels as usize + 1];
        for (j, level) in &self.points {
            let v: f64 = j
                .iter()
                .zip(beta)
                .map(|(&a, b)| a as f64 * b)
                .sum::<f64>()
                .abs();
            let slot = &mut per_level[*level as usize];
            *slot = slot.min(v);
        }
        let mut acc = f64::INFINITY;
        per_level
            .into_iter()
            .map(|v| {
                acc = acc.min(v);
                acc
            })
            .collect()
    }

    pub fn member(&self, beta: &[f64], a: &[f64], first_level: u32) -> bool {
        let m = self.minima(beta);
        (first_level as usize..=self.levels as usize).all(|k| m[k] >= a[k])
    }
}
