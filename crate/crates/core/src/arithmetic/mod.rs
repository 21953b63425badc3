//! Bruno sequences, arithmetic classes and density estimates.
//!
//! For a real vector `x ∈ Rⁿ` the Bruno sequence is
//! `a_k(x) = min { |⟨j, x⟩| : j ∈ Zⁿ, 0 < ‖j‖ <= 2^k }` with the Euclidean
//! norm. Since `j` and `−j` give the same value only the half lattice is
//! enumerated. The arithmetic class `C(a)` contains every `β` whose own
//! sequence dominates `a` from a first level on.

mod density;
mod lattice;

use serde::Serialize;
use thiserror::Error;

pub use density::{density_estimate, DensityOptions, DensityReport, SamplingMode};
pub use lattice::{HalfLattice, MAX_POINTS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithmeticError {
    #[error(
        "enumeration infeasible: n = {n}, K = {levels} needs about {points:.3e} lattice points"
    )]
    Infeasible { n: usize, levels: u32, points: f64 },
    #[error("resonant frequency vector: <j, alpha> = 0 for j = {witness:?} (level {level})")]
    Resonant { level: u32, witness: Vec<i32> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, ArithmeticError>;

fn check_vector(x: &[f64]) -> Result<()> {
    if x.is_empty() || x.iter().any(|v| !v.is_finite()) {
        return Err(ArithmeticError::InvalidInput(format!(
            "expected a nonempty finite vector, got {x:?}"
        )));
    }
    Ok(())
}

/// Bruno sequence of a vector up to level `K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrunoProfile {
    pub alpha: Vec<f64>,
    #[serde(rename = "K")]
    pub levels: u32,
    /// `a_0 .. a_K`, nonincreasing.
    pub a: Vec<f64>,
    /// A lattice vector achieving each `a_k`, oriented so that `⟨j, α⟩ > 0`
    /// (or with first nonzero component positive when the pairing is zero).
    pub witnesses: Vec<Vec<i32>>,
    /// `Σ_{m<=k} log(a_m) / 2^m`; `-inf` once some `a_m = 0`.
    pub partial_sums: Vec<f64>,
}

impl BrunoProfile {
    /// First level with `a_k = 0`, if any.
    pub fn resonance(&self) -> Option<(u32, &[i32])> {
        self.a
            .iter()
            .position(|&v| v == 0.0)
            .map(|k| (k as u32, self.witnesses[k].as_slice()))
    }
}

fn orient(j: Vec<i32>, x: &[f64]) -> Vec<i32> {
    let dot: f64 = j.iter().zip(x).map(|(&ji, xi)| ji as f64 * xi).sum();
    if lattice::small_divisor(&j, x) > 0.0 && dot < 0.0 {
        j.into_iter().map(|v| -v).collect()
    } else {
        j
    }
}

fn partial_sums(a: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    a.iter()
        .enumerate()
        .map(|(k, &v)| {
            acc += v.ln() / (1u64 << k) as f64;
            acc
        })
        .collect()
}

/// Exhaustive Bruno sequence `a_0 .. a_K` of `alpha`.
pub fn bruno_sequence(alpha: &[f64], levels: u32) -> Result<BrunoProfile> {
    check_vector(alpha)?;
    let minima = lattice::level_minima(alpha, levels)?;
    let mut a = Vec::with_capacity(minima.len());
    let mut witnesses = Vec::with_capacity(minima.len());
    let mut best: Option<lattice::Best> = None;
    for level in minima {
        if let Some(c) = level {
            if best.as_ref().is_none_or(|b| c.value < b.value) {
                best = Some(c);
            }
        }
        let b = best.as_ref().expect("level 0 always contains e_1");
        a.push(b.value);
        witnesses.push(orient(b.j.clone(), alpha));
    }
    Ok(BrunoProfile {
        alpha: alpha.to_vec(),
        levels,
        partial_sums: partial_sums(&a),
        a,
        witnesses,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BrunoVerdict {
    /// Tail variation below 0.1.
    ConvergingTrend,
    /// Tail variation above 1.
    DivergingTrend,
    Inconclusive,
    /// Some `a_k = 0`; the sum is `-inf`.
    Resonant,
}

/// Partial Bruno sums with a convergence heuristic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrunoSum {
    pub partial_sums: Vec<f64>,
    /// `|S_K − S_{K−q}|` with `q = max(1, ⌈(K+1)/4⌉)`; `None` when resonant.
    pub tail_gap: Option<f64>,
    pub verdict: BrunoVerdict,
    /// Always `"heuristic at level K"` with the actual `K`.
    pub label: String,
}

pub fn bruno_sum(profile: &BrunoProfile) -> BrunoSum {
    let k = profile.levels as usize;
    let label = format!("heuristic at level {k}");
    let sums = profile.partial_sums.clone();
    if profile.resonance().is_some() {
        return BrunoSum {
            partial_sums: sums,
            tail_gap: None,
            verdict: BrunoVerdict::Resonant,
            label,
        };
    }
    let q = ((k + 1).div_ceil(4)).max(1);
    let gap = if k >= q {
        (sums[k] - sums[k - q]).abs()
    } else {
        sums[k].abs()
    };
    let verdict = if gap < 0.1 {
        BrunoVerdict::ConvergingTrend
    } else if gap > 1.0 {
        BrunoVerdict::DivergingTrend
    } else {
        BrunoVerdict::Inconclusive
    };
    BrunoSum {
        partial_sums: sums,
        tail_gap: Some(gap),
        verdict,
        label,
    }
}

/// `C(a)`: vectors `β` with `a_k(β) >= a_k` for `first_level <= k <= K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArithmeticClass {
    pub a: Vec<f64>,
    pub first_level: u32,
}

impl ArithmeticClass {
    /// Class with the bound imposed from level 1 on.
    pub fn new(a: Vec<f64>) -> Self {
        ArithmeticClass { a, first_level: 1 }
    }

    pub fn with_first_level(mut self, first_level: u32) -> Self {
        self.first_level = first_level;
        self
    }

    /// Largest level the class constrains.
    pub fn levels(&self) -> u32 {
        self.a.len().saturating_sub(1) as u32
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Smallest failing level and a lattice vector violating it.
    pub first_failure: Option<(u32, Vec<i32>)>,
}

fn check_class(class: &ArithmeticClass, levels: u32) -> Result<()> {
    if class.a.len() < levels as usize + 1 {
        return Err(ArithmeticError::InvalidInput(format!(
            "sequence has {} entries but K = {levels}",
            class.a.len()
        )));
    }
    Ok(())
}

fn judge(
    class: &ArithmeticClass,
    levels: u32,
    minima: impl IntoIterator<Item = Option<(f64, Vec<i32>)>>,
) -> Membership {
    let mut best: Option<(f64, Vec<i32>)> = None;
    for (k, level) in minima.into_iter().enumerate().take(levels as usize + 1) {
        if let Some(c) = level {
            if best.as_ref().is_none_or(|b| c.0 < b.0) {
                best = Some(c);
            }
        }
        if (k as u32) < class.first_level {
            continue;
        }
        if let Some((v, j)) = &best {
            if *v < class.a[k] {
                return Membership {
                    member: false,
                    first_failure: Some((k as u32, j.clone())),
                };
            }
        }
    }
    Membership {
        member: true,
        first_failure: None,
    }
}

/// Membership of `beta` in `class`, checked up to level `K`.
pub fn class_membership(beta: &[f64], class: &ArithmeticClass, levels: u32) -> Result<Membership> {
    check_vector(beta)?;
    check_class(class, levels)?;
    let minima = lattice::level_minima(beta, levels)?;
    Ok(judge(
        class,
        levels,
        minima
            .into_iter()
            .map(|b| b.map(|b| (b.value, orient(b.j, beta)))),
    ))
}

/// Same as [`class_membership`] over a precomputed lattice.
pub fn class_membership_cached(
    beta: &[f64],
    class: &ArithmeticClass,
    lattice: &HalfLattice,
) -> Result<Membership> {
    check_vector(beta)?;
    if beta.len() != lattice.dim() {
        return Err(ArithmeticError::InvalidInput(format!(
            "beta has {} components, lattice has dimension {}",
            beta.len(),
            lattice.dim()
        )));
    }
    let levels = lattice.levels();
    check_class(class, levels)?;
    let minima = lattice.level_minima(beta);
    Ok(judge(
        class,
        levels,
        minima
            .into_iter()
            .map(|m| m.map(|(v, idx)| (v, orient(lattice.point(idx).to_vec(), beta)))),
    ))
}

/// `a_k = a_k(α)·2^{−τk}`.
pub fn tau_sequence(alpha: &[f64], tau: f64, levels: u32) -> Result<Vec<f64>> {
    if !tau.is_finite() {
        return Err(ArithmeticError::InvalidInput(format!(
            "tau must be finite, got {tau}"
        )));
    }
    let profile = bruno_sequence(alpha, levels)?;
    if let Some((level, witness)) = profile.resonance() {
        return Err(ArithmeticError::Resonant {
            level,
            witness: witness.to_vec(),
        });
    }
    Ok(profile
        .a
        .iter()
        .enumerate()
        .map(|(k, v)| v * (-tau * k as f64).exp2())
        .collect())
}
