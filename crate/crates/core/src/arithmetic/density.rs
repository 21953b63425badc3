//! Monte Carlo and grid estimates of `Vol(g⁻¹(C(a)) ∩ B(0, r)) / Vol(B(0, r))`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_vector, class_membership_cached, tau_sequence, ArithmeticClass, ArithmeticError,
    HalfLattice, Result,
};
use crate::series::{Assignment, TruncatedSeries};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SamplingMode {
    /// Independent uniform samples in the ball.
    MonteCarlo,
    /// Cell centres of a `per_axis^n` grid on the cube, restricted to the ball.
    Grid { per_axis: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityOptions {
    pub mode: SamplingMode,
    pub first_level: u32,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            mode: SamplingMode::MonteCarlo,
            first_level: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub radii: Vec<f64>,
    pub fractions: Vec<f64>,
    /// 95% Wilson half-widths.
    pub ci_half_widths: Vec<f64>,
    pub samples_per_radius: usize,
    #[serde(rename = "K")]
    pub levels: u32,
    pub tau: f64,
    pub first_level: u32,
    pub mode: SamplingMode,
}

impl DensityReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,fraction,ci_half_width\n");
        for ((r, f), c) in self
            .radii
            .iter()
            .zip(&self.fractions)
            .zip(&self.ci_half_widths)
        {
            out.push_str(&format!("{r},{f},{c}\n"));
        }
        out
    }
}

/// Half-width of the 95% Wilson score interval.
pub fn wilson_half_width(successes: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.5;
    }
    let n = total as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

/// Uniform point of the unit ball drawn from ChaCha8 stream `index`.
fn ball_sample(n: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            let radius = rng.gen::<f64>().powf(1.0 / n as f64);
            return dir.into_iter().map(|x| x * radius / norm).collect();
        }
    }
}

fn grid_points(n: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let step = 2.0 / per_axis as f64;
    let total = per_axis.pow(n as u32);
    (0..total)
        .filter_map(|mut idx| {
            let mut x = Vec::with_capacity(n);
            for _ in 0..n {
                x.push(-1.0 + step * ((idx % per_axis) as f64 + 0.5));
                idx /= per_axis;
            }
            (x.iter().map(|v| v * v).sum::<f64>() <= 1.0).then_some(x)
        })
        .collect()
}

/// Evaluates `β = α + Re ĝ(λ)`.
fn frequency_at(ghat: &[TruncatedSeries], alpha: &[f64], lambda: &[f64]) -> Result<Vec<f64>> {
    let lam: Vec<Complex64> = lambda.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let at = Assignment::lambda(&lam);
    let beta: Vec<f64> = ghat
        .iter()
        .zip(alpha)
        .map(|(g, a)| a + g.evaluate(&at).re)
        .collect();
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(ArithmeticError::InvalidInput(format!(
            "frequency map overflows at lambda = {lambda:?}"
        )));
    }
    Ok(beta)
}

/// Fraction of `λ` in `B(0, r) ⊂ Rⁿ` with `α + ĝ(λ) ∈ C(a)`, where
/// `a = tau_sequence(α, τ, K)`, for every radius.
///
/// Monte Carlo sample `i` uses ChaCha8 stream `i` of `seed` and is reused
/// (rescaled) across radii.
#[allow(clippy::too_many_arguments)]
pub fn density_estimate(
    ghat: &[TruncatedSeries],
    alpha: &[f64],
    tau: f64,
    levels: u32,
    radii: &[f64],
    samples: usize,
    seed: u64,
    opts: DensityOptions,
) -> Result<DensityReport> {
    check_vector(alpha)?;
    let n = alpha.len();
    if ghat.len() != n {
        return Err(ArithmeticError::InvalidInput(format!(
            "ghat has {} components, alpha has {n}",
            ghat.len()
        )));
    }
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(ArithmeticError::InvalidInput(
            "radii must be positive and finite".into(),
        ));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ArithmeticError::InvalidInput(
            "radii must be strictly decreasing".into(),
        ));
    }
    let lattice = HalfLattice::new(n, levels)?;
    let class =
        ArithmeticClass::new(tau_sequence(alpha, tau, levels)?).with_first_level(opts.first_level);
    let unit_points: Vec<Vec<f64>> = match opts.mode {
        SamplingMode::MonteCarlo => {
            if samples == 0 {
                return Err(ArithmeticError::InvalidInput(
                    "samples must be positive".into(),
                ));
            }
            (0..samples as u64)
                .into_par_iter()
                .map(|i| ball_sample(n, seed, i))
                .collect()
        }
        SamplingMode::Grid { per_axis } => {
            if per_axis == 0 {
                return Err(ArithmeticError::InvalidInput(
                    "grid needs at least one point per axis".into(),
                ));
            }
            grid_points(n, per_axis)
        }
    };
    let total = unit_points.len();
    let mut fractions = Vec::with_capacity(radii.len());
    let mut ci = Vec::with_capacity(radii.len());
    for &r in radii {
        let hits = unit_points
            .par_iter()
            .map(|u| {
                let lambda: Vec<f64> = u.iter().map(|x| x * r).collect();
                let beta = frequency_at(ghat, alpha, &lambda)?;
                Ok(class_membership_cached(&beta, &class, &lattice)?.member as usize)
            })
            .collect::<Result<Vec<usize>>>()?
            .into_iter()
            .sum::<usize>();
        fractions.push(hits as f64 / total as f64);
        ci.push(wilson_half_width(hits, total));
    }
    Ok(DensityReport {
        radii: radii.to_vec(),
        fractions,
        ci_half_widths: ci,
        samples_per_radius: total,
        levels,
        tau,
        first_level: opts.first_level,
        mode: opts.mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{SeriesSpace, Truncation};

    #[test]
    fn wilson_values() {
        // p = 0.5, n = 100: z/(1+z²/n) * sqrt(0.0025 + z²/40000)
        let w = wilson_half_width(50, 100);
        assert!((w - 0.096_17).abs() < 1e-4, "{w}");
        assert!(wilson_half_width(100, 100) > 0.0);
    }

    #[test]
    fn ball_samples_stay_inside() {
        for i in 0..200 {
            let x = ball_sample(3, 5, i);
            assert!(x.iter().map(|v| v * v).sum::<f64>() <= 1.0);
        }
        assert_eq!(ball_sample(2, 9, 4), ball_sample(2, 9, 4));
    }

    #[test]
    fn zero_map_is_full_density() {
        let s = SeriesSpace::new(2, Truncation::graded(6).unwrap()).unwrap();
        let ghat = vec![s.zero(), s.zero()];
        let rep = density_estimate(
            &ghat,
            &[1.0, std::f64::consts::SQRT_2],
            1.0,
            4,
            &[0.1, 0.05],
            200,
            3,
            DensityOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.fractions, vec![1.0, 1.0]);
        assert!(rep
            .to_csv()
            .starts_with("radius,fraction,ci_half_width\n0.1,1,"));
    }

    #[test]
    fn grid_is_symmetric() {
        let pts = grid_points(2, 10);
        assert!(!pts.is_empty());
        let sum: f64 = pts.iter().map(|p| p[0]).sum();
        assert!(sum.abs() < 1e-12);
    }
}
