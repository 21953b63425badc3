use num_complex::Complex64;
use serde::Serialize;

use super::{
    integrate_with, Direction, DynamicsError, EllipticChart, HamiltonianField, Method,
    PolynomialMap, Result,
};
use crate::normalform::birkhoff;
use crate::series::{FrequencyVector, TruncatedSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct DriftOptions {
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
    /// Deviations at or below this value are treated as integrator noise.
    pub floor: f64,
}

impl Default for DriftOptions {
    fn default() -> Self {
        DriftOptions {
            t_end: 50.0,
            dt: 0.01,
            method: Method::Gauss2,
            floor: 1e-12,
        }
    }
}

/// Action deviations per radius and the fitted power law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    pub radii: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Slope of `log(deviation)` against `log(r)`; `None` when fewer than
    /// two deviations lie above the floor.
    pub exponent: Option<f64>,
    pub r2_of_fit: Option<f64>,
    /// `"fit"` or `"floor"`.
    pub status: String,
    /// Radii whose deviation was at the floor and left out of the fit.
    pub excluded: Vec<f64>,
    pub floor: f64,
}

/// Least-squares line `y = a + b x`; returns `(b, R²)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    (slope, r2)
}

/// Starts on the normal-form torus of action `r²·λ₀`, integrates `H` and
/// records `max_t max_i |w_q w_p − r² λ₀_i|` in normal coordinates.
pub fn drift_exponent(
    h: &TruncatedSeries,
    alpha: &FrequencyVector,
    k: u32,
    lambda0: &[f64],
    radii: &[f64],
    opts: &DriftOptions,
) -> Result<DriftReport> {
    let n = h.dim();
    if lambda0.len() != n || lambda0.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(DynamicsError::InvalidInput(format!(
            "lambda0 must have {n} non-negative entries"
        )));
    }
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(DynamicsError::InvalidInput("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(DynamicsError::InvalidInput(
            "radii must be strictly decreasing".into(),
        ));
    }
    let nf = birkhoff(h, alpha, k)?;
    let space = *h.space();
    let forward = PolynomialMap::new(&space, &nf.generators, Direction::Forward, k)?;
    let inverse = PolynomialMap::new(&space, &nf.generators, Direction::Inverse, k)?;
    let field = HamiltonianField::new(h, &EllipticChart::default())?;

    let mut deviations = Vec::with_capacity(radii.len());
    for &r in radii {
        let target: Vec<f64> = lambda0.iter().map(|l| r * r * l).collect();
        let w0: Vec<Complex64> = (0..2 * n)
            .map(|a| Complex64::new(r * lambda0[a % n].sqrt(), 0.0))
            .collect();
        let z0 = forward.apply(&w0)?;
        let mut worst: f64 = 0.0;
        let mut failure = None;
        integrate_with(&field, &z0, opts.t_end, opts.dt, opts.method, |_, z| {
            if failure.is_some() {
                return;
            }
            match inverse.apply(z) {
                Ok(w) => {
                    for i in 0..n {
                        worst = worst.max((w[i] * w[n + i] - target[i]).norm());
                    }
                }
                Err(e) => failure = Some(e),
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        deviations.push(worst);
    }

    let (mut xs, mut ys, mut excluded) = (Vec::new(), Vec::new(), Vec::new());
    for (&r, &d) in radii.iter().zip(&deviations) {
        if d > opts.floor {
            xs.push(r.ln());
            ys.push(d.ln());
        } else {
            excluded.push(r);
        }
    }
    let (exponent, r2, status) = if xs.len() >= 2 {
        let (b, r2) = fit_line(&xs, &ys);
        (Some(b), Some(r2), "fit")
    } else {
        (None, None, "floor")
    };
    Ok(DriftReport {
        radii: radii.to_vec(),
        deviations,
        exponent,
        r2_of_fit: r2,
        status: status.into(),
        excluded,
        floor: opts.floor,
    })
}
