use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DynamicsError, Result};
use crate::series::{lie_exp, Assignment, SeriesSpace, TruncatedSeries, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Normal coordinates to original ones.
    Forward,
    /// Original coordinates to normal ones.
    Inverse,
}

/// The polynomial map whose components are the Lie-transformed coordinate
/// functions, cut at a fixed degree.
///
/// With generators `g_1 .. g_m` the forward components are
/// `e^{ad g_m} ⋯ e^{ad g_1} z`, so that `H ∘ Φ = e^{ad g_m} ⋯ e^{ad g_1} H`.
/// The inverse applies `−g_m` first and `−g_1` last.
#[derive(Clone, Debug)]
pub struct PolynomialMap {
    components: Vec<TruncatedSeries>,
    validity_radius: f64,
}

impl PolynomialMap {
    pub fn new(
        space: &SeriesSpace,
        generators: &[TruncatedSeries],
        direction: Direction,
        degree: u32,
    ) -> Result<Self> {
        let n = space.dim;
        let ordered: Vec<TruncatedSeries> = match direction {
            Direction::Forward => generators.to_vec(),
            Direction::Inverse => generators
                .iter()
                .rev()
                .map(|g| g.scale_real(-1.0))
                .collect(),
        };
        let mut components = Vec::with_capacity(2 * n);
        for a in 0..2 * n {
            let v = if a < n { Var::Q(a) } else { Var::P(a - n) };
            let mut f = space.var(v);
            for g in &ordered {
                f = lie_exp(g, &f)?;
            }
            components.push(f.up_to_degree(degree));
        }
        let validity_radius = root_test_radius(&components);
        Ok(PolynomialMap {
            components,
            validity_radius,
        })
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    /// Radius (max norm) inside which the nonlinear terms stay below the
    /// linear ones, from a root test on the homogeneous parts.
    pub fn validity_radius(&self) -> f64 {
        self.validity_radius
    }

    pub fn apply(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.components.len() / 2;
        if z.len() != 2 * n {
            return Err(DynamicsError::InvalidInput(
                "point has the wrong dimension".into(),
            ));
        }
        let size = z.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if size > self.validity_radius {
            return Err(DynamicsError::OutsideValidity {
                norm: size,
                radius: self.validity_radius,
            });
        }
        let at = Assignment::qp(&z[..n], &z[n..]);
        Ok(self.components.iter().map(|f| f.evaluate(&at)).collect())
    }
}

/// `min_d (Σ_components max|c| of degree d)^{−1/(d−1)}` over `d >= 2`.
fn root_test_radius(components: &[TruncatedSeries]) -> f64 {
    let top = components
        .iter()
        .filter_map(|c| c.highest_degree())
        .max()
        .unwrap_or(1);
    let mut radius = f64::INFINITY;
    for d in 2..=top {
        let size: f64 = components
            .iter()
            .map(|c| c.homogeneous(d).iter().map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        if size > 0.0 {
            radius = radius.min(size.powf(-1.0 / (d as f64 - 1.0)));
        }
    }
    radius
}

/// Convenience wrapper building the map and applying it once.
pub fn transform_point(
    space: &SeriesSpace,
    generators: &[TruncatedSeries],
    z: &[Complex64],
    direction: Direction,
    degree: u32,
) -> Result<Vec<Complex64>> {
    PolynomialMap::new(space, generators, direction, degree)?.apply(z)
}
