use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Monomial, Precision, Result, SeriesError, SeriesSpace, TruncatedSeries, MAX_DIM};

/// The frequencies `α = (α_1, .., α_n)` of the quadratic part
/// `H₀ = Σ α_i q_i p_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyVector {
    components: Vec<Complex64>,
}

impl FrequencyVector {
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.is_empty() || components.len() > MAX_DIM {
            return Err(SeriesError::BadDimension(components.len()));
        }
        if components
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(SeriesError::NonFinite);
        }
        Ok(FrequencyVector { components })
    }

    pub fn real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Parses decimal strings such as `"1.4142135623730951"` at the given
    /// precision.
    pub fn parse_decimal<S: AsRef<str>>(values: &[S], precision: Precision) -> Result<Self> {
        // Only double precision exists; the argument keeps call sites honest.
        let _ = precision;
        let parsed: std::result::Result<Vec<f64>, _> = values
            .iter()
            .map(|s| s.as_ref().trim().parse::<f64>())
            .collect();
        let parsed = parsed.map_err(|e| SeriesError::Malformed(format!("frequency: {e}")))?;
        Self::real(&parsed)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    /// `⟨j, α⟩`
    pub fn pairing(&self, j: &[i32]) -> Complex64 {
        j.iter()
            .zip(&self.components)
            .map(|(&ji, a)| a * ji as f64)
            .sum()
    }

    /// Real parts, or `None` when some component has a nonzero imaginary part.
    pub fn real_parts(&self) -> Option<Vec<f64>> {
        self.components
            .iter()
            .map(|c| (c.im == 0.0).then_some(c.re))
            .collect()
    }

    /// `Σ α_i q_i p_i` in the given space.
    pub fn quadratic_part(&self, space: &SeriesSpace) -> TruncatedSeries {
        space.from_terms(self.components.iter().enumerate().map(|(i, a)| {
            let mut e = vec![0u8; space.dim];
            e[i] = 1;
            (Monomial::qp(&e, &e), *a)
        }))
    }
}
