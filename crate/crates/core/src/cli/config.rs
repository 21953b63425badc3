//! Job configuration: defaults, command-line flags and a JSON file, merged
//! in that order and validated into a [`JobConfig`].

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dynamics::Method;
use crate::series::{
    parse_series, FrequencyVector, Precision, SeriesSpace, TruncatedSeries, Truncation,
};

/// Every field optional; used for both flags and the `--config` file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub n: Option<usize>,
    pub alpha: Option<Vec<String>>,
    pub hamiltonian: Option<String>,
    #[serde(rename = "N")]
    pub degree: Option<u32>,
    #[serde(rename = "N_t")]
    pub t_degree: Option<u32>,
    pub k: Option<u32>,
    pub precision_bits: Option<u32>,
    pub divisor_threshold: Option<f64>,
    pub tau: Option<f64>,
    #[serde(rename = "K")]
    pub levels: Option<u32>,
    pub first_level: Option<u32>,
    pub radii: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub method: Option<String>,
    pub lambda0: Option<Vec<f64>>,
}

impl PartialConfig {
    /// Fields set in `other` replace those in `self`.
    pub fn merged_with(mut self, other: PartialConfig) -> PartialConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            n,
            alpha,
            hamiltonian,
            degree,
            t_degree,
            k,
            precision_bits,
            divisor_threshold,
            tau,
            levels,
            first_level,
            radii,
            samples,
            grid,
            seed,
            t_end,
            dt,
            method,
            lambda0
        );
        self
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config file: {e}")))
    }
}

/// Validated job settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JobConfig {
    pub n: usize,
    pub alpha: Vec<String>,
    pub hamiltonian: Option<String>,
    #[serde(rename = "N")]
    pub degree: u32,
    #[serde(rename = "N_t")]
    pub t_degree: u32,
    pub k: u32,
    pub precision_bits: u32,
    pub divisor_threshold: f64,
    pub tau: f64,
    #[serde(rename = "K")]
    pub levels: u32,
    pub first_level: u32,
    pub radii: Vec<f64>,
    pub samples: usize,
    pub grid: Option<usize>,
    pub seed: u64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
    pub lambda0: Vec<f64>,
}

fn field(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("config field `{name}`: {msg}"))
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(field(name, format!("must be positive and finite, got {v}")))
    }
}

impl JobConfig {
    pub fn from_partial(p: PartialConfig) -> Result<Self, CliError> {
        let alpha = p.alpha.ok_or_else(|| field("alpha", "is required"))?;
        let n = p.n.unwrap_or(alpha.len());
        if n == 0 || n > crate::series::MAX_DIM {
            return Err(field(
                "n",
                format!("must lie in 1..={}", crate::series::MAX_DIM),
            ));
        }
        if alpha.len() != n {
            return Err(field(
                "alpha",
                format!("expected {n} values, got {}", alpha.len()),
            ));
        }
        let precision_bits = p.precision_bits.unwrap_or(53);
        let precision =
            Precision::from_bits(precision_bits).map_err(|e| field("precision_bits", e))?;
        FrequencyVector::parse_decimal(&alpha, precision).map_err(|e| field("alpha", e))?;
        let degree = p.degree.unwrap_or(8);
        let t_degree = p.t_degree.unwrap_or(degree / 2);
        Truncation::new(degree, t_degree).map_err(|e| field("N", e))?;
        let k = p.k.unwrap_or(degree);
        if k < 3 || k > degree {
            return Err(field(
                "k",
                format!("must lie in 3..=N (N = {degree}), got {k}"),
            ));
        }
        let divisor_threshold =
            positive("divisor_threshold", p.divisor_threshold.unwrap_or(1e-12))?;
        let tau = p.tau.unwrap_or(2.0);
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(field(
                "tau",
                format!("must be finite and non-negative, got {tau}"),
            ));
        }
        let levels = p.levels.unwrap_or(6);
        let first_level = p.first_level.unwrap_or(1);
        if first_level > levels {
            return Err(field(
                "first_level",
                format!("must not exceed K = {levels}"),
            ));
        }
        let radii = p.radii.unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
        if radii.is_empty() {
            return Err(field("radii", "must not be empty"));
        }
        for &r in &radii {
            positive("radii", r)?;
        }
        if radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(field("radii", "must be strictly decreasing"));
        }
        let samples = p.samples.unwrap_or(10_000);
        if samples == 0 {
            return Err(field("samples", "must be positive"));
        }
        if p.grid == Some(0) {
            return Err(field("grid", "must be positive"));
        }
        let t_end = positive("T", p.t_end.unwrap_or(50.0))?;
        let dt = positive("dt", p.dt.unwrap_or(0.01))?;
        if dt > t_end {
            return Err(field("dt", format!("must not exceed T = {t_end}")));
        }
        let method: Method = p
            .method
            .as_deref()
            .unwrap_or("gauss2")
            .parse()
            .map_err(|e| field("method", e))?;
        let lambda0 = p.lambda0.unwrap_or_else(|| vec![1.0; n]);
        if lambda0.len() != n || lambda0.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(field(
                "lambda0",
                format!("expected {n} non-negative values"),
            ));
        }
        Ok(JobConfig {
            n,
            alpha,
            hamiltonian: p.hamiltonian,
            degree,
            t_degree,
            k,
            precision_bits,
            divisor_threshold,
            tau,
            levels,
            first_level,
            radii,
            samples,
            grid: p.grid,
            seed: p.seed.unwrap_or(0),
            t_end,
            dt,
            method,
            lambda0,
        })
    }

    pub fn frequency(&self) -> FrequencyVector {
        let precision = Precision::from_bits(self.precision_bits).expect("validated");
        FrequencyVector::parse_decimal(&self.alpha, precision).expect("validated")
    }

    pub fn alpha_real(&self) -> Vec<f64> {
        self.frequency().real_parts().expect("parsed from decimals")
    }

    pub fn space(&self) -> SeriesSpace {
        SeriesSpace::new(
            self.n,
            Truncation::new(self.degree, self.t_degree).expect("validated"),
        )
        .expect("validated")
    }

    /// The Hamiltonian; `Σ α_i q_i p_i` is prepended when the text has no
    /// terms of degree `<= 2`, and it is the whole Hamiltonian when no text
    /// is given.
    pub fn hamiltonian(&self) -> Result<TruncatedSeries, CliError> {
        let space = self.space();
        let h0 = self.frequency().quadratic_part(&space);
        let Some(text) = &self.hamiltonian else {
            return Ok(h0);
        };
        let h = parse_series(text, &space).map_err(|e| field("hamiltonian", e))?;
        if h.up_to_degree(2).is_zero() {
            Ok(h.add(&h0).map_err(|e| field("hamiltonian", e))?)
        } else {
            Ok(h)
        }
    }
}
