//! Rendering of pipeline results as text, JSON or CSV.

use std::fmt::Write as _;

use serde::Serialize;

use super::CliError;
use crate::arithmetic::{BrunoProfile, BrunoSum, DensityReport};
use crate::dynamics::DriftReport;
use crate::frequency::FrequencyMapResult;
use crate::normalform::NormalFormResult;
use crate::series::{format_coefficient, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "txt",
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

pub trait Report: Serialize {
    /// Base name for output files.
    fn name(&self) -> &'static str;

    fn text(&self) -> String;

    fn csv(&self) -> Option<String> {
        None
    }

    fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Text => Ok(self.text().into_bytes()),
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => self.csv().map(String::into_bytes).ok_or_else(|| {
                CliError::Usage(format!("the {} report has no CSV form", self.name()))
            }),
        }
    }

    /// Formats the report supports.
    fn formats(&self) -> Vec<Format> {
        let mut f = vec![Format::Text, Format::Json];
        if self.csv().is_some() {
            f.push(Format::Csv);
        }
        f
    }
}

fn tuple(series: &[TruncatedSeries]) -> String {
    let parts: Vec<String> = series.iter().map(|s| s.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:e}"))
}

#[derive(Clone, Debug, Serialize)]
pub struct NfReport {
    pub normal_form: NormalFormResult,
    pub frequency: FrequencyMapResult,
    pub certified_residual: f64,
}

impl Report for NfReport {
    fn name(&self) -> &'static str {
        "nf"
    }

    fn text(&self) -> String {
        let nf = &self.normal_form;
        let mut s = String::new();
        writeln!(s, "Birkhoff normal form to order {}", nf.achieved_order).unwrap();
        writeln!(s, "P = {}", nf.normal_form).unwrap();
        writeln!(s, "ghat = {}", tuple(&self.frequency.ghat)).unwrap();
        writeln!(s, "F(H) dim = {}", self.frequency.space_dim).unwrap();
        writeln!(s, "generators = {}", nf.generators.len()).unwrap();
        writeln!(s, "min divisor = {}", opt(nf.min_divisor)).unwrap();
        writeln!(s, "residual norm = {:e}", nf.residual_norm).unwrap();
        writeln!(s, "certified residual = {:e}", self.certified_residual).unwrap();
        s
    }
}

impl Report for FrequencyMapResult {
    fn name(&self) -> &'static str {
        "freq"
    }

    fn text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "ghat = {}", tuple(&self.ghat)).unwrap();
        writeln!(s, "F(H) dim = {}", self.space_dim).unwrap();
        for (i, v) in self.space_basis.iter().enumerate() {
            let parts: Vec<String> = v.iter().map(|c| format_coefficient(*c)).collect();
            writeln!(s, "basis[{i}] = ({})", parts.join(", ")).unwrap();
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BrunoReport {
    pub profile: BrunoProfile,
    pub sum: BrunoSum,
}

fn witness(j: &[i32]) -> String {
    let parts: Vec<String> = j.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

impl Report for BrunoReport {
    fn name(&self) -> &'static str {
        "bruno"
    }

    fn text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "Bruno sequence ({})", self.sum.label).unwrap();
        for (k, (a, j)) in self
            .profile
            .a
            .iter()
            .zip(&self.profile.witnesses)
            .enumerate()
        {
            writeln!(
                s,
                "k = {k:2}  a_k = {a:.6e}  witness = {}  partial sum = {}",
                witness(j),
                self.profile.partial_sums[k]
            )
            .unwrap();
        }
        writeln!(s, "tail gap = {}", opt(self.sum.tail_gap)).unwrap();
        writeln!(s, "verdict = {:?} ({})", self.sum.verdict, self.sum.label).unwrap();
        if let Some((k, j)) = self.profile.resonance() {
            writeln!(s, "resonance at level {k}: witness {}", witness(j)).unwrap();
        }
        s
    }

    fn csv(&self) -> Option<String> {
        let mut s = String::from("k,a_k,witness,partial_sum\n");
        for (k, (a, j)) in self
            .profile
            .a
            .iter()
            .zip(&self.profile.witnesses)
            .enumerate()
        {
            let w: Vec<String> = j.iter().map(|v| v.to_string()).collect();
            writeln!(
                s,
                "{k},{a},{},{}",
                w.join(" "),
                self.profile.partial_sums[k]
            )
            .unwrap();
        }
        Some(s)
    }
}

impl Report for DensityReport {
    fn name(&self) -> &'static str {
        "density"
    }

    fn text(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "density of the arithmetic class (tau = {}, K = {}, first level {}, {} samples per radius)",
            self.tau, self.levels, self.first_level, self.samples_per_radius
        )
        .unwrap();
        writeln!(s, "class bound a_k = a_k(alpha) * 2^(-tau k)").unwrap();
        for ((r, f), c) in self
            .radii
            .iter()
            .zip(&self.fractions)
            .zip(&self.ci_half_widths)
        {
            writeln!(s, "r = {r:<8} fraction = {f:.4} +- {c:.4}").unwrap();
        }
        s
    }

    fn csv(&self) -> Option<String> {
        Some(self.to_csv())
    }
}

impl Report for DriftReport {
    fn name(&self) -> &'static str {
        "verify"
    }

    fn text(&self) -> String {
        let mut s = String::new();
        for (r, d) in self.radii.iter().zip(&self.deviations) {
            writeln!(s, "r = {r:<8} max action deviation = {d:.3e}").unwrap();
        }
        match (self.exponent, self.r2_of_fit) {
            (Some(e), Some(r2)) => writeln!(s, "fitted exponent = {e:.3} (R^2 = {r2:.4})").unwrap(),
            _ => writeln!(
                s,
                "fitted exponent = floor (deviations at integrator noise {:e})",
                self.floor
            )
            .unwrap(),
        }
        s
    }

    fn csv(&self) -> Option<String> {
        let mut s = String::from("radius,deviation\n");
        for (r, d) in self.radii.iter().zip(&self.deviations) {
            writeln!(s, "{r},{d}").unwrap();
        }
        Some(s)
    }
}
