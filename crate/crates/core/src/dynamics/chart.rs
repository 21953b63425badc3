//! Linear change between real elliptic coordinates `(x, y)` and the
//! complex coordinates `(q, p)`.
//!
//! A chart is a per-mode matrix `M` with `(q, p)ᵀ = M (x, y)ᵀ`. It must
//! - intertwine conjugation with the involution `(q, p) ↦ (p̄, q̄)`, i.e. the
//!   second row is the conjugate of the first;
//! - send `(x² + y²)/2` to `q p`;
//! - have a unimodular determinant. The determinant is the bracket
//!   `{q, p}` computed in `(x, y)`, and the two previous conditions force it
//!   to be `±i`. Hamilton's equations in `(q, p)` therefore carry the factor
//!   `μ = det M` (see [`EllipticChart::bracket_multiplier`]).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DynamicsError, Result};
use crate::series::{Monomial, SeriesSpace, TruncatedSeries};

type Mat2 = [[Complex64; 2]; 2];

const CHART_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticChart {
    matrix: Mat2,
}

fn det(m: &Mat2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn inverse(m: &Mat2) -> Mat2 {
    let d = det(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

impl EllipticChart {
    /// Validates `matrix` against the three chart conditions.
    pub fn new(matrix: Mat2) -> Result<Self> {
        let [[a, b], [c, d]] = matrix;
        if (c - a.conj()).norm() > CHART_TOL || (d - b.conj()).norm() > CHART_TOL {
            return Err(DynamicsError::InvalidChart(
                "second row must be the conjugate of the first".into(),
            ));
        }
        // q p = (a x + b y)(c x + d y) must equal (x² + y²)/2
        let xx = a * c;
        let xy = a * d + b * c;
        let yy = b * d;
        let half = Complex64::new(0.5, 0.0);
        if (xx - half).norm() > CHART_TOL || (yy - half).norm() > CHART_TOL || xy.norm() > CHART_TOL
        {
            return Err(DynamicsError::InvalidChart(
                "q p must equal (x^2 + y^2)/2".into(),
            ));
        }
        if (det(&matrix).norm() - 1.0).abs() > CHART_TOL {
            return Err(DynamicsError::InvalidChart(
                "determinant must be unimodular".into(),
            ));
        }
        Ok(EllipticChart { matrix })
    }

    pub fn matrix(&self) -> Mat2 {
        self.matrix
    }

    /// `{q, p}` in the real symplectic structure.
    pub fn bracket_multiplier(&self) -> Complex64 {
        det(&self.matrix)
    }

    pub fn to_complex(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        let m = &self.matrix;
        (m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y)
    }

    /// `(x, y)` for a complex pair, in general complex.
    pub fn to_real(&self, q: Complex64, p: Complex64) -> (Complex64, Complex64) {
        let m = inverse(&self.matrix);
        (m[0][0] * q + m[0][1] * p, m[1][0] * q + m[1][1] * p)
    }

    /// Rewrites a series whose `q_i, p_i` slots hold `x_i, y_i` in the
    /// complex coordinates.
    pub fn complexify_series(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        substitute(s, &inverse(&self.matrix))
    }

    /// Inverse of [`Self::complexify_series`].
    pub fn realify_series(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        substitute(s, &self.matrix)
    }
}

impl Default for EllipticChart {
    /// `q = (x + i y)/√2`, `p = (x − i y)/√2`, with `{q, p} = −i`.
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        EllipticChart::new([
            [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        ])
        .expect("default chart is valid")
    }
}

/// Replaces the slot pair `(q_i, p_i)` by `M (q_i, p_i)ᵀ` in every term.
fn substitute(s: &TruncatedSeries, m: &Mat2) -> Result<TruncatedSeries> {
    let space: SeriesSpace = *s.space();
    let mut first = Vec::with_capacity(space.dim);
    let mut second = Vec::with_capacity(space.dim);
    for i in 0..space.dim {
        let mut e = vec![0u8; space.dim];
        e[i] = 1;
        let (q, p) = (
            Monomial::qp(&e, &vec![0; space.dim]),
            Monomial::qp(&vec![0; space.dim], &e),
        );
        first.push(space.from_terms([(q, m[0][0]), (p, m[0][1])]));
        second.push(space.from_terms([(q, m[1][0]), (p, m[1][1])]));
    }
    let mut out = space.zero();
    for (mono, c) in s.iter() {
        let mut rest = *mono;
        let mut term = space.constant(*c);
        for i in 0..space.dim {
            let (a, b) = (mono.q(i), mono.p(i));
            rest = rest
                .with_exp(crate::series::Var::Q(i), 0)
                .with_exp(crate::series::Var::P(i), 0);
            if a > 0 {
                term = term.mul(&first[i].pow(a as u32)?)?;
            }
            if b > 0 {
                term = term.mul(&second[i].pow(b as u32)?)?;
            }
        }
        term = term.mul(&space.monomial(rest, Complex64::new(1.0, 0.0)))?;
        out.add_assign(&term)?;
    }
    Ok(out)
}

/// A point in either chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "lowercase")]
pub enum PhasePoint {
    Complex {
        q: Vec<Complex64>,
        p: Vec<Complex64>,
    },
    Real {
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

impl PhasePoint {
    pub fn complex(q: Vec<Complex64>, p: Vec<Complex64>) -> Result<Self> {
        if q.len() != p.len() || q.is_empty() {
            return Err(DynamicsError::InvalidPoint(
                "q and p need equal nonzero length".into(),
            ));
        }
        if q.iter()
            .chain(&p)
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(DynamicsError::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(PhasePoint::Complex { q, p })
    }

    pub fn real(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.is_empty() {
            return Err(DynamicsError::InvalidPoint(
                "x and y need equal nonzero length".into(),
            ));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(DynamicsError::InvalidPoint("non-finite coordinate".into()));
        }
        Ok(PhasePoint::Real { x, y })
    }

    pub fn dim(&self) -> usize {
        match self {
            PhasePoint::Complex { q, .. } => q.len(),
            PhasePoint::Real { x, .. } => x.len(),
        }
    }

    pub fn complexify(&self, chart: &EllipticChart) -> PhasePoint {
        match self {
            PhasePoint::Complex { .. } => self.clone(),
            PhasePoint::Real { x, y } => {
                let (q, p) = x
                    .iter()
                    .zip(y)
                    .map(|(&a, &b)| chart.to_complex(a, b))
                    .unzip();
                PhasePoint::Complex { q, p }
            }
        }
    }

    /// Real coordinates of a point fixed by the involution (within `tol`).
    pub fn realify(&self, chart: &EllipticChart, tol: f64) -> Result<PhasePoint> {
        match self {
            PhasePoint::Real { .. } => Ok(self.clone()),
            PhasePoint::Complex { q, p } => {
                let mut x = Vec::with_capacity(q.len());
                let mut y = Vec::with_capacity(q.len());
                for (&a, &b) in q.iter().zip(p) {
                    let (xr, yr) = chart.to_real(a, b);
                    let scale = 1.0_f64.max(a.norm()).max(b.norm());
                    if xr.im.abs() > tol * scale || yr.im.abs() > tol * scale {
                        return Err(DynamicsError::InvalidPoint(
                            "point is not fixed by the involution (p != conj(q))".into(),
                        ));
                    }
                    x.push(xr.re);
                    y.push(yr.re);
                }
                Ok(PhasePoint::Real { x, y })
            }
        }
    }

    /// The `(q, p)` coordinates, converting through `chart` when needed.
    pub fn qp(&self, chart: &EllipticChart) -> (Vec<Complex64>, Vec<Complex64>) {
        match self.complexify(chart) {
            PhasePoint::Complex { q, p } => (q, p),
            PhasePoint::Real { .. } => unreachable!(),
        }
    }
}

/// The anti-holomorphic involution `(q, p) ↦ (p̄, q̄)`.
pub fn involution(q: &[Complex64], p: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    (
        p.iter().map(|c| c.conj()).collect(),
        q.iter().map(|c| c.conj()).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{parse_series, poisson_bracket, Truncation, Var};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn default_chart_conditions_symbolically() {
        // Expand q, p as series in (x, y) held in the q/p slots and check
        // the three conditions by series arithmetic.
        let chart = EllipticChart::default();
        let s = SeriesSpace::new(1, Truncation::graded(4).unwrap()).unwrap();
        let q = chart.realify_series(&s.var(Var::Q(0))).unwrap();
        let p = chart.realify_series(&s.var(Var::P(0))).unwrap();
        // bracket in (x, y): the constant -i
        let br = poisson_bracket(&q, &p).unwrap();
        assert!(br.approx_eq(&s.constant(c(0.0, -1.0)), 1e-15));
        assert!((chart.bracket_multiplier() - c(0.0, -1.0)).norm() < 1e-15);
        // q p = (x² + y²)/2
        let qp = q.mul(&p).unwrap();
        assert!(qp.approx_eq(&parse_series("0.5*q1^2 + 0.5*p1^2", &s).unwrap(), 1e-15));
        // conj(q) = p for real x, y
        assert!(q.conj().approx_eq(&p, 1e-15));
    }

    #[test]
    fn rejects_bad_charts() {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        assert!(EllipticChart::new([[one, zero], [zero, one]]).is_err());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // conjugate rows but qp = x²/2 - y²/2 ... (b real)
        assert!(EllipticChart::new([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(h, 0.0)]]).is_err());
    }

    #[test]
    fn round_trips() {
        let chart = EllipticChart::default();
        let pt = PhasePoint::real(vec![0.3, -1.2], vec![0.7, 0.1]).unwrap();
        let z = pt.complexify(&chart);
        let back = z.realify(&chart, 1e-14).unwrap();
        if let (PhasePoint::Real { x, y }, PhasePoint::Real { x: x0, y: y0 }) = (&back, &pt) {
            for i in 0..2 {
                assert!((x[i] - x0[i]).abs() < 1e-15 && (y[i] - y0[i]).abs() < 1e-15);
            }
        }
        // fixed by the involution
        let (q, p) = z.qp(&chart);
        let (iq, ip) = involution(&q, &p);
        for i in 0..2 {
            assert!((iq[i] - q[i]).norm() < 1e-15 && (ip[i] - p[i]).norm() < 1e-15);
        }
        let off = PhasePoint::complex(vec![c(1.0, 0.0)], vec![c(2.0, 0.0)]).unwrap();
        assert!(off.realify(&chart, 1e-12).is_err());
    }

    #[test]
    fn series_round_trip() {
        let chart = EllipticChart::default();
        let s = SeriesSpace::new(2, Truncation::graded(6).unwrap()).unwrap();
        let h = parse_series("q1^3 - 2*q1*p2^2 + (1+2i)*p1*q2", &s).unwrap();
        let back = chart
            .realify_series(&chart.complexify_series(&h).unwrap())
            .unwrap();
        assert!(back.approx_eq(&h, 1e-14));
    }
}
