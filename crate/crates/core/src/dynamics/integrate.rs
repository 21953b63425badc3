//! Fixed-step implicit Runge–Kutta integrators for the complex flow
//! `q̇ = μ ∂H/∂p`, `ṗ = −μ ∂H/∂q`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DynamicsError, EllipticChart, PhasePoint, Result};
use crate::series::{Assignment, TruncatedSeries, Var};

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Implicit midpoint, order 2.
    Midpoint,
    /// Two-stage Gauss collocation, order 4.
    Gauss2,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "midpoint" => Ok(Method::Midpoint),
            "gauss2" => Ok(Method::Gauss2),
            other => Err(format!(
                "unknown method '{other}' (expected midpoint or gauss2)"
            )),
        }
    }
}

/// Vector field and Jacobian of a polynomial Hamiltonian.
#[derive(Clone, Debug)]
pub struct HamiltonianField {
    n: usize,
    mu: Complex64,
    h: TruncatedSeries,
    /// `∂H/∂q_i` then `∂H/∂p_i`
    grad: Vec<TruncatedSeries>,
    /// `hess[a][b] = ∂²H/∂z_a∂z_b`, `z = (q, p)`
    hess: Vec<Vec<TruncatedSeries>>,
}

fn var_of(n: usize, a: usize) -> Var {
    if a < n {
        Var::Q(a)
    } else {
        Var::P(a - n)
    }
}

impl HamiltonianField {
    pub fn new(h: &TruncatedSeries, chart: &EllipticChart) -> Result<Self> {
        if h.iter().any(|(m, _)| m.lambda_degree() + m.t_degree() > 0) {
            return Err(DynamicsError::InvalidHamiltonian(
                "the flow needs a Hamiltonian in q, p only".into(),
            ));
        }
        let n = h.dim();
        let grad: Vec<TruncatedSeries> = (0..2 * n).map(|a| h.derivative(var_of(n, a))).collect();
        let hess = grad
            .iter()
            .map(|g| (0..2 * n).map(|b| g.derivative(var_of(n, b))).collect())
            .collect();
        Ok(HamiltonianField {
            n,
            mu: chart.bracket_multiplier(),
            h: h.clone(),
            grad,
            hess,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn at<'a>(&self, z: &'a [Complex64]) -> Assignment<'a> {
        Assignment::qp(&z[..self.n], &z[self.n..])
    }

    pub fn energy(&self, z: &[Complex64]) -> Complex64 {
        self.h.evaluate(&self.at(z))
    }

    pub fn field(&self, z: &[Complex64]) -> Vec<Complex64> {
        let at = self.at(z);
        let n = self.n;
        let mut out = vec![Complex64::default(); 2 * n];
        for i in 0..n {
            out[i] = self.mu * self.grad[n + i].evaluate(&at);
            out[n + i] = -self.mu * self.grad[i].evaluate(&at);
        }
        out
    }

    fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let at = self.at(z);
        let n = self.n;
        DMatrix::from_fn(2 * n, 2 * n, |a, b| {
            if a < n {
                self.mu * self.hess[n + a][b].evaluate(&at)
            } else {
                -self.mu * self.hess[a - n][b].evaluate(&at)
            }
        })
    }
}

/// Butcher data of the Gauss methods.
fn tableau(method: Method) -> (Vec<Vec<f64>>, Vec<f64>) {
    match method {
        Method::Midpoint => (vec![vec![0.5]], vec![1.0]),
        Method::Gauss2 => {
            let r = 3f64.sqrt() / 6.0;
            (
                vec![vec![0.25, 0.25 - r], vec![0.25 + r, 0.25]],
                vec![0.5, 0.5],
            )
        }
    }
}

fn norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// One step; stages `Y_i = z + dt Σ_j a_ij f(Y_j)` solved by Newton.
pub fn step(
    field: &HamiltonianField,
    z: &[Complex64],
    dt: f64,
    method: Method,
) -> Result<Vec<Complex64>> {
    let (a, b) = tableau(method);
    let s = b.len();
    let m = z.len();
    let mut ys: Vec<Vec<Complex64>> = vec![z.to_vec(); s];
    let scale = norm(z).max(1.0);
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let fs: Vec<Vec<Complex64>> = ys.iter().map(|y| field.field(y)).collect();
        let js: Vec<DMatrix<Complex64>> = ys.iter().map(|y| field.jacobian(y)).collect();
        let mut residual = DVector::<Complex64>::zeros(s * m);
        let mut jac = DMatrix::<Complex64>::identity(s * m, s * m);
        for i in 0..s {
            for k in 0..m {
                let mut r = ys[i][k] - z[k];
                for j in 0..s {
                    r -= fs[j][k] * (dt * a[i][j]);
                }
                residual[i * m + k] = r;
            }
            for j in 0..s {
                let block = &js[j] * Complex64::new(-dt * a[i][j], 0.0);
                let mut view = jac.view_mut((i * m, j * m), (m, m));
                view += block;
            }
        }
        let delta = jac
            .lu()
            .solve(&residual)
            .ok_or(DynamicsError::NewtonFailure { iterations: 0 })?;
        for i in 0..s {
            for k in 0..m {
                ys[i][k] -= delta[i * m + k];
            }
        }
        let size = delta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !size.is_finite() {
            break;
        }
        if size <= NEWTON_TOL * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(DynamicsError::NewtonFailure {
            iterations: NEWTON_MAX_ITER,
        });
    }
    let fs: Vec<Vec<Complex64>> = ys.iter().map(|y| field.field(y)).collect();
    Ok((0..m)
        .map(|k| z[k] + (0..s).map(|j| fs[j][k] * (dt * b[j])).sum::<Complex64>())
        .collect())
}

/// Samples of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub energy: Vec<Complex64>,
    /// `q_i p_i` along the flow.
    pub actions: Vec<Vec<Complex64>>,
}

impl TrajectoryRecord {
    /// CSV with columns `t, x_i, y_i, H_re, H_im, I_i_re, I_i_im`. The real
    /// coordinates are the real parts of the chart's inverse image.
    pub fn to_csv(&self, chart: &EllipticChart) -> String {
        let n = self.states.first().map_or(0, |s| s.dim());
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",x{i}"));
        }
        for i in 1..=n {
            out.push_str(&format!(",y{i}"));
        }
        out.push_str(",H_re,H_im");
        for i in 1..=n {
            out.push_str(&format!(",I{i}_re,I{i}_im"));
        }
        out.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            let (q, p) = self.states[k].qp(chart);
            let (xs, ys): (Vec<_>, Vec<_>) =
                q.iter().zip(&p).map(|(&a, &b)| chart.to_real(a, b)).unzip();
            out.push_str(&format!("{t}"));
            for x in &xs {
                out.push_str(&format!(",{}", x.re));
            }
            for y in &ys {
                out.push_str(&format!(",{}", y.re));
            }
            out.push_str(&format!(",{},{}", self.energy[k].re, self.energy[k].im));
            for a in &self.actions[k] {
                out.push_str(&format!(",{},{}", a.re, a.im));
            }
            out.push('\n');
        }
        out
    }
}

/// Number of fixed steps covering `[0, T]`; `dt` is shrunk to land on `T`.
fn step_count(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_end > 0.0 && t_end.is_finite() && dt > 0.0 && dt <= t_end) {
        return Err(DynamicsError::InvalidInput(format!(
            "need 0 < dt <= T, got dt = {dt}, T = {t_end}"
        )));
    }
    let steps = (t_end / dt - 1e-9).ceil() as usize;
    Ok((steps, t_end / steps as f64))
}

/// Integrates from `z0 = (q, p)` and calls `observe(t, z)` after every step
/// (and once at `t = 0`).
pub fn integrate_with<F: FnMut(f64, &[Complex64])>(
    field: &HamiltonianField,
    z0: &[Complex64],
    t_end: f64,
    dt: f64,
    method: Method,
    mut observe: F,
) -> Result<Vec<Complex64>> {
    if z0.len() != 2 * field.dim() {
        return Err(DynamicsError::InvalidInput(
            "initial point has the wrong dimension".into(),
        ));
    }
    let (steps, h) = step_count(t_end, dt)?;
    let mut z = z0.to_vec();
    observe(0.0, &z);
    for k in 1..=steps {
        z = step(field, &z, h, method)?;
        observe(k as f64 * h, &z);
    }
    Ok(z)
}

/// Integrates `H` from `x0` and records every step.
pub fn integrate(
    h: &TruncatedSeries,
    x0: &PhasePoint,
    t_end: f64,
    dt: f64,
    method: Method,
    chart: &EllipticChart,
) -> Result<TrajectoryRecord> {
    let field = HamiltonianField::new(h, chart)?;
    let n = field.dim();
    if x0.dim() != n {
        return Err(DynamicsError::InvalidInput(format!(
            "initial point has dimension {}, H has {n}",
            x0.dim()
        )));
    }
    let (q, p) = x0.qp(chart);
    let z0: Vec<Complex64> = q.into_iter().chain(p).collect();
    let mut rec = TrajectoryRecord {
        times: Vec::new(),
        states: Vec::new(),
        energy: Vec::new(),
        actions: Vec::new(),
    };
    integrate_with(&field, &z0, t_end, dt, method, |t, z| {
        rec.times.push(t);
        rec.states.push(PhasePoint::Complex {
            q: z[..n].to_vec(),
            p: z[n..].to_vec(),
        });
        rec.energy.push(field.energy(z));
        rec.actions.push((0..n).map(|i| z[i] * z[n + i]).collect());
    })?;
    Ok(rec)
}
