//! Series in the action symbols `X_i`.
//!
//! A polynomial `P(X_1, .., X_n)` is stored as a series in the `λ` variables
//! (`X_i ↦ λ_i`), which keeps its graded degree equal to that of
//! `P(q_1 p_1, .., q_n p_n)`. The parameters `t` may appear as coefficients.

use num_complex::Complex64;

use super::{Monomial, Result, SeriesError, TruncatedSeries, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionTarget {
    /// `X_i ↦ q_i p_i`
    Qp,
    /// `X_i ↦ λ_i`
    Lambda,
}

fn ensure_action_form(p: &TruncatedSeries) -> Result<()> {
    match p.iter().find(|(m, _)| !m.is_parameter_only()) {
        Some((m, _)) => Err(SeriesError::NotActionForm(m.to_string())),
        None => Ok(()),
    }
}

pub fn action_substitute(p: &TruncatedSeries, target: ActionTarget) -> Result<TruncatedSeries> {
    ensure_action_form(p)?;
    match target {
        ActionTarget::Lambda => Ok(p.clone()),
        ActionTarget::Qp => {
            let dim = p.dim();
            Ok(p.space().from_terms(p.iter().map(|(m, c)| {
                let mut out = *m;
                for i in 0..dim {
                    let e = m.lambda(i);
                    out = out
                        .with_exp(Var::Lambda(i), 0)
                        .with_exp(Var::Q(i), e)
                        .with_exp(Var::P(i), e);
                }
                (out, *c)
            })))
        }
    }
}

/// Rewrites a normal series (every monomial `q^a p^a`, no `λ`) in action
/// symbols. Non-normal terms are reported as an error.
pub fn to_action_form(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    let dim = s.dim();
    let mut out = s.space().zero();
    for (m, c) in s.iter() {
        if !m.is_normal() || m.lambda_degree() > 0 {
            return Err(SeriesError::NotActionForm(m.to_string()));
        }
        let mut a = *m;
        for i in 0..dim {
            let e = m.q(i);
            a = a
                .with_exp(Var::Q(i), 0)
                .with_exp(Var::P(i), 0)
                .with_exp(Var::Lambda(i), e);
        }
        out.add_term(a, *c);
    }
    Ok(out)
}

/// First-order Taylor data of an action polynomial at `X = λ`.
#[derive(Clone, Debug)]
pub struct TaylorSplit {
    /// `P(λ)`
    pub constant: TruncatedSeries,
    /// `g_i(λ) = ∂_{X_i} P(λ)`
    pub linear: Vec<TruncatedSeries>,
}

/// `P(qp) = P(λ) + Σ g_i(λ)(q_i p_i − λ_i) mod I²`.
pub fn taylor_mod_i2(p: &TruncatedSeries) -> Result<TaylorSplit> {
    ensure_action_form(p)?;
    let linear = (0..p.dim()).map(|i| p.derivative(Var::Lambda(i))).collect();
    Ok(TaylorSplit {
        constant: p.clone(),
        linear,
    })
}

impl TaylorSplit {
    /// `P(λ) + Σ g_i(λ)(q_i p_i − λ_i)` as a series in `(λ, q, p)`.
    pub fn reassemble(&self) -> Result<TruncatedSeries> {
        let space = *self.constant.space();
        let mut out = self.constant.clone();
        for (i, g) in self.linear.iter().enumerate() {
            let ideal_gen = space.from_terms([
                (
                    Monomial::one()
                        .with_exp(Var::Q(i), 1)
                        .with_exp(Var::P(i), 1),
                    Complex64::new(1.0, 0.0),
                ),
                (Monomial::var(Var::Lambda(i)), Complex64::new(-1.0, 0.0)),
            ]);
            out.add_assign(&g.mul(&ideal_gen)?)?;
        }
        Ok(out)
    }
}
