//! Canonical Poisson bracket and Lie-series exponentials.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Monomial, Result, SeriesError, TruncatedSeries, Var};

/// `{f, g} = Σ_i ∂_{q_i} f ∂_{p_i} g − ∂_{p_i} f ∂_{q_i} g`, truncated.
///
/// `λ` and `t` are constants for the bracket.
pub fn poisson_bracket(f: &TruncatedSeries, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    f.check_compatible(g)?;
    let space = *f.space();
    let trunc = space.truncation;
    let dim = space.dim;
    let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
    for (ma, ca) in f.iter() {
        if ma.is_parameter_only() {
            continue;
        }
        let da = ma.graded_degree();
        for (mb, cb) in g.iter() {
            let total = da + mb.graded_degree();
            if total >= 2 && total - 2 > trunc.degree {
                break;
            }
            if mb.is_parameter_only() || ma.t_degree() + mb.t_degree() > trunc.t_degree {
                continue;
            }
            let mut weight_by_slot: Vec<(usize, f64)> = Vec::new();
            for i in 0..dim {
                let w = ma.q(i) as f64 * mb.p(i) as f64 - ma.p(i) as f64 * mb.q(i) as f64;
                if w != 0.0 {
                    weight_by_slot.push((i, w));
                }
            }
            if weight_by_slot.is_empty() {
                continue;
            }
            let prod = ma
                .checked_mul(mb)
                .expect("exponent overflow inside truncation");
            for (i, w) in weight_by_slot {
                let m = prod
                    .lower(Var::Q(i))
                    .and_then(|m| m.lower(Var::P(i)))
                    .expect("bracket weight nonzero implies q_i p_i divides the product");
                *acc.entry(m).or_default() += ca * cb * w;
            }
        }
    }
    Ok(space.from_terms(acc))
}

/// `Σ_{m≥0} ad_g^m(F) / m!` with `ad_g(F) = {g, F}`.
///
/// With this convention `{H₀, g} = R` makes `e^{ad_g}` remove `R` from
/// `H₀ + R` at leading order.
pub fn lie_exp(generator: &TruncatedSeries, f: &TruncatedSeries) -> Result<TruncatedSeries> {
    lie_exp_counted(generator, f).map(|(s, _)| s)
}

/// Like [`lie_exp`] and also returns how many nonzero terms `m >= 1` the
/// sum needed before it terminated at the truncation.
pub fn lie_exp_counted(
    generator: &TruncatedSeries,
    f: &TruncatedSeries,
) -> Result<(TruncatedSeries, usize)> {
    generator.check_compatible(f)?;
    let Some(low) = generator.effective_lowest_degree() else {
        return Ok((f.clone(), 0));
    };
    if low <= 2 {
        return Err(SeriesError::NonTerminatingGenerator(low));
    }
    // each bracket raises the lowest degree by at least low - 2 >= 1
    let limit = generator.truncation().degree as usize + 2;
    let mut sum = f.clone();
    let mut term = f.clone();
    let mut used = 0;
    for m in 1..=limit {
        term = poisson_bracket(generator, &term)?.scale_real(1.0 / m as f64);
        if term.is_zero() {
            return Ok((sum, used));
        }
        used = m;
        sum.add_assign(&term)?;
    }
    unreachable!("lie series exceeded its degree bound")
}
