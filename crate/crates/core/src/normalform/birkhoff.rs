use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    merge_min, solve_homological, NormalFormError, NormalFormOptions, NormalFormResult, Result,
};
use crate::series::{
    action_substitute, lie_exp, to_action_form, ActionTarget, FrequencyVector, Monomial,
    SeriesSpace, TruncatedSeries, Var,
};

/// Checks that `h = Σ α_i q_i p_i + (terms of degree >= 3)` with no `λ`
/// or `t`.
pub fn validate_hamiltonian(h: &TruncatedSeries, alpha: &FrequencyVector) -> Result<()> {
    let dim = h.dim();
    if alpha.dim() != dim {
        return Err(NormalFormError::InvalidHamiltonian(format!(
            "alpha has {} components but H has dimension {dim}",
            alpha.dim()
        )));
    }
    if let Some((m, _)) = h.iter().find(|(m, _)| m.lambda_degree() + m.t_degree() > 0) {
        return Err(NormalFormError::InvalidHamiltonian(format!(
            "term {m} involves lambda or t"
        )));
    }
    let low = h.up_to_degree(2);
    let h0 = alpha.quadratic_part(h.space());
    let scale = alpha
        .components()
        .iter()
        .map(|a| a.norm())
        .fold(1.0, f64::max);
    let gap = low.max_abs_diff(&h0);
    if gap > 1e-12 * scale {
        return Err(NormalFormError::InvalidHamiltonian(format!(
            "the part of degree <= 2 differs from sum alpha_i q_i p_i by {gap:.3e}"
        )));
    }
    Ok(())
}

/// Degree groups solved together: `[3]`, then `[4, 5]`, `[6, 7]`, ... up to `k`.
pub fn birkhoff_stages(k: u32) -> Vec<Vec<u32>> {
    let mut stages = Vec::new();
    if k >= 3 {
        stages.push(vec![3]);
    }
    let mut d = 4;
    while d <= k {
        stages.push((d..=(d + 1).min(k)).collect());
        d += 2;
    }
    stages
}

/// Splits `s` up to degree `k` into its normal part, rewritten in action
/// symbols, and the largest non-normal coefficient.
pub fn normal_part(s: &TruncatedSeries, k: u32) -> Result<(TruncatedSeries, f64)> {
    let low = s.up_to_degree(k);
    let normal = low.filter(|m| m.is_normal());
    debug_assert!(normal.iter().all(|(m, _)| m.graded_degree() % 2 == 0));
    let residual = low.filter(|m| !m.is_normal()).max_abs();
    Ok((to_action_form(&normal)?, residual))
}

fn check_order(h: &TruncatedSeries, k: u32) -> Result<()> {
    if k < 3 {
        return Err(NormalFormError::InvalidInput(format!(
            "order k = {k} must be at least 3"
        )));
    }
    let degree = h.truncation().degree;
    if k > degree {
        return Err(NormalFormError::OrderOverflow {
            requested: k,
            degree,
        });
    }
    Ok(())
}

type Injector<'a> = &'a mut dyn FnMut(u32, &SeriesSpace) -> TruncatedSeries;

fn birkhoff_impl(
    h: &TruncatedSeries,
    alpha: &FrequencyVector,
    k: u32,
    opts: NormalFormOptions,
    mut inject: Option<Injector<'_>>,
) -> Result<NormalFormResult> {
    validate_hamiltonian(h, alpha)?;
    check_order(h, k)?;
    let mut current = h.clone();
    let mut generators = Vec::new();
    let mut min_divisor = None;
    for stage in birkhoff_stages(k) {
        let r = current.filter(|m| stage.contains(&m.graded_degree()) && !m.is_normal());
        let sol = solve_homological(alpha, &r, opts.divisor_threshold)?;
        min_divisor = merge_min(min_divisor, sol.min_divisor);
        let mut g = sol.generator;
        if let Some(inject) = inject.as_mut() {
            for &d in stage.iter().filter(|d| *d % 2 == 0) {
                g.add_assign(&inject(d, h.space()))?;
            }
        }
        if g.is_zero() {
            continue;
        }
        current = lie_exp(&g, &current)?;
        generators.push(g);
    }
    let (normal_form, residual_norm) = normal_part(&current, k)?;
    Ok(NormalFormResult {
        normal_form,
        generators,
        achieved_order: k,
        min_divisor,
        residual_norm,
    })
}

/// Birkhoff normal form of `h` up to graded degree `k`.
pub fn birkhoff(h: &TruncatedSeries, alpha: &FrequencyVector, k: u32) -> Result<NormalFormResult> {
    birkhoff_with(h, alpha, k, NormalFormOptions::default())
}

pub fn birkhoff_with(
    h: &TruncatedSeries,
    alpha: &FrequencyVector,
    k: u32,
    opts: NormalFormOptions,
) -> Result<NormalFormResult> {
    birkhoff_impl(h, alpha, k, opts, None)
}

/// Re-applies the generators of `result` to `h` and returns the largest
/// coefficient of `H∘exp − P(qp)` in degrees `<= achieved_order`.
pub fn certify(h: &TruncatedSeries, result: &NormalFormResult) -> Result<f64> {
    let mut current = h.clone();
    for g in &result.generators {
        current = lie_exp(g, &current)?;
    }
    let p_qp = action_substitute(&result.normal_form, ActionTarget::Qp)?;
    Ok(current
        .sub(&p_qp)?
        .up_to_degree(result.achieved_order)
        .max_abs())
}

/// Birkhoff normal form together with `ĝ_i(λ) = ∂_{X_i} P(λ) − α_i`.
pub fn parametric_normal_form(
    h: &TruncatedSeries,
    alpha: &FrequencyVector,
    k: u32,
) -> Result<(NormalFormResult, Vec<TruncatedSeries>)> {
    let result = birkhoff(h, alpha, k)?;
    let ghat = frequency_map(&result.normal_form, alpha)?;
    Ok((result, ghat))
}

/// `ĝ_i(λ) = ∂_{X_i} P(λ) − α_i` for an action polynomial `P`.
pub fn frequency_map(p: &TruncatedSeries, alpha: &FrequencyVector) -> Result<Vec<TruncatedSeries>> {
    (0..p.dim())
        .map(|i| {
            let shift = p.space().constant(-alpha.components()[i]);
            Ok(p.derivative(Var::Lambda(i)).add(&shift)?)
        })
        .collect()
}

/// Action monomials `q^m p^m` with `|m| = half`.
fn kernel_monomials(dim: usize, half: u32) -> Vec<Monomial> {
    fn rec(dim: usize, idx: usize, left: u32, exps: &mut Vec<u8>, out: &mut Vec<Monomial>) {
        if idx + 1 == dim {
            exps[idx] = left as u8;
            out.push(Monomial::qp(exps, exps));
            return;
        }
        for e in 0..=left {
            exps[idx] = e as u8;
            rec(dim, idx + 1, left - e, exps, out);
        }
    }
    let mut out = Vec::new();
    rec(dim, 0, half, &mut vec![0; dim], &mut out);
    out
}

/// Reruns [`birkhoff`] with random kernel elements added to each generator
/// and returns the largest deviation of `P`, relative to `max(1, max|P|)`.
///
/// Trial `i` draws from a ChaCha8 stream `i` seeded with `seed`.
pub fn uniqueness_probe(
    h: &TruncatedSeries,
    alpha: &FrequencyVector,
    k: u32,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let base = birkhoff(h, alpha, k)?;
    let scale = base.normal_form.max_abs().max(1.0);
    let dim = h.dim();
    let mut worst: f64 = 0.0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let mut inject = |d: u32, space: &SeriesSpace| {
            space.from_terms(
                kernel_monomials(dim, d / 2)
                    .into_iter()
                    .map(|m| (m, Complex64::new(rng.gen_range(-1.0..=1.0), 0.0)))
                    .collect::<Vec<_>>(),
            )
        };
        let perturbed =
            birkhoff_impl(h, alpha, k, NormalFormOptions::default(), Some(&mut inject))?;
        worst = worst.max(perturbed.normal_form.max_abs_diff(&base.normal_form) / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{parse_series, Truncation};

    fn space(dim: usize, n: u32) -> SeriesSpace {
        SeriesSpace::new(dim, Truncation::graded(n).unwrap()).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn stage_layout() {
        assert_eq!(birkhoff_stages(3), vec![vec![3]]);
        assert_eq!(birkhoff_stages(4), vec![vec![3], vec![4]]);
        assert_eq!(birkhoff_stages(7), vec![vec![3], vec![4, 5], vec![6, 7]]);
    }

    #[test]
    fn already_normal() {
        let s = space(2, 8);
        let alpha = FrequencyVector::real(&[1.0, 2.0f64.sqrt()]).unwrap();
        let h = alpha.quadratic_part(&s);
        let res = birkhoff(&h, &alpha, 6).unwrap();
        assert!(res.generators.is_empty());
        let expected = s.from_terms([
            (Monomial::var(Var::Lambda(0)), c(1.0)),
            (Monomial::var(Var::Lambda(1)), c(2.0f64.sqrt())),
        ]);
        assert!(res.normal_form.approx_eq(&expected, 0.0));
        assert_eq!(res.residual_norm, 0.0);
    }

    #[test]
    fn quartic_single_mode() {
        // (q+p)^4 has normal part 6 q^2 p^2
        let s = space(1, 8);
        let alpha = FrequencyVector::real(&[1.0]).unwrap();
        let h = parse_series("q1*p1", &s)
            .unwrap()
            .add(&parse_series("q1 + p1", &s).unwrap().pow(4).unwrap())
            .unwrap();
        let res = birkhoff(&h, &alpha, 4).unwrap();
        assert!(res
            .normal_form
            .approx_eq(&parse_series("l1 + 6*l1^2", &s).unwrap(), 1e-13));
        assert!(res.residual_norm < 1e-12);
        assert!(certify(&h, &res).unwrap() < 1e-12);
        let (_, ghat) = parametric_normal_form(&h, &alpha, 4).unwrap();
        assert!(ghat[0].approx_eq(&parse_series("12*l1", &s).unwrap(), 1e-12));
    }

    #[test]
    fn unsupported_order() {
        let s = space(1, 5);
        let alpha = FrequencyVector::real(&[1.0]).unwrap();
        let h = alpha.quadratic_part(&s);
        assert!(matches!(
            birkhoff(&h, &alpha, 6),
            Err(NormalFormError::OrderOverflow {
                requested: 6,
                degree: 5
            })
        ));
        assert!(birkhoff(&h, &alpha, 2).is_err());
    }

    #[test]
    fn rejects_wrong_quadratic_part() {
        let s = space(1, 6);
        let alpha = FrequencyVector::real(&[1.0]).unwrap();
        let h = parse_series("2*q1*p1", &s).unwrap();
        assert!(matches!(
            birkhoff(&h, &alpha, 4),
            Err(NormalFormError::InvalidHamiltonian(_))
        ));
    }

    #[test]
    fn kernel_monomial_count() {
        // monomials of degree 2 in 3 variables
        assert_eq!(kernel_monomials(3, 2).len(), 6);
        assert!(kernel_monomials(2, 3)
            .iter()
            .all(|m| m.is_normal() && m.graded_degree() == 6));
    }

    #[test]
    fn probe_on_trivial_hamiltonian() {
        let s = space(2, 8);
        let alpha = FrequencyVector::real(&[1.0, 2.0f64.sqrt()]).unwrap();
        let h = alpha.quadratic_part(&s);
        assert_eq!(uniqueness_probe(&h, &alpha, 6, 4, 7).unwrap(), 0.0);
    }
}
