use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{NormalFormError, Result};
use crate::series::{FrequencyVector, Monomial, TruncatedSeries, Var};

/// Solution `f, B` of `{H₀, f} + B = R`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologicalSolution {
    pub generator: TruncatedSeries,
    /// Kernel content of `R` written in action symbols (`X_i ↦ λ_i`).
    pub resonant_part: TruncatedSeries,
    pub min_divisor: Option<f64>,
    pub divisor_witness: Option<Vec<i32>>,
}

/// Kernel monomial `q^a p^a` (with any `t` factor) to `λ^a`.
fn to_action(m: &Monomial, dim: usize) -> Monomial {
    let mut out = *m;
    for i in 0..dim {
        out = out
            .with_exp(Var::Q(i), 0)
            .with_exp(Var::P(i), 0)
            .with_exp(Var::Lambda(i), m.q(i));
    }
    out
}

struct Split {
    resonant: TruncatedSeries,
    by_divisor: BTreeMap<Vec<i32>, TruncatedSeries>,
}

fn check_inputs(alpha: &FrequencyVector, r: &TruncatedSeries, threshold: f64) -> Result<Split> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(NormalFormError::InvalidInput(format!(
            "divisor threshold must be positive, got {threshold}"
        )));
    }
    let dim = r.dim();
    if alpha.dim() != dim {
        return Err(NormalFormError::InvalidInput(format!(
            "alpha has {} components but the series has dimension {dim}",
            alpha.dim()
        )));
    }
    let space = *r.space();
    let mut resonant = space.zero();
    let mut by_divisor: BTreeMap<Vec<i32>, TruncatedSeries> = BTreeMap::new();
    for (m, c) in r.iter() {
        if m.lambda_degree() > 0 {
            return Err(NormalFormError::InvalidInput(format!(
                "right-hand side contains lambda in term {m}"
            )));
        }
        if m.is_normal() {
            resonant.add_term(to_action(m, dim), *c);
            continue;
        }
        if m.graded_degree() <= 2 {
            return Err(NormalFormError::InvalidInput(format!(
                "non-normal term {m} of degree {} <= 2",
                m.graded_degree()
            )));
        }
        by_divisor
            .entry(m.divisor_vector(dim))
            .or_insert_with(|| space.zero())
            .add_term(*m, *c);
    }
    Ok(Split {
        resonant,
        by_divisor,
    })
}

/// Checks `|⟨j, α⟩| >= threshold` and tracks the smallest divisor.
fn checked_divisor(
    alpha: &FrequencyVector,
    j: &[i32],
    threshold: f64,
    best: &mut Option<(f64, Vec<i32>)>,
) -> Result<Complex64> {
    let d = alpha.pairing(j);
    let size = d.norm();
    if size < threshold {
        return Err(NormalFormError::SmallDivisor {
            divisor: size,
            threshold,
            witness: j.to_vec(),
        });
    }
    if best.as_ref().is_none_or(|(b, _)| size < *b) {
        *best = Some((size, j.to_vec()));
    }
    Ok(d)
}

fn finish(
    generator: TruncatedSeries,
    resonant_part: TruncatedSeries,
    best: Option<(f64, Vec<i32>)>,
) -> HomologicalSolution {
    let (min_divisor, divisor_witness) = match best {
        Some((d, j)) => (Some(d), Some(j)),
        None => (None, None),
    };
    HomologicalSolution {
        generator,
        resonant_part,
        min_divisor,
        divisor_witness,
    }
}

/// Solves `{H₀, f} + B = R` term by term.
///
/// A monomial `c q^a p^b t^d` with `a = b` goes to `B` as `c X^a t^d`; any
/// other one contributes `c / ⟨b − a, α⟩ q^a p^b t^d` to `f`.
pub fn solve_homological(
    alpha: &FrequencyVector,
    r: &TruncatedSeries,
    divisor_threshold: f64,
) -> Result<HomologicalSolution> {
    let split = check_inputs(alpha, r, divisor_threshold)?;
    let mut generator = r.space().zero();
    let mut best = None;
    for (j, part) in &split.by_divisor {
        let d = checked_divisor(alpha, j, divisor_threshold, &mut best)?;
        generator.add_assign(&part.scale(d.inv()))?;
    }
    Ok(finish(generator, split.resonant, best))
}

/// Solves `{H₀ + Σ t_i q_i p_i, f} + B = R` with `t` a formal parameter.
///
/// The divisor `⟨j, α + t⟩` is inverted as `Σ_m (−⟨j, t⟩)^m / ⟨j, α⟩^{m+1}`,
/// cut at the `t`-truncation. On the box `|t_i| <= t_box_radius` the ratio
/// `‖j‖₁ ρ_t / |⟨j, α⟩|` must stay at or below `1/2`.
pub fn solve_homological_unfolded(
    alpha: &FrequencyVector,
    r: &TruncatedSeries,
    divisor_threshold: f64,
    t_box_radius: f64,
) -> Result<HomologicalSolution> {
    if !(t_box_radius >= 0.0 && t_box_radius.is_finite()) {
        return Err(NormalFormError::InvalidInput(format!(
            "t-box radius must be finite and non-negative, got {t_box_radius}"
        )));
    }
    let split = check_inputs(alpha, r, divisor_threshold)?;
    let space = *r.space();
    let dim = space.dim;
    let mut generator = space.zero();
    let mut best = None;
    for (j, part) in &split.by_divisor {
        let d = checked_divisor(alpha, j, divisor_threshold, &mut best)?;
        let l1: i32 = j.iter().map(|x| x.abs()).sum();
        let ratio = l1 as f64 * t_box_radius / d.norm();
        if ratio > 0.5 {
            return Err(NormalFormError::TExpansionOverflow {
                ratio,
                radius: t_box_radius,
                witness: j.clone(),
            });
        }
        let minus_jt = space.from_terms(
            (0..dim)
                .filter(|&i| j[i] != 0)
                .map(|i| (Monomial::var(Var::T(i)), Complex64::new(-j[i] as f64, 0.0))),
        );
        let inv_d = d.inv();
        let mut power = space.constant(inv_d);
        let mut inverse = power.clone();
        for _ in 0..space.truncation.t_degree {
            power = power.mul(&minus_jt)?.scale(inv_d);
            if power.is_zero() {
                break;
            }
            inverse.add_assign(&power)?;
        }
        generator.add_assign(&part.mul(&inverse)?)?;
    }
    Ok(finish(generator, split.resonant, best))
}

/// Default t-box radius: the smallest `|⟨j, α⟩|` over `0 < ‖j‖₁ <= degree`,
/// divided by `4·degree`.
pub fn default_t_box_radius(alpha: &FrequencyVector, degree: u32) -> f64 {
    let n = alpha.dim();
    let degree = degree.max(1) as i32;
    let mut j = vec![0i32; n];
    let mut min = f64::INFINITY;
    fn walk(alpha: &FrequencyVector, j: &mut Vec<i32>, idx: usize, budget: i32, min: &mut f64) {
        if idx == j.len() {
            if j.iter().any(|&x| x != 0) {
                *min = min.min(alpha.pairing(j).norm());
            }
            return;
        }
        for v in -budget..=budget {
            j[idx] = v;
            walk(alpha, j, idx + 1, budget - v.abs(), min);
        }
        j[idx] = 0;
    }
    walk(alpha, &mut j, 0, degree, &mut min);
    min / (4.0 * degree as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{parse_series, poisson_bracket, SeriesSpace, Truncation};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn space(dim: usize, n: u32, nt: u32) -> SeriesSpace {
        SeriesSpace::new(dim, Truncation::new(n, nt).unwrap()).unwrap()
    }

    #[test]
    fn cubic_term() {
        let s = space(1, 6, 0);
        let alpha = FrequencyVector::real(&[1.0]).unwrap();
        let r = parse_series("q1^3", &s).unwrap();
        let sol = solve_homological(&alpha, &r, 1e-12).unwrap();
        assert!(
            (sol.generator.coefficient(&Monomial::qp(&[3], &[0])) - c(-1.0 / 3.0)).norm() < 1e-15
        );
        assert!(sol.resonant_part.is_zero());
        assert_eq!(sol.min_divisor, Some(3.0));
        assert_eq!(sol.divisor_witness, Some(vec![-3]));
    }

    #[test]
    fn kernel_term_goes_to_resonant_part() {
        let s = space(1, 6, 0);
        let alpha = FrequencyVector::real(&[1.0]).unwrap();
        let r = parse_series("q1^2*p1^2", &s).unwrap();
        let sol = solve_homological(&alpha, &r, 1e-12).unwrap();
        assert!(sol.generator.is_zero());
        assert_eq!(sol.resonant_part, parse_series("l1^2", &s).unwrap());
        assert_eq!(sol.min_divisor, None);
    }

    #[test]
    fn near_resonance_aborts() {
        let s = space(2, 6, 0);
        let alpha = FrequencyVector::real(&[1.0, 1.0 + 1e-16]).unwrap();
        // q1^2 p1 p2 carries the same divisor vector (-1, 1) as q1 p2
        let r = parse_series("q1^2*p1*p2", &s).unwrap();
        let err = solve_homological(&alpha, &r, 1e-12).unwrap_err();
        match err {
            NormalFormError::SmallDivisor {
                witness, divisor, ..
            } => {
                assert_eq!(witness, vec![-1, 1]);
                assert!(divisor < 1e-12);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn quadratic_non_normal_input_is_rejected() {
        let s = space(2, 6, 0);
        let alpha = FrequencyVector::real(&[1.0, 2.0f64.sqrt()]).unwrap();
        let r = parse_series("q1*p2", &s).unwrap();
        assert!(matches!(
            solve_homological(&alpha, &r, 1e-12),
            Err(NormalFormError::InvalidInput(_))
        ));
    }

    #[test]
    fn homological_identity_holds() {
        let s = space(2, 7, 0);
        let alpha = FrequencyVector::real(&[1.0, 2.0f64.sqrt()]).unwrap();
        let r = parse_series(
            "0.3*q1^3 - 1.1*q1*p2^2 + (0.2+0.5i)*q2*p1^3 + 2*q1^2*p1^2 + 0.7*q1*p1*q2*p2",
            &s,
        )
        .unwrap();
        let sol = solve_homological(&alpha, &r, 1e-12).unwrap();
        let h0 = alpha.quadratic_part(&s);
        let resonant_qp =
            crate::series::action_substitute(&sol.resonant_part, crate::series::ActionTarget::Qp)
                .unwrap();
        let lhs = poisson_bracket(&h0, &sol.generator)
            .unwrap()
            .add(&resonant_qp)
            .unwrap();
        assert!(lhs.max_abs_diff(&r) < 1e-14);
        assert!(sol.generator.iter().all(|(m, _)| !m.is_normal()));
    }

    #[test]
    fn unfolded_identity_holds_to_t_order() {
        let s = space(2, 6, 3);
        let alpha = FrequencyVector::real(&[1.0, 2.0f64.sqrt()]).unwrap();
        let r = parse_series("q1^3 + 0.5*q1*p2^2 + q2^2*p1*t1", &s).unwrap();
        let rho = default_t_box_radius(&alpha, 6);
        let sol = solve_homological_unfolded(&alpha, &r, 1e-12, rho).unwrap();
        let h0t = alpha
            .quadratic_part(&s)
            .add(&parse_series("t1*q1*p1 + t2*q2*p2", &s).unwrap())
            .unwrap();
        let lhs = poisson_bracket(&h0t, &sol.generator).unwrap();
        assert!(lhs.max_abs_diff(&r) < 1e-13, "{}", lhs.max_abs_diff(&r));
    }

    #[test]
    fn unfolded_overflow_on_large_box() {
        let s = space(1, 6, 2);
        let alpha = FrequencyVector::real(&[1.0]).unwrap();
        let r = parse_series("q1^3", &s).unwrap();
        assert!(matches!(
            solve_homological_unfolded(&alpha, &r, 1e-12, 1.0),
            Err(NormalFormError::TExpansionOverflow { .. })
        ));
    }

    #[test]
    fn default_radius_for_unit_frequency() {
        // min over 0 < |j| <= 4 of |j| is 1
        let alpha = FrequencyVector::real(&[1.0]).unwrap();
        assert!((default_t_box_radius(&alpha, 4) - 1.0 / 16.0).abs() < 1e-15);
    }
}
