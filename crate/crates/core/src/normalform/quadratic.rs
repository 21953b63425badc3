use super::{
    default_t_box_radius, merge_min, normal_part, solve_homological, solve_homological_unfolded,
    validate_hamiltonian, NormalFormError, NormalFormResult, Result,
};
use crate::series::{lie_exp, to_action_form, FrequencyVector, Monomial, TruncatedSeries, Var};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticOptions {
    pub divisor_threshold: f64,
    /// Run on `G = H + Σ t_i p_i q_i` instead of `H`.
    pub unfold: bool,
    /// Radius of the t-box for the unfolded run; `None` picks
    /// [`default_t_box_radius`].
    pub t_box_radius: Option<f64>,
}

impl Default for QuadraticOptions {
    fn default() -> Self {
        QuadraticOptions {
            divisor_threshold: 1e-12,
            unfold: false,
            t_box_radius: None,
        }
    }
}

/// Per-stage record of a quadratic iteration.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    /// Degree window `[lo, hi]` eliminated at each stage.
    pub windows: Vec<(u32, u32)>,
    /// The combined generator `u_s` of each stage (possibly zero).
    pub generators: Vec<TruncatedSeries>,
    /// For unfolded runs, `u_s(t_i)` for every stage `s` and index `i`.
    pub t_actions: Option<Vec<Vec<TruncatedSeries>>>,
    pub t_box_radius: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct QuadraticResult {
    pub result: NormalFormResult,
    pub trace: IterationTrace,
}

/// Stage `s` (from 1) eliminates degrees `max(3, 2^s) ..= 2^{s+1} − 1`.
pub fn quadratic_windows(stages: u32) -> Vec<(u32, u32)> {
    (1..=stages)
        .map(|s| ((1u32 << s).max(3), (1u32 << (s + 1)) - 1))
        .collect()
}

/// Order-doubling normal form; after `stages` stages every non-normal term
/// below degree `2^{stages+1}` is gone.
pub fn quadratic_iteration(
    h: &TruncatedSeries,
    alpha: &FrequencyVector,
    stages: u32,
) -> Result<NormalFormResult> {
    quadratic_iteration_traced(h, alpha, stages, QuadraticOptions::default()).map(|r| r.result)
}

pub fn quadratic_iteration_traced(
    h: &TruncatedSeries,
    alpha: &FrequencyVector,
    stages: u32,
    opts: QuadraticOptions,
) -> Result<QuadraticResult> {
    validate_hamiltonian(h, alpha)?;
    if stages == 0 || stages > 6 {
        return Err(NormalFormError::InvalidInput(format!(
            "stages = {stages} must lie in 1..=6"
        )));
    }
    let degree = h.truncation().degree;
    if 1u32 << (stages + 1) > degree {
        return Err(NormalFormError::OrderOverflow {
            requested: (1u32 << (stages + 1)) - 1,
            degree,
        });
    }
    let space = *h.space();
    let dim = space.dim;
    let radius = opts.unfold.then(|| {
        opts.t_box_radius
            .unwrap_or_else(|| default_t_box_radius(alpha, degree))
    });

    let mut current = h.clone();
    if opts.unfold {
        current.add_assign(&space.from_terms((0..dim).map(|i| {
            let mut e = vec![0u8; dim];
            e[i] = 1;
            (
                Monomial::qp(&e, &e).with_exp(Var::T(i), 1),
                num_complex::Complex64::new(1.0, 0.0),
            )
        })))?;
    }

    let windows = quadratic_windows(stages);
    let mut generators = Vec::with_capacity(windows.len());
    let mut t_actions = opts.unfold.then(Vec::new);
    let mut min_divisor = None;
    for &(lo, hi) in &windows {
        let mut u = space.zero();
        for d in lo..=hi {
            let image = if u.is_zero() {
                current.clone()
            } else {
                lie_exp(&u, &current)?
            };
            let r = image.filter(|m| m.graded_degree() == d && !m.is_normal());
            let sol = match radius {
                Some(rho) => solve_homological_unfolded(alpha, &r, opts.divisor_threshold, rho)?,
                None => solve_homological(alpha, &r, opts.divisor_threshold)?,
            };
            min_divisor = merge_min(min_divisor, sol.min_divisor);
            u.add_assign(&sol.generator)?;
        }
        if !u.is_zero() {
            current = lie_exp(&u, &current)?;
        }
        if let Some(actions) = t_actions.as_mut() {
            // the normal part in [lo, hi] is what this stage added
            let delta = to_action_form(&current.filter(|m| {
                let g = m.graded_degree();
                m.is_normal() && (lo..=hi).contains(&g)
            }))?;
            actions.push(
                (0..dim)
                    .map(|i| delta.derivative(Var::Lambda(i)).scale_real(-1.0))
                    .collect(),
            );
        }
        generators.push(u);
    }

    let order = windows.last().map(|w| w.1).unwrap_or(2);
    let (normal_form, residual_norm) = normal_part(&current, order)?;
    Ok(QuadraticResult {
        result: NormalFormResult {
            normal_form,
            generators: generators.clone(),
            achieved_order: order,
            min_divisor,
            residual_norm,
        },
        trace: IterationTrace {
            windows,
            generators,
            t_actions,
            t_box_radius: radius,
        },
    })
}
