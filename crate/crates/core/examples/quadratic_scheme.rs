//! The order-doubling scheme against the two-degrees-per-stage Birkhoff
//! induction, and the unfolded run on `H + Σ t_i p_i q_i`.
//!
//! Run with `cargo run --example quadratic_scheme`.

use kamnf::frequency::tangency_check;
use kamnf::normalform::{birkhoff, quadratic_iteration_traced, QuadraticOptions};
use kamnf::series::{parse_series, FrequencyVector, SeriesSpace, Truncation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = SeriesSpace::new(2, Truncation::new(8, 3)?)?;
    let alpha = FrequencyVector::real(&[1.0, std::f64::consts::SQRT_2])?;
    let h = alpha.quadratic_part(&space).add(&parse_series(
        "0.1*q1^3 - 0.05*q1*p2^2 + 0.08*q2*p1*p2 + 0.1*q1^2*p1^2 - 0.07*q1*q2^3",
        &space,
    )?)?;

    let quad = quadratic_iteration_traced(&h, &alpha, 2, QuadraticOptions::default())?;
    let birk = birkhoff(&h, &alpha, 7)?;
    for ((lo, hi), u) in quad.trace.windows.iter().zip(&quad.trace.generators) {
        println!(
            "stage window [{lo}, {hi}]: generator with {} terms",
            u.len()
        );
    }
    println!("P (quadratic) = {}", quad.result.normal_form);
    println!(
        "max |P_quadratic - P_birkhoff| = {:e}",
        quad.result.normal_form.max_abs_diff(&birk.normal_form)
    );

    // The unfolded run on an instance whose frequency space is the first axis.
    let axis = alpha.quadratic_part(&space).add(&parse_series(
        "q1^2*p1^2 + 0.001*q1^5 + 0.001*q1^2*p1^3",
        &space,
    )?)?;
    let opts = QuadraticOptions {
        unfold: true,
        ..QuadraticOptions::default()
    };
    let unfolded = quadratic_iteration_traced(&axis, &alpha, 2, opts)?;
    println!(
        "\nt-box radius = {:e}",
        unfolded.trace.t_box_radius.unwrap_or(0.0)
    );
    if let Some(actions) = &unfolded.trace.t_actions {
        for (s, stage) in actions.iter().enumerate() {
            for (i, a) in stage.iter().enumerate() {
                println!("u_{}(t{}) = {a}", s + 1, i + 1);
            }
        }
    }
    println!(
        "tangency violation (k = 1): {:e}",
        tangency_check(&unfolded.trace, 1)?
    );
    Ok(())
}
