//! Frequency spaces and their invariance under Poisson automorphisms.
//!
//! Run with `cargo run --example frequency_space`.

use kamnf::frequency::{automorphism_invariance_check, frequency_space, DEFAULT_RANK_TOL};
use kamnf::normalform::parametric_normal_form;
use kamnf::series::{parse_series, FrequencyVector, SeriesSpace, Truncation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = SeriesSpace::new(2, Truncation::graded(8)?)?;
    let alpha = FrequencyVector::real(&[1.0, std::f64::consts::SQRT_2])?;

    for extra in [
        "q1^2*p1^2",
        "q1^2*p1^2 + q1*p1*q2*p2",
        "q1^3*p1^3 + 0.5*q2^2*p2^2",
    ] {
        let h = alpha
            .quadratic_part(&space)
            .add(&parse_series(extra, &space)?)?;
        let (_, ghat) = parametric_normal_form(&h, &alpha, 8)?;
        let f = frequency_space(&ghat, DEFAULT_RANK_TOL)?;
        println!("H = H0 + {extra}");
        println!(
            "  ghat = ({}, {}), dim F(H) = {}",
            ghat[0], ghat[1], f.space_dim
        );
    }

    // Direct input: (2 l1 + l2^2, 3 l1) spans all of C^2
    let ghat = [
        parse_series("2*l1 + l2^2", &space)?,
        parse_series("3*l1", &space)?,
    ];
    println!(
        "\n(2*l1 + l2^2, 3*l1): dim = {}",
        frequency_space(&ghat, DEFAULT_RANK_TOL)?.space_dim
    );

    let h = alpha
        .quadratic_part(&space)
        .add(&parse_series("q1^2*p1^2", &space)?)?;
    let angle = automorphism_invariance_check(&h, &alpha, 8, 3, 5, 2024)?;
    println!("largest principal angle after 5 random conjugations: {angle:e}");
    Ok(())
}
