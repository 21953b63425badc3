//! Birkhoff normal form, frequency map and certification for two
//! Hamiltonians: the two-mode example with `P = α₁X₁ + α₂X₂ + X₁²` and the
//! one-mode `pq + (q + p)⁴`.
//!
//! Run with `cargo run --example normal_form`.

use kamnf::normalform::{birkhoff, certify, parametric_normal_form, uniqueness_probe};
use kamnf::series::{parse_series, FrequencyVector, SeriesSpace, Truncation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = SeriesSpace::new(2, Truncation::graded(8)?)?;
    let alpha = FrequencyVector::real(&[1.0, std::f64::consts::SQRT_2])?;
    let h = alpha
        .quadratic_part(&space)
        .add(&parse_series("q1^2*p1^2", &space)?)?;

    let (nf, ghat) = parametric_normal_form(&h, &alpha, 8)?;
    println!("H    = {h}");
    println!("P    = {}", nf.normal_form);
    println!("ghat = ({}, {})", ghat[0], ghat[1]);
    println!(
        "uniqueness probe: {:e}",
        uniqueness_probe(&h, &alpha, 8, 10, 1)?
    );

    let one = SeriesSpace::new(1, Truncation::graded(8)?)?;
    let alpha1 = FrequencyVector::real(&[1.0])?;
    let h1 = parse_series("q1*p1", &one)?.add(&parse_series("q1 + p1", &one)?.pow(4)?)?;
    let nf1 = birkhoff(&h1, &alpha1, 6)?;
    println!("\nH    = {h1}");
    println!("P    = {}", nf1.normal_form);
    println!(
        "{} generators, min divisor {:?}, residual {:e}, certified {:e}",
        nf1.generators.len(),
        nf1.min_divisor,
        nf1.residual_norm,
        certify(&h1, &nf1)?
    );
    println!("\n{}", serde_json::to_string_pretty(&nf)?);
    Ok(())
}
