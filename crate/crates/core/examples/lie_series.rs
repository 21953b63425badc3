//! Poisson brackets and Lie-series conjugation.
//!
//! Run with `cargo run --example lie_series`.

use kamnf::series::{lie_exp_counted, parse_series, poisson_bracket, SeriesSpace, Truncation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = SeriesSpace::new(1, Truncation::graded(8)?)?;
    let h = parse_series("q1*p1 + q1^3", &space)?;
    let g = parse_series("-0.3333333333333333*q1^3", &space)?;

    println!("H        = {h}");
    println!("g        = {g}");
    println!("{{g, H}}   = {}", poisson_bracket(&g, &h)?);

    let (conjugated, terms) = lie_exp_counted(&g, &h)?;
    println!("e^ad_g H = {conjugated}  ({terms} bracket term(s) used)");

    let quartic = parse_series("q1*p1", &space)?.add(&parse_series("q1 + p1", &space)?.pow(4)?)?;
    println!("\nH'       = {quartic}");
    Ok(())
}
