//! Density of `{λ : α + ĝ(λ) ∈ C(a)}` near the origin, by Monte Carlo and
//! on a grid.
//!
//! Run with `cargo run --release --example density`.

use kamnf::arithmetic::{density_estimate, DensityOptions, SamplingMode};
use kamnf::normalform::parametric_normal_form;
use kamnf::series::{parse_series, FrequencyVector, SeriesSpace, Truncation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = SeriesSpace::new(2, Truncation::graded(6)?)?;
    let alpha_values = [1.0, std::f64::consts::SQRT_2];
    let alpha = FrequencyVector::real(&alpha_values)?;
    let h = alpha
        .quadratic_part(&space)
        .add(&parse_series("q1^2*p1^2", &space)?)?;
    let (_, ghat) = parametric_normal_form(&h, &alpha, 6)?;
    let radii = [0.1, 0.05, 0.025];

    for (label, mode) in [
        ("Monte Carlo, 10^4 samples", SamplingMode::MonteCarlo),
        ("grid 100 x 100", SamplingMode::Grid { per_axis: 100 }),
    ] {
        let opts = DensityOptions {
            mode,
            ..DensityOptions::default()
        };
        let report = density_estimate(&ghat, &alpha_values, 2.0, 6, &radii, 10_000, 42, opts)?;
        println!("{label}:");
        print!("{}", report.to_csv());
    }

    let strict = DensityOptions {
        first_level: 0,
        ..DensityOptions::default()
    };
    let report = density_estimate(&ghat, &alpha_values, 2.0, 6, &radii, 10_000, 42, strict)?;
    println!("bound imposed from level 0:");
    print!("{}", report.to_csv());
    Ok(())
}
