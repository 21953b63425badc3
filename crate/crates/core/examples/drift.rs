//! Action drift of normal-form tori under the exact flow.
//!
//! Run with `cargo run --release --example drift`.

use kamnf::dynamics::{drift_exponent, integrate, DriftOptions, EllipticChart, Method, PhasePoint};
use kamnf::series::{parse_series, FrequencyVector, SeriesSpace, Truncation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = SeriesSpace::new(1, Truncation::graded(8)?)?;
    let alpha = FrequencyVector::real(&[1.0])?;
    let opts = DriftOptions::default();
    let radii = [0.2, 0.1, 0.05];

    let cubic = parse_series("q1*p1", &space)?
        .add(&parse_series("q1 + p1", &space)?.pow(3)?.scale_real(0.1))?;
    let report = drift_exponent(&cubic, &alpha, 6, &[1.0], &radii, &opts)?;
    println!("H = {cubic}");
    println!("{}", serde_json::to_string_pretty(&report)?);

    // pq + q^3 is conjugated exactly to pq: deviations stay at the noise floor
    let exact = parse_series("q1*p1 + q1^3", &space)?;
    let report = drift_exponent(&exact, &alpha, 6, &[1.0], &radii, &opts)?;
    println!(
        "H = {exact}: deviations {:?}, status {}",
        report.deviations, report.status
    );

    let chart = EllipticChart::default();
    let x0 = PhasePoint::real(vec![0.1], vec![0.0])?;
    let traj = integrate(&exact, &x0, 1.0, 0.25, Method::Midpoint, &chart)?;
    print!("\n{}", traj.to_csv(&chart));
    Ok(())
}
