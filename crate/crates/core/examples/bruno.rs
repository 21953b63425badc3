//! Bruno sequences, partial sums and arithmetic-class membership.
//!
//! Run with `cargo run --release --example bruno`.

use kamnf::arithmetic::{
    bruno_sequence, bruno_sum, class_membership, tau_sequence, ArithmeticClass,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let liouville: f64 = (1..=6u32)
        .map(|m| 10f64.powi(-((1..=m).product::<u32>() as i32)))
        .sum();
    let cases: [(&str, Vec<f64>, u32); 3] = [
        ("(1, sqrt 2)", vec![1.0, std::f64::consts::SQRT_2], 10),
        ("(1, 1/2)", vec![1.0, 0.5], 4),
        ("(1, Liouville)", vec![1.0, liouville], 8),
    ];
    for (name, alpha, k) in cases {
        let profile = bruno_sequence(&alpha, k)?;
        let sum = bruno_sum(&profile);
        println!("alpha = {name}, K = {k}");
        for (level, (a, j)) in profile.a.iter().zip(&profile.witnesses).enumerate() {
            println!("  a_{level:<2} = {a:.6e}  j = {j:?}");
        }
        println!(
            "  tail gap = {:?}, verdict {:?} ({})\n",
            sum.tail_gap, sum.verdict, sum.label
        );
    }

    let alpha = [1.0, std::f64::consts::SQRT_2];
    let class = ArithmeticClass::new(tau_sequence(&alpha, 2.0, 5)?);
    for beta in [[1.0, 1.41], [1.0, 1.5], [1.02, 1.42]] {
        let m = class_membership(&beta, &class, 5)?;
        println!(
            "beta = {beta:?}: member = {}, first failure = {:?}",
            m.member, m.first_failure
        );
    }
    Ok(())
}
