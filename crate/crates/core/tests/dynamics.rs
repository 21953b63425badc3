//! Charts, integrators, normalizing maps and action drift.

mod common;

use common::*;
use kamnf::dynamics::{
    drift_exponent, integrate, Direction, DriftOptions, EllipticChart, HamiltonianField, Method,
    PhasePoint, PolynomialMap,
};
use kamnf::normalform::{birkhoff, frequency_map};
use kamnf::series::{
    action_substitute, parse_series, ActionTarget, Assignment, FrequencyVector, TruncatedSeries,
};
use num_complex::Complex64;
use rand::Rng;

/// `Σ α_i (x_i² + y_i²)/2` plus random real cubic and quartic terms, with
/// `x_i, y_i` stored in the `q_i, p_i` slots.
fn real_hamiltonian(alpha: &[f64], seed: u64) -> TruncatedSeries {
    let sp = space(alpha.len(), 8);
    let mut r = rng(seed);
    let mut h = sp.zero();
    for (i, a) in alpha.iter().enumerate() {
        let mut e = vec![0u8; alpha.len()];
        e[i] = 2;
        let zero = vec![0u8; alpha.len()];
        h.add_term(
            kamnf::series::Monomial::qp(&e, &zero),
            Complex64::new(a / 2.0, 0.0),
        );
        h.add_term(
            kamnf::series::Monomial::qp(&zero, &e),
            Complex64::new(a / 2.0, 0.0),
        );
    }
    for d in 3..=4 {
        for m in qp_monomials(alpha.len(), d) {
            h.add_term(m, Complex64::new(r.gen_range(-0.1..0.1), 0.0));
        }
    }
    h
}

#[test]
fn real_hamiltonians_have_real_frequency_maps() {
    let chart = EllipticChart::default();
    let alpha = [1.0, SQRT2];
    let fv = FrequencyVector::real(&alpha).unwrap();
    for seed in 0..5 {
        let h = chart
            .complexify_series(&real_hamiltonian(&alpha, seed))
            .unwrap();
        assert!(
            h.up_to_degree(2)
                .max_abs_diff(&fv.quadratic_part(h.space()))
                < 1e-15
        );
        let nf = birkhoff(&h, &fv, 8).unwrap();
        for g in frequency_map(&nf.normal_form, &fv).unwrap() {
            let worst_im = g.iter().map(|(_, c)| c.im.abs()).fold(0.0, f64::max);
            assert!(worst_im < 1e-10, "seed {seed}: {g}");
        }
        // and the chart round-trips the series
        let back = chart.realify_series(&h).unwrap();
        assert!(back.max_abs_diff(&real_hamiltonian(&alpha, seed)) < 1e-14);
    }
}

fn cubic() -> TruncatedSeries {
    let sp = space(1, 8);
    let c = parse_series("q1 + p1", &sp)
        .unwrap()
        .pow(3)
        .unwrap()
        .scale_real(0.1);
    parse_series("q1*p1", &sp).unwrap().add(&c).unwrap()
}

fn final_state(method: Method, dt: f64) -> Vec<Complex64> {
    let chart = EllipticChart::default();
    let x0 = PhasePoint::real(vec![0.3], vec![0.1]).unwrap();
    let rec = integrate(&cubic(), &x0, 5.0, dt, method, &chart).unwrap();
    let (q, p) = rec.states.last().unwrap().qp(&chart);
    q.into_iter().chain(p).collect()
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn step_refinement_shows_the_method_order() {
    for (method, order) in [(Method::Midpoint, 2), (Method::Gauss2, 4)] {
        let z: Vec<_> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&dt| final_state(method, dt))
            .collect();
        let ratio = dist(&z[0], &z[1]) / dist(&z[1], &z[2]);
        let expected = 2f64.powi(order);
        assert!(
            (ratio / expected - 1.0).abs() < 0.15,
            "{method:?}: ratio {ratio}"
        );
    }
}

#[test]
fn real_orbits_stay_real_and_keep_energy() {
    let chart = EllipticChart::default();
    let x0 = PhasePoint::real(vec![0.3], vec![0.1]).unwrap();
    let rec = integrate(&cubic(), &x0, 20.0, 0.01, Method::Gauss2, &chart).unwrap();
    let e0 = rec.energy[0];
    for (state, e) in rec.states.iter().zip(&rec.energy) {
        assert!(state.realify(&chart, 1e-10).is_ok());
        assert!(e.im.abs() < 1e-12);
        assert!((e - e0).norm() < 1e-9);
    }
}

#[test]
fn hamiltonian_field_matches_chart_equations() {
    // For H = qp the flow is a rotation q(t) = q0 e^{-i t}.
    let chart = EllipticChart::default();
    let sp = space(1, 4);
    let field = HamiltonianField::new(&parse_series("q1*p1", &sp).unwrap(), &chart).unwrap();
    let z = [Complex64::new(0.2, 0.1), Complex64::new(0.2, -0.1)];
    let f = field.field(&z);
    assert!((f[0] - Complex64::new(0.0, -1.0) * z[0]).norm() < 1e-15);
    assert!((f[1] - Complex64::new(0.0, 1.0) * z[1]).norm() < 1e-15);
}

#[test]
fn doubling_the_time_at_most_doubles_the_drift() {
    let alpha = FrequencyVector::real(&[1.0]).unwrap();
    let run = |t_end| {
        let opts = DriftOptions {
            t_end,
            ..Default::default()
        };
        drift_exponent(&cubic(), &alpha, 6, &[1.0], &[0.05], &opts)
            .unwrap()
            .deviations[0]
    };
    let (short, long) = (run(25.0), run(50.0));
    assert!(long >= short);
    assert!(
        long <= 2.0 * short + 1e-12,
        "T = 25: {short:e}, T = 50: {long:e}"
    );
}

#[test]
fn normalizing_map_conjugates_to_the_normal_form() {
    let sp = space(2, 8);
    let alpha = sqrt2_alpha();
    let h = random_hamiltonian(&sp, &alpha, 0.1, &mut rng(31));
    let k = 6;
    let nf = birkhoff(&h, &alpha, k).unwrap();
    let p_qp = action_substitute(&nf.normal_form, ActionTarget::Qp).unwrap();
    let forward = PolynomialMap::new(&sp, &nf.generators, Direction::Forward, k).unwrap();
    let inverse = PolynomialMap::new(&sp, &nf.generators, Direction::Inverse, k).unwrap();
    let eval = |s: &TruncatedSeries, z: &[Complex64]| s.evaluate(&Assignment::qp(&z[..2], &z[2..]));
    let mut r = rng(37);
    for _ in 0..10 {
        let dir: Vec<Complex64> = (0..4)
            .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let errors: Vec<(f64, f64)> = [0.02, 0.01]
            .iter()
            .map(|&s| {
                let w: Vec<Complex64> = dir.iter().map(|c| c * s).collect();
                let z = forward.apply(&w).unwrap();
                let conj = (eval(&h, &z) - eval(&p_qp, &w)).norm();
                let round = dist(&inverse.apply(&z).unwrap(), &w);
                (conj, round)
            })
            .collect();
        let conj_ratio = errors[0].0 / errors[1].0;
        let round_ratio = errors[0].1 / errors[1].1;
        assert!(
            conj_ratio > 0.7 * 2f64.powi(k as i32 + 1),
            "H∘Φ − P ratio {conj_ratio}"
        );
        assert!(
            round_ratio > 0.7 * 2f64.powi(k as i32),
            "Φ⁻¹∘Φ ratio {round_ratio}"
        );
    }
}

#[test]
fn drift_harness_recovers_the_residual_degree() {
    let alpha = FrequencyVector::real(&[1.0]).unwrap();
    let report = drift_exponent(
        &cubic(),
        &alpha,
        6,
        &[1.0],
        &[0.2, 0.1, 0.05],
        &DriftOptions::default(),
    )
    .unwrap();
    assert_eq!(report.status, "fit");
    let slope = report.exponent.unwrap();
    assert!((slope - 7.0).abs() < 0.7, "slope {slope}");
    assert!(report.r2_of_fit.unwrap() > 0.95);
}

#[test]
fn invalid_charts_are_rejected() {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    assert!(EllipticChart::new([[one, zero], [zero, one]]).is_err());
}
