// Stokes constants from lateral Laplace jumps: the Euler series (where the
// answer is 2πi) and the quartic partition function.

use std::f64::consts::PI;

use resurgence::borelnum::{borel_series, borel_series_any, stokes_jump, stokes_jump_with, BorelSeries, StokesOptions};
use resurgence::exactnum::{complex_from_rational, complex_to_f64, PowerSeries, Rational};
use resurgence::models::build_ek;

pub fn run_example() -> resurgence::Result<()> {
    // Borel transform of Σ (-1)^n n! z^{-n-1} is 1/(1+ζ)
    let euler = BorelSeries::from_rationals((0..30).map(|n| Rational::from(if n % 2 == 0 { 1 } else { -1 })).collect());
    let est = stokes_jump(&euler, PI, &[2.0, 4.0, 8.0])?;
    for s in &est.samples {
        let (re, im) = complex_to_f64(s.a_est.as_ref().expect("omega known"));
        println!("Euler, |z| = {:.0}: jump / e^z = {re:.3e} {im:+.15}i", complex_to_f64(&s.z).0.abs());
    }

    // Quartic model: the jump at theta = pi is A e^{z/16} Z_1(z)
    let m = build_ek(2, 60)?;
    let minor = borel_series(&PowerSeries::new(Rational::new(), 1, m.lambda_series.coeffs()[..61].to_vec()))?;
    let partner = m.basis.iter().find(|e| e.u.exact.as_ref().is_some_and(|u| *u != 0)).expect("u = 1/16");
    let opts = StokesOptions {
        orders: Some((29, 30)),
        omega: Some(complex_from_rational(&Rational::from((-1, 16)), 256)),
        partner: Some(borel_series_any(&partner.series)?),
        ..Default::default()
    };
    let est = stokes_jump_with(&minor, PI, &[8.0, 16.0, 32.0], &opts)?;
    let (re, im) = complex_to_f64(est.constant.as_ref().expect("omega given"));
    println!("quartic: A = {re:.3e} {im:+.10}i, spread {:.2e}, eps {:.4}", est.spread, est.epsilon);
    Ok(())
}

#[allow(dead_code)]
fn main() -> resurgence::Result<()> {
    run_example()
}
