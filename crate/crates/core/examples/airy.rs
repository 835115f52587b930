// The Airy equation: exponential branches, leading exponent and the
// Borel operators of the two branch series.

use resurgence::exactnum::{complex_from_f64, complex_to_f64, Rational};
use resurgence::models::{build_airy, build_airy_exact};

pub fn run_example() -> resurgence::Result<()> {
    for q in [Rational::from(1), Rational::from((4, 9))] {
        let m = build_airy_exact(&q, 10)?;
        let show = |r: &resurgence::exactnum::roots::Root| r.exact.as_ref().map(|q| q.to_string()).unwrap_or_default();
        println!("q = {q}: u+ = {}, u- = {}, beta = {}", show(&m.u_plus), show(&m.u_minus), m.beta);
        for b in &m.branches {
            let zeros: Vec<String> = b.leading_zeros.iter().filter_map(|z| z.exact.as_ref().map(|q| q.to_string())).collect();
            println!("  branch u = {}: {}", show(&b.u), b.borel_operator);
            println!("    zeros of the leading coefficient: {zeros:?}");
        }
    }
    let m = build_airy(&complex_from_f64(0.3, 1.1, 256), 10)?;
    let (re, im) = complex_to_f64(&m.u_plus.value);
    println!("q = 0.3+1.1i: u+ = {re:.15}{im:+.15}i");
    Ok(())
}

#[allow(dead_code)]
fn main() -> resurgence::Result<()> {
    run_example()
}
