// Formal exponential-series bases and their Gevrey growth.

use resurgence::diffop::parse_operator;
use resurgence::exactnum::complex_to_f64;
use resurgence::formal::{formal_basis, free_energy_series, gevrey_estimate};
use resurgence::models::build_ek;

pub fn run_example() -> resurgence::Result<()> {
    // Euler: f_0 = Σ (-1)^n n! x^{n+1} and the convergent e^{1/x}
    let euler = parse_operator("x*theta^2 + theta - 1")?;
    for e in formal_basis(&euler, 6)? {
        let u = e.u.exact.clone().unwrap_or_default();
        println!("Euler basis[{}]: x^{} e^({u}/x) {}", e.label, e.beta, e.series.to_json()["coeffs"]);
    }

    // E_3 lives at level 1/2 in lambda; its basis is computed in x = lambda^{1/2}
    let m = build_ek(3, 40)?;
    for e in &m.basis {
        let (re, im) = complex_to_f64(&e.u.value);
        println!("E_3 basis[{}]: u = {re:.12}{im:+.12}i, beta = {}", e.label, e.beta);
    }
    for k in 2..=3 {
        let m = build_ek(k, 80)?;
        let g = gevrey_estimate(&m.lambda_series)?;
        println!("k = {k}: Gevrey s = {:.4}, A = {:.3}, window {:?}", g.s, g.a, g.fit_window);
    }

    let z0 = build_ek(2, 6)?.lambda_series;
    let w = free_energy_series(&z0, 4)?;
    println!("free energy of phi^4: W = {}", w.fmt_in("lambda"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> resurgence::Result<()> {
    run_example()
}
