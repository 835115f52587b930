// Moments of the `φ^{2k}` integrals: quadrature, asymptotic series with
// its remainder bound, and the governing relations between moments.

use resurgence::exactnum::{complex_from_f64, complex_to_f64};
use resurgence::models::{asymptotic_coeffs, quad_moment, verify_governing, Potential};

pub fn run_example() -> resurgence::Result<()> {
    let v = Potential::monomial(2);
    let lambda = 0.05;
    let z = quad_moment(&v, 0, &complex_from_f64(lambda, 0.0, 256), 1e-25)?;
    let exact = complex_to_f64(&z.value).0;
    println!("Z_0({lambda}) = {exact:.18} (error estimate {:.1e})", z.error);

    let alphas = asymptotic_coeffs(&v, 0, 31);
    let mut partial = 0.0;
    for (n, a) in alphas.iter().enumerate().take(31) {
        partial += a.to_f64() * lambda.powi(n as i32);
        let bound = (alphas[n + 1].to_f64() * lambda.powi(n as i32 + 1)).abs();
        if n % 5 == 0 {
            println!("N = {n:>2}: |remainder| = {:.3e} <= {bound:.3e}", (exact - partial).abs());
        }
    }

    let report = verify_governing(&v, 3, 0.1, 1e-10)?;
    for row in &report.rows {
        println!(
            "j = {}: rec1 {:.1e} (weighted) {:.1e} (difference), rec2 {:.1e}",
            row.j, row.rec1_weighted, row.rec1_difference, row.rec2
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> resurgence::Result<()> {
    run_example()
}
