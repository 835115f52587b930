// Borel-Padé-Laplace resummation of the quartic partition function,
// compared against direct quadrature of the integral.

use resurgence::borelnum::{borel_series, laplace_sum, pade_robust};
use resurgence::exactnum::{complex_from_f64, complex_to_f64};
use resurgence::exactnum::{PowerSeries, Rational};
use resurgence::models::{build_ek, quad_moment, Potential};

pub fn run_example() -> resurgence::Result<()> {
    let m = build_ek(2, 60)?;
    let series = PowerSeries::new(Rational::new(), 1, m.lambda_series.coeffs().to_vec());
    let minor = borel_series(&series)?;
    println!("minor: {} coefficients, growth rate {:.4}", minor.len(), minor.growth_rate().unwrap_or(f64::NAN));

    let pade = pade_robust(&minor, 29, 30)?;
    let pole = pade.nearest_stable_pole().expect("a stable pole");
    println!("nearest stable Borel pole: {:.12}", pole.value.real());

    let v = Potential::monomial(2);
    for lambda in [0.02, 0.05, 0.1, 0.3] {
        let z = complex_from_f64(1.0 / lambda, 0.0, 256);
        let sum = laplace_sum(&pade, &z, 0.0)?;
        let quad = quad_moment(&v, 0, &complex_from_f64(lambda, 0.0, 256), 1e-20)?;
        let (s, _) = complex_to_f64(&sum.value);
        let (q, _) = complex_to_f64(&quad.value);
        println!("lambda = {lambda:<5} resummed {s:.16}  quadrature {q:.16}  diff {:.1e}", (s - q).abs());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> resurgence::Result<()> {
    run_example()
}
