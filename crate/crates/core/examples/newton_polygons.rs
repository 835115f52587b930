// Newton polygons, indicial equations and determining polynomials for the
// Euler equation and the first governing operators `E_k`.

use resurgence::diffop::parse_operator;
use resurgence::exactnum::{complex_to_f64, Rational};
use resurgence::models::build_ek;
use resurgence::newton::{determining_polynomial, indicial_polynomial, newton_polygon, At};

pub fn run_example() -> resurgence::Result<()> {
    let euler = parse_operator("x*theta^2 + theta - 1")?;
    let p0 = newton_polygon(&euler, At::Zero);
    println!("Euler: {euler}");
    println!("  polygon at 0: vertices {:?}, positive slopes {:?}", p0.vertices, p0.positive_slopes());
    let ind = indicial_polynomial(&euler)?;
    println!("  indicial Q(beta) = {}", ind.polynomial);
    let det = determining_polynomial(&euler, &Rational::from(1))?;
    println!("  determining P(u) = {}", det.polynomial);

    for k in 2..=4 {
        let m = build_ek(k, 8)?;
        let slopes: Vec<String> = m.polygon_lambda().positive_slopes().iter().map(|q| q.to_string()).collect();
        println!("E_{k}: {}", m.operator_lambda);
        println!("  lambda-polygon slopes {slopes:?}");
        if let Some(d) = &m.determining {
            let roots: Vec<String> = d
                .nonzero_roots
                .iter()
                .map(|r| match &r.exact {
                    Some(q) => q.to_string(),
                    None => {
                        let (re, im) = complex_to_f64(&r.value);
                        format!("{re:.12}{im:+.12}i")
                    }
                })
                .collect();
            println!("  critical variable: P(u) = {}, roots {roots:?}", d.polynomial);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> resurgence::Result<()> {
    run_example()
}
