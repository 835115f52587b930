//! Polynomial roots: exact rational roots where they exist, big-complex
//! roots (Aberth–Ehrlich iteration with Newton polishing) otherwise.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use super::{cabs, complex_from_rational, Poly, Ring};
use crate::error::{Error, Result};

/// A root known numerically and, when rational, exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub exact: Option<Rational>,
    pub value: Complex,
}

impl Root {
    pub fn exact(q: Rational, prec: u32) -> Self {
        Root { value: complex_from_rational(&q, prec), exact: Some(q) }
    }
}

fn horner(coeffs: &[Complex], z: &Complex, prec: u32) -> (Complex, Complex) {
    let mut p = Complex::new(prec);
    let mut dp = Complex::new(prec);
    for c in coeffs.iter().rev() {
        dp = Complex::with_val(prec, &dp * z) + &p;
        p = Complex::with_val(prec, &p * z) + c;
    }
    (p, dp)
}

/// All complex roots of `Σ coeffs[i] z^i` (leading coefficient nonzero).
///
/// Iterates at `prec + 32` bits and rounds results to `prec`.
pub fn complex_roots(coeffs: &[Complex], prec: u32) -> Result<Vec<Complex>> {
    let mut cs: Vec<Complex> = coeffs.to_vec();
    while cs.last().is_some_and(|c| c.real().is_zero() && c.imag().is_zero()) {
        cs.pop();
    }
    let n = cs.len().saturating_sub(1);
    if n == 0 {
        return Ok(vec![]);
    }
    let wp = prec + 32;
    let cs: Vec<Complex> = cs.iter().map(|c| Complex::with_val(wp, c)).collect();
    let lead = cs[n].clone();
    let monic: Vec<Complex> = cs.iter().map(|c| Complex::with_val(wp, c / &lead)).collect();

    // initial guesses on a circle sized by the coefficient magnitudes
    let mut radius = 0f64;
    for (k, c) in monic.iter().enumerate().take(n) {
        let a = cabs(c).to_f64();
        if a > 0.0 {
            radius = radius.max(a.powf(1.0 / (n - k) as f64));
        }
    }
    if radius == 0.0 {
        radius = 1.0;
    }
    let mut z: Vec<Complex> = (0..n)
        .map(|j| {
            let ang = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.4;
            Complex::with_val(wp, (radius * ang.cos(), radius * ang.sin()))
        })
        .collect();

    let tol = Float::with_val(wp, Float::u_exp(1, -(wp as i32 - 12)));
    let abs_coeffs: Vec<Complex> = monic.iter().map(|c| Complex::with_val(wp, (cabs(c), 0))).collect();
    // a root is settled once |p(z)| is within the rounding noise of Horner's rule
    let noise = |z: &Complex| -> Float {
        let r = Complex::with_val(wp, (cabs(z), 0));
        let (b, _) = horner(&abs_coeffs, &r, wp);
        Float::with_val(wp, b.real() * (8 * (n as u32 + 1))) >> (wp - 8)
    };
    let mut settled = vec![false; n];
    let mut converged = false;
    for _ in 0..(50 + 20 * n) {
        let mut max_step = Float::new(wp);
        for i in 0..n {
            if settled[i] {
                continue;
            }
            let (p, dp) = horner(&monic, &z[i], wp);
            if p.real().is_zero() && p.imag().is_zero() {
                settled[i] = true;
                continue;
            }
            if cabs(&p) <= noise(&z[i]) {
                settled[i] = true;
            }
            let ratio = Complex::with_val(wp, &p / &dp);
            let mut sum = Complex::new(wp);
            for j in 0..n {
                if j != i {
                    let d = Complex::with_val(wp, &z[i] - &z[j]);
                    sum += d.recip();
                }
            }
            let denom = Complex::with_val(wp, 1 - Complex::with_val(wp, &ratio * &sum));
            let w = Complex::with_val(wp, &ratio / &denom);
            let scale = cabs(&z[i]).max(&Float::with_val(wp, 1));
            let step = Float::with_val(wp, cabs(&w) / scale);
            if step > max_step {
                max_step = step;
            }
            z[i] -= w;
        }
        if !max_step.is_finite() {
            return Err(Error::RootFinding("Aberth iteration produced a non-finite value".into()));
        }
        if max_step < tol || settled.iter().all(|s| *s) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::RootFinding(format!("Aberth iteration did not converge for degree {n}")));
    }
    // Newton polishing on the original coefficients
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = horner(&monic, zi, wp);
            if dp.real().is_zero() && dp.imag().is_zero() {
                break;
            }
            *zi -= Complex::with_val(wp, &p / &dp);
        }
    }
    Ok(z.into_iter().map(|v| Complex::with_val(prec, v)).collect())
}

/// Roots of `u^n = c` for rational `c ≠ 0`: the principal `n`-th root times
/// the `n`-th roots of unity, in increasing angle from the principal one.
pub fn binomial_roots(n: u32, c: &Rational, prec: u32) -> Vec<Complex> {
    let wp = prec + 16;
    let cz = complex_from_rational(c, wp);
    let modulus = Float::with_val(wp, cabs(&cz).pow(Float::with_val(wp, 1) / n));
    let arg = Float::with_val(wp, cz.arg_ref());
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    (0..n)
        .map(|j| {
            let ang = Float::with_val(wp, &arg + Float::with_val(wp, &two_pi * j)) / n;
            let e = Complex::with_val(wp, (Float::new(wp), ang)).exp();
            Complex::with_val(prec, e * &modulus)
        })
        .collect()
}

/// Best rational with denominator ≤ `max_den` within `tol` of `x`.
fn rationalize_to(x: &Float, tol: &Float, max_den: &Integer) -> Option<Rational> {
    let prec = x.prec();
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut rest = Float::with_val(prec, x);
    for _ in 0..200 {
        let a = rest.to_integer_round(rug::float::Round::Down).map(|(i, _)| i)?;
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        if k2 > *max_den {
            return None;
        }
        let cand = Rational::from((h2.clone(), k2.clone()));
        if Float::with_val(prec, x - &cand).abs() <= *tol {
            return Some(cand);
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = Float::with_val(prec, &rest - &a);
        if frac.is_zero() {
            return None;
        }
        rest = Float::with_val(prec, frac.recip_ref());
    }
    None
}

/// Exact rational roots of `p`, each listed once.
///
/// Candidates come from the real numerical roots, are rationalized, and are
/// kept only if they annihilate `p` exactly.
pub fn rational_roots(p: &Poly<Rational>, prec: u32) -> Result<Vec<Rational>> {
    let mut out: Vec<Rational> = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let mut rest = p.clone();
    if rest.valuation().unwrap_or(0) > 0 {
        out.push(Rational::new());
        rest = rest.shift_down(rest.valuation().unwrap_or(0));
    }
    if rest.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    let sqfree = {
        let g = rest.gcd(&rest.derivative());
        rest.div_rem(&g).map(|(q, _)| q).unwrap_or(rest)
    };
    let wp = prec.max(128);
    let numeric = complex_roots(&sqfree.coeffs().iter().map(|c| complex_from_rational(c, wp)).collect::<Vec<_>>(), wp)?;
    let max_den = Integer::from(Integer::u_pow_u(10, 15));
    for z in numeric {
        let scale = cabs(&z).max(&Float::with_val(wp, 1));
        let tol = Float::with_val(wp, &scale * Float::with_val(wp, Float::u_exp(1, -(wp as i32 / 2))));
        if Float::with_val(wp, z.imag().abs_ref()) > tol {
            continue;
        }
        if let Some(r) = rationalize_to(z.real(), &tol, &max_den) {
            if sqfree.eval(&r).is_zero() && !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// All roots of `p` with multiplicity one each: exact where rational, and in
/// the binomial case `c_0 + c_n u^n` through [`binomial_roots`].
///
/// Callers that need simple roots check [`Poly::is_squarefree`] first.
pub fn roots(p: &Poly<Rational>, prec: u32) -> Result<Vec<Root>> {
    let Some(deg) = p.degree() else {
        return Err(Error::Degenerate("the zero polynomial has no finite root set".into()));
    };
    if deg == 0 {
        return Ok(vec![]);
    }
    let exact = rational_roots(p, prec)?;
    let mut out: Vec<Root> = exact.iter().map(|r| Root::exact(r.clone(), prec)).collect();
    // divide out the rational roots (once each) and the squarefree part
    let g = p.gcd(&p.derivative());
    let mut rest = p.div_rem(&g).map(|(q, _)| q).unwrap_or_else(|| p.clone());
    for r in &exact {
        let lin = Poly::new(vec![r.clone().neg(), Rational::from(1)]);
        rest = rest.div_rem(&lin).expect("nonzero divisor").0;
    }
    let Some(d) = rest.degree() else {
        return Ok(out);
    };
    if d == 0 {
        return Ok(out);
    }
    let inner_binomial = rest.coeffs().iter().skip(1).take(d - 1).all(Ring::is_zero);
    let numeric = if inner_binomial && !Ring::is_zero(&rest.coeff(0)) {
        let c = -rest.coeff(0) / rest.coeff(d);
        binomial_roots(d as u32, &c, prec)
    } else {
        complex_roots(&rest.coeffs().iter().map(|c| complex_from_rational(c, prec)).collect::<Vec<_>>(), prec)?
    };
    out.extend(numeric.into_iter().map(|value| Root { exact: None, value }));
    Ok(out)
}
