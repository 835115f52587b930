//! Zero-dimensional `φ^{2k}` partition functions, their governing equations
//! and the Airy example.

mod airy;
mod ek;

pub use airy::{build_airy, build_airy_exact, AiryBranch, AiryModel};
pub use ek::{build_ek, singularity_discreteness, DensityWitness, EkModel, LatticeVerdict};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Rational};
use serde_json::Value;

use crate::borelnum::quad;
use crate::error::{Error, Result};
use crate::exactnum::{cabs, factorial, parse_rational, rational_string, working_precision, AppComplex, Poly, Ring};

/// Polynomial potential `V(φ) = Σ v_i φ^i` of even degree with positive
/// leading coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    coeffs: Vec<Rational>,
}

impl Potential {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        let degree = coeffs.len().saturating_sub(1);
        if degree == 0 || !degree.is_multiple_of(2) {
            return Err(Error::Domain(format!("potential must have positive even degree, got {degree}")));
        }
        if coeffs[degree] <= 0 {
            return Err(Error::Domain("leading coefficient of the potential must be positive".into()));
        }
        Ok(Potential { coeffs })
    }

    /// `V = φ^{2k}`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Rational::new(); 2 * k + 1];
        coeffs[2 * k] = Rational::from(1);
        Potential { coeffs }
    }

    /// Parses `["v0", "v1", …]` with rational strings.
    pub fn from_json(v: &Value) -> Result<Self> {
        let items = v.as_array().ok_or_else(|| Error::Parse("potential must be a JSON list".into()))?;
        let coeffs = items
            .iter()
            .map(|x| {
                let s = match x {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(Error::Parse(format!("bad potential coefficient {x}"))),
                };
                parse_rational(&s).ok_or_else(|| Error::Parse(format!("bad rational {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Potential::new(coeffs)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| Value::String(rational_string(c))).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Half the degree.
    pub fn k(&self) -> usize {
        self.degree() / 2
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|c| *c == 0)
    }

    fn as_poly(&self) -> Poly<Rational> {
        Poly::new(self.coeffs.clone())
    }
}

/// A moment `∫ φ^{2j} e^{-φ²/2 - λV} dφ/√(2π)` with its error estimate.
#[derive(Clone, Debug)]
pub struct MomentValue {
    pub j: usize,
    pub lambda: AppComplex,
    pub value: AppComplex,
    pub error: f64,
}

/// Normalized Gaussian moment `⟨φ^n⟩`: `(n-1)!!` for even `n`, else 0.
pub fn gaussian_moment(n: usize) -> Rational {
    if n % 2 == 1 {
        return Rational::new();
    }
    let m = (n / 2) as u32;
    Rational::from((factorial(2 * m), factorial(m) << m))
}

/// `∫ φ^n w(φ) e^{-φ²/2 - λV(φ)} dφ / √(2π)` over ℝ, as a sum of the
/// integrand at `±φ` on `[0, Φ]` where the tail is below the tolerance.
fn weighted_moment(v: &Potential, n: usize, weight: Option<&Poly<Rational>>, lambda: &AppComplex, tol: f64) -> Result<(AppComplex, f64)> {
    if lambda.real().is_sign_negative() && !lambda.real().is_zero() {
        return Err(Error::DivergentDomain(format!("Re λ = {} < 0", lambda.real().to_f64())));
    }
    let prec = working_precision();
    let vc: Vec<Float> = v.coeffs.iter().map(|c| Float::with_val(prec, c)).collect();
    let wc: Vec<Float> = weight.map(|w| w.coeffs().iter().map(|c| Float::with_val(prec, c)).collect()).unwrap_or_default();
    let horner = |cs: &[Float], x: &Float| {
        let mut acc = Float::new(prec);
        for c in cs.iter().rev() {
            acc = Float::with_val(prec, &acc * x) + c;
        }
        acc
    };
    let lam = Complex::with_val(prec, lambda);
    let one_side = |phi: &Float| -> Complex {
        let vv = horner(&vc, phi);
        let gauss = Float::with_val(prec, phi.square_ref()) / 2u32;
        let expo = Complex::with_val(prec, &lam * &vv) + &gauss;
        let mut val = Complex::with_val(prec, -expo).exp();
        val *= Float::with_val(prec, phi.pow(n as u32));
        if weight.is_some() {
            val *= horner(&wc, phi);
        }
        val
    };
    let symmetric = v.is_even() && weight.is_none_or(|w| w.coeffs().iter().skip(1).step_by(2).all(|c| *c == 0));
    let integrand = |phi: &Float| -> Complex {
        if symmetric {
            if n % 2 == 1 {
                return Complex::new(prec);
            }
            Complex::with_val(prec, one_side(phi) * 2u32)
        } else {
            let m = Float::with_val(prec, -phi);
            Complex::with_val(prec, one_side(phi) + one_side(&m))
        }
    };

    // |integrand| = |φ|^n |w| e^{-φ²/2 - Re λ·V}; find Φ beyond which it is negligible
    let vf = |x: f64| v.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64());
    let wf = |x: f64| weight.map(|w| w.coeffs().iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64()).abs()).unwrap_or(1.0);
    let lre = lambda.real().to_f64();
    let side = |x: f64| (n as f64) * x.abs().ln() + wf(x).max(1e-300).ln() - x * x / 2.0 - lre * vf(x);
    let log_bound = |x: f64| side(x).max(side(-x));
    let target = (tol * 1e-3).ln();
    let mut phi_max: f64 = 4.0;
    while (log_bound(phi_max) > target || log_bound(phi_max + 1.0) > target) && phi_max < 1e4 {
        phi_max += 0.5;
    }
    let tail = (log_bound(phi_max)).exp() * 2.0 / phi_max.max(1.0);

    let sqrt_2pi = Float::with_val(prec, Float::with_val(prec, Constant::Pi) * 2u32).sqrt();
    let r = quad::integrate(
        &integrand,
        &Float::with_val(prec, 0),
        &Float::with_val(prec, phi_max),
        &Float::with_val(prec, tol / 4.0),
        prec,
        12,
    );
    let error = (r.error / &sqrt_2pi).to_f64() + tail;
    if error > tol {
        return Err(Error::Quadrature(format!("moment quadrature error {error:.3e} exceeds tolerance {tol:.3e}")));
    }
    Ok((Complex::with_val(prec, r.value / &sqrt_2pi), error))
}

/// `Z_{2j}(λ) = ∫ φ^{2j} e^{-φ²/2 - λV(φ)} dφ/√(2π)` by double-exponential
/// quadrature, for `Re λ ≥ 0`.
pub fn quad_moment(v: &Potential, j: usize, lambda: &AppComplex, tol: f64) -> Result<MomentValue> {
    let (value, error) = weighted_moment(v, 2 * j, None, lambda, tol)?;
    Ok(MomentValue { j, lambda: lambda.clone(), value, error })
}

/// `Z_n(λ)` with the weight `φ^n` (odd `n` allowed).
pub fn moment(v: &Potential, n: usize, lambda: &AppComplex, tol: f64) -> Result<(AppComplex, f64)> {
    weighted_moment(v, n, None, lambda, tol)
}

/// Exact coefficients `α_0 … α_N` of the asymptotic expansion of
/// `Z_{2j}(λ)`: `α_n = (-1)^n/n! · ⟨φ^{2j} V^n⟩`.
pub fn asymptotic_coeffs(v: &Potential, j: usize, n: usize) -> Vec<Rational> {
    let vp = v.as_poly();
    let mut power = Poly::constant(Rational::from(1));
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m > 0 {
            power = power.mul(&vp);
        }
        let mut s = Rational::new();
        for (i, c) in power.coeffs().iter().enumerate() {
            if *c != 0 {
                s += c * gaussian_moment(2 * j + i);
            }
        }
        s /= Rational::from(factorial(m as u32));
        if m % 2 == 1 {
            s = -s;
        }
        out.push(s);
    }
    out
}

/// Residuals of the governing relations at one index `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GoverningRow {
    pub j: usize,
    /// `|Z'_j + Σ v_i Z_{j+i}|` with `Z'_j` from the `-V`-weighted integral.
    pub rec1_weighted: f64,
    /// Same with `Z'_j` from a Richardson-extrapolated central difference.
    pub rec1_difference: f64,
    /// `|(j+1) Z_j - Z_{j+2} - λ Σ i v_i Z_{i+j}|`.
    pub rec2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoverningReport {
    pub lambda: f64,
    pub tol: f64,
    pub rows: Vec<GoverningRow>,
    pub max_residual: f64,
}

/// Checks `Z'_j = -Σ v_i Z_{j+i}` and `(j+1) Z_j = Z_{j+2} + λ Σ i v_i Z_{i+j}`
/// for `j = 0..=j_max` by quadrature at real `λ > 0` (here `Z_n` carries
/// the weight `φ^n`).
pub fn verify_governing(v: &Potential, j_max: usize, lambda: f64, tol: f64) -> Result<GoverningReport> {
    if lambda <= 0.0 {
        return Err(Error::Domain(format!("verify_governing needs λ > 0, got {lambda}")));
    }
    let prec = working_precision();
    let lam = Complex::with_val(prec, (lambda, 0));
    let deg = v.degree();
    let mut z = Vec::new();
    for n in 0..=j_max + deg + 2 {
        z.push(moment(v, n, &lam, tol)?.0);
    }
    // the difference quotient needs much tighter moments than the target
    let h = 1e-4;
    let fine = (tol * 1e-14).max(1e-60);
    let neg_v = v.as_poly().neg();
    let mut rows = Vec::new();
    for j in 0..=j_max {
        let mut sum = Complex::new(prec);
        for (i, c) in v.coeffs.iter().enumerate() {
            if *c != 0 {
                sum += Complex::with_val(prec, &z[j + i] * Float::with_val(prec, c));
            }
        }
        let (dw, _) = weighted_moment(v, j, Some(&neg_v), &lam, tol)?;
        let central = |step: f64| -> Result<Complex> {
            let up = Complex::with_val(prec, (lambda + step, 0));
            let down = Complex::with_val(prec, (lambda - step, 0));
            let (a, _) = moment(v, j, &up, fine)?;
            let (b, _) = moment(v, j, &down, fine)?;
            Ok(Complex::with_val(prec, a - b) / (2.0 * step))
        };
        let d1 = central(h)?;
        let d2 = central(h / 2.0)?;
        let dfd = Complex::with_val(prec, Complex::with_val(prec, &d2 * 4u32) - &d1) / 3u32;
        let rec1_weighted = cabs(&Complex::with_val(prec, &dw + &sum)).to_f64();
        let rec1_difference = cabs(&Complex::with_val(prec, &dfd + &sum)).to_f64();

        let mut rhs = z[j + 2].clone();
        for (i, c) in v.coeffs.iter().enumerate() {
            if *c != 0 && i > 0 {
                let t = Float::with_val(prec, c * Rational::from(i as u32)) * lambda;
                rhs += Complex::with_val(prec, &z[i + j] * t);
            }
        }
        let lhs = Complex::with_val(prec, &z[j] * (j as u32 + 1));
        let rec2 = cabs(&Complex::with_val(prec, lhs - rhs)).to_f64();
        rows.push(GoverningRow { j, rec1_weighted, rec1_difference, rec2 });
    }
    let max_residual = rows.iter().map(|r| r.rec1_weighted.max(r.rec1_difference).max(r.rec2)).fold(0.0, f64::max);
    Ok(GoverningReport { lambda, tol, rows, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> AppComplex {
        Complex::with_val(256, (x, 0))
    }

    fn re(m: &MomentValue) -> f64 {
        m.value.real().to_f64()
    }

    #[test]
    fn gaussian_values() {
        let v = Potential::monomial(2);
        assert!((re(&quad_moment(&v, 0, &c(0.0), 1e-12).unwrap()) - 1.0).abs() < 1e-12);
        assert!((re(&quad_moment(&v, 2, &c(0.0), 1e-12).unwrap()) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_potential_closed_form() {
        let v = Potential::monomial(1);
        let m = quad_moment(&v, 0, &c(0.5), 1e-14).unwrap();
        assert!((re(&m) - 0.5f64.sqrt()).abs() < 1e-14);
        assert!(m.error <= 1e-14);
    }

    #[test]
    fn negative_lambda_is_rejected() {
        let v = Potential::monomial(2);
        assert_eq!(quad_moment(&v, 0, &c(-0.1), 1e-10).unwrap_err().kind(), "divergent-domain");
    }

    #[test]
    fn odd_moments_vanish() {
        let v = Potential::monomial(2);
        let (z, _) = moment(&v, 3, &c(0.2), 1e-12).unwrap();
        assert!(cabs(&z).to_f64() < 1e-30);
    }

    #[test]
    fn asymptotic_coefficient_values() {
        let a = asymptotic_coeffs(&Potential::monomial(2), 0, 2);
        assert_eq!(a, vec![Rational::from(1), Rational::from(-3), Rational::from((105, 2))]);
        assert_eq!(asymptotic_coeffs(&Potential::monomial(3), 0, 1)[1], -15);
        let general = Potential::new(vec![Rational::from(1), Rational::from(0), Rational::from(2), Rational::from(0), Rational::from(1)]).unwrap();
        assert_eq!(asymptotic_coeffs(&general, 0, 0)[0], 1);
    }

    #[test]
    fn closed_form_for_monomials() {
        for k in 2..=4u32 {
            let a = asymptotic_coeffs(&Potential::monomial(k as usize), 0, 12);
            for (n, an) in a.iter().enumerate() {
                let n = n as u32;
                let mut expect = Rational::from((factorial(2 * k * n), (factorial(n) * factorial(k * n)) << (k * n)));
                if n % 2 == 1 {
                    expect = -expect;
                }
                assert_eq!(*an, expect);
            }
        }
    }

    #[test]
    fn governing_relations_hold() {
        let v = Potential::monomial(2);
        let rep = verify_governing(&v, 1, 0.1, 1e-10).unwrap();
        assert!(rep.max_residual < 1e-8, "{rep:?}");
    }

    #[test]
    fn potential_json_round_trip() {
        let v = Potential::from_json(&serde_json::json!(["0", "0", "1/2", "0", "3"])).unwrap();
        assert_eq!(v.k(), 2);
        assert_eq!(Potential::from_json(&v.to_json()).unwrap(), v);
        assert!(Potential::from_json(&serde_json::json!(["1", "1"])).is_err());
        assert!(Potential::from_json(&serde_json::json!(["1", "0", "-1"])).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn moments_decrease_in_lambda(a in 0.0f64..1.0, d in 0.01f64..0.5) {
            let v = Potential::monomial(2);
            let lo = re(&quad_moment(&v, 1, &c(a), 1e-10).unwrap());
            let hi = re(&quad_moment(&v, 1, &c(a + d), 1e-10).unwrap());
            prop_assert!(hi < lo);
        }

        #[test]
        fn alternating_signs(k in 2usize..5) {
            for (n, a) in asymptotic_coeffs(&Potential::monomial(k), 0, 15).iter().enumerate() {
                prop_assert_eq!(a.cmp0(), if n % 2 == 0 { std::cmp::Ordering::Greater } else { std::cmp::Ordering::Less });
            }
        }
    }
}
