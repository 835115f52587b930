//! The Airy example: `(3θ+2)(3θ+1) Z = q³ λ^{-1} Z` with `λ = ħ²`.

use rug::{Complex, Rational};

use crate::diffop::{borel_transform_op, ThetaOperator};
use crate::error::{Error, Result};
use crate::exactnum::roots::Root;
use crate::exactnum::{cabs, working_precision, AppComplex, LaurentPolynomial, Poly, Ring, Scalar};
use crate::formal::{formal_basis, FormalBasisElement};
use crate::newton::{determining_polynomial, scalar_roots};

/// Borel data of one exponential branch `x^{-1/2} e^{u/x} h̃(x)`.
#[derive(Clone, Debug)]
pub struct AiryBranch {
    pub u: Root,
    /// Borel transform of the operator annihilating `h̃`, in `ζ`.
    pub borel_operator: String,
    /// Coefficients of the leading `(d/dζ)²` coefficient, lowest first.
    pub leading: Vec<AppComplex>,
    pub leading_exact: Option<Vec<Rational>>,
    /// Zeros of the leading coefficient.
    pub leading_zeros: Vec<Root>,
}

#[derive(Clone, Debug)]
pub struct AiryModel<R> {
    pub q: R,
    /// In `λ = ħ²`.
    pub operator_lambda: ThetaOperator<R>,
    /// In `x = ħ`.
    pub operator_x: ThetaOperator<R>,
    /// Root nearest `(2/3)q^{3/2}` on the principal branch.
    pub u_plus: Root,
    pub u_minus: Root,
    pub beta: Rational,
    /// `x^{-1/2} h̃_±` for `u_+` then `u_-`.
    pub basis: Vec<FormalBasisElement>,
    pub branches: Vec<AiryBranch>,
}

/// `(2/3) q^{3/2}` on the principal branch of the square root.
pub fn principal_u(q: &AppComplex) -> AppComplex {
    let prec = working_precision();
    let log = Complex::with_val(prec, q.ln_ref());
    let three_halves = Complex::with_val(prec, log * 1.5f64).exp();
    Complex::with_val(prec, three_halves * 2u32) / 3u32
}

fn branch<R: Scalar>(op_x: &ThetaOperator<R>, u: &Root, beta: &Rational) -> Result<AiryBranch> {
    let prec = working_precision();
    let twisted = op_x.twist(&Rational::from(1))?;
    let (borel_operator, leading, leading_exact, leading_zeros) = match (&u.exact, R::is_exact()) {
        (Some(ue), true) => {
            let op = twisted.specialize(&R::from_rational(ue)).conjugate_power(beta);
            let b = borel_transform_op(&op)?;
            let lead = leading_poly(&b.d_form());
            let exact: Option<Vec<Rational>> = lead.coeffs().iter().map(|c| c.recognize_rational()).collect();
            let zeros = scalar_roots(&lead, prec)?;
            (b.operator.to_string(), lead.coeffs().iter().map(|c| c.to_complex(prec)).collect(), exact, zeros)
        }
        _ => {
            let cop: ThetaOperator<AppComplex> = op_x.map_coeffs(|c| c.to_complex(prec));
            let op = cop.twist(&Rational::from(1))?.specialize(&u.value).conjugate_power(beta);
            let b = borel_transform_op(&op)?;
            let lead = leading_poly(&b.d_form());
            let zeros = scalar_roots(&lead, prec)?;
            (b.operator.to_string(), lead.coeffs().to_vec(), None, zeros)
        }
    };
    Ok(AiryBranch { u: u.clone(), borel_operator, leading, leading_exact, leading_zeros })
}

fn leading_poly<R: Ring>(d_form: &[LaurentPolynomial<R>]) -> Poly<R> {
    let top = d_form.last().cloned().unwrap_or_else(LaurentPolynomial::zero);
    let deg = top.degree().unwrap_or(0).max(0) as usize;
    let mut cs = vec![R::zero(); deg + 1];
    for (p, c) in top.terms() {
        cs[p as usize] = c.clone();
    }
    Poly::new(cs)
}

fn build<R: Scalar>(q: R, order: usize) -> Result<AiryModel<R>> {
    if q.is_zero() {
        return Err(Error::Degenerate("q = 0 changes the Newton polygon; the Airy model needs q ≠ 0".into()));
    }
    let prec = working_precision();
    let q3 = q.mul(&q).mul(&q);
    let three = R::from_int(3);
    let operator_lambda = ThetaOperator::theta_product(&[(three.clone(), R::from_int(2)), (three, R::from_int(1))], "lambda")
        .sub(&ThetaOperator::multiplication(q3, -1, "lambda"));
    let operator_x = operator_lambda.ramify(2).scale(&R::from_int(4)).with_var("x");
    let det = determining_polynomial(&operator_x, &Rational::from(1))?;
    if det.nonzero_roots.len() != 2 {
        return Err(Error::Shape(format!("expected two exponential branches, found {}", det.nonzero_roots.len())));
    }
    let target = principal_u(&q.to_complex(prec));
    let dist = |r: &Root| cabs(&Complex::with_val(prec, &r.value - &target)).to_f64();
    let (u_plus, u_minus) = if dist(&det.nonzero_roots[0]) <= dist(&det.nonzero_roots[1]) {
        (det.nonzero_roots[0].clone(), det.nonzero_roots[1].clone())
    } else {
        (det.nonzero_roots[1].clone(), det.nonzero_roots[0].clone())
    };
    let mut basis = formal_basis(&operator_x, order)?;
    basis.sort_by_key(|e| if e.u.value == u_plus.value { 0 } else { 1 });
    let beta = basis[0].beta.clone();
    if basis.iter().any(|e| e.beta != beta) {
        return Err(Error::Shape("the two branches have different leading exponents".into()));
    }
    let branches = vec![branch(&operator_x, &u_plus, &beta)?, branch(&operator_x, &u_minus, &beta)?];
    Ok(AiryModel { q, operator_lambda, operator_x, u_plus, u_minus, beta, basis, branches })
}

/// Airy model at a complex coordinate `q ≠ 0`.
pub fn build_airy(q: &AppComplex, order: usize) -> Result<AiryModel<AppComplex>> {
    build(q.clone(), order)
}

/// Airy model at a rational `q ≠ 0`; roots and Borel data are exact when
/// `q³` is a rational square.
pub fn build_airy_exact(q: &Rational, order: usize) -> Result<AiryModel<Rational>> {
    build(q.clone(), order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::PowerSeries;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn unit_q() {
        let m = build_airy_exact(&r(1, 1), 12).unwrap();
        assert_eq!(m.u_plus.exact, Some(r(2, 3)));
        assert_eq!(m.u_minus.exact, Some(r(-2, 3)));
        assert_eq!(m.beta, r(-1, 2));
        let b = &m.branches[0];
        assert_eq!(b.leading_exact.as_ref().unwrap(), &vec![r(0, 1), r(-12, 1), r(9, 1)]);
        let mut zeros: Vec<Rational> = b.leading_zeros.iter().map(|z| z.exact.clone().unwrap()).collect();
        zeros.sort();
        assert_eq!(zeros, vec![r(0, 1), r(4, 3)]);
    }

    #[test]
    fn zero_q_is_degenerate() {
        assert_eq!(build_airy_exact(&r(0, 1), 5).unwrap_err().kind(), "degenerate");
    }

    #[test]
    fn complex_q_uses_principal_branch() {
        let q = Complex::with_val(256, (0.3, 1.1));
        let m = build_airy(&q, 10).unwrap();
        let target = principal_u(&q);
        assert!(cabs(&Complex::with_val(256, &m.u_plus.value - &target)).to_f64() < 1e-60);
        assert_eq!(m.beta, r(-1, 2));
        for b in &m.branches {
            let two_u = Complex::with_val(256, &b.u.value * 2u32);
            let hit = b.leading_zeros.iter().any(|z| cabs(&Complex::with_val(256, &z.value - &two_u)).to_f64() < 1e-50);
            assert!(hit);
        }
    }

    #[test]
    fn twisted_operator_annihilates_branch_series() {
        let m = build_airy_exact(&r(4, 1), 15).unwrap();
        assert_eq!(m.u_plus.exact, Some(r(16, 3)));
        for e in &m.basis {
            let u = e.u.exact.clone().unwrap();
            let op = m.operator_x.twist(&Rational::from(1)).unwrap().specialize(&u);
            let s: &PowerSeries<Rational> = e.series.as_exact().unwrap();
            let res = op.apply(s);
            assert!(res.coeffs().iter().all(|c| *c == 0));
        }
    }
}
