use rug::float::Round;
use rug::{Complex, Float, Integer, Rational};

use super::{working_precision, Field, Ring, Scalar};

/// Arbitrary-precision complex number (MPC). Binary operations return a value
/// at the larger of the two operand precisions.
pub type AppComplex = Complex;

fn prec_of(c: &Complex) -> u32 {
    let (re, im) = c.prec();
    re.max(im)
}

fn prec2(a: &Complex, b: &Complex) -> u32 {
    prec_of(a).max(prec_of(b))
}

impl Ring for Complex {
    fn zero() -> Self {
        Complex::new(working_precision())
    }
    fn one() -> Self {
        Complex::with_val(working_precision(), 1)
    }
    fn is_zero(&self) -> bool {
        self.real().is_zero() && self.imag().is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        Complex::with_val(prec2(self, other), self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Complex::with_val(prec2(self, other), self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Complex::with_val(prec2(self, other), self * other)
    }
    fn neg(&self) -> Self {
        Complex::with_val(prec_of(self), -self)
    }
    fn from_rational(q: &Rational) -> Self {
        complex_from_rational(q, working_precision())
    }
}

impl Field for Complex {
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(Complex::with_val(prec_of(self), self.recip_ref()))
        }
    }
}

impl Scalar for Complex {
    fn to_complex(&self, prec: u32) -> AppComplex {
        Complex::with_val(prec.max(prec_of(self)), self)
    }

    fn recognize_rational(&self) -> Option<Rational> {
        let prec = prec_of(self);
        let tol = Float::with_val(prec, Float::u_exp(1, -((prec / 2) as i32)));
        let scale = Float::with_val(prec, self.real().abs_ref()).max(&Float::with_val(prec, 1));
        if Float::with_val(prec, self.imag().abs_ref()) > Float::with_val(prec, &tol * &scale) {
            return None;
        }
        rationalize(self.real(), &Float::with_val(prec, &tol * &scale))
    }

    fn is_exact() -> bool {
        false
    }

    fn is_negligible(&self, scale: &AppComplex) -> bool {
        let prec = prec_of(self);
        let bound = Float::with_val(prec, cabs(scale) * Float::with_val(prec, Float::u_exp(1, -((prec * 3 / 4) as i32))));
        cabs(self) <= bound
    }
}

pub fn complex_from_rational(q: &Rational, prec: u32) -> AppComplex {
    Complex::with_val(prec, (Float::with_val(prec, q), 0))
}

pub fn complex_from_f64(re: f64, im: f64, prec: u32) -> AppComplex {
    Complex::with_val(prec, (re, im))
}

pub fn complex_to_f64(c: &AppComplex) -> (f64, f64) {
    (c.real().to_f64(), c.imag().to_f64())
}

pub fn cabs(c: &AppComplex) -> Float {
    Float::with_val(prec_of(c), c.abs_ref())
}

pub fn carg(c: &AppComplex) -> Float {
    Float::with_val(prec_of(c), c.arg_ref())
}

/// Best rational approximation of `x` with denominator at most 10^6 whose
/// error is below `tol`, found from the continued-fraction convergents.
pub fn rationalize(x: &Float, tol: &Float) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let prec = x.prec();
    let max_den = Integer::from(1_000_000);
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut rest = Float::with_val(prec, x);
    for _ in 0..64 {
        let a = rest.to_integer_round(Round::Down).map(|(i, _)| i)?;
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        if k2 > max_den {
            return None;
        }
        let cand = Rational::from((h2.clone(), k2.clone()));
        let err = Float::with_val(prec, x - &cand).abs();
        if err <= *tol {
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
