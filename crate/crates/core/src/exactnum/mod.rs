//! Exact and high-precision scalar arithmetic.
//!
//! Three coefficient rings are used throughout the crate:
//!
//! - [`Rational`]: exact arbitrary-precision fractions (GMP).
//! - [`Poly<R>`]: polynomials in a formal symbol `u` over another ring; the
//!   twisted operators `e^{-u/x^q} H e^{u/x^q}` live here.
//! - [`AppComplex`]: MPFR/MPC complex numbers at a configurable precision,
//!   used once irrational roots are substituted for `u`.
//!
//! Operators, Laurent polynomials and series are generic over [`Ring`], so
//! mixing rings is a type error rather than a runtime one.

mod complex;
mod laurent;
mod poly;
pub mod roots;
mod series;

use std::cell::Cell;
use std::fmt;

pub use complex::{
    cabs, carg, complex_from_f64, complex_from_rational, complex_to_f64, rationalize, AppComplex,
};
pub use laurent::LaurentPolynomial;
pub use poly::{Poly, PolynomialInU};
pub use rug::{Integer, Rational};
pub use series::{series_exp, series_log, PowerSeries};

/// Default working precision in bits for every big-complex computation.
pub const DEFAULT_PRECISION: u32 = 256;
/// Lowest precision accepted for [`AppComplex`] values.
pub const MIN_PRECISION: u32 = 64;

thread_local! {
    static WORKING_PRECISION: Cell<u32> = const { Cell::new(DEFAULT_PRECISION) };
}

/// Precision used when a ring constant has to be created from nothing
/// (`zero()`, `one()`, `from_rational`) in the complex ring.
pub fn working_precision() -> u32 {
    WORKING_PRECISION.with(|p| p.get())
}

/// Runs `f` with the working precision set to `bits` on the current thread.
///
/// Values created inside keep their precision after the call returns; only the
/// default used for new constants is scoped.
pub fn with_precision<T>(bits: u32, f: impl FnOnce() -> T) -> T {
    let bits = bits.max(MIN_PRECISION);
    let old = WORKING_PRECISION.with(|p| p.replace(bits));
    struct Restore(u32);
    impl Drop for Restore {
        fn drop(&mut self) {
            WORKING_PRECISION.with(|p| p.set(self.0));
        }
    }
    let _restore = Restore(old);
    f()
}

/// Commutative ring with identity.
///
/// Method names mirror the arithmetic they perform; every method is pure.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Image of a rational number under the canonical map `Q -> R`.
    fn from_rational(q: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from(n))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// A ring in which every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }
}

/// Scalars that can be evaluated numerically: the two fields the analysis
/// pipeline runs over.
pub trait Scalar: Field {
    fn to_complex(&self, prec: u32) -> AppComplex;

    /// Exact rational value when the element is (or is recognizably) rational.
    ///
    /// Exact for [`Rational`]; for complex values a continued-fraction
    /// recognition with small denominators is attempted.
    fn recognize_rational(&self) -> Option<Rational>;

    /// Whether this ring represents values exactly.
    fn is_exact() -> bool;

    /// Numerical zero test used after substituting approximate roots.
    fn is_negligible(&self, scale: &AppComplex) -> bool;
}

impl Ring for Rational {
    fn zero() -> Self {
        Rational::new()
    }
    fn one() -> Self {
        Rational::from(1)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
}

impl Field for Rational {
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(Rational::from(self.recip_ref()))
        }
    }
}

impl Scalar for Rational {
    fn to_complex(&self, prec: u32) -> AppComplex {
        complex_from_rational(self, prec)
    }
    fn recognize_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn is_exact() -> bool {
        true
    }
    fn is_negligible(&self, _scale: &AppComplex) -> bool {
        Ring::is_zero(self)
    }
}

/// Parses `p`, `p/q`, or a finite decimal such as `-0.125` or `1e-3` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(r) = s.parse::<Rational>() {
        return Some(r);
    }
    // decimal / scientific notation, converted exactly
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let num = if all.is_empty() { Integer::new() } else { all.parse::<Integer>().ok()? };
    let scale = exp - frac_part.len() as i32;
    let mut r = Rational::from(num * sign);
    if scale >= 0 {
        r *= Integer::from(Integer::u_pow_u(10, scale as u32));
    } else {
        r /= Integer::from(Integer::u_pow_u(10, (-scale) as u32));
    }
    Some(r)
}

/// `p/q` string (or `p` when the denominator is one).
pub fn rational_string(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

pub fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}
