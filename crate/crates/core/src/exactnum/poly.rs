use std::fmt;

use super::{Field, Rational, Ring};

/// Dense univariate polynomial `c_0 + c_1 u + ... + c_d u^d` over a ring.
///
/// Trailing zero coefficients are always trimmed, so the zero polynomial has
/// an empty coefficient vector and `degree() == None`.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<R> {
    coeffs: Vec<R>,
}

/// Polynomials in the twist symbol `u` with exact rational coefficients.
pub type PolynomialInU = Poly<Rational>;

impl<R: Ring> Poly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Poly::new(vec![c])
    }

    /// The symbol `u` itself.
    pub fn var() -> Self {
        Poly::new(vec![R::zero(), R::one()])
    }

    pub fn monomial(c: R, degree: usize) -> Self {
        let mut coeffs = vec![R::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| R::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero)
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    /// Multiplicity of the root `u = 0`.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &R) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Divides by `u^k`; the caller guarantees the low coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Self {
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn eval(&self, at: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc.mul(at).add(c))
    }

    /// Horner evaluation in another ring through a coefficient embedding.
    pub fn eval_with<S: Ring>(&self, at: &S, embed: impl Fn(&R) -> S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc.mul(at).add(&embed(c)))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul(&R::from_int(i as i64)))
                .collect(),
        )
    }
}

impl<R: Field> Poly<R> {
    /// Euclidean division; `None` when dividing by zero.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree()?;
        let lead_inv = divisor.leading()?.inv()?;
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n <= dd {
            return Some((Poly::new(vec![]), self.clone()));
        }
        let mut quot = vec![R::zero(); n - dd];
        for i in (0..n - dd).rev() {
            let c = rem[i + dd].mul(&lead_inv);
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] = rem[i + j].sub(&c.mul(d));
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Some((Poly::new(quot), Poly::new(rem)))
    }

    pub fn monic(&self) -> Self {
        match self.leading().and_then(|l| l.inv()) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while b.degree().is_some() {
            let r = a.div_rem(&b).map(|(_, r)| r).unwrap_or_else(|| Poly::new(vec![]));
            a = b;
            b = r;
        }
        a.monic()
    }

    /// True when the polynomial has no repeated root.
    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree().unwrap_or(0) == 0
    }

    /// Resultant of two polynomials by the Euclidean recursion.
    pub fn resultant(&self, other: &Self) -> R {
        let (Some(da), Some(db)) = (self.degree(), other.degree()) else {
            return R::zero();
        };
        if db == 0 {
            return other.coeff(0).pow(da as u32);
        }
        if da == 0 {
            return self.coeff(0).pow(db as u32);
        }
        let (_, r) = self.div_rem(other).expect("nonzero divisor");
        let sign = if da % 2 == 1 && db % 2 == 1 { R::from_int(-1) } else { R::one() };
        match r.degree() {
            None => R::zero(),
            Some(dr) => {
                let lb = other.leading().expect("nonzero").pow((da - dr) as u32);
                sign.mul(&lb).mul(&other.resultant(&r))
            }
        }
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero() -> Self {
        Poly { coeffs: vec![] }
    }
    fn one() -> Self {
        Poly::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect())
    }
    fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(out)
    }
    fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }
    fn from_rational(q: &Rational) -> Self {
        Poly::constant(R::from_rational(q))
    }
}

impl<R: Ring> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*u")?,
                _ => write!(f, "({c})*u^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(cs: &[i64]) -> PolynomialInU {
        Poly::from_ints(cs)
    }

    #[test]
    fn trims_and_degrees() {
        let p = q(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(q(&[0, 0]).degree(), None);
        assert_eq!(q(&[0, 0, 3]).valuation(), Some(2));
    }

    #[test]
    fn division_and_gcd() {
        // (u-1)(u+2) / (u-1)
        let a = q(&[-2, 1, 1]);
        let b = q(&[-1, 1]);
        let (qt, r) = a.div_rem(&b).unwrap();
        assert_eq!(qt, q(&[2, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&q(&[1, 1]).mul(&b)), b);
        assert!(a.is_squarefree());
        assert!(!b.mul(&b).is_squarefree());
    }

    #[test]
    fn resultant_detects_common_roots() {
        let a = q(&[-2, 1, 1]); // roots 1, -2
        assert!(a.resultant(&q(&[-1, 1])).is_zero());
        // res(u^2 - 2, u - 1) = (1)^2 - 2 = -1
        assert_eq!(q(&[-2, 0, 1]).resultant(&q(&[-1, 1])), Rational::from(-1));
    }

    #[test]
    fn eval_with_embedding() {
        let p = q(&[1, 0, 3]);
        assert_eq!(p.eval(&Rational::from(2)), Rational::from(13));
        let shifted: Poly<Rational> = p.eval_with(&q(&[1, 1]), |c| Poly::constant(c.clone()));
        // 1 + 3(u+1)^2 = 4 + 6u + 3u^2
        assert_eq!(shifted, q(&[4, 6, 3]));
    }
}
