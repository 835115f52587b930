use std::collections::BTreeMap;
use std::fmt;

use super::{Rational, Ring};

/// Finite Laurent polynomial `Σ c_p x^p`, `p ∈ ℤ`, stored sparsely.
///
/// Zero coefficients are never stored, so equality is structural.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentPolynomial<R> {
    terms: BTreeMap<i64, R>,
}

impl<R: Ring> LaurentPolynomial<R> {
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, R)>) -> Self {
        let mut out = Self::zero();
        for (p, c) in terms {
            out.add_term(p, &c);
        }
        out
    }

    pub fn monomial(c: R, p: i64) -> Self {
        Self::from_terms([(p, c)])
    }

    /// `x^p` with unit coefficient.
    pub fn x_pow(p: i64) -> Self {
        Self::monomial(R::one(), p)
    }

    pub fn constant(c: R) -> Self {
        Self::monomial(c, 0)
    }

    pub fn add_term(&mut self, p: i64, c: &R) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&p) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        if sum.is_zero() {
            self.terms.remove(&p);
        } else {
            self.terms.insert(p, sum);
        }
    }

    pub fn coeff(&self, p: i64) -> R {
        self.terms.get(&p).cloned().unwrap_or_else(R::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &R)> {
        self.terms.iter().map(|(&p, c)| (p, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest exponent present.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Highest exponent present.
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_terms(self.terms.iter().map(|(&p, a)| (p, a.mul(c))))
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPolynomial { terms: self.terms.iter().map(|(&p, c)| (p + k, c.clone())).collect() }
    }

    /// Substitutes `x ↦ x^r` (r may be negative).
    pub fn substitute_power(&self, r: i64) -> Self {
        assert!(r != 0, "x -> x^0 is not invertible");
        LaurentPolynomial { terms: self.terms.iter().map(|(&p, c)| (p * r, c.clone())).collect() }
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> LaurentPolynomial<S> {
        LaurentPolynomial::from_terms(self.terms.iter().map(|(&p, c)| (p, f(c))))
    }

    /// Removes terms for which `keep` is false.
    pub fn filter(&self, keep: impl Fn(i64, &R) -> bool) -> Self {
        LaurentPolynomial {
            terms: self.terms.iter().filter(|(&p, c)| keep(p, c)).map(|(&p, c)| (p, c.clone())).collect(),
        }
    }

    pub fn fmt_in(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&p, c)| match p {
                0 => format!("{c}"),
                1 => format!("{c}*{var}"),
                _ => format!("{c}*{var}^{p}"),
            })
            .collect();
        parts.join(" + ")
    }
}

impl<R: Ring> Ring for LaurentPolynomial<R> {
    fn zero() -> Self {
        LaurentPolynomial { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        Self::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&p, c) in &other.terms {
            out.add_term(p, c);
        }
        out
    }
    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&p, c) in &other.terms {
            out.add_term(p, &c.neg());
        }
        out
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&p, a) in &self.terms {
            for (&q, b) in &other.terms {
                out.add_term(p + q, &a.mul(b));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        LaurentPolynomial { terms: self.terms.iter().map(|(&p, c)| (p, c.neg())).collect() }
    }
    fn from_rational(q: &Rational) -> Self {
        Self::constant(R::from_rational(q))
    }
}

impl<R: Ring> fmt::Display for LaurentPolynomial<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_in("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Lq = LaurentPolynomial<Rational>;

    fn lp(terms: &[(i64, i64)]) -> Lq {
        Lq::from_terms(terms.iter().map(|&(p, c)| (p, Rational::from(c))))
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(lp(&[(0, 1), (1, 1)]).mul(&lp(&[(0, 1), (1, -1)])), lp(&[(0, 1), (2, -1)]));
    }

    #[test]
    fn inverse_exponents_cancel() {
        assert_eq!(lp(&[(-1, 1)]).mul(&lp(&[(1, 1)])), Lq::one());
    }

    #[test]
    fn distributes_over_h2_coefficient() {
        assert_eq!(lp(&[(0, 16), (-1, 1)]).mul(&lp(&[(1, 1)])), lp(&[(1, 16), (0, 1)]));
    }

    #[test]
    fn zero_terms_are_dropped() {
        let a = lp(&[(3, 2)]).sub(&lp(&[(3, 2)]));
        assert!(a.is_zero());
        assert_eq!(a.valuation(), None);
        let b = lp(&[(-2, 1), (5, 3)]);
        assert_eq!((b.valuation(), b.degree()), (Some(-2), Some(5)));
    }

    fn arb_lp() -> impl Strategy<Value = Lq> {
        prop::collection::vec((-4i64..5, -20i64..20, 1i64..6), 0..5).prop_map(|ts| {
            Lq::from_terms(ts.into_iter().map(|(p, n, d)| (p, Rational::from((n, d)))))
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_lp(), b in arb_lp(), c in arb_lp()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert!(a.sub(&a).is_zero());
        }
    }
}
