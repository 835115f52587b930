//! Linear differential operators `Σ_i H_i(x) θ^i`, `θ = x d/dx`, with
//! Laurent-polynomial coefficients.

mod borel;
mod parse;
mod touchard;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exactnum::{rational_string, LaurentPolynomial, Poly, PowerSeries, Rational, Ring};

pub use borel::{borel_transform_op, BorelOperator};
pub use parse::parse_operator;
pub use touchard::{stirling2, touchard, TouchardPolynomial};

/// Operator `Σ_{i=0}^{n} H_i(x) θ^i` in the variable named `var`.
///
/// Trailing zero coefficients are trimmed, so `H_n ≠ 0` unless the operator
/// is zero (no coefficients at all).
#[derive(Clone, PartialEq, Debug)]
pub struct ThetaOperator<R> {
    coeffs: Vec<LaurentPolynomial<R>>,
    var: String,
}

/// `A(θ + s)` for a polynomial `A` in θ.
fn shift_poly<R: Ring>(a: &Poly<R>, s: &R) -> Poly<R> {
    a.eval_with(&Poly::new(vec![s.clone(), R::one()]), |c| Poly::constant(c.clone()))
}

impl<R: Ring> ThetaOperator<R> {
    pub fn new(mut coeffs: Vec<LaurentPolynomial<R>>, var: &str) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ThetaOperator { coeffs, var: var.to_string() }
    }

    pub fn zero(var: &str) -> Self {
        Self::new(vec![], var)
    }

    /// Operator from `(c, p, i)` triples meaning `c·x^p·θ^i`.
    pub fn from_terms(terms: impl IntoIterator<Item = (R, i64, usize)>, var: &str) -> Self {
        let mut coeffs: Vec<LaurentPolynomial<R>> = Vec::new();
        for (c, p, i) in terms {
            if coeffs.len() <= i {
                coeffs.resize(i + 1, LaurentPolynomial::zero());
            }
            coeffs[i].add_term(p, &c);
        }
        Self::new(coeffs, var)
    }

    /// `Σ_p x^p A_p(θ)`: the power-major form of the same operator.
    pub fn from_by_power(parts: &BTreeMap<i64, Poly<R>>, var: &str) -> Self {
        Self::from_terms(
            parts.iter().flat_map(|(&p, a)| {
                a.coeffs().iter().enumerate().map(move |(i, c)| (c.clone(), p, i))
            }),
            var,
        )
    }

    pub fn by_power(&self) -> BTreeMap<i64, Poly<R>> {
        let mut parts: BTreeMap<i64, Vec<R>> = BTreeMap::new();
        let n = self.coeffs.len();
        for (i, h) in self.coeffs.iter().enumerate() {
            for (p, c) in h.terms() {
                parts.entry(p).or_insert_with(|| vec![R::zero(); n])[i] = c.clone();
            }
        }
        parts.into_iter().map(|(p, v)| (p, Poly::new(v))).collect()
    }

    /// `θ` itself.
    pub fn theta(var: &str) -> Self {
        Self::from_terms([(R::one(), 0, 1)], var)
    }

    /// Multiplication by `c·x^p`.
    pub fn multiplication(c: R, p: i64, var: &str) -> Self {
        Self::from_terms([(c, p, 0)], var)
    }

    /// `Π_j (a_j θ + b_j)` with constant coefficients.
    pub fn theta_product(factors: &[(R, R)], var: &str) -> Self {
        let mut acc = Poly::constant(R::one());
        for (a, b) in factors {
            acc = acc.mul(&Poly::new(vec![b.clone(), a.clone()]));
        }
        Self::from_by_power(&BTreeMap::from([(0, acc)]), var)
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn with_var(mut self, var: &str) -> Self {
        self.var = var.to_string();
        self
    }

    pub fn coeffs(&self) -> &[LaurentPolynomial<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> LaurentPolynomial<R> {
        self.coeffs.get(i).cloned().unwrap_or_else(LaurentPolynomial::zero)
    }

    /// Order in θ; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Points `(i, p)` with `x^p θ^i` present.
    pub fn support(&self) -> Vec<(usize, i64)> {
        self.coeffs
            .iter()
            .enumerate()
            .flat_map(|(i, h)| h.terms().map(move |(p, _)| (i, p)))
            .collect()
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> ThetaOperator<S> {
        ThetaOperator::new(self.coeffs.iter().map(|h| h.map(&f)).collect(), &self.var)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect(), &self.var)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&R::from_int(-1)))
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|h| h.scale(c)).collect(), &self.var)
    }

    /// Left multiplication by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(self.coeffs.iter().map(|h| h.shift(k)).collect(), &self.var)
    }

    /// Composition `self ∘ other`, using `θ^i ∘ x^p = x^p (θ + p)^i`.
    pub fn compose(&self, other: &Self) -> Self {
        let a = self.by_power();
        let b = other.by_power();
        let mut out: BTreeMap<i64, Poly<R>> = BTreeMap::new();
        for (&p, ap) in &a {
            for (&q, bq) in &b {
                let term = shift_poly(ap, &R::from_int(q)).mul(bq);
                let slot = out.entry(p + q).or_insert_with(Poly::zero);
                *slot = slot.add(&term);
            }
        }
        Self::from_by_power(&out, &self.var)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::multiplication(R::one(), 0, &self.var);
        for _ in 0..e {
            acc = acc.compose(self);
        }
        acc
    }

    /// `x^{-β} H x^{β}`: every θ becomes `θ + β`.
    pub fn conjugate_power(&self, beta: &Rational) -> Self {
        let b = R::from_rational(beta);
        let parts: BTreeMap<i64, Poly<R>> =
            self.by_power().into_iter().map(|(p, a)| (p, shift_poly(&a, &b))).collect();
        Self::from_by_power(&parts, &self.var)
    }

    /// Rewrites the operator in `t = v^{1/r}`: `θ_v = θ_t / r`, `v^p = t^{rp}`.
    pub fn ramify(&self, r: u32) -> Self {
        assert!(r >= 1, "ramification index must be positive");
        let inv_r = R::from_rational(&Rational::from((1, r as i64)));
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, h)| h.substitute_power(r as i64).scale(&inv_r.pow(i as u32)))
                .collect(),
            &self.var,
        )
    }

    /// Rewrites the operator in `t = 1/x`: `θ_x = −θ_t`, `x^p = t^{−p}`.
    pub fn invert_variable(&self) -> Self {
        let minus = R::from_int(-1);
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, h)| h.substitute_power(-1).scale(&minus.pow(i as u32)))
                .collect(),
            &self.var,
        )
    }

    /// Exponential twist `e^{−u/x^q} H e^{u/x^q}` with `u` a formal symbol.
    ///
    /// Uses `e^{−u/x^q} θ e^{u/x^q} = θ − q·u·x^{−q}`. Only integer `q` keeps
    /// the coefficients Laurent; fractional slopes must be ramified away first.
    pub fn twist(&self, q: &Rational) -> Result<ThetaOperator<Poly<R>>> {
        if *q.denom() != 1 || q.cmp0() != std::cmp::Ordering::Greater {
            return Err(Error::Unsupported(format!(
                "twist needs a positive integer slope, got {}; ramify by its denominator first",
                rational_string(q)
            )));
        }
        let qi = q.numer().to_i64().ok_or_else(|| Error::Unsupported("slope too large".into()))?;
        let lifted: ThetaOperator<Poly<R>> = self.map_coeffs(|c| Poly::constant(c.clone()));
        let u = Poly::<R>::var();
        let step = ThetaOperator::<Poly<R>>::theta(&self.var)
            .add(&ThetaOperator::multiplication(u.scale(&R::from_int(-qi)), -qi, &self.var));
        let mut out = ThetaOperator::zero(&self.var);
        let mut power = ThetaOperator::multiplication(Poly::one(), 0, &self.var);
        for (i, h) in lifted.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.compose(&step);
            }
            let hmul = ThetaOperator::new(vec![h.clone()], &self.var);
            out = out.add(&hmul.compose(&power));
        }
        Ok(out)
    }

    /// Image `Σ H_i θ^i f` of a ramified series.
    ///
    /// The result is aligned at `β + p_min` (lowest exponent of the
    /// coefficients) and keeps the input length: exactly the terms fully
    /// determined by the truncated input.
    pub fn apply(&self, f: &PowerSeries<R>) -> PowerSeries<R> {
        let r = f.ramification() as i64;
        let n = f.order();
        let Some(pmin) = self.coeffs.iter().filter_map(|h| h.valuation()).min() else {
            return PowerSeries::new(f.beta().clone(), f.ramification(), vec![R::zero(); n + 1]);
        };
        let mut out = vec![R::zero(); n + 1];
        let parts = self.by_power();
        for (k, a) in f.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = R::from_rational(&f.exponent(k));
            for (&p, poly) in &parts {
                let idx = k as i64 + (p - pmin) * r;
                if idx > n as i64 {
                    continue;
                }
                let idx = idx as usize;
                out[idx] = out[idx].add(&poly.eval(&e).mul(a));
            }
        }
        let beta = Rational::from(f.beta() + pmin);
        PowerSeries::new(beta, f.ramification(), out)
    }

    /// Coefficients `D_k(x)` of `Σ_k D_k(x) (d/dx)^k`, via
    /// `θ^i = Σ_k S(i, k) x^k (d/dx)^k`.
    pub fn to_d_form(&self) -> Vec<LaurentPolynomial<R>> {
        let mut out = vec![LaurentPolynomial::zero(); self.coeffs.len()];
        for (i, h) in self.coeffs.iter().enumerate() {
            for (k, slot) in out.iter_mut().enumerate().take(i + 1) {
                let s = stirling2(i, k);
                if s != 0 {
                    *slot = slot.add(&h.shift(k as i64).scale(&R::from_rational(&Rational::from(s))));
                }
            }
        }
        out
    }
}

impl<R: Ring> ThetaOperator<Poly<R>> {
    /// Substitutes a value for the twist symbol `u`.
    pub fn specialize(&self, u: &R) -> ThetaOperator<R> {
        self.map_coeffs(|c| c.eval(u))
    }
}

impl<R: Ring> fmt::Display for ThetaOperator<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, h) in self.coeffs.iter().enumerate().rev() {
            for (p, c) in h.terms() {
                let mut s = format!("{c}");
                if s.contains(' ') || (s.contains('-') && !s.starts_with('-')) {
                    s = format!("({s})");
                }
                if p != 0 {
                    s.push_str(&format!(" * {}^{}", self.var, p));
                }
                if i == 1 {
                    s.push_str(" * theta");
                } else if i > 1 {
                    s.push_str(&format!(" * theta^{i}"));
                }
                parts.push(s);
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}
