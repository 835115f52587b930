use std::collections::BTreeMap;

use super::{shift_poly, ThetaOperator};
use crate::error::{Error, Result};
use crate::exactnum::{rational_string, Field, LaurentPolynomial, Poly, Ring};
use crate::newton::{newton_polygon, At};

/// Result of [`borel_transform_op`] together with the normalizations applied.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelOperator<R> {
    /// The operator in `ζ`, θ-form.
    pub operator: ThetaOperator<R>,
    /// `k` such that `x^k H` was transformed.
    pub premultiplied_power: i64,
    /// `a` such that the image was multiplied on the left by `ζ^a`.
    pub zeta_power: i64,
    /// Number of left factors `θ_ζ` removed.
    pub stripped_theta: usize,
}

impl<R: Field> BorelOperator<R> {
    /// Coefficients of `(d/dζ)^k`, divided by the largest common power of `ζ`.
    pub fn d_form(&self) -> Vec<LaurentPolynomial<R>> {
        let d = self.operator.to_d_form();
        let low = d.iter().filter_map(|c| c.valuation()).min().unwrap_or(0);
        d.iter().map(|c| c.shift(-low)).collect()
    }
}

/// Borel transform of a single-level (slope 1) operator.
///
/// `x^{-s} H` (with `s` the largest exponent, when positive) is written in
/// `X = x^{-1}` and `D = x² d/dx`, then mapped by `X ↦ d/dζ`, `D ↦ ζ`, so
/// `θ = XD ↦ θ_ζ + 1` and `x^{-m} ↦ ζ^{-m} θ_ζ(θ_ζ − 1)⋯(θ_ζ − m + 1)`.
/// The image is normalized by a left power of `ζ` so exponents start at 0.
///
/// A left factor `θ_ζ` is removed when the cofactor `G` still has a `ζ^0`
/// part vanishing at `θ = 0`: then `G f̂` is a constant equal to
/// `G_0(0)·f̂(0) = 0`, so `G` annihilates the transform too.
pub fn borel_transform_op<R: Field>(h: &ThetaOperator<R>) -> Result<BorelOperator<R>> {
    if h.is_zero() {
        return Err(Error::Degenerate("Borel transform of the zero operator".into()));
    }
    let polygon = newton_polygon(h, At::Zero);
    for slope in polygon.slopes() {
        if slope.q.cmp0() == std::cmp::Ordering::Greater && slope.q != 1 {
            return Err(Error::UnsupportedLevel(format!(
                "positive slope {} is not 1; ramify so that the critical variable has level one",
                rational_string(&slope.q)
            )));
        }
    }
    let s = h.support().iter().map(|&(_, p)| p).max().unwrap_or(0).max(0);
    let pre = h.shift(-s);
    let var = "zeta";
    let d = ThetaOperator::<R>::from_terms([(R::one(), -1, 1)], var);
    let mut image = ThetaOperator::<R>::zero(var);
    for (p, a) in pre.by_power() {
        let m = (-p) as u32;
        let shifted = ThetaOperator::from_by_power(&BTreeMap::from([(0, shift_poly(&a, &R::one()))]), var);
        image = image.add(&d.pow(m).compose(&shifted));
    }
    let low = image.support().iter().map(|&(_, p)| p).min().unwrap_or(0);
    let zeta_power = -low;
    let mut op = image.shift(zeta_power);

    let mut stripped = 0;
    while let Some(g) = strip_theta(&op) {
        op = g;
        stripped += 1;
    }
    Ok(BorelOperator { operator: op, premultiplied_power: -s, zeta_power, stripped_theta: stripped })
}

/// `G` with `op = θ ∘ G`, if it exists, has order ≥ 1 and `G_0(0) = 0`.
fn strip_theta<R: Field>(op: &ThetaOperator<R>) -> Option<ThetaOperator<R>> {
    let mut parts = BTreeMap::new();
    for (p, a) in op.by_power() {
        let lin = Poly::new(vec![R::from_int(p), R::one()]);
        let (quot, rem) = a.div_rem(&lin)?;
        if !rem.is_zero() {
            return None;
        }
        parts.insert(p, quot);
    }
    if !parts.get(&0).is_none_or(|g0| g0.coeff(0).is_zero()) {
        return None;
    }
    let g = ThetaOperator::from_by_power(&parts, op.var());
    if g.order().unwrap_or(0) == 0 {
        return None;
    }
    Some(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{PowerSeries, Rational};
    use proptest::prelude::*;

    type Op = ThetaOperator<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn lp(terms: &[(i64, Rational)]) -> LaurentPolynomial<Rational> {
        LaurentPolynomial::from_terms(terms.iter().cloned())
    }

    #[test]
    fn borel_of_quartic_operator() {
        let h2 = Op::from_terms(
            [(q(16, 1), 0, 2), (q(16, 1), 0, 1), (q(1, 1), -1, 1), (q(3, 1), 0, 0)],
            "lambda",
        );
        let b = borel_transform_op(&h2).unwrap();
        let d = b.d_form();
        assert_eq!(d[2], lp(&[(2, q(16, 1)), (1, q(1, 1))]));
        assert_eq!(d[1], lp(&[(1, q(64, 1)), (0, q(2, 1))]));
        assert_eq!(d[0], lp(&[(0, q(35, 1))]));
        assert_eq!(b.stripped_theta, 0);
    }

    #[test]
    fn borel_of_homogeneous_euler() {
        let e = Op::from_terms([(q(1, 1), 1, 2), (q(1, 1), 0, 1), (q(-1, 1), 0, 0)], "x");
        let b = borel_transform_op(&e).unwrap();
        let expect = Op::from_terms([(q(1, 1), 0, 1), (q(1, 1), 1, 1), (q(1, 1), 1, 0)], "zeta");
        assert_eq!(b.operator, expect);
        assert_eq!(b.premultiplied_power, -1);
        assert_eq!(b.stripped_theta, 1);
    }

    #[test]
    fn borel_of_twisted_quartic_operator() {
        let h = Op::from_terms(
            [(q(16, 1), 0, 2), (q(16, 1), 0, 1), (q(-1, 1), -1, 1), (q(3, 1), 0, 0)],
            "lambda",
        );
        let d = borel_transform_op(&h).unwrap().d_form();
        assert_eq!(d[2], lp(&[(2, q(16, 1)), (1, q(-1, 1))]));
        assert_eq!(d[1], lp(&[(1, q(64, 1)), (0, q(-2, 1))]));
        assert_eq!(d[0], lp(&[(0, q(35, 1))]));
    }

    #[test]
    fn higher_level_is_rejected() {
        let h = Op::from_terms([(q(1, 1), 0, 1), (q(1, 1), -2, 0)], "x");
        assert!(matches!(borel_transform_op(&h), Err(Error::UnsupportedLevel(_))));
    }

    /// Series solution of `H` by forward recurrence with `a_0 = 1` at `x^β`,
    /// used only to cross-check the Borel operator.
    fn solve(h: &Op, beta: i64, n: usize) -> PowerSeries<Rational> {
        let parts = h.by_power();
        let d0 = *parts.keys().next().unwrap();
        let mut a = vec![q(1, 1)];
        for k in 1..=n {
            let mut rhs = q(0, 1);
            for (&p, poly) in &parts {
                let j = (p - d0) as usize;
                if j >= 1 && j <= k {
                    rhs -= poly.eval(&Rational::from(beta + (k - j) as i64)) * a[k - j].clone();
                }
            }
            let pivot = parts[&d0].eval(&Rational::from(beta + k as i64));
            a.push(rhs / pivot);
        }
        PowerSeries::new(Rational::from(beta), 1, a)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// `H = x·A(θ) + b(θ − 1)` has a formal solution `x(1 + …)`; the
        /// sequence `a_k / k!` must be annihilated by the Borel operator.
        #[test]
        fn borel_coefficients_solve_borel_operator(
            a2 in 1i64..5, a1 in -4i64..5, a0 in -4i64..5, b in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]),
        ) {
            let h = Op::from_terms([
                (q(a2, 1), 1, 2), (q(a1, 1), 1, 1), (q(a0, 1), 1, 0),
                (q(b, 1), 0, 1), (q(-b, 1), 0, 0),
            ], "x");
            let n = 16;
            let f = solve(&h, 1, n);
            prop_assert!(h.apply(&f).is_zero());
            let mut fact = Rational::from(1);
            let mut c = Vec::new();
            for (k, ak) in f.coeffs().iter().enumerate() {
                if k > 0 { fact *= Rational::from(k as i64); }
                c.push(ak.clone() / fact.clone());
            }
            let bop = borel_transform_op(&h).unwrap();
            let img = bop.operator.apply(&PowerSeries::plain(c));
            prop_assert!(img.is_zero(), "{} -> {:?}", bop.operator, img);
        }
    }
}
