//! Formal series solutions, exponential-series bases and Gevrey fits.

use rug::ops::Pow;
use rug::{Complex, Float};
use serde_json::{json, Value};

use crate::diffop::ThetaOperator;
use crate::error::{Error, Result};
use crate::exactnum::roots::Root;
use crate::exactnum::{
    cabs, parse_rational, rational_string, series_log, working_precision, AppComplex, Field, Poly,
    PowerSeries, Rational, Ring, Scalar,
};
use crate::newton::{determining_polynomial, indicial_polynomial, newton_polygon, At};

/// Solution `x^β Σ_{n≤N} a_n x^n`, `a_0 = 1`, of `H f = 0` by the triangular
/// recurrence `Q_{d0}(β+n) a_n = −Σ_{j≥1} Q_{d0+j}(β+n−j) a_{n−j}`, where
/// `H = Σ_p x^p Q_p(θ)` and `d0` is the lowest exponent.
pub fn series_solution<R: Scalar>(h: &ThetaOperator<R>, beta: &Rational, n: usize) -> Result<PowerSeries<R>> {
    let parts = h.by_power();
    let (&d0, pivot_poly) = parts.iter().next().ok_or_else(|| Error::Degenerate("zero operator".into()))?;
    let at = |k: i64| R::from_rational(&Rational::from(beta + k));
    let scale_of = |p: &Poly<R>, x: &R| -> AppComplex {
        let prec = working_precision();
        let xa = cabs(&x.to_complex(prec));
        let mut acc = Float::new(prec);
        for (i, c) in p.coeffs().iter().enumerate() {
            acc += cabs(&c.to_complex(prec)) * Float::with_val(prec, xa.clone().pow(i as u32));
        }
        Complex::with_val(prec, (acc, 0))
    };
    let q0 = pivot_poly.eval(&at(0));
    if !q0.is_negligible(&scale_of(pivot_poly, &at(0))) {
        return Err(Error::Domain(format!(
            "beta = {} is not a root of the indicial polynomial",
            rational_string(beta)
        )));
    }
    let mut a: Vec<R> = Vec::with_capacity(n + 1);
    a.push(R::one());
    for k in 1..=n {
        let x = at(k as i64);
        let pivot = pivot_poly.eval(&x);
        if pivot.is_zero() || pivot.is_negligible(&scale_of(pivot_poly, &x)) {
            return Err(Error::Resonance {
                index: k,
                detail: format!("indicial polynomial vanishes at beta + {k}; logarithmic terms would be needed"),
            });
        }
        let mut rhs = R::zero();
        for (&p, qp) in parts.iter().skip(1) {
            let j = (p - d0) as usize;
            if j > k {
                break;
            }
            rhs = rhs.sub(&qp.eval(&at((k - j) as i64)).mul(&a[k - j]));
        }
        a.push(rhs.div(&pivot).expect("nonzero pivot"));
    }
    Ok(PowerSeries::new(beta.clone(), 1, a))
}

/// A series over either exact rationals or big complex numbers.
#[derive(Clone, Debug, PartialEq)]
pub enum AnySeries {
    Exact(PowerSeries<Rational>),
    Complex(PowerSeries<AppComplex>),
}

impl AnySeries {
    pub fn beta(&self) -> &Rational {
        match self {
            AnySeries::Exact(s) => s.beta(),
            AnySeries::Complex(s) => s.beta(),
        }
    }

    pub fn ramification(&self) -> u32 {
        match self {
            AnySeries::Exact(s) => s.ramification(),
            AnySeries::Complex(s) => s.ramification(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            AnySeries::Exact(s) => s.order(),
            AnySeries::Complex(s) => s.order(),
        }
    }

    /// Coefficients as complex numbers at precision `prec`.
    pub fn to_complex(&self, prec: u32) -> PowerSeries<AppComplex> {
        match self {
            AnySeries::Exact(s) => s.map(|c| c.to_complex(prec)),
            AnySeries::Complex(s) => s.map(|c| Complex::with_val(prec, c)),
        }
    }

    pub fn as_exact(&self) -> Option<&PowerSeries<Rational>> {
        match self {
            AnySeries::Exact(s) => Some(s),
            AnySeries::Complex(_) => None,
        }
    }

    /// JSON form `{beta, ramification, coeffs}`; exact coefficients are
    /// `"num/den"` strings, complex ones `[re, im]` decimal strings.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = match self {
            AnySeries::Exact(s) => s.coeffs().iter().map(|c| json!(rational_string(c))).collect(),
            AnySeries::Complex(s) => s
                .coeffs()
                .iter()
                .map(|c| json!([float_string(c.real()), float_string(c.imag())]))
                .collect(),
        };
        json!({
            "beta": rational_string(self.beta()),
            "ramification": self.ramification(),
            "coeffs": coeffs,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("series JSON: {what}"));
        let beta = v["beta"].as_str().and_then(parse_rational).ok_or_else(|| bad("beta"))?;
        let r = v["ramification"].as_u64().filter(|&r| r >= 1).ok_or_else(|| bad("ramification"))? as u32;
        let cs = v["coeffs"].as_array().filter(|a| !a.is_empty()).ok_or_else(|| bad("coeffs"))?;
        if cs.iter().all(|c| c.is_string()) {
            let q = cs
                .iter()
                .map(|c| c.as_str().and_then(parse_rational).ok_or_else(|| bad("rational coefficient")))
                .collect::<Result<Vec<_>>>()?;
            return Ok(AnySeries::Exact(PowerSeries::new(beta, r, q)));
        }
        let z = cs
            .iter()
            .map(|c| {
                let pair = c.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("complex pair"))?;
                let re = pair[0].as_str().ok_or_else(|| bad("real part"))?;
                let im = pair[1].as_str().ok_or_else(|| bad("imaginary part"))?;
                parse_complex(re, im, working_precision()).ok_or_else(|| bad("complex value"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(AnySeries::Complex(PowerSeries::new(beta, r, z)))
    }
}

/// Decimal digits enough to round-trip at the value's precision.
pub fn float_string(x: &Float) -> String {
    let digits = (x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
    x.to_string_radix(10, Some(digits))
}

pub fn parse_complex(re: &str, im: &str, prec: u32) -> Option<AppComplex> {
    let re = Float::parse(re).ok()?;
    let im = Float::parse(im).ok()?;
    Some(Complex::with_val(prec, (re, im)))
}

/// One element `x^β e^{u/x^q} Φ(x)` of a formal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalBasisElement {
    pub label: usize,
    pub u: Root,
    pub q: Rational,
    pub beta: Rational,
    /// `Φ` times `x^β`, expressed in the operator's own variable (ramified
    /// when `q` is fractional).
    pub series: AnySeries,
}

/// Specializes `u` in the twisted operator at an exact or numeric root.
///
/// Exact roots give an exact operator. Numeric roots are substituted after
/// reducing every coefficient modulo `cofactor` (a rational polynomial that
/// vanishes at the root); coefficients that are then numerically negligible
/// are dropped.
fn specialize_numeric<R: Scalar>(
    twisted: &ThetaOperator<Poly<R>>,
    root: &AppComplex,
    cofactor: Option<&Poly<Rational>>,
) -> ThetaOperator<AppComplex> {
    let prec = working_precision();
    let ua = cabs(root);
    twisted.map_coeffs(|c| {
        let c = match (R::is_exact(), cofactor) {
            (true, Some(m)) => {
                let exact: Poly<Rational> = c.map(|x| x.recognize_rational().expect("exact"));
                exact.div_rem(m).map(|(_, r)| r).unwrap_or(exact).map(|x| x.to_complex(prec))
            }
            _ => c.map(|x| x.to_complex(prec)),
        };
        let v = c.eval(root);
        let mut scale = Float::new(prec);
        for (i, a) in c.coeffs().iter().enumerate() {
            scale += cabs(a) * Float::with_val(prec, ua.clone().pow(i as u32));
        }
        if v.is_negligible(&Complex::with_val(prec, (scale, 0))) {
            AppComplex::zero()
        } else {
            v
        }
    })
}

/// Unique rational root of the indicial polynomial of `h`.
fn unique_beta<R: Scalar>(h: &ThetaOperator<R>) -> Result<Rational> {
    let ind = indicial_polynomial(h)?;
    if ind.polynomial.degree() != Some(1) {
        return Err(Error::Shape(format!(
            "horizontal slope of length {} (expected 1)",
            ind.polynomial.degree().unwrap_or(0)
        )));
    }
    ind.roots[0]
        .exact
        .clone()
        .ok_or_else(|| Error::Unsupported("indicial root is not rational".into()))
}

/// Formal basis `{x^{β_i} e^{u_i/x^q} Φ_i}` of `H`, following the
/// three-step construction: the horizontal slope gives `(u = 0, β_0)`, the
/// positive slope `q` gives the determining polynomial, and each nonzero
/// root `u_i` gives a twisted operator whose own horizontal slope fixes `β_i`.
///
/// A fractional slope `q = p/r` is handled by working in `t = x^{1/r}`;
/// returned series carry ramification `r` and exponents in `x`. Every series
/// is normalized to a leading coefficient 1.
pub fn formal_basis<R: Scalar>(h: &ThetaOperator<R>, n: usize) -> Result<Vec<FormalBasisElement>> {
    let polygon = newton_polygon(h, At::Zero);
    let positive = polygon.positive_slopes();
    if positive.len() != 1 {
        return Err(Error::Shape(format!(
            "expected exactly one positive slope at 0, found {}",
            positive.len()
        )));
    }
    let q = positive[0].clone();
    if polygon.horizontal_length() > 1 {
        return Err(Error::Shape(format!(
            "horizontal slope of length {} (expected at most 1)",
            polygon.horizontal_length()
        )));
    }
    let r = q.denom().to_u32().ok_or_else(|| Error::Unsupported("slope denominator too large".into()))?;
    let ram = h.ramify(r);
    let q_int = Rational::from(q.numer().clone());
    let rb = Rational::from(r);
    let prec = working_precision();
    let to_x = |beta_t: &Rational| Rational::from(beta_t / &rb);
    let in_x = |s: AnySeries| -> AnySeries {
        match s {
            AnySeries::Exact(p) => AnySeries::Exact(PowerSeries::new(to_x(p.beta()), r, p.coeffs().to_vec())),
            AnySeries::Complex(p) => AnySeries::Complex(PowerSeries::new(to_x(p.beta()), r, p.coeffs().to_vec())),
        }
    };

    let mut out = Vec::new();
    if polygon.horizontal_length() == 1 {
        let beta = unique_beta(&ram)?;
        let s = series_solution(&ram, &beta, n)?;
        let series = if R::is_exact() {
            AnySeries::Exact(s.map(|c| c.recognize_rational().expect("exact")))
        } else {
            AnySeries::Complex(s.map(|c| c.to_complex(prec)))
        };
        out.push(FormalBasisElement {
            label: 0,
            u: Root::exact(Rational::new(), prec),
            q: q.clone(),
            beta: to_x(&beta),
            series: in_x(series),
        });
    }

    let det = determining_polynomial(&ram, &q_int)?;
    let twisted = ram.twist(&q_int)?;
    let cofactor: Option<Poly<Rational>> = if R::is_exact() {
        let p: Poly<Rational> = det.polynomial.map(|c| c.recognize_rational().expect("exact"));
        let stripped = p.shift_down(p.valuation().unwrap_or(0));
        let g = stripped.gcd(&stripped.derivative());
        Some(stripped.div_rem(&g).map(|(q, _)| q).unwrap_or(stripped))
    } else {
        None
    };
    for (idx, root) in det.nonzero_roots.iter().enumerate() {
        let label = out.len();
        let (beta, series) = match (&root.exact, R::is_exact()) {
            (Some(u), true) => {
                let op: ThetaOperator<Rational> =
                    twisted.map_coeffs(|c| c.map(|x| x.recognize_rational().expect("exact")).eval(u));
                let beta = unique_beta(&op)?;
                let s = series_solution(&op, &beta, n)?;
                (beta, AnySeries::Exact(s))
            }
            _ => {
                let op = specialize_numeric(&twisted, &root.value, cofactor.as_ref());
                let beta = unique_beta(&op).map_err(|e| match e {
                    Error::NoFormalSolution(m) | Error::Shape(m) => {
                        Error::Shape(format!("twisted operator at root {idx}: {m}"))
                    }
                    other => other,
                })?;
                let s = series_solution(&op, &beta, n)?;
                (beta, AnySeries::Complex(s))
            }
        };
        out.push(FormalBasisElement { label, u: root.clone(), q: q.clone(), beta: to_x(&beta), series: in_x(series) });
    }
    Ok(out)
}

/// Result of fitting `log|a_n| ≈ s·log n! + n·log A + b·log n + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct GevreyEstimate {
    pub s: f64,
    pub a: f64,
    /// Inclusive index range used by the fit.
    pub fit_window: (usize, usize),
    /// Root-mean-square residual of the fit in `log|a_n|`.
    pub residual: f64,
}

/// Least-squares Gevrey fit over the last 60% of the nonzero coefficients.
///
/// The power-law correction `b·log n` absorbs the `n^b` prefactor that
/// factorially divergent coefficients usually carry; without it `A` is
/// biased by several percent at moderate orders.
pub fn gevrey_estimate<R: Scalar>(f: &PowerSeries<R>) -> Result<GevreyEstimate> {
    let prec = working_precision();
    let pts: Vec<(usize, f64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(n, c)| *n > 0 && !c.is_zero())
        .map(|(n, c)| (n, cabs(&c.to_complex(prec)).ln().to_f64()))
        .filter(|(_, l)| l.is_finite())
        .collect();
    if pts.len() < 20 {
        return Err(Error::InsufficientData(format!(
            "Gevrey fit needs at least 20 nonzero coefficients, got {}",
            pts.len()
        )));
    }
    let start = pts.len() - (pts.len() * 3).div_ceil(5);
    let window = &pts[start..];
    let lnfact = |n: usize| Float::with_val(64, Float::with_val(64, n + 1).ln_gamma_ref()).to_f64();
    let rows: Vec<[f64; 4]> =
        window.iter().map(|&(n, _)| [lnfact(n), n as f64, (n as f64).ln(), 1.0]).collect();
    let ys: Vec<f64> = window.iter().map(|&(_, y)| y).collect();
    let x = least_squares(&rows, &ys).ok_or_else(|| Error::InsufficientData("degenerate Gevrey fit window".into()))?;
    let residual = (rows
        .iter()
        .zip(&ys)
        .map(|(row, y)| {
            let e: f64 = row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() - y;
            e * e
        })
        .sum::<f64>()
        / rows.len() as f64)
        .sqrt();
    Ok(GevreyEstimate { s: x[0], a: x[1].exp(), fit_window: (window[0].0, window[window.len() - 1].0), residual })
}

/// Least squares through the normal equations, columns scaled to unit norm.
fn least_squares<const K: usize>(rows: &[[f64; K]], ys: &[f64]) -> Option<[f64; K]> {
    let mut norm = [0f64; K];
    for row in rows {
        for j in 0..K {
            norm[j] += row[j] * row[j];
        }
    }
    let norm = norm.map(|v| if v > 0.0 { v.sqrt() } else { 1.0 });
    let mut a = [[0f64; K]; K];
    let mut b = [0f64; K];
    for (row, y) in rows.iter().zip(ys) {
        for i in 0..K {
            b[i] += row[i] / norm[i] * y;
            for j in 0..K {
                a[i][j] += row[i] / norm[i] * row[j] / norm[j];
            }
        }
    }
    for col in 0..K {
        let piv = (col..K).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in 0..K {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in 0..K {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = [0f64; K];
    for i in 0..K {
        x[i] = b[i] / a[i][i] / norm[i];
    }
    Some(x)
}

/// `W = log Z` to order `n`.
pub fn free_energy_series<R: Field>(z: &PowerSeries<R>, n: usize) -> Result<PowerSeries<R>> {
    series_log(&z.truncate(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Op = ThetaOperator<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn euler() -> Op {
        Op::from_terms([(q(1, 1), 1, 2), (q(1, 1), 0, 1), (q(-1, 1), 0, 0)], "x")
    }

    fn h2() -> Op {
        Op::from_terms([(q(16, 1), 0, 2), (q(16, 1), 0, 1), (q(1, 1), -1, 1), (q(3, 1), 0, 0)], "lambda")
    }

    #[test]
    fn quartic_recurrence() {
        let s = series_solution(&h2(), &q(0, 1), 20).unwrap();
        assert_eq!(s.coeff(1), q(-3, 1));
        assert_eq!(s.coeff(2), q(105, 2));
        for n in 0..20 {
            let ratio = Rational::from(-(4 * n + 1) * (4 * n + 3)) / Rational::from(n + 1);
            assert_eq!(s.coeff(n as usize + 1), ratio * s.coeff(n as usize));
        }
    }

    #[test]
    fn twisted_quartic_recurrence() {
        let op = h2().twist(&q(1, 1)).unwrap().specialize(&q(1, 16));
        let s = series_solution(&op, &q(0, 1), 15).unwrap();
        for n in 0..15i64 {
            let ratio = Rational::from((4 * n + 1) * (4 * n + 3)) / Rational::from(n + 1);
            assert_eq!(s.coeff(n as usize + 1), ratio * s.coeff(n as usize));
        }
    }

    #[test]
    fn euler_series() {
        let s = series_solution(&euler(), &q(1, 1), 12).unwrap();
        let mut f = rug::Integer::from(1);
        for n in 0..=12u32 {
            if n > 0 {
                f *= n;
            }
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(s.coeff(n as usize), Rational::from(f.clone() * sign));
        }
    }

    #[test]
    fn wrong_beta_and_resonance() {
        assert!(matches!(series_solution(&euler(), &q(0, 1), 5), Err(Error::Domain(_))));
        // θ(θ − 2) + x: indicial roots 0 and 2 → resonance at n = 2
        let h = Op::from_terms([(q(1, 1), 0, 2), (q(-2, 1), 0, 1), (q(1, 1), 1, 0)], "x");
        assert!(matches!(series_solution(&h, &q(0, 1), 5), Err(Error::Resonance { index: 2, .. })));
    }

    #[test]
    fn euler_basis() {
        let b = formal_basis(&euler(), 10).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].u.exact, Some(q(0, 1)));
        assert_eq!(b[0].beta, q(1, 1));
        assert_eq!(b[1].u.exact, Some(q(1, 1)));
        assert_eq!(b[1].beta, q(0, 1));
        let s = b[1].series.as_exact().unwrap();
        assert!(s.coeffs()[1..].iter().all(Ring::is_zero));
    }

    #[test]
    fn quartic_basis() {
        let b = formal_basis(&h2(), 10).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[1].u.exact, Some(q(1, 16)));
        assert_eq!(b[1].series.as_exact().unwrap().coeff(1), q(3, 1));
    }

    #[test]
    fn series_json_round_trip() {
        let s = AnySeries::Exact(PowerSeries::new(q(-1, 2), 2, vec![q(1, 1), q(-3, 7)]));
        let v = s.to_json();
        assert_eq!(v["beta"], "-1/2");
        assert_eq!(v["coeffs"][1], "-3/7");
        assert_eq!(AnySeries::from_json(&v).unwrap(), s);
        let c = AnySeries::Complex(PowerSeries::plain(vec![Complex::with_val(256, (1.5, -0.25))]));
        let back = AnySeries::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn gevrey_of_quartic_series() {
        let s = series_solution(&h2(), &q(0, 1), 80).unwrap();
        let g = gevrey_estimate(&s).unwrap();
        assert!((g.s - 1.0).abs() < 0.05, "{g:?}");
        assert!((g.a - 16.0).abs() < 0.05 * 16.0, "{g:?}");
        assert!(g.residual < 1e-3, "{g:?}");
    }

    #[test]
    fn gevrey_of_geometric_series() {
        let s = PowerSeries::plain((0..40).map(|n| Rational::from(rug::Integer::from(1) << n)).collect());
        let g = gevrey_estimate(&s).unwrap();
        assert!(g.s.abs() < 1e-6, "{g:?}");
        assert!((g.a - 2.0).abs() < 1e-6, "{g:?}");
    }

    #[test]
    fn gevrey_needs_data() {
        let s = PowerSeries::plain(vec![q(1, 1); 10]);
        assert!(matches!(gevrey_estimate(&s), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn free_energy_examples() {
        let one = PowerSeries::plain(vec![q(1, 1), q(0, 1), q(0, 1)]);
        assert!(free_energy_series(&one, 2).unwrap().is_zero());
        let z = series_solution(&h2(), &q(0, 1), 6).unwrap();
        let w = free_energy_series(&z, 2).unwrap();
        assert_eq!(w.coeffs(), &[q(0, 1), q(-3, 1), q(48, 1)]);
        let lin = PowerSeries::plain(vec![q(1, 1), q(1, 1)]);
        let w = free_energy_series(&lin, 3).unwrap();
        assert_eq!(w.coeffs(), &[q(0, 1), q(1, 1), q(-1, 2), q(1, 3)]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// Generated solutions are annihilated through their order.
        #[test]
        fn solutions_are_annihilated(a2 in 1i64..5, a1 in -4i64..5, c in -4i64..5, b in 1i64..4) {
            // H = x(a2 θ² + a1 θ + c) + b θ: indicial root 0, pivots b·n ≠ 0
            let h = Op::from_terms([(q(a2, 1), 1, 2), (q(a1, 1), 1, 1), (q(c, 1), 1, 0), (q(b, 1), 0, 1)], "x");
            let s = series_solution(&h, &q(0, 1), 20).unwrap();
            prop_assert!(h.apply(&s).is_zero());
        }
    }
}
