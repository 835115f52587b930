//! The numerical Borel plane: Borel transforms of series, Padé continuation
//! of the minor, directional Laplace sums and lateral Stokes jumps.

mod pade;
pub mod quad;
mod laplace;

pub use laplace::{laplace_sum, laplace_sum_with, stokes_jump, stokes_jump_with, JumpSample, LaplaceOptions, LaplaceResult, StokesEstimate, StokesOptions};
pub use pade::{pade_approximant, pade_robust, PadeApproximant, Pole};

use rug::{Complex, Rational};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{complex_from_rational, complex_to_f64, factorial, working_precision, AppComplex, PowerSeries, Scalar};
use crate::formal::AnySeries;

/// Coefficients `c_n` of the minor `Σ c_n ζ^n` of a series in `z = 1/x`.
///
/// Terms `a z^{k}` with `k ≥ 0` cannot be Borel transformed; they are kept
/// in `removed` and added back by the Laplace sum.
#[derive(Clone, Debug)]
pub struct BorelSeries {
    coeffs: Vec<AppComplex>,
    exact: Option<Vec<Rational>>,
    shift: i64,
    ramification: u32,
    removed: Vec<(i64, AppComplex)>,
}

impl BorelSeries {
    /// Minor with the given coefficients and nothing removed.
    pub fn from_coeffs(coeffs: Vec<AppComplex>) -> Self {
        BorelSeries { coeffs, exact: None, shift: 0, ramification: 1, removed: vec![] }
    }

    /// Minor with exact rational coefficients.
    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        let prec = working_precision();
        BorelSeries {
            coeffs: coeffs.iter().map(|q| complex_from_rational(q, prec)).collect(),
            exact: Some(coeffs),
            shift: 0,
            ramification: 1,
            removed: vec![],
        }
    }

    pub fn coeffs(&self) -> &[AppComplex] {
        &self.coeffs
    }

    pub fn exact_coeffs(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    /// Coefficients rounded to `prec` bits, recomputed from exact values
    /// when they are available.
    pub fn coeffs_at(&self, prec: u32) -> Vec<AppComplex> {
        match &self.exact {
            Some(qs) => qs.iter().map(|q| complex_from_rational(q, prec)).collect(),
            None => self.coeffs.iter().map(|c| Complex::with_val(prec, c)).collect(),
        }
    }

    /// `c_n = a_{n + shift}/n!` where `a_m` indexes the source series.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn source_ramification(&self) -> u32 {
        self.ramification
    }

    /// Non-transformable terms as `(k, a)` meaning `a·z^k`.
    pub fn removed(&self) -> &[(i64, AppComplex)] {
        &self.removed
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Geometric growth rate `A` of the coefficients, estimated from the
    /// ratios of the last few nonzero ones (the radius of convergence of the
    /// minor is `1/A`).
    pub fn growth_rate(&self) -> Option<f64> {
        let mags: Vec<(usize, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !(c.real().is_zero() && c.imag().is_zero()))
            .map(|(i, c)| (i, crate::exactnum::cabs(c).to_f64().ln()))
            .collect();
        if mags.len() < 4 {
            return None;
        }
        let tail = &mags[mags.len() - 4..];
        let (i0, l0) = tail[0];
        let (i1, l1) = tail[3];
        Some(((l1 - l0) / (i1 - i0) as f64).exp())
    }
}

/// Borel transform of `f = x^β Σ a_n x^n` read as a series in `z = 1/x`.
///
/// Requires `r = 1` and integer `β` (the series must already be in its
/// critical variable). A term `a_n z^{-(m+1)}` with `m ≥ 0` becomes
/// `a_n ζ^m/m!`; terms with nonnegative powers of `z` are removed.
pub fn borel_series<R: Scalar>(f: &PowerSeries<R>) -> Result<BorelSeries> {
    if f.ramification() != 1 {
        return Err(Error::Unsupported(format!(
            "Borel series of a ramified series (r = {}); rewrite it in its critical variable first",
            f.ramification()
        )));
    }
    if !f.beta().is_integer() {
        return Err(Error::Unsupported(format!("Borel series needs an integer leading exponent, got {}", f.beta())));
    }
    let prec = working_precision();
    let beta = f.beta().numer().to_i64().ok_or_else(|| Error::Domain("leading exponent out of range".into()))?;
    let exact: Option<Vec<Rational>> = if R::is_exact() {
        f.coeffs().iter().map(|a| a.recognize_rational()).collect()
    } else {
        None
    };
    let mut removed = vec![];
    let top = beta + f.coeffs().len() as i64 - 1;
    let len = top.max(0) as usize;
    let mut coeffs = vec![Complex::new(prec); len];
    let mut exact_coeffs = vec![Rational::new(); len];
    for (n, a) in f.coeffs().iter().enumerate() {
        let e = beta + n as i64;
        if e <= 0 {
            removed.push((-e, a.to_complex(prec)));
            continue;
        }
        let m = (e - 1) as usize;
        let fact = factorial(m as u32);
        match &exact {
            Some(qs) => {
                let c = &qs[n] / Rational::from(fact);
                coeffs[m] = complex_from_rational(&c, prec);
                exact_coeffs[m] = c;
            }
            None => {
                let fl = rug::Float::with_val(prec, &fact);
                coeffs[m] = Complex::with_val(prec, a.to_complex(prec) / fl);
            }
        }
    }
    Ok(BorelSeries {
        coeffs,
        exact: exact.map(|_| exact_coeffs),
        shift: 1 - beta,
        ramification: 1,
        removed,
    })
}

/// [`borel_series`] for either kind of stored series.
pub fn borel_series_any(f: &AnySeries) -> Result<BorelSeries> {
    match f {
        AnySeries::Exact(s) => borel_series(s),
        AnySeries::Complex(s) => borel_series(s),
    }
}

fn pair(c: &AppComplex) -> Value {
    let (re, im) = complex_to_f64(c);
    json!([re, im])
}

/// Report fragment `{poles, laplace, stokes}`; absent parts are `null`.
pub fn borel_json(p: &PadeApproximant, laplace: Option<&LaplaceResult>, stokes: Option<&StokesEstimate>) -> Value {
    let poles: Vec<Value> = p
        .poles()
        .iter()
        .filter(|q| !q.froissart)
        .map(|q| {
            let (re, im) = complex_to_f64(&q.value);
            json!([re, im, q.stable])
        })
        .collect();
    let laplace = laplace.map(|l| json!({"z": pair(&l.z), "theta": l.theta, "value": pair(&l.value), "err": l.error}));
    let stokes = stokes.map(|s| {
        json!({
            "omega": s.omega.as_ref().map(pair),
            "A": s.constant.as_ref().map(pair),
            "spread": s.spread,
        })
    });
    json!({"poles": poles, "laplace": laplace, "stokes": stokes})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::PowerSeries;

    #[test]
    fn euler_series_gives_alternating_minor() {
        // f̃_0 = Σ (-1)^n n! x^{n+1}
        let coeffs: Vec<Rational> = (0..20).map(|n| Rational::from(factorial(n)) * if n % 2 == 0 { 1 } else { -1 }).collect();
        let f = PowerSeries::new(Rational::from(1), 1, coeffs);
        let b = borel_series(&f).unwrap();
        assert_eq!(b.shift(), 0);
        assert!(b.removed().is_empty());
        for (n, c) in b.exact_coeffs().unwrap().iter().enumerate() {
            assert_eq!(*c, if n % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn single_inverse_power_has_constant_minor() {
        let f = PowerSeries::new(Rational::from(1), 1, vec![Rational::from(1)]);
        let b = borel_series(&f).unwrap();
        assert_eq!(b.exact_coeffs().unwrap(), &[Rational::from(1)]);
    }

    #[test]
    fn constant_term_is_removed_and_recorded() {
        let f = PowerSeries::new(Rational::from(0), 1, vec![Rational::from(3), Rational::from(5), Rational::from(4)]);
        let b = borel_series(&f).unwrap();
        assert_eq!(b.shift(), 1);
        assert_eq!(b.removed().len(), 1);
        assert_eq!(b.removed()[0].0, 0);
        assert_eq!(b.exact_coeffs().unwrap(), &[Rational::from(5), Rational::from(4)]);
    }

    #[test]
    fn ramified_series_is_rejected() {
        let f = PowerSeries::new(Rational::from((1, 2)), 2, vec![Rational::from(1)]);
        assert_eq!(borel_series(&f).unwrap_err().kind(), "unsupported");
    }
}
