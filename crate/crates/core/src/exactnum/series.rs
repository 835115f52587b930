use super::{rational_string, Field, Rational, Ring};
use crate::error::{Error, Result};

/// Truncated ramified series `x^β Σ_{n=0}^{N} a_n x^{n/r}`.
///
/// Series produced as solutions are normalized (`a_0 = 1`); residual series
/// such as the image of an operator keep the alignment of their input and
/// may start with zeros. [`PowerSeries::normalized`] moves leading zeros
/// into `β`.
#[derive(Clone, PartialEq, Debug)]
pub struct PowerSeries<R> {
    beta: Rational,
    ramification: u32,
    coeffs: Vec<R>,
}

impl<R: Ring> PowerSeries<R> {
    pub fn new(beta: Rational, ramification: u32, coeffs: Vec<R>) -> Self {
        assert!(ramification >= 1, "ramification must be positive");
        assert!(!coeffs.is_empty(), "a series carries at least a_0");
        PowerSeries { beta, ramification, coeffs }
    }

    /// Unramified series with `β = 0`.
    pub fn plain(coeffs: Vec<R>) -> Self {
        Self::new(Rational::new(), 1, coeffs)
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn ramification(&self) -> u32 {
        self.ramification
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> R {
        self.coeffs.get(n).cloned().unwrap_or_else(R::zero)
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exponent `β + n/r` of the `n`-th term.
    pub fn exponent(&self, n: usize) -> Rational {
        &self.beta + Rational::from((n as i64, self.ramification as i64)) 
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, R::zero());
        PowerSeries { coeffs, ..self.clone() }
    }

    /// Shifts leading zeros into the base exponent so that `a_0 ≠ 0`; the
    /// highest represented exponent is unchanged. Zero series are returned as is.
    pub fn normalized(&self) -> Self {
        match self.valuation() {
            None | Some(0) => self.clone(),
            Some(k) => PowerSeries {
                beta: self.exponent(k),
                ramification: self.ramification,
                coeffs: self.coeffs[k..].to_vec(),
            },
        }
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> PowerSeries<S> {
        PowerSeries { beta: self.beta.clone(), ramification: self.ramification, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn fmt_in(&self, var: &str) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| format!("({c})*{var}^({})", rational_string(&self.exponent(n))))
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        format!("{body} + O({var}^({}))", rational_string(&self.exponent(self.order() + 1)))
    }
}

impl<R: Field> PowerSeries<R> {
    fn check_log_domain(&self) -> Result<()> {
        if self.beta != 0 {
            return Err(Error::Domain(format!(
                "series_log needs beta = 0, got {}",
                rational_string(&self.beta)
            )));
        }
        if !self.coeffs[0].is_one() {
            return Err(Error::Normalization(format!(
                "series_log needs a_0 = 1, got {}",
                self.coeffs[0]
            )));
        }
        Ok(())
    }
}

/// Formal logarithm of a series with `β = 0` and `a_0 = 1`, to the same order.
///
/// Uses `n·w_n = n·a_n − Σ_{j=1}^{n−1} j·w_j·a_{n−j}`, the coefficient form of
/// `w' = f'/f`.
pub fn series_log<R: Field>(f: &PowerSeries<R>) -> Result<PowerSeries<R>> {
    f.check_log_domain()?;
    let a = f.coeffs();
    let n_max = f.order();
    let mut w = vec![R::zero(); n_max + 1];
    for n in 1..=n_max {
        let mut acc = R::from_int(n as i64).mul(&a[n]);
        for j in 1..n {
            acc = acc.sub(&R::from_int(j as i64).mul(&w[j]).mul(&a[n - j]));
        }
        w[n] = acc.div(&R::from_int(n as i64)).expect("n > 0");
    }
    Ok(PowerSeries::new(Rational::new(), f.ramification(), w))
}

/// Formal exponential of a series with `β = 0` and `w_0 = 0`.
pub fn series_exp<R: Field>(w: &PowerSeries<R>) -> Result<PowerSeries<R>> {
    if *w.beta() != 0 {
        return Err(Error::Domain("series_exp needs beta = 0".into()));
    }
    if !w.coeffs()[0].is_zero() {
        return Err(Error::Normalization("series_exp needs a vanishing constant term".into()));
    }
    let b = w.coeffs();
    let n_max = w.order();
    let mut e = vec![R::zero(); n_max + 1];
    e[0] = R::one();
    for n in 1..=n_max {
        let mut acc = R::zero();
        for j in 1..=n {
            acc = acc.add(&R::from_int(j as i64).mul(&b[j]).mul(&e[n - j]));
        }
        e[n] = acc.div(&R::from_int(n as i64)).expect("n > 0");
    }
    Ok(PowerSeries::new(Rational::new(), w.ramification(), e))
}
