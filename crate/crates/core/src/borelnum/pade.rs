//! Padé approximants of the minor, solved at raised precision.

use rug::{Complex, Float};

use super::BorelSeries;
use crate::error::{Error, Result};
use crate::exactnum::roots::complex_roots;
use crate::exactnum::{cabs, working_precision, AppComplex};

/// Pole of a Padé approximant.
#[derive(Clone, Debug)]
pub struct Pole {
    pub value: AppComplex,
    /// A matching pole (relative distance < 10^{-3}) exists at every
    /// neighbouring order `(L±2, M±2)` that the data supports.
    pub stable: bool,
    /// Pole with a numerator zero closer than 10^{-6}; treated as noise.
    pub froissart: bool,
}

/// Rational function `P/Q` with `Q(0) = 1` matching a minor to order `L+M`.
#[derive(Clone, Debug)]
pub struct PadeApproximant {
    numerator: Vec<AppComplex>,
    denominator: Vec<AppComplex>,
    orders: (usize, usize),
    requested: (usize, usize),
    poles: Vec<Pole>,
    zeros: Vec<AppComplex>,
    prec: u32,
    removed: Vec<(i64, AppComplex)>,
}

const FROISSART_DISTANCE: f64 = 1e-6;
const STABILITY_DISTANCE: f64 = 1e-3;

impl PadeApproximant {
    pub fn numerator(&self) -> &[AppComplex] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[AppComplex] {
        &self.denominator
    }

    /// Orders `(L, M)` actually used.
    pub fn orders(&self) -> (usize, usize) {
        self.orders
    }

    /// Orders asked for; differs from [`orders`](Self::orders) after the
    /// robust variant stepped down a degenerate diagonal.
    pub fn requested_orders(&self) -> (usize, usize) {
        self.requested
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    /// Poles that are not Froissart doublets.
    pub fn genuine_poles(&self) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(|p| !p.froissart)
    }

    pub fn zeros(&self) -> &[AppComplex] {
        &self.zeros
    }

    /// Precision (bits) the coefficients were solved and are evaluated at.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub(crate) fn removed(&self) -> &[(i64, AppComplex)] {
        &self.removed
    }

    /// Stable genuine pole closest to the origin.
    pub fn nearest_stable_pole(&self) -> Option<&Pole> {
        self.genuine_poles()
            .filter(|p| p.stable)
            .min_by(|a, b| cabs(&a.value).partial_cmp(&cabs(&b.value)).unwrap())
    }

    /// `P(ζ)/Q(ζ)`.
    pub fn eval(&self, zeta: &AppComplex) -> AppComplex {
        let p = horner(&self.numerator, zeta, self.prec);
        let q = horner(&self.denominator, zeta, self.prec);
        Complex::with_val(self.prec, p / q)
    }

    /// Residue of `P/Q` at a simple pole.
    pub fn residue(&self, pole: &AppComplex) -> AppComplex {
        let p = horner(&self.numerator, pole, self.prec);
        let dq: Vec<AppComplex> = self
            .denominator
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| Complex::with_val(self.prec, c * j as u32))
            .collect();
        let dq = horner(&dq, pole, self.prec);
        Complex::with_val(self.prec, p / dq)
    }
}

pub(crate) fn horner(cs: &[AppComplex], z: &AppComplex, prec: u32) -> AppComplex {
    let mut acc = Complex::new(prec);
    for c in cs.iter().rev() {
        acc = Complex::with_val(prec, &acc * z) + c;
    }
    acc
}

/// Internal precision for an `(L, M)` solve: the Toeplitz system loses
/// roughly four bits per unit of order.
fn solve_precision(l: usize, m: usize) -> u32 {
    working_precision().max(64) + 4 * (l + m) as u32
}

/// Denominator and numerator coefficients, or `None` if the linear system is
/// singular at the working tolerance.
fn solve(c: &[AppComplex], l: usize, m: usize, prec: u32) -> Option<(Vec<AppComplex>, Vec<AppComplex>)> {
    let at = |k: i64| -> AppComplex {
        if k < 0 {
            Complex::new(prec)
        } else {
            c[k as usize].clone()
        }
    };
    let mut q = vec![Complex::with_val(prec, 1)];
    if m > 0 {
        // Σ_{j=1..M} q_j c_{k-j} = -c_k for k = L+1..L+M
        let mut a: Vec<Vec<AppComplex>> = (0..m)
            .map(|i| (0..m).map(|j| at(l as i64 + i as i64 - j as i64)).collect())
            .collect();
        let mut rhs: Vec<AppComplex> = (0..m).map(|i| -at(l as i64 + 1 + i as i64)).collect();
        let scale = a.iter().flatten().map(cabs).fold(Float::new(prec), |acc, x| acc.max(&x));
        if scale.is_zero() {
            return None;
        }
        let threshold = scale >> (3 * prec / 4);
        for col in 0..m {
            let (piv, mag) = (col..m)
                .map(|r| (r, cabs(&a[r][col])))
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            if mag <= threshold {
                return None;
            }
            a.swap(col, piv);
            rhs.swap(col, piv);
            let inv = Complex::with_val(prec, a[col][col].recip_ref());
            for r in col + 1..m {
                let f = Complex::with_val(prec, &a[r][col] * &inv);
                if f.real().is_zero() && f.imag().is_zero() {
                    continue;
                }
                for k in col..m {
                    let t = Complex::with_val(prec, &f * &a[col][k]);
                    a[r][k] -= t;
                }
                let t = Complex::with_val(prec, &f * &rhs[col]);
                rhs[r] -= t;
            }
        }
        let mut x = vec![Complex::new(prec); m];
        for i in (0..m).rev() {
            let mut s = rhs[i].clone();
            for k in i + 1..m {
                s -= Complex::with_val(prec, &a[i][k] * &x[k]);
            }
            x[i] = Complex::with_val(prec, s / &a[i][i]);
        }
        q.extend(x);
    }
    let p = (0..=l)
        .map(|i| {
            let mut s = Complex::new(prec);
            for (j, qj) in q.iter().enumerate().take(i.min(m) + 1) {
                s += Complex::with_val(prec, qj * &c[i - j]);
            }
            s
        })
        .collect();
    Some((q, p))
}

/// Drops trailing coefficients that are negligible against the largest.
fn trimmed(cs: &[AppComplex], prec: u32) -> Vec<AppComplex> {
    let scale = cs.iter().map(cabs).fold(Float::new(prec), |acc, x| acc.max(&x));
    let tiny = scale >> (3 * prec / 4);
    let mut out = cs.to_vec();
    while out.len() > 1 && cabs(out.last().unwrap()) <= tiny {
        out.pop();
    }
    out
}

struct Raw {
    num: Vec<AppComplex>,
    den: Vec<AppComplex>,
    orders: (usize, usize),
    prec: u32,
}

fn check_orders(b: &BorelSeries, l: usize, m: usize) -> Result<()> {
    if l + m + 1 > b.len() {
        return Err(Error::InsufficientData(format!(
            "Padé order ({l}, {m}) needs {} coefficients, only {} available",
            l + m + 1,
            b.len()
        )));
    }
    Ok(())
}

fn raw_strict(b: &BorelSeries, l: usize, m: usize) -> Result<Raw> {
    check_orders(b, l, m)?;
    let prec = solve_precision(l, m);
    let c = b.coeffs_at(prec);
    let (den, num) = solve(&c, l, m, prec).ok_or(Error::DegeneratePade { l, m })?;
    Ok(Raw { num, den, orders: (l, m), prec })
}

fn raw_robust(b: &BorelSeries, l: usize, m: usize) -> Result<Raw> {
    check_orders(b, l, m)?;
    let (mut l, mut m) = (l, m);
    loop {
        match raw_strict(b, l, m) {
            Ok(r) => return Ok(r),
            Err(Error::DegeneratePade { .. }) if m > 0 && l > 0 => {
                l -= 1;
                m -= 1;
            }
            Err(Error::DegeneratePade { .. }) if m > 0 => m -= 1,
            Err(e) => return Err(e),
        }
    }
}

fn genuine_poles(raw: &Raw) -> Result<(Vec<AppComplex>, Vec<AppComplex>, Vec<bool>)> {
    let den = trimmed(&raw.den, raw.prec);
    let num = trimmed(&raw.num, raw.prec);
    let poles = complex_roots(&den, raw.prec)?;
    let zeros = if num.len() > 1 { complex_roots(&num, raw.prec)? } else { vec![] };
    let froissart = poles
        .iter()
        .map(|p| zeros.iter().any(|z| cabs(&Complex::with_val(raw.prec, p - z)).to_f64() < FROISSART_DISTANCE))
        .collect();
    Ok((poles, zeros, froissart))
}

fn matches(p: &AppComplex, others: &[AppComplex]) -> bool {
    let scale = cabs(p).to_f64().max(1e-30);
    others
        .iter()
        .any(|o| cabs(&Complex::with_val(p.prec().0, p - o)).to_f64() < STABILITY_DISTANCE * scale)
}

fn finish(b: &BorelSeries, raw: Raw, requested: (usize, usize)) -> Result<PadeApproximant> {
    let (poles, zeros, froissart) = genuine_poles(&raw)?;
    let (l, m) = raw.orders;
    let mut neighbours = vec![];
    if l >= 2 && m >= 2 {
        neighbours.push((l - 2, m - 2));
    }
    if l + m + 5 <= b.len() {
        neighbours.push((l + 2, m + 2));
    }
    let mut neighbour_poles = vec![];
    for (nl, nm) in neighbours {
        if let Ok(r) = raw_robust(b, nl, nm) {
            let (ps, _, fr) = genuine_poles(&r)?;
            neighbour_poles.push(ps.into_iter().zip(fr).filter(|(_, f)| !f).map(|(p, _)| p).collect::<Vec<_>>());
        }
    }
    let poles = poles
        .into_iter()
        .zip(froissart)
        .map(|(value, froissart)| {
            let stable = !froissart && !neighbour_poles.is_empty() && neighbour_poles.iter().all(|ns| matches(&value, ns));
            Pole { value, stable, froissart }
        })
        .collect();
    Ok(PadeApproximant {
        numerator: raw.num,
        denominator: raw.den,
        orders: raw.orders,
        requested,
        poles,
        zeros,
        prec: raw.prec,
        removed: b.removed().to_vec(),
    })
}

/// `[L/M]` Padé approximant of the minor.
///
/// Fails with a degenerate-table error when the linear system is singular;
/// [`pade_robust`] steps down the diagonal instead.
pub fn pade_approximant(b: &BorelSeries, l: usize, m: usize) -> Result<PadeApproximant> {
    let raw = raw_strict(b, l, m)?;
    finish(b, raw, (l, m))
}

/// `[L/M]` Padé approximant, moving to `[L-1/M-1]` (and so on) while the
/// table is degenerate, as happens when the minor is itself rational.
pub fn pade_robust(b: &BorelSeries, l: usize, m: usize) -> Result<PadeApproximant> {
    let raw = raw_robust(b, l, m)?;
    finish(b, raw, (l, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::complex_to_f64;
    use rug::Rational;

    fn geometric(ratio: i64, n: usize) -> BorelSeries {
        use rug::ops::Pow;
        BorelSeries::from_rationals((0..n as u32).map(|k| Rational::from(ratio).pow(k)).collect())
    }

    #[test]
    fn alternating_series_is_one_over_one_plus_zeta() {
        let p = pade_approximant(&geometric(-1, 10), 0, 1).unwrap();
        let (re, im) = complex_to_f64(&p.poles()[0].value);
        assert!((re + 1.0).abs() < 1e-60 && im.abs() < 1e-60);
        assert!(p.poles()[0].stable);
        assert_eq!(complex_to_f64(&p.denominator()[1]), (1.0, 0.0));
        assert_eq!(complex_to_f64(&p.numerator()[0]), (1.0, 0.0));
    }

    #[test]
    fn powers_of_two_have_pole_at_one_half() {
        let p = pade_approximant(&geometric(2, 10), 0, 1).unwrap();
        let (re, _) = complex_to_f64(&p.poles()[0].value);
        assert!((re - 0.5).abs() < 1e-60);
    }

    #[test]
    fn rational_minor_is_degenerate_on_high_diagonal() {
        let b = geometric(-1, 60);
        let err = pade_approximant(&b, 29, 30).unwrap_err();
        assert_eq!(err.kind(), "degenerate-table");
        let p = pade_robust(&b, 29, 30).unwrap();
        assert_eq!(p.orders(), (0, 1));
        assert_eq!(p.requested_orders(), (29, 30));
    }

    #[test]
    fn not_enough_coefficients() {
        assert_eq!(pade_approximant(&geometric(2, 3), 2, 2).unwrap_err().kind(), "insufficient-data");
    }

    #[test]
    fn residue_of_simple_pole() {
        let p = pade_approximant(&geometric(-1, 4), 0, 1).unwrap();
        let r = p.residue(&p.poles()[0].value);
        let (re, im) = complex_to_f64(&r);
        assert!((re - 1.0).abs() < 1e-60 && im.abs() < 1e-60);
    }
}
