//! Directional Laplace sums of Padé-continued minors and lateral jumps.

use std::f64::consts::PI;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float};

use super::{pade_robust, BorelSeries, PadeApproximant};
use crate::error::{Error, Result};
use crate::exactnum::{cabs, carg, working_precision, AppComplex};

/// Knobs for [`laplace_sum_with`].
#[derive(Clone, Debug)]
pub struct LaplaceOptions {
    /// Minimum distance between the ray and any genuine pole.
    pub delta: f64,
    /// Target absolute accuracy.
    pub tol: f64,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        LaplaceOptions { delta: 1e-3, tol: 1e-30 }
    }
}

/// Value of a directional Laplace sum with its absolute error estimate.
#[derive(Clone, Debug)]
pub struct LaplaceResult {
    pub z: AppComplex,
    pub theta: f64,
    pub value: AppComplex,
    pub error: f64,
}

fn unit(theta: f64, prec: u32) -> AppComplex {
    let t = Float::with_val(prec, theta);
    Complex::with_val(prec, (t.clone().cos(), t.sin()))
}

/// Angle `a - b` reduced to `(-π, π]`.
fn angle_diff(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Distance from `p` to the ray `e^{iθ}·[0, ∞)`.
fn ray_distance(p: &AppComplex, theta: f64) -> f64 {
    let r = cabs(p).to_f64();
    let d = angle_diff(carg(p).to_f64(), theta);
    if d.abs() >= PI / 2.0 {
        r
    } else {
        r * d.sin().abs()
    }
}

/// `∫_0^{e^{iθ}∞} e^{-zζ} p(ζ) dζ` plus the terms removed before the Borel
/// transform, with default options.
pub fn laplace_sum(p: &PadeApproximant, z: &AppComplex, theta: f64) -> Result<LaplaceResult> {
    laplace_sum_with(p, z, theta, &LaplaceOptions::default())
}

/// [`laplace_sum`] with explicit pole clearance and accuracy target.
///
/// The integral runs over `[0, T]` by adaptive tanh-sinh; `T` is chosen so
/// that the tail bound `max|p|·e^{-κT}/κ`, `κ = Re(z e^{iθ})`, is below a
/// tenth of the target.
pub fn laplace_sum_with(p: &PadeApproximant, z: &AppComplex, theta: f64, opts: &LaplaceOptions) -> Result<LaplaceResult> {
    let prec = p.precision();
    let out_prec = working_precision();
    for pole in p.genuine_poles() {
        let d = ray_distance(&pole.value, theta);
        if d < opts.delta {
            let (re, im) = crate::exactnum::complex_to_f64(&pole.value);
            return Err(Error::RayHitsPole { pole: format!("{re:.6e}{im:+.6e}i"), distance: d });
        }
    }
    let dir = unit(theta, prec);
    let zw = Complex::with_val(prec, z * &dir);
    let kappa = zw.real().to_f64();
    if kappa <= 0.0 || !kappa.is_finite() {
        return Err(Error::NonConvergent(format!("Re(z e^(iθ)) = {kappa:.3e} ≤ 0 at θ = {theta}")));
    }

    let p_at = |t: f64| -> f64 {
        let zeta = Complex::with_val(prec, &dir * t);
        cabs(&p.eval(&zeta)).to_f64()
    };
    let max_on = |a: f64, b: f64| (0..=64).map(|i| p_at(a + (b - a) * i as f64 / 64.0)).fold(0.0, f64::max);
    let mut t_end = ((10.0 / opts.tol).ln() / kappa).max(1e-3);
    let mut tail = f64::INFINITY;
    for _ in 0..8 {
        let m_head = max_on(0.0, t_end).max(1e-300);
        let m_tail = max_on(t_end, 4.0 * t_end);
        tail = m_tail * (-kappa * t_end).exp() / kappa;
        if tail < opts.tol / 10.0 {
            break;
        }
        t_end = ((10.0 * m_head.max(m_tail) / (opts.tol * kappa)).ln() / kappa).max(t_end * 1.5);
    }
    if tail >= opts.tol / 10.0 {
        log::warn!("Laplace tail bound {tail:.3e} above target {:.3e}", opts.tol);
    }

    let integrand = |t: &Float| -> Complex {
        let zeta = Complex::with_val(prec, &dir * t);
        let e = Complex::with_val(prec, -Complex::with_val(prec, z * &zeta)).exp();
        Complex::with_val(prec, e * p.eval(&zeta)) * &dir
    };
    let qtol = Float::with_val(prec, opts.tol / 2.0);
    let r = super::quad::integrate(
        &integrand,
        &Float::with_val(prec, 0),
        &Float::with_val(prec, t_end),
        &qtol,
        prec,
        14,
    );
    let mut value = r.value;
    for (k, a) in p.removed() {
        let zk = Complex::with_val(prec, z.pow(*k as i32));
        value += Complex::with_val(prec, a * zk);
    }
    let error = r.error.to_f64() + tail;
    if error > opts.tol * 1e3 {
        return Err(Error::Quadrature(format!("Laplace integral error estimate {error:.3e} exceeds target {:.3e}", opts.tol)));
    }
    Ok(LaplaceResult { z: Complex::with_val(out_prec, z), theta, value: Complex::with_val(out_prec, value), error })
}

/// Knobs for [`stokes_jump_with`].
#[derive(Clone, Debug, Default)]
pub struct StokesOptions {
    /// Padé orders; the default is the diagonal the data supports.
    pub orders: Option<(usize, usize)>,
    /// Singularity location; by default the nearest stable pole on the ray.
    pub omega: Option<AppComplex>,
    /// Minor of the series multiplying `e^{-ωz}` in the jump, resummed in
    /// the singular direction. Taken as 1 when absent.
    pub partner: Option<BorelSeries>,
    pub laplace: LaplaceOptions,
}

/// One lateral difference `L_{θ-ε}(z) - L_{θ+ε}(z)`.
#[derive(Clone, Debug)]
pub struct JumpSample {
    pub z: AppComplex,
    pub jump: AppComplex,
    /// `2πi Σ Res e^{-zζ} p(ζ)` over all poles between the two rays.
    pub residue_sum: AppComplex,
    /// `jump / (e^{-ωz}·partner(z))`, when `ω` is known.
    pub a_est: Option<AppComplex>,
}

/// Stokes constant estimated from lateral Laplace jumps.
#[derive(Clone, Debug)]
pub struct StokesEstimate {
    pub theta_sing: f64,
    pub omega: Option<AppComplex>,
    pub epsilon: f64,
    pub orders: (usize, usize),
    pub samples: Vec<JumpSample>,
    /// Mean of the per-sample estimates.
    pub constant: Option<AppComplex>,
    /// Maximum pairwise relative deviation of the per-sample estimates.
    pub spread: f64,
    /// Spread above 10^{-3}.
    pub unstable: bool,
}

const SPREAD_LIMIT: f64 = 1e-3;
const ON_RAY: f64 = 1e-8;

/// The series multiplying `e^{-ωz}` in the jump. A minor that vanishes
/// identically leaves only its removed polynomial part.
enum Partner {
    Resummed(PadeApproximant),
    Polynomial(Vec<(i64, AppComplex)>),
    One,
}

/// Diagonal Padé orders for `n` coefficients.
fn diagonal(n: usize) -> (usize, usize) {
    let l = n.saturating_sub(1) / 2;
    (l, n.saturating_sub(1) - l)
}

/// Lateral jumps across `θ_sing` with default options. `radii` give the
/// sample points `z = ρ e^{-iθ_sing}`, where both lateral sums converge.
pub fn stokes_jump(b: &BorelSeries, theta_sing: f64, radii: &[f64]) -> Result<StokesEstimate> {
    stokes_jump_with(b, theta_sing, radii, &StokesOptions::default())
}

/// [`stokes_jump`] with explicit orders, exponent and partner series.
///
/// The rays sit at `θ_sing ± ε` with `ε = min(π/4, half the angular gap to
/// the nearest genuine pole off the ray)`; the jump does not depend on `ε`
/// inside that sector.
pub fn stokes_jump_with(b: &BorelSeries, theta_sing: f64, radii: &[f64], opts: &StokesOptions) -> Result<StokesEstimate> {
    let (l, m) = opts.orders.unwrap_or_else(|| diagonal(b.len()));
    let pade = pade_robust(b, l, m)?;
    let partner = match &opts.partner {
        Some(pb) if pb.coeffs().iter().any(|c| !(c.real().is_zero() && c.imag().is_zero())) => {
            let (pl, pm) = diagonal(pb.len());
            Partner::Resummed(pade_robust(pb, pl, pm)?)
        }
        Some(pb) => Partner::Polynomial(pb.removed().to_vec()),
        None => Partner::One,
    };
    let genuine: Vec<_> = pade.genuine_poles().collect();
    let gap = genuine
        .iter()
        .map(|p| angle_diff(carg(&p.value).to_f64(), theta_sing).abs())
        .filter(|d| *d > ON_RAY)
        .fold(f64::INFINITY, f64::min);
    let eps = (PI / 4.0).min(gap / 2.0);
    let omega = opts.omega.clone().or_else(|| {
        genuine
            .iter()
            .filter(|p| p.stable && angle_diff(carg(&p.value).to_f64(), theta_sing).abs() <= ON_RAY)
            .min_by(|a, b| cabs(&a.value).partial_cmp(&cabs(&b.value)).unwrap())
            .map(|p| p.value.clone())
    });
    // the residue check covers every pole of the rational function, doublets included
    let inside: Vec<AppComplex> = pade
        .poles()
        .iter()
        .filter(|p| angle_diff(carg(&p.value).to_f64(), theta_sing).abs() < eps)
        .map(|p| p.value.clone())
        .collect();

    let prec = pade.precision();
    let samples: Vec<Result<JumpSample>> = radii
        .par_iter()
        .map(|&rho| {
            let z = Complex::with_val(prec, unit(-theta_sing, prec) * rho);
            let minus = laplace_sum_with(&pade, &z, theta_sing - eps, &opts.laplace)?;
            let plus = laplace_sum_with(&pade, &z, theta_sing + eps, &opts.laplace)?;
            let jump = Complex::with_val(prec, &minus.value - &plus.value);
            let mut residue_sum = Complex::new(prec);
            for w in &inside {
                let e = Complex::with_val(prec, -Complex::with_val(prec, &z * w)).exp();
                residue_sum += Complex::with_val(prec, pade.residue(w) * e);
            }
            let two_pi_i = Complex::with_val(prec, (0, Float::with_val(prec, rug::float::Constant::Pi) * 2u32));
            residue_sum *= two_pi_i;
            let a_est = match &omega {
                Some(w) => {
                    let mut den = Complex::with_val(prec, -Complex::with_val(prec, w * &z)).exp();
                    match &partner {
                        Partner::Resummed(pp) => den *= laplace_sum_with(pp, &z, theta_sing, &opts.laplace)?.value,
                        Partner::Polynomial(terms) => {
                            let mut v = Complex::new(prec);
                            for (k, a) in terms {
                                v += Complex::with_val(prec, a * Complex::with_val(prec, z.clone().pow(*k as i32)));
                            }
                            den *= v;
                        }
                        Partner::One => {}
                    }
                    Some(Complex::with_val(prec, &jump / den))
                }
                None => None,
            };
            Ok(JumpSample { z, jump, residue_sum, a_est })
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;

    let estimates: Vec<&AppComplex> = samples.iter().filter_map(|s| s.a_est.as_ref()).collect();
    let constant = if estimates.is_empty() {
        None
    } else {
        let mut sum = Complex::new(prec);
        for e in &estimates {
            sum += *e;
        }
        Some(sum / estimates.len() as u32)
    };
    let mut spread = 0f64;
    for (i, a) in estimates.iter().enumerate() {
        for b in &estimates[i + 1..] {
            let scale = cabs(a).to_f64().max(cabs(b).to_f64()).max(1e-300);
            spread = spread.max(cabs(&Complex::with_val(prec, *a - *b)).to_f64() / scale);
        }
    }
    let unstable = spread > SPREAD_LIMIT;
    if unstable {
        log::warn!("Stokes estimate spread {spread:.3e} exceeds {SPREAD_LIMIT:.0e}");
    }
    Ok(StokesEstimate { theta_sing, omega, epsilon: eps, orders: pade.orders(), samples, constant, spread, unstable })
}
