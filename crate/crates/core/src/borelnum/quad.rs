//! Double-exponential (tanh-sinh) quadrature at arbitrary precision.

use rug::float::Constant;
use rug::{Complex, Float};

/// Integral of `f` over `[a, b]` with absolute error estimate.
#[derive(Clone, Debug)]
pub struct QuadResult {
    pub value: Complex,
    pub error: Float,
    pub evaluations: usize,
}

const MAX_LEVEL: u32 = 12;

/// Tanh-sinh rule on `[a, b]`, halving the step until two successive levels
/// agree within `tol` (absolute). Returns the last estimate and the final
/// level difference as error.
pub fn tanh_sinh(f: &dyn Fn(&Float) -> Complex, a: &Float, b: &Float, tol: &Float, prec: u32) -> QuadResult {
    let half = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let pi_half = Float::with_val(prec, Constant::Pi) / 2u32;
    // nodes beyond t_max have weights below 2^{-prec}
    let t_max = (((prec as f64) * std::f64::consts::LN_2 + 20.0) / std::f64::consts::FRAC_PI_2 * 2.0).ln().max(1.0) + 0.5;

    let eval = |t: f64| -> (Complex, usize) {
        let t = Float::with_val(prec, t);
        let s = Float::with_val(prec, t.sinh_ref()) * &pi_half;
        let c = Float::with_val(prec, t.cosh_ref()) * &pi_half;
        let ch = Float::with_val(prec, s.cosh_ref());
        let w = c / Float::with_val(prec, ch.square_ref());
        let x = Float::with_val(prec, s.tanh_ref());
        let w = Float::with_val(prec, &w * &half);
        let xp = Float::with_val(prec, &mid + Float::with_val(prec, &half * &x));
        let xm = Float::with_val(prec, &mid - Float::with_val(prec, &half * &x));
        if x == 0 {
            (Complex::with_val(prec, f(&xp) * &w), 1)
        } else {
            (Complex::with_val(prec, (f(&xp) + f(&xm)) * &w), 2)
        }
    };

    let mut h = 0.5f64;
    let mut evaluations = 0;
    let mut sum = Complex::new(prec);
    let mut j = 0i64;
    loop {
        let t = j as f64 * h;
        if t > t_max {
            break;
        }
        let (v, n) = eval(t);
        sum += v;
        evaluations += n;
        j += 1;
    }
    let mut estimate = Complex::with_val(prec, &sum * h);
    let mut err = Float::with_val(prec, f64::INFINITY);
    let mut small_in_a_row = 0;
    for level in 1..=MAX_LEVEL {
        h /= 2.0;
        let mut j = 1i64;
        loop {
            let t = j as f64 * h;
            if t > t_max {
                break;
            }
            let (v, n) = eval(t);
            sum += v;
            evaluations += n;
            j += 2;
        }
        let next = Complex::with_val(prec, &sum * h);
        err = Float::with_val(prec, Complex::with_val(prec, &next - &estimate).abs_ref());
        estimate = next;
        // two agreeing levels in a row guard against a sharp peak that the
        // coarse grids happen to sample identically
        if err <= *tol {
            small_in_a_row += 1;
            if small_in_a_row >= 2 && level >= 3 {
                break;
            }
        } else {
            small_in_a_row = 0;
        }
    }
    QuadResult { value: estimate, error: err, evaluations }
}

/// Integral over `[a, b]` by tanh-sinh on panels, bisecting any panel whose
/// level difference exceeds its share of `tol` (up to `max_depth` times).
pub fn integrate(f: &dyn Fn(&Float) -> Complex, a: &Float, b: &Float, tol: &Float, prec: u32, max_depth: u32) -> QuadResult {
    let r = tanh_sinh(f, a, b, tol, prec);
    if r.error <= *tol || max_depth == 0 {
        return r;
    }
    let m = Float::with_val(prec, a + b) / 2u32;
    let sub_tol = Float::with_val(prec, tol / 2u32);
    let left = integrate(f, a, &m, &sub_tol, prec, max_depth - 1);
    let right = integrate(f, &m, b, &sub_tol, prec, max_depth - 1);
    QuadResult {
        value: Complex::with_val(prec, &left.value + &right.value),
        error: Float::with_val(prec, &left.error + &right.error),
        evaluations: r.evaluations + left.evaluations + right.evaluations,
    }
}
