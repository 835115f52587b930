//! Acceptance suite. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see
//! them in order.
//!
//! Every tolerance and time limit is pinned in [`tol`].

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use resurgence::borelnum::{
    borel_series, borel_series_any, laplace_sum, pade_robust, stokes_jump, stokes_jump_with, StokesEstimate, StokesOptions,
};
use resurgence::diffop::{borel_transform_op, parse_operator};
use resurgence::exactnum::{
    cabs, complex_from_f64, complex_from_rational, complex_to_f64, factorial, with_precision, AppComplex, Integer,
    LaurentPolynomial, PowerSeries, Rational,
};
use resurgence::formal::{formal_basis, free_energy_series, gevrey_estimate, series_solution};
use resurgence::models::{
    asymptotic_coeffs, build_airy_exact, build_ek, quad_moment, singularity_discreteness, verify_governing, Potential,
};
use rug::ops::Pow;
use rug::{Complex, Float};

mod tol {
    use std::time::Duration;

    pub const RECURRENCE_TIME: Duration = Duration::from_secs(1);
    pub const CLOSED_FORM_TIME: Duration = Duration::from_secs(5);
    /// Residual of `u^{k-1}` against its closed form, at 256 bits.
    pub const ROOT_FORMULA: f64 = 1e-50;
    pub const BOREL_POLE: f64 = 1e-6;
    pub const RESUM_VS_QUAD: f64 = 1e-8;
    pub const RESUM_POINT_TIME: Duration = Duration::from_secs(10);
    /// Absolute slack added to the remainder bound.
    pub const REMAINDER_SLACK: f64 = 1e-12;
    pub const EULER_STOKES: f64 = 1e-6;
    /// Relative deviation of the fitted Gevrey order from `k - 1`.
    pub const GEVREY_ORDER: f64 = 0.05;
    pub const GOVERNING: f64 = 1e-8;
    pub const GOVERNING_QUAD: f64 = 1e-10;
    pub const STOKES_SPREAD: f64 = 1e-3;
    pub const STOKES_TRUNCATION: f64 = 1e-3;
}

const PREC: u32 = 256;

fn verdict(id: &str, name: &str, ok: bool, detail: String) {
    println!("{} [{id}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "[{id}] {name}: {detail}");
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn dist(a: &AppComplex, b: &AppComplex) -> f64 {
    cabs(&Complex::with_val(PREC, a - b)).to_f64()
}

/// `(-1)^n (2kn)! / (n! 2^{kn} (kn)!)`.
fn closed_form(k: u32, n: u32) -> Rational {
    let num = factorial(2 * k * n);
    let den = factorial(n) * Integer::from(Integer::u_pow_u(2, k * n)) * factorial(k * n);
    let r = Rational::from((num, den));
    if n % 2 == 1 {
        -r
    } else {
        r
    }
}

/// Minor of `Z̃_0` for `k = 2` from `n` λ-coefficients past the constant.
fn quartic_minor(n: usize) -> resurgence::borelnum::BorelSeries {
    let m = build_ek(2, n).unwrap();
    borel_series(&PowerSeries::new(Rational::new(), 1, m.lambda_series.coeffs().to_vec())).unwrap()
}

#[test]
fn c01_exact_recurrence() {
    let m = build_ek(2, 1).unwrap();
    let (s, elapsed) = timed(|| series_solution(&m.operator_lambda, &Rational::new(), 50).unwrap());
    let a = s.coeffs();
    let bad: Vec<usize> = (0..50)
        .filter(|&n| {
            let n_ = n as i64;
            a[n + 1] != Rational::from(-(4 * n_ + 1) * (4 * n_ + 3)) / Rational::from(n_ + 1) * &a[n]
        })
        .collect();
    let ok = bad.is_empty() && a.len() == 51 && a[0] == 1 && elapsed < tol::RECURRENCE_TIME;
    verdict("01", "exact recurrence of E_2 series", ok, format!("{} mismatches, {elapsed:.2?}", bad.len()));
}

#[test]
fn c02_closed_form_coefficients() {
    let (mismatches, elapsed) = timed(|| {
        let mut bad = vec![];
        for k in 2..=4u32 {
            let m = build_ek(k as usize, 30).unwrap();
            // second route: Gaussian moments of V^n
            let moments = asymptotic_coeffs(&Potential::monomial(k as usize), 0, 30);
            for n in 0..=30u32 {
                let expect = closed_form(k, n);
                if m.lambda_series.coeffs()[n as usize] != expect || moments[n as usize] != expect {
                    bad.push((k, n));
                }
            }
        }
        bad
    });
    let ok = mismatches.is_empty() && elapsed < tol::CLOSED_FORM_TIME;
    verdict("02", "closed-form coefficients, k = 2..4, n <= 30", ok, format!("mismatches {mismatches:?}, {elapsed:.2?}"));
}

#[test]
fn c03_polygon_slopes() {
    let mut wrong = vec![];
    for k in 2..=6usize {
        let m = build_ek(k, 4).unwrap();
        let lam = m.polygon_lambda().positive_slopes();
        let ram = m.polygon_x().unwrap().positive_slopes();
        if lam != vec![q(1, k as i64 - 1)] || ram != vec![q(1, 1)] {
            wrong.push(k);
        }
    }
    verdict("03", "polygon slopes 1/(k-1) and 1 after ramification", wrong.is_empty(), format!("wrong for k in {wrong:?}"));
}

#[test]
fn c04_determining_data() {
    with_precision(PREC, || {
        let m = build_ek(2, 2).unwrap();
        let p = &m.determining.as_ref().unwrap().polynomial;
        let exact_ok = p.coeffs() == [q(0, 1), q(-1, 1), q(16, 1)];
        let mut worst = 0f64;
        let mut counts_ok = true;
        for k in 3..=6usize {
            let m = build_ek(k, 2).unwrap();
            let d = m.determining.as_ref().unwrap();
            counts_ok &= d.nonzero_roots.len() == k - 1;
            let mm = q(1, k as i64 - 1);
            let base = Rational::from(2 * k as i64) * &mm;
            let mut target = Rational::from(&mm / base.pow(k as u32));
            if k % 2 == 1 {
                target = -target;
            }
            let target = complex_from_rational(&target, PREC);
            for r in &d.nonzero_roots {
                let power = Complex::with_val(PREC, r.value.clone().pow(k as u32 - 1));
                worst = worst.max(dist(&power, &target));
            }
        }
        let ok = exact_ok && counts_ok && worst < tol::ROOT_FORMULA;
        verdict(
            "04",
            "determining polynomial u(16u-1) and root formula for k = 3..6",
            ok,
            format!("P_2 = {p}, max |u^(k-1) - formula| = {worst:.2e}"),
        );
    });
}

#[test]
fn c05_borel_operator() {
    let m = build_ek(2, 2).unwrap();
    let b = borel_transform_op(m.operator_x.as_ref().unwrap()).unwrap();
    let d = b.d_form();
    let lp = |t: &[(i64, i64)]| LaurentPolynomial::from_terms(t.iter().map(|&(p, c)| (p, Rational::from(c))));
    let ok = d.len() == 3 && d[2] == lp(&[(2, 16), (1, 1)]) && d[1] == lp(&[(1, 64), (0, 2)]) && d[0] == lp(&[(0, 35)]);
    verdict("05", "Borel operator (16z^2+z)D^2 + 2(32z+1)D + 35", ok, format!("got {}", b.operator));
}

#[test]
fn c06_borel_singularity() {
    with_precision(PREC, || {
        let minor = quartic_minor(60);
        let p = pade_robust(&minor, 29, 30).unwrap();
        let pole = p.nearest_stable_pole().map(|p| p.value.clone());
        let target = complex_from_rational(&q(-1, 16), PREC);
        let d = pole.as_ref().map(|w| dist(w, &target)).unwrap_or(f64::INFINITY);
        let ok = minor.len() == 60 && d < tol::BOREL_POLE;
        verdict("06", "stable Pade pole at -1/16", ok, format!("orders {:?}, |pole + 1/16| = {d:.2e}", p.orders()));
    });
}

#[test]
fn c07_resummation_vs_quadrature() {
    with_precision(PREC, || {
        let p = pade_robust(&quartic_minor(60), 29, 30).unwrap();
        let v = Potential::monomial(2);
        let mut worst = 0f64;
        let mut slowest = Duration::ZERO;
        for lambda in [0.02, 0.05, 0.1, 0.3] {
            let (diff, elapsed) = timed(|| {
                let z = complex_from_f64(1.0 / lambda, 0.0, PREC);
                let s = laplace_sum(&p, &z, 0.0).unwrap();
                let m = quad_moment(&v, 0, &complex_from_f64(lambda, 0.0, PREC), 1e-20).unwrap();
                dist(&s.value, &m.value)
            });
            worst = worst.max(diff);
            slowest = slowest.max(elapsed);
        }
        let ok = worst <= tol::RESUM_VS_QUAD && slowest < tol::RESUM_POINT_TIME;
        verdict("07", "Laplace sum vs quadrature, k = 2", ok, format!("max |diff| = {worst:.2e}, slowest point {slowest:.2?}"));
    });
}

#[test]
fn c08_remainder_bound() {
    with_precision(PREC, || {
        let lambda = q(1, 20);
        let alphas = asymptotic_coeffs(&Potential::monomial(2), 0, 31);
        let z = quad_moment(&Potential::monomial(2), 0, &complex_from_rational(&lambda, PREC), 1e-40).unwrap();
        let exact = z.value.real().clone();
        let mut partial = Rational::new();
        let mut violations = vec![];
        let mut tightest = f64::INFINITY;
        for n in 0..=30usize {
            partial += &alphas[n] * Rational::from((&lambda).pow(n as u32));
            let next = (&alphas[n + 1] * Rational::from((&lambda).pow(n as u32 + 1))).abs();
            let remainder = Float::with_val(PREC, &exact - &partial).abs().to_f64();
            let bound = next.to_f64() + tol::REMAINDER_SLACK;
            tightest = tightest.min(bound / remainder.max(1e-300));
            if remainder > bound {
                violations.push(n);
            }
        }
        verdict(
            "08",
            "remainder bound at lambda = 0.05, N <= 30",
            violations.is_empty(),
            format!("violations at {violations:?}, smallest bound/remainder = {tightest:.3}"),
        );
    });
}

#[test]
fn c09_euler_stokes_constant() {
    with_precision(PREC, || {
        let h = parse_operator("x*theta^2 + theta - 1").unwrap();
        let basis = formal_basis(&h, 30).unwrap();
        let f0 = basis.iter().find(|e| e.u.exact.as_ref().is_some_and(|u| *u == 0)).unwrap();
        let minor = borel_series_any(&f0.series).unwrap();
        let est = stokes_jump(&minor, PI, &[2.0, 4.0, 8.0]).unwrap();
        let two_pi_i = Complex::with_val(PREC, (0, Float::with_val(PREC, rug::float::Constant::Pi) * 2u32));
        let worst = est.samples.iter().map(|s| s.a_est.as_ref().map(|a| dist(a, &two_pi_i)).unwrap_or(f64::INFINITY)).fold(0f64, f64::max);
        let ok = est.samples.len() == 3 && worst < tol::EULER_STOKES;
        verdict("09", "Euler jump / e^z = 2 pi i at |z| = 2, 4, 8", ok, format!("max deviation {worst:.2e}"));
    });
}

#[test]
fn c10_airy_structure() {
    let mut problems = vec![];
    // q with rational q^{3/2}
    for (qv, q32) in [(q(1, 1), q(1, 1)), (q(4, 1), q(8, 1)), (q(4, 9), q(8, 27)), (q(9, 4), q(27, 8))] {
        let m = build_airy_exact(&qv, 8).unwrap();
        let up = q(2, 3) * &q32;
        let um = Rational::from(-&up);
        if m.u_plus.exact.as_ref() != Some(&up) || m.u_minus.exact.as_ref() != Some(&um) {
            problems.push(format!("q = {qv}: u mismatch"));
        }
        if m.beta != q(-1, 2) || m.basis.iter().any(|e| e.beta != q(-1, 2)) {
            problems.push(format!("q = {qv}: beta = {}", m.beta));
        }
        for b in &m.branches {
            let u = b.u.exact.clone().unwrap();
            let mut zeros: Vec<Option<Rational>> = b.leading_zeros.iter().map(|z| z.exact.clone()).collect();
            zeros.sort();
            let mut expect = vec![Some(Rational::new()), Some(Rational::from(&u * 2u32))];
            expect.sort();
            if zeros != expect {
                problems.push(format!("q = {qv}, u = {u}: zeros {zeros:?}"));
            }
        }
    }
    verdict("10", "Airy u = +-(2/3)q^(3/2), beta = -1/2, zeros {0, 2u}", problems.is_empty(), format!("{problems:?}"));
}

#[test]
fn c11_discreteness() {
    let mut wrong = vec![];
    for (k, expect) in [(3, true), (4, true), (5, true), (7, true), (6, false), (8, false), (9, false), (10, false), (11, false), (12, false)] {
        let v = singularity_discreteness(k).unwrap();
        if v.discrete != expect {
            wrong.push(k);
        }
    }
    verdict("11", "lattice verdicts for k = 3..12", wrong.is_empty(), format!("wrong for k in {wrong:?}"));
}

#[test]
fn c12_gevrey_fit() {
    let mut fits = vec![];
    let mut ok = true;
    for k in 2..=3usize {
        let m = build_ek(k, 79).unwrap();
        assert_eq!(m.lambda_series.coeffs().len(), 80);
        let g = gevrey_estimate(&m.lambda_series).unwrap();
        let expect = (k - 1) as f64;
        ok &= ((g.s - expect) / expect).abs() < tol::GEVREY_ORDER;
        fits.push(format!("k = {k}: s = {:.4}", g.s));
    }
    verdict("12", "Gevrey order k - 1 from 80 coefficients", ok, fits.join(", "));
}

#[test]
fn c13_free_energy() {
    let m = build_ek(2, 4).unwrap();
    let w = free_energy_series(&m.lambda_series, 4).unwrap();
    let c = w.coeffs();
    let ok = c[0] == 0 && c[1] == -3 && c[2] == 48;
    verdict("13", "free energy w_1 = -3, w_2 = 48", ok, format!("w_1 = {}, w_2 = {}", c[1], c[2]));
}

#[test]
fn c14_governing_residuals() {
    with_precision(PREC, || {
        let r = verify_governing(&Potential::monomial(2), 3, 0.1, tol::GOVERNING_QUAD).unwrap();
        let worst = r.rows.iter().map(|row| row.rec1_weighted.max(row.rec1_difference).max(row.rec2)).fold(0f64, f64::max);
        let ok = r.rows.len() == 4 && worst <= tol::GOVERNING;
        verdict("14", "governing relations for phi^4 at lambda = 0.1, j <= 3", ok, format!("max residual {worst:.2e}"));
    });
}

fn quartic_stokes(n: usize) -> StokesEstimate {
    let m = build_ek(2, n).unwrap();
    let minor = borel_series(&PowerSeries::new(Rational::new(), 1, m.lambda_series.coeffs().to_vec())).unwrap();
    let partner = m.basis.iter().find(|e| e.u.exact == Some(q(1, 16))).unwrap();
    let opts = StokesOptions {
        omega: Some(complex_from_rational(&q(-1, 16), PREC)),
        partner: Some(borel_series_any(&partner.series).unwrap()),
        ..Default::default()
    };
    stokes_jump_with(&minor, PI, &[8.0, 16.0, 32.0], &opts).unwrap()
}

#[test]
fn c15_quartic_stokes_stability() {
    with_precision(PREC, || {
        let a = quartic_stokes(50);
        let b = quartic_stokes(70);
        let (ca, cb) = (a.constant.clone().unwrap(), b.constant.clone().unwrap());
        let drift = dist(&ca, &cb) / cabs(&cb).to_f64();
        let ok = a.spread < tol::STOKES_SPREAD && b.spread < tol::STOKES_SPREAD && drift < tol::STOKES_TRUNCATION;
        let (re, im) = complex_to_f64(&cb);
        verdict(
            "15",
            "quartic Stokes constant: spread and truncation invariance 50 -> 70",
            ok,
            format!("A = {re:.3e}{im:+.9}i, spreads {:.1e} / {:.1e}, drift {drift:.1e}", a.spread, b.spread),
        );
    });
}
