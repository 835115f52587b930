//! The governing equation `E_k` of `Z_0(λ)` for `V = φ^{2k}`.

use std::f64::consts::PI;

use rug::{Complex, Rational};

use crate::diffop::ThetaOperator;
use crate::error::{Error, Result};
use crate::exactnum::roots::Root;
use crate::exactnum::{carg, complex_to_f64, working_precision, AppComplex, PowerSeries};
use crate::formal::{formal_basis, series_solution, FormalBasisElement};
use crate::newton::{determining_polynomial, newton_polygon, At, DeterminingData, NewtonPolygon};

/// `E_k` in `λ` and, for `k ≥ 2`, in its critical variable `x = λ^{1/(k-1)}`.
#[derive(Clone, Debug)]
pub struct EkModel {
    pub k: usize,
    /// `Π_{j<k} (2kθ + 2j + 1) + λ^{-1}θ`.
    pub operator_lambda: ThetaOperator<Rational>,
    /// The same operator after `λ = x^{k-1}`, scaled by `(k-1)^k` so the
    /// coefficients stay integral.
    pub operator_x: Option<ThetaOperator<Rational>>,
    /// Positive slope `1/(k-1)` of the λ-polygon.
    pub m: Option<Rational>,
    pub determining: Option<DeterminingData<Rational>>,
    /// `u_0 = 0` followed by the nonzero roots of the determining polynomial.
    pub roots: Vec<Root>,
    /// Formal basis of `operator_x`, with series in `x`.
    pub basis: Vec<FormalBasisElement>,
    /// `Z̃_0 = Σ α_n λ^n` from the operator recurrence.
    pub lambda_series: PowerSeries<Rational>,
}

impl EkModel {
    pub fn polygon_lambda(&self) -> NewtonPolygon {
        newton_polygon(&self.operator_lambda, At::Zero)
    }

    pub fn polygon_x(&self) -> Option<NewtonPolygon> {
        self.operator_x.as_ref().map(|h| newton_polygon(h, At::Zero))
    }

    /// Basis element with `u = 0` (the perturbative series `Z̃_0` in `x`).
    pub fn perturbative(&self) -> Option<&FormalBasisElement> {
        self.basis.iter().find(|e| e.u.exact.as_ref().is_some_and(|u| *u == 0))
    }
}

fn e_k_operator(k: usize) -> ThetaOperator<Rational> {
    let factors: Vec<(Rational, Rational)> =
        (0..k).map(|j| (Rational::from(2 * k as i64), Rational::from(2 * j as i64 + 1))).collect();
    ThetaOperator::theta_product(&factors, "lambda").add(&ThetaOperator::from_terms([(Rational::from(1), -1, 1)], "lambda"))
}

/// Builds `E_k` with its polygon data and a formal basis of `order + 1`
/// terms. For `k = 1` there is no positive slope: only the analytic series
/// is produced.
pub fn build_ek(k: usize, order: usize) -> Result<EkModel> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let operator_lambda = e_k_operator(k);
    let lambda_series = series_solution(&operator_lambda, &Rational::new(), order)?;
    let prec = working_precision();
    let zero = Root::exact(Rational::new(), prec);
    if k == 1 {
        return Ok(EkModel {
            k,
            operator_lambda,
            operator_x: None,
            m: None,
            determining: None,
            roots: vec![zero],
            basis: vec![],
            lambda_series,
        });
    }
    let r = (k - 1) as u32;
    let scale = Rational::from(r).pow_u(k as u32);
    let operator_x = operator_lambda.ramify(r).scale(&scale).with_var("x");
    let determining = determining_polynomial(&operator_x, &Rational::from(1))?;
    let mut roots = vec![zero];
    roots.extend(determining.nonzero_roots.iter().cloned());
    let basis = formal_basis(&operator_x, order)?;
    Ok(EkModel {
        k,
        operator_lambda,
        operator_x: Some(operator_x),
        m: Some(Rational::from((1, r))),
        determining: Some(determining),
        roots,
        basis,
        lambda_series,
    })
}

trait PowU {
    fn pow_u(self, e: u32) -> Rational;
}

impl PowU for Rational {
    fn pow_u(self, e: u32) -> Rational {
        use rug::ops::Pow;
        self.pow(e)
    }
}

/// Numerical corroboration of a discreteness verdict: the smallest nonzero
/// `|Σ c_i g_i| / |u_1|` over integer vectors with `|c_i| ≤ B`, for growing
/// `B`, using a ℤ-basis `g_i` of the group generated by the roots.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityWitness {
    pub bounds: Vec<u32>,
    pub minima: Vec<f64>,
    /// The minimum strictly decreases as `B` grows.
    pub shrinking: bool,
    /// `shrinking` is the opposite of the exact verdict.
    pub agrees: bool,
}

/// Whether the additive group generated by the Borel singularities of the
/// free energy is a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeVerdict {
    pub k: usize,
    pub generators: Vec<AppComplex>,
    pub discrete: bool,
    /// The generators are `u_1·ω^j` with `ω` a primitive root of unity of
    /// this order.
    pub rotation_order: usize,
    pub witness: DensityWitness,
}

fn totient(mut n: usize) -> usize {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Smallest nonzero modulus of `Σ c_i g_i` with `|c_i| ≤ b`, walking the box
/// like an odometer so each step updates the running sum once.
fn min_modulus(gens: &[(f64, f64)], b: i64) -> f64 {
    let d = gens.len();
    let mut c = vec![-b; d];
    let (mut sx, mut sy) = gens.iter().fold((0.0, 0.0), |(x, y), g| (x - b as f64 * g.0, y - b as f64 * g.1));
    let mut best = f64::INFINITY;
    loop {
        let m = (sx * sx + sy * sy).sqrt();
        if m > 1e-9 && m < best {
            best = m;
        }
        let mut i = 0;
        loop {
            if i == d {
                return best;
            }
            if c[i] < b {
                c[i] += 1;
                sx += gens[i].0;
                sy += gens[i].1;
                break;
            }
            sx -= 2.0 * b as f64 * gens[i].0;
            sy -= 2.0 * b as f64 * gens[i].1;
            c[i] = -b;
            i += 1;
        }
    }
}

/// Discreteness of the singularity group of the free energy for `V = φ^{2k}`.
///
/// The roots are `u_1·ω^j` with `ω = e^{2πi/(k-1)}`, so they generate
/// `u_1·ℤ[ω]`, a lattice exactly when `ℤ[ω]` has rank at most 2, i.e. when
/// `φ(k-1) ≤ 2` (crystallographic restriction). The density witness is an
/// independent numerical check on the computed roots.
pub fn singularity_discreteness(k: usize) -> Result<LatticeVerdict> {
    if k <= 2 {
        return Err(Error::Domain(format!("discreteness is defined for k > 2, got {k}")));
    }
    let n = k - 1;
    let r = n as u32;
    let h = e_k_operator(k).ramify(r).with_var("x");
    let det = determining_polynomial(&h, &Rational::from(1))?;
    let mut generators: Vec<AppComplex> = det.nonzero_roots.iter().map(|r| r.value.clone()).collect();
    let base = carg(&generators[0]).to_f64();
    let rel = |g: &AppComplex| (carg(g).to_f64() - base).rem_euclid(2.0 * PI);
    generators.sort_by(|a, b| rel(a).partial_cmp(&rel(b)).unwrap());
    let rank = totient(n);
    let discrete = rank <= 2;

    let unit = complex_to_f64(&generators[0]);
    let scale = (unit.0 * unit.0 + unit.1 * unit.1).sqrt();
    let gens: Vec<(f64, f64)> = generators
        .iter()
        .take(rank)
        .map(|g| {
            let (x, y) = complex_to_f64(g);
            (x / scale, y / scale)
        })
        .collect();
    let mut bounds = vec![];
    let mut minima = vec![];
    for b in 1..=6u32 {
        if (2 * b as u64 + 1).pow(rank as u32) > 20_000_000 {
            break;
        }
        bounds.push(b);
        minima.push(min_modulus(&gens, b as i64));
    }
    let shrinking = minima.last().unwrap() < &(minima[0] * (1.0 - 1e-6));
    let witness = DensityWitness { bounds, minima, shrinking, agrees: shrinking != discrete };
    if !witness.agrees {
        log::warn!("density witness disagrees with the exact verdict for k = {k}");
    }
    let prec = working_precision();
    Ok(LatticeVerdict {
        k,
        generators: generators.into_iter().map(|g| Complex::with_val(prec, g)).collect(),
        discrete,
        rotation_order: n,
        witness,
    })
}
