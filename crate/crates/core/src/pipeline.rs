//! End-to-end runs behind the `resurgence` command line. Each command
//! chains the library stages and collects their output, warnings and errors
//! into one serializable [`AnalysisReport`].

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use rug::{Complex, Rational};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::borelnum::{
    borel_json, borel_series, borel_series_any, laplace_sum, pade_robust, stokes_jump_with, BorelSeries, LaplaceResult,
    PadeApproximant, StokesEstimate, StokesOptions,
};
use crate::diffop::{borel_transform_op, parse_operator, ThetaOperator};
use crate::error::{Error, Result};
use crate::exactnum::roots::Root;
use crate::exactnum::{
    cabs, carg, complex_from_f64, complex_to_f64, parse_rational, rational_string, with_precision, AppComplex, Poly,
    PowerSeries, Scalar,
};
use crate::formal::{formal_basis, gevrey_estimate, parse_complex, AnySeries, FormalBasisElement};
use crate::models::{build_airy, build_airy_exact, build_ek, quad_moment, asymptotic_coeffs, AiryBranch, AiryModel, Potential};
use crate::newton::{determining_polynomial, indicial_polynomial, newton_polygon, At, DeterminingData};

/// Global knobs, recorded verbatim in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    /// Working precision in bits.
    pub precision: u32,
    /// Series truncation order.
    pub order: usize,
    /// Quadrature tolerance.
    pub tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { precision: 256, order: 60, tol: 1e-10 }
    }
}

/// Operator analysed by `analyze`.
#[derive(Clone, Debug, PartialEq)]
pub enum OperatorSource {
    /// The governing operator `E_k` of the `φ^{2k}` partition function.
    Ek(usize),
    /// Operator text such as `x*theta^2 + theta - 1`.
    Text(String),
}

/// λ values for `partition`.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaSpec {
    Single(f64),
    /// `n` equally spaced points from `a` to `b` inclusive.
    Grid { a: f64, b: f64, n: usize },
}

impl LambdaSpec {
    /// Parses `a:b:n`.
    pub fn parse_grid(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::Parse(format!("expected a:b:n, got '{text}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let a = parts[0].trim().parse().map_err(|_| bad())?;
        let b = parts[1].trim().parse().map_err(|_| bad())?;
        let n = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(Error::Domain("a λ grid needs at least one point".into()));
        }
        Ok(LambdaSpec::Grid { a, b, n })
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            LambdaSpec::Single(x) => vec![x],
            LambdaSpec::Grid { a, n: 1, .. } => vec![a],
            LambdaSpec::Grid { a, b, n } => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Coefficients read from a coefficient file.
#[derive(Clone, Debug, PartialEq)]
pub enum CoeffList {
    Exact(Vec<Rational>),
    Complex(Vec<AppComplex>),
}

impl CoeffList {
    pub fn len(&self) -> usize {
        match self {
            CoeffList::Exact(v) => v.len(),
            CoeffList::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parses one coefficient per line: a rational (`3/4`, `-0.5`) or a
/// `re im` pair. Blank lines and `#` comments are skipped. Any pair makes
/// the whole list complex.
pub fn parse_coefficients(text: &str, prec: u32) -> Result<CoeffList> {
    let mut exact = Vec::new();
    let mut complex = Vec::new();
    let mut all_exact = true;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: cannot read '{line}' as a coefficient", lineno + 1));
        match fields.as_slice() {
            [one] => {
                let q = parse_rational(one).ok_or_else(bad)?;
                complex.push(q.to_complex(prec));
                exact.push(q);
            }
            [re, im] => {
                all_exact = false;
                complex.push(parse_complex(re, im, prec).ok_or_else(bad)?);
            }
            _ => return Err(bad()),
        }
    }
    Ok(if all_exact { CoeffList::Exact(exact) } else { CoeffList::Complex(complex) })
}

/// Input of `resum`: the series `x^β Σ a_n x^n`, summed at `z = 1/x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResumInput {
    pub coeffs: CoeffList,
    pub beta: i64,
    pub direction: f64,
    pub z: (f64, f64),
}

/// One pipeline invocation.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Analyze(OperatorSource),
    Partition { k: usize, lambdas: LambdaSpec, j: usize },
    Resum(ResumInput),
    /// `q` as a rational (`1`, `4/9`) or a complex pair `re,im`.
    Airy { q: String },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Partition { .. } => "partition",
            Command::Resum(_) => "resum",
            Command::Airy { .. } => "airy",
        }
    }
}

/// A number with either an exact rational value or an error estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Number {
    pub re: f64,
    pub im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub err: Option<f64>,
}

impl Number {
    pub fn exact(q: &Rational) -> Self {
        Number { re: q.to_f64(), im: 0.0, exact: Some(rational_string(q)), err: None }
    }

    pub fn approx(c: &AppComplex, err: f64) -> Self {
        let (re, im) = complex_to_f64(c);
        Number { re, im, exact: None, err: Some(finite(err)) }
    }

    pub fn real(x: f64, err: f64) -> Self {
        Number { re: x, im: 0.0, exact: None, err: Some(finite(err)) }
    }

    fn root(r: &Root, err: f64) -> Self {
        match &r.exact {
            Some(q) => Number::exact(q),
            None => Number::approx(&r.value, err),
        }
    }
}

/// Non-finite values do not survive JSON; they are reported as the largest
/// finite `f64`.
fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminingSummary {
    pub polynomial: String,
    pub q: String,
    pub roots: Vec<Number>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSummary {
    pub label: usize,
    pub u: Number,
    pub q: String,
    pub beta: String,
    /// First coefficients of the normalized series.
    pub leading: Vec<Number>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GevreySummary {
    /// Which series was fitted.
    pub series: String,
    /// Error is the RMS residual of the fit.
    pub s: Number,
    pub a: Number,
    pub window: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub lambda: f64,
    pub j: usize,
    pub quad: Number,
    /// Partial sum up to the smallest term; error is that term.
    pub truncated: Number,
    pub truncation_order: usize,
    pub resummed: Number,
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiryBranchSummary {
    pub u: Number,
    pub borel_operator: String,
    pub leading: Vec<Number>,
    pub zeros: Vec<Number>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AirySummary {
    pub q: Number,
    pub operator_lambda: String,
    pub u_plus: Number,
    pub u_minus: Number,
    pub beta: String,
    pub branches: Vec<AiryBranchSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportError {
    pub stage: String,
    pub kind: String,
    pub message: String,
}

/// Everything one command produced. Stages that did not run are `null` or
/// empty; failed stages leave an entry in `errors`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub command: String,
    pub input: Value,
    pub options: Option<PipelineOptions>,
    pub precision: u32,
    pub operator: Option<String>,
    pub polygon_zero: Option<Value>,
    pub polygon_infinity: Option<Value>,
    /// Polygon at 0 in the critical variable, when it differs from the input.
    pub polygon_ramified: Option<Value>,
    pub indicial_roots: Vec<Number>,
    pub determining: Option<DeterminingSummary>,
    pub basis: Vec<BasisSummary>,
    pub gevrey: Vec<GevreySummary>,
    pub borel_operator: Option<String>,
    /// `{poles: [[re, im, stable], …], laplace: {z, theta, value, err}, stokes: {omega, A, spread}}`.
    pub borel: Option<Value>,
    pub partition: Vec<PartitionRow>,
    pub airy: Option<AirySummary>,
    pub warnings: Vec<String>,
    pub errors: Vec<ReportError>,
    /// Wall-clock milliseconds per stage.
    pub timings: BTreeMap<String, f64>,
}

impl AnalysisReport {
    fn new(command: &str, input: Value, opts: &PipelineOptions) -> Self {
        AnalysisReport {
            command: command.into(),
            input,
            options: Some(opts.clone()),
            precision: opts.precision,
            ..Default::default()
        }
    }

    /// Whether every stage that ran succeeded (warnings allowed).
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn fail(&mut self, stage: &str, e: &Error) {
        log::error!("{stage}: {e}");
        self.errors.push(ReportError { stage: stage.into(), kind: e.kind().into(), message: e.to_string() });
    }

    /// Runs one stage, timing it and recording its error.
    fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Option<T> {
        let start = Instant::now();
        let out = f(self);
        self.timings.insert(name.into(), start.elapsed().as_secs_f64() * 1e3);
        match out {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(name, &e);
                None
            }
        }
    }

    /// Short human-readable digest.
    pub fn summary(&self) -> String {
        let mut out = format!("{} ({} bits)\n", self.command, self.precision);
        if let Some(op) = &self.operator {
            out += &format!("  operator: {op}\n");
        }
        if let Some(d) = &self.determining {
            out += &format!("  P(u) = {}  roots: {}\n", d.polynomial, fmt_numbers(&d.roots));
        }
        for b in &self.basis {
            out += &format!("  basis[{}]: u = {}, q = {}, beta = {}\n", b.label, fmt_number(&b.u), b.q, b.beta);
        }
        for g in &self.gevrey {
            out += &format!("  gevrey {}: s = {:.4}, A = {:.4}\n", g.series, g.s.re, g.a.re);
        }
        if let Some(b) = &self.borel_operator {
            out += &format!("  Borel operator: {b}\n");
        }
        if let Some(stokes) = self.borel.as_ref().and_then(|b| b.get("stokes")).filter(|s| !s.is_null()) {
            out += &format!("  Stokes: {stokes}\n");
        }
        for r in &self.partition {
            out += &format!(
                "  lambda = {}: quad = {:.15e}, resummed = {:.15e}, |diff| = {:.2e}\n",
                r.lambda, r.quad.re, r.resummed.re, r.difference
            );
        }
        if let Some(a) = &self.airy {
            out += &format!("  u+ = {}, u- = {}, beta = {}\n", fmt_number(&a.u_plus), fmt_number(&a.u_minus), a.beta);
            for b in &a.branches {
                out += &format!("  branch u = {}: zeros {}\n", fmt_number(&b.u), fmt_numbers(&b.zeros));
            }
        }
        for w in &self.warnings {
            out += &format!("  warning: {w}\n");
        }
        for e in &self.errors {
            out += &format!("  error [{}] {}: {}\n", e.kind, e.stage, e.message);
        }
        out
    }
}

fn fmt_number(n: &Number) -> String {
    match &n.exact {
        Some(q) => q.clone(),
        None if n.im == 0.0 => format!("{:.10}", n.re),
        None => format!("{:.10}{:+.10}i", n.re, n.im),
    }
}

fn fmt_numbers(ns: &[Number]) -> String {
    ns.iter().map(fmt_number).collect::<Vec<_>>().join(", ")
}

/// Runs `command` at the requested precision.
pub fn run_pipeline(command: &Command, opts: &PipelineOptions) -> AnalysisReport {
    with_precision(opts.precision, || match command {
        Command::Analyze(src) => analyze(src, opts),
        Command::Partition { k, lambdas, j } => partition(*k, lambdas, *j, opts),
        Command::Resum(input) => resum(input, opts),
        Command::Airy { q } => airy(q, opts),
    })
}

const LEADING_SHOWN: usize = 6;

fn basis_summary(e: &FormalBasisElement, u_err: f64, prec: u32) -> BasisSummary {
    let leading = match &e.series {
        AnySeries::Exact(s) => s.coeffs().iter().take(LEADING_SHOWN).map(Number::exact).collect(),
        AnySeries::Complex(s) => s.coeffs().iter().take(LEADING_SHOWN).map(|c| Number::approx(c, 2f64.powi(-(prec as i32) / 2))).collect(),
    };
    BasisSummary {
        label: e.label,
        u: Number::root(&e.u, u_err),
        q: rational_string(&e.q),
        beta: rational_string(&e.beta),
        leading,
    }
}

fn nonzero_terms(f: &AnySeries) -> usize {
    match f {
        AnySeries::Exact(s) => s.coeffs().iter().filter(|c| **c != 0).count(),
        AnySeries::Complex(s) => s.coeffs().iter().filter(|c| !c.is_zero()).count(),
    }
}

fn gevrey_summary(name: String, f: &AnySeries) -> Result<GevreySummary> {
    let g = match f {
        AnySeries::Exact(s) => gevrey_estimate(s)?,
        AnySeries::Complex(s) => gevrey_estimate(s)?,
    };
    Ok(GevreySummary {
        series: name,
        s: Number::real(g.s, g.residual),
        a: Number::real(g.a, g.residual * g.a),
        window: [g.fit_window.0, g.fit_window.1],
    })
}

fn determining_summary<R: Scalar>(d: &DeterminingData<R>) -> DeterminingSummary {
    DeterminingSummary {
        polynomial: d.polynomial.to_string(),
        q: rational_string(&d.q),
        roots: d.nonzero_roots.iter().zip(&d.residuals).map(|(r, e)| Number::root(r, *e)).collect(),
    }
}

fn diagonal(n: usize) -> (usize, usize) {
    let l = n.saturating_sub(1) / 2;
    (l, n.saturating_sub(1) - l)
}

/// Polygons, indicial and determining data of an operator in its critical
/// variable (`r` is the ramification that made the positive slope integral).
fn polygon_stages(report: &mut AnalysisReport, h: &ThetaOperator<Rational>) -> Option<(ThetaOperator<Rational>, Rational)> {
    let p0 = newton_polygon(h, At::Zero);
    report.polygon_zero = Some(p0.to_json());
    report.polygon_infinity = Some(newton_polygon(h, At::Infinity).to_json());
    let slopes = p0.positive_slopes();
    let q = match slopes.as_slice() {
        [] => {
            report.warnings.push("no positive slope at 0: the formal solutions are convergent".into());
            if let Some(ind) = report.stage("indicial", |_| indicial_polynomial(h)) {
                report.indicial_roots = ind.roots.iter().map(|r| Number::root(r, 0.0)).collect();
            }
            return None;
        }
        [q] => q.clone(),
        _ => {
            report.fail("newton", &Error::UnsupportedLevel(format!("{} positive slopes at 0", slopes.len())));
            return None;
        }
    };
    let r = q.denom().to_u32().unwrap_or(1);
    let hr = if r > 1 {
        let hr = h.ramify(r);
        report.polygon_ramified = Some(newton_polygon(&hr, At::Zero).to_json());
        hr
    } else {
        h.clone()
    };
    let qr = Rational::from(q.numer().clone());
    if let Some(ind) = report.stage("indicial", |_| indicial_polynomial(&hr)) {
        report.indicial_roots = ind.roots.iter().map(|r| Number::root(r, 0.0)).collect();
    }
    let det = report.stage("determining", |_| determining_polynomial(&hr, &qr))?;
    report.determining = Some(determining_summary(&det));
    Some((hr, qr))
}

fn analyze(src: &OperatorSource, opts: &PipelineOptions) -> AnalysisReport {
    let input = match src {
        OperatorSource::Ek(k) => serde_json::json!({"k": k}),
        OperatorSource::Text(t) => serde_json::json!({"op": t}),
    };
    let mut report = AnalysisReport::new("analyze", input, opts);
    let prec = opts.precision;
    let (h, basis, extra_series) = match src {
        OperatorSource::Text(text) => {
            let Some(h) = report.stage("parse", |_| parse_operator(text)) else { return report };
            (h, None, None)
        }
        OperatorSource::Ek(k) => {
            let Some(m) = report.stage("build_ek", |_| build_ek(*k, opts.order)) else { return report };
            let series = AnySeries::Exact(m.lambda_series.clone());
            (m.operator_lambda.clone(), Some(m.basis.clone()), Some(series))
        }
    };
    report.operator = Some(h.to_string());
    let critical = polygon_stages(&mut report, &h);
    if let Some(series) = &extra_series {
        if let Some(g) = report.stage("gevrey", |_| gevrey_summary("lambda".into(), series)) {
            report.gevrey.push(g);
        }
    }
    let Some((hr, q)) = critical else { return report };
    if q != 1 {
        report.fail("borel", &Error::UnsupportedLevel(format!("level {q} in the critical variable")));
        return report;
    }
    let basis = match basis {
        Some(b) if !b.is_empty() => b,
        _ => match report.stage("formal_basis", |_| formal_basis(&hr, opts.order)) {
            Some(b) => b,
            None => return report,
        },
    };
    let residual_of = |u: &Root| {
        report
            .determining
            .as_ref()
            .and_then(|d| d.roots.iter().find(|n| (n.re, n.im) == complex_to_f64(&u.value)).and_then(|n| n.err))
            .unwrap_or(0.0)
    };
    let summaries: Vec<BasisSummary> = basis.iter().map(|e| basis_summary(e, residual_of(&e.u), prec)).collect();
    report.basis = summaries;
    for e in &basis {
        if nonzero_terms(&e.series) >= 20 {
            if let Some(g) = report.stage(&format!("gevrey[{}]", e.label), |_| gevrey_summary(format!("basis[{}]", e.label), &e.series)) {
                report.gevrey.push(g);
            }
        }
    }
    if let Some(b) = report.stage("borel_operator", |_| borel_transform_op(&hr)) {
        report.borel_operator = Some(b.operator.to_string());
    }
    let Some(pert) = basis.iter().find(|e| e.u.exact.as_ref().is_some_and(|u| *u == 0)) else {
        report.warnings.push("no basis element with u = 0; Borel numerics skipped".into());
        return report;
    };
    let Some(b) = report.stage("borel_series", |_| borel_series_any(&pert.series)) else { return report };
    let (l, m) = diagonal(b.len());
    let Some(pade) = report.stage("pade", |_| pade_robust(&b, l, m)) else { return report };
    let stokes = report.stage("stokes", |rep| analyze_stokes(rep, &pade, &b, &basis)).flatten();
    report.borel = Some(borel_json(&pade, None, stokes.as_ref()));
    report
}

/// Lateral jump across the nearest stable Borel singularity `ω`, divided by
/// `e^{-ωz}` times the resummed partner series with `u = -ω`. `ω` snaps to
/// the exact `-u` when the pole matches one.
fn analyze_stokes(
    report: &mut AnalysisReport,
    pade: &PadeApproximant,
    b: &BorelSeries,
    basis: &[FormalBasisElement],
) -> Result<Option<StokesEstimate>> {
    let Some(pole) = pade.nearest_stable_pole() else {
        report.warnings.push("no stable Borel pole; Stokes jump skipped".into());
        return Ok(None);
    };
    let prec = pade.precision();
    let size = cabs(&pole.value).to_f64();
    let partner = basis.iter().find(|e| {
        let s = Complex::with_val(prec, &e.u.value + &pole.value);
        cabs(&s).to_f64() < 1e-4 * size && !e.u.value.is_zero()
    });
    let mut options = StokesOptions { orders: Some(pade.requested_orders()), ..Default::default() };
    match partner {
        Some(e) => {
            options.omega = Some(Complex::with_val(prec, -&e.u.value));
            options.partner = Some(borel_series_any(&e.series)?);
        }
        None => report.warnings.push("Borel pole matches no -u_i; Stokes constant uses the pole itself and no partner".into()),
    }
    let theta = carg(&pole.value).to_f64();
    let radii: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|c| c / size).collect();
    let est = stokes_jump_with(b, theta, &radii, &options)?;
    if est.unstable {
        report.warnings.push(format!("unstable Stokes estimate: spread {:.3e} across z samples", est.spread));
    }
    Ok(Some(est))
}

/// `Z_{2j}` of `φ^{2k}` in the critical variable `x = λ^{1/(k-1)}`:
/// `α_n` sits at `x^{(k-1)n}`.
fn critical_series(k: usize, j: usize, order: usize) -> (PowerSeries<Rational>, Vec<Rational>, usize) {
    let r = k.saturating_sub(1).max(1);
    let alphas = asymptotic_coeffs(&Potential::monomial(k), j, order / r);
    let mut cs = vec![Rational::new(); (alphas.len() - 1) * r + 1];
    for (n, a) in alphas.iter().enumerate() {
        cs[n * r] = a.clone();
    }
    (PowerSeries::new(Rational::new(), 1, cs), alphas, r)
}

/// Partial sum up to the smallest term, with that term as the error.
fn optimal_truncation(alphas: &[Rational], lambda: f64, prec: u32) -> (AppComplex, f64, usize) {
    let lam = rug::Float::with_val(prec, lambda);
    let mut sum = rug::Float::new(prec);
    let mut power = rug::Float::with_val(prec, 1);
    let mut best = (Complex::new(prec), f64::INFINITY, 0);
    for (n, a) in alphas.iter().enumerate() {
        let term = rug::Float::with_val(prec, &power * a);
        let size = term.to_f64().abs();
        if size < best.1 {
            best = (Complex::with_val(prec, (&sum, 0)), size, n);
        } else if n > 0 && size > best.1 {
            break;
        }
        sum += term;
        power *= &lam;
    }
    best
}

fn partition(k: usize, lambdas: &LambdaSpec, j: usize, opts: &PipelineOptions) -> AnalysisReport {
    let input = match lambdas {
        LambdaSpec::Single(x) => serde_json::json!({"k": k, "lambda": x, "j": j}),
        LambdaSpec::Grid { a, b, n } => serde_json::json!({"k": k, "lambda_grid": [a, b, n], "j": j}),
    };
    let mut report = AnalysisReport::new("partition", input, opts);
    if k == 0 {
        report.fail("partition", &Error::Domain("k must be at least 1".into()));
        return report;
    }
    let prec = opts.precision;
    let values = lambdas.values();
    if let Some(bad) = values.iter().find(|l| **l <= 0.0) {
        report.fail("partition", &Error::DivergentDomain(format!("λ = {bad} is not in the open right half-line")));
        return report;
    }
    let (series, alphas, r) = critical_series(k, j, opts.order);
    let Some(b) = report.stage("borel_series", |_| borel_series(&series)) else { return report };
    let (l, m) = diagonal(b.len());
    let Some(pade) = report.stage("pade", |_| pade_robust(&b, l, m)) else { return report };
    let v = Potential::monomial(k);
    let start = Instant::now();
    let rows: Vec<Result<PartitionRow>> = values
        .par_iter()
        .map(|&lambda| {
            with_precision(prec, || {
                let lam = complex_from_f64(lambda, 0.0, prec);
                let quad = quad_moment(&v, j, &lam, opts.tol)?;
                let (trunc, trunc_err, n_opt) = optimal_truncation(&alphas, lambda, prec);
                let z = complex_from_f64(lambda.powf(-1.0 / r as f64), 0.0, prec);
                let sum: LaplaceResult = laplace_sum(&pade, &z, 0.0)?;
                let diff = cabs(&Complex::with_val(prec, &quad.value - &sum.value)).to_f64();
                Ok(PartitionRow {
                    lambda,
                    j,
                    quad: Number::approx(&quad.value, quad.error),
                    truncated: Number::approx(&trunc, trunc_err),
                    truncation_order: n_opt,
                    resummed: Number::approx(&sum.value, sum.error),
                    difference: diff,
                })
            })
        })
        .collect();
    report.timings.insert("moments".into(), start.elapsed().as_secs_f64() * 1e3);
    for (lambda, row) in values.iter().zip(rows) {
        match row {
            Ok(row) => {
                if row.difference > 100.0 * opts.tol {
                    report.warnings.push(format!("λ = {lambda}: |quad - resummed| = {:.3e}", row.difference));
                }
                report.partition.push(row);
            }
            Err(e) => report.fail(&format!("partition[λ={lambda}]"), &e),
        }
    }
    report
}

fn resum(input: &ResumInput, opts: &PipelineOptions) -> AnalysisReport {
    let json_in = serde_json::json!({
        "coefficients": input.coeffs.len(),
        "beta": input.beta,
        "direction": input.direction,
        "z": [input.z.0, input.z.1],
    });
    let mut report = AnalysisReport::new("resum", json_in, opts);
    let prec = opts.precision;
    let beta = Rational::from(input.beta);
    let b = report.stage("borel_series", |_| match &input.coeffs {
        CoeffList::Exact(cs) => borel_series(&PowerSeries::new(beta.clone(), 1, cs.clone())),
        CoeffList::Complex(cs) => borel_series(&PowerSeries::new(beta.clone(), 1, cs.clone())),
    });
    let Some(b) = b else { return report };
    if let Some(a) = b.growth_rate().filter(|a| *a > 1e6) {
        report.warnings.push(format!("minor coefficients grow like {a:.3e}^n"));
    }
    let (l, m) = diagonal(b.len());
    let Some(pade) = report.stage("pade", |_| pade_robust(&b, l, m)) else { return report };
    let z = complex_from_f64(input.z.0, input.z.1, prec);
    let lap = report.stage("laplace", |_| laplace_sum(&pade, &z, input.direction));
    // the Stokes jump is extra information: its failure does not fail the run
    let stokes = pade.nearest_stable_pole().and_then(|pole| {
        let theta = carg(&pole.value).to_f64();
        let size = cabs(&pole.value).to_f64();
        let radii: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|c| c / size).collect();
        let options = StokesOptions { orders: Some(pade.requested_orders()), ..Default::default() };
        match stokes_jump_with(&b, theta, &radii, &options) {
            Ok(est) => {
                if est.unstable {
                    report.warnings.push(format!("unstable Stokes estimate: spread {:.3e}", est.spread));
                }
                Some(est)
            }
            Err(e) => {
                report.warnings.push(format!("Stokes jump skipped ({}): {e}", e.kind()));
                None
            }
        }
    });
    report.borel = Some(borel_json(&pade, lap.as_ref(), stokes.as_ref()));
    report
}

fn airy_branch_summary(b: &AiryBranch, prec: u32) -> AiryBranchSummary {
    let tiny = 2f64.powi(-(prec as i32) / 2);
    let leading = match &b.leading_exact {
        Some(qs) => qs.iter().map(Number::exact).collect(),
        None => b.leading.iter().map(|c| Number::approx(c, tiny)).collect(),
    };
    let lead = Poly::new(b.leading.clone());
    let zeros = b
        .leading_zeros
        .iter()
        .map(|z| Number::root(z, cabs(&lead.eval(&z.value)).to_f64()))
        .collect();
    AiryBranchSummary { u: Number::root(&b.u, 0.0), borel_operator: b.borel_operator.clone(), leading, zeros }
}

fn airy_summary<R: Scalar>(m: &AiryModel<R>, q: Number, report: &mut AnalysisReport, prec: u32) -> AirySummary {
    report.operator = Some(m.operator_x.to_string());
    report.polygon_zero = Some(newton_polygon(&m.operator_x, At::Zero).to_json());
    report.polygon_infinity = Some(newton_polygon(&m.operator_x, At::Infinity).to_json());
    if let Ok(d) = determining_polynomial(&m.operator_x, &Rational::from(1)) {
        report.determining = Some(determining_summary(&d));
    }
    report.basis = m.basis.iter().map(|e| basis_summary(e, 0.0, prec)).collect();
    AirySummary {
        q,
        operator_lambda: m.operator_lambda.to_string(),
        u_plus: Number::root(&m.u_plus, 0.0),
        u_minus: Number::root(&m.u_minus, 0.0),
        beta: rational_string(&m.beta),
        branches: m.branches.iter().map(|b| airy_branch_summary(b, prec)).collect(),
    }
}

fn airy(q: &str, opts: &PipelineOptions) -> AnalysisReport {
    let mut report = AnalysisReport::new("airy", serde_json::json!({"q": q}), opts);
    let prec = opts.precision;
    let order = opts.order;
    if let Some(qr) = parse_rational(q) {
        if let Some(m) = report.stage("build_airy", |_| build_airy_exact(&qr, order)) {
            let s = airy_summary(&m, Number::exact(&qr), &mut report, prec);
            report.airy = Some(s);
        }
        return report;
    }
    let parts: Vec<&str> = q.split(',').map(str::trim).collect();
    let qc = match parts.as_slice() {
        [re, im] => parse_complex(re, im, prec),
        _ => None,
    };
    let Some(qc) = qc else {
        report.fail("parse", &Error::Parse(format!("q must be a rational or 're,im', got '{q}'")));
        return report;
    };
    if let Some(m) = report.stage("build_airy", |_| build_airy(&qc, order)) {
        let s = airy_summary(&m, Number::approx(&qc, 0.0), &mut report, prec);
        report.airy = Some(s);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> PipelineOptions {
        PipelineOptions { precision: 128, order: 20, tol: 1e-10 }
    }

    #[test]
    fn lambda_grid_parsing() {
        let v = LambdaSpec::parse_grid("0.1:0.3:3").unwrap().values();
        assert_eq!(v.len(), 3);
        for (x, y) in v.iter().zip([0.1, 0.2, 0.3]) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(LambdaSpec::parse_grid("0.1:0.3").unwrap_err().kind(), "parse");
        assert_eq!(LambdaSpec::parse_grid("0.1:0.3:1").unwrap().values(), vec![0.1]);
    }

    #[test]
    fn coefficient_files() {
        let exact = parse_coefficients("1\n-1/2\n# comment\n\n0.25\n", 128).unwrap();
        assert_eq!(
            exact,
            CoeffList::Exact(vec![Rational::from(1), Rational::from((-1, 2)), Rational::from((1, 4))])
        );
        match parse_coefficients("1\n0.5 2\n", 128).unwrap() {
            CoeffList::Complex(cs) => assert_eq!(complex_to_f64(&cs[1]), (0.5, 2.0)),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_coefficients("1 2 3\n", 128).unwrap_err().kind(), "parse");
    }

    #[test]
    fn analyze_reports_parse_errors() {
        let r = run_pipeline(&Command::Analyze(OperatorSource::Text("x*theta^".into())), &quick());
        assert!(!r.ok());
        assert_eq!(r.errors[0].kind, "parse");
    }

    #[test]
    fn convergent_operator_has_no_borel_stage() {
        // θ - 1 annihilates x
        let r = run_pipeline(&Command::Analyze(OperatorSource::Text("theta - 1".into())), &quick());
        assert!(r.ok(), "{:?}", r.errors);
        assert_eq!(r.indicial_roots, vec![Number::exact(&Rational::from(1))]);
        assert!(r.borel.is_none());
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn reports_round_trip() {
        let r = run_pipeline(&Command::Airy { q: "1".into() }, &quick());
        assert!(r.ok(), "{:?}", r.errors);
        let text = r.to_json();
        let back = AnalysisReport::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back, r);
    }

    #[test]
    fn airy_report_has_exact_data() {
        let r = run_pipeline(&Command::Airy { q: "1".into() }, &quick());
        let a = r.airy.unwrap();
        assert_eq!(a.u_plus.exact.as_deref(), Some("2/3"));
        assert_eq!(a.beta, "-1/2");
        let zeros: Vec<_> = a.branches[0].zeros.iter().map(|z| z.exact.clone().unwrap()).collect();
        assert!(zeros.contains(&"0".to_string()) && zeros.contains(&"4/3".to_string()));
    }

    #[test]
    fn airy_rejects_zero_and_garbage() {
        let r = run_pipeline(&Command::Airy { q: "0".into() }, &quick());
        assert_eq!(r.errors[0].kind, "degenerate");
        let r = run_pipeline(&Command::Airy { q: "abc".into() }, &quick());
        assert_eq!(r.errors[0].kind, "parse");
    }

    #[test]
    fn resum_of_a_convergent_series() {
        // Σ x^n / n! at x = 1/2: the minor is e^ζ shifted, the sum e^{1/2}
        let cs: Vec<Rational> = (0..25).map(|n| Rational::from((1, crate::exactnum::factorial(n)))).collect();
        let input = ResumInput { coeffs: CoeffList::Exact(cs), beta: 0, direction: 0.0, z: (2.0, 0.0) };
        let r = run_pipeline(&Command::Resum(input), &quick());
        assert!(r.ok(), "{:?}", r.errors);
        let value = &r.borel.unwrap()["laplace"]["value"];
        assert!((value[0].as_f64().unwrap() - 0.5f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn partition_rejects_negative_lambda() {
        let r = run_pipeline(&Command::Partition { k: 2, lambdas: LambdaSpec::Single(-0.1), j: 0 }, &quick());
        assert_eq!(r.errors[0].kind, "divergent-domain");
    }
}
