//! Newton polygons, indicial polynomials and determining polynomials.

use serde::{Deserialize, Serialize};

use crate::diffop::ThetaOperator;
use crate::error::{Error, Result};
use crate::exactnum::roots::{complex_roots, roots, Root};
use crate::exactnum::{
    cabs, parse_rational, rational_string, working_precision, Poly, Rational, Ring, Scalar,
};

/// Which singular point a polygon describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum At {
    Zero,
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slope {
    pub q: Rational,
    pub length: i64,
}

/// Boundary of the Newton polygon: vertices left to right and the slopes
/// between consecutive vertices.
///
/// At 0 this is the lower boundary and slopes increase; at ∞ it is the
/// upper boundary and slopes decrease (they are the negatives of the
/// polygon at 0 of the operator in `1/x`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub at: At,
    pub vertices: Vec<(i64, i64)>,
    slopes: Vec<Slope>,
}

impl NewtonPolygon {
    pub fn slopes(&self) -> &[Slope] {
        &self.slopes
    }

    /// Strictly positive slopes.
    pub fn positive_slopes(&self) -> Vec<Rational> {
        self.slopes
            .iter()
            .filter(|s| s.q.cmp0() == std::cmp::Ordering::Greater)
            .map(|s| s.q.clone())
            .collect()
    }

    /// Length of the horizontal segment, 0 when there is none.
    pub fn horizontal_length(&self) -> i64 {
        self.slopes.iter().filter(|s| s.q.cmp0() == std::cmp::Ordering::Equal).map(|s| s.length).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PolygonJson::from(self)).expect("serializable")
    }
}

#[derive(Serialize, Deserialize)]
struct SlopeJson {
    q: String,
    length: i64,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    vertices: Vec<[i64; 2]>,
    slopes: Vec<SlopeJson>,
}

impl From<&NewtonPolygon> for PolygonJson {
    fn from(p: &NewtonPolygon) -> Self {
        PolygonJson {
            vertices: p.vertices.iter().map(|&(u, v)| [u, v]).collect(),
            slopes: p.slopes.iter().map(|s| SlopeJson { q: rational_string(&s.q), length: s.length }).collect(),
        }
    }
}

impl Serialize for NewtonPolygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolygonJson::from(self).serialize(s)
    }
}

impl NewtonPolygon {
    /// Rebuilds a polygon from its JSON form; `at` is not part of the format.
    pub fn from_json(value: &serde_json::Value, at: At) -> Result<Self> {
        let raw: PolygonJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let slopes = raw
            .slopes
            .into_iter()
            .map(|s| {
                parse_rational(&s.q)
                    .map(|q| Slope { q, length: s.length })
                    .ok_or_else(|| Error::Parse(format!("bad slope '{}'", s.q)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NewtonPolygon { at, vertices: raw.vertices.into_iter().map(|[u, v]| (u, v)).collect(), slopes })
    }
}

/// `(b - a) × (c - a)`.
fn cross(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i128 {
    (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128
}

/// Newton polygon of `H` at 0 or ∞, computed from the exact support.
///
/// Column `c` carries `min{p : x^p θ^i ∈ H, i ≥ c}` (at ∞: the max) and the
/// boundary is the lower (upper) convex hull of those points. Collinear
/// points are not reported as vertices.
pub fn newton_polygon<R: Ring>(h: &ThetaOperator<R>, at: At) -> NewtonPolygon {
    let support = h.support();
    let n = h.order().unwrap_or(0);
    let mut cols: Vec<(i64, i64)> = Vec::with_capacity(n + 1);
    for c in 0..=n {
        let ps = support.iter().filter(|&&(i, _)| i >= c).map(|&(_, p)| p);
        let v = match at {
            At::Zero => ps.min(),
            At::Infinity => ps.max(),
        };
        if let Some(v) = v {
            cols.push((c as i64, v));
        }
    }
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &cols {
        while hull.len() >= 2 {
            let turn = cross(hull[hull.len() - 2], hull[hull.len() - 1], pt);
            let drop = match at {
                At::Zero => turn <= 0,
                At::Infinity => turn >= 0,
            };
            if drop {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let slopes = hull
        .windows(2)
        .map(|w| Slope { q: Rational::from((w[1].1 - w[0].1, w[1].0 - w[0].0)), length: w[1].0 - w[0].0 })
        .collect();
    NewtonPolygon { at, vertices: hull, slopes }
}

/// Indicial polynomial `Q(β)` and its roots.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicialData<R> {
    pub polynomial: Poly<R>,
    /// Lowest exponent `d_0` of the operator.
    pub lowest_exponent: i64,
    pub roots: Vec<Root>,
}

/// Roots of a polynomial over an exact or approximate field.
///
/// Exact coefficients go through [`roots`]; complex ones through the Aberth
/// solver, with rational recognition for the `exact` tag.
pub fn scalar_roots<R: Scalar>(p: &Poly<R>, prec: u32) -> Result<Vec<Root>> {
    if R::is_exact() {
        let exact: Poly<Rational> = p.map(|c| c.recognize_rational().expect("exact scalar"));
        return roots(&exact, prec);
    }
    let cs: Vec<_> = p.coeffs().iter().map(|c| c.to_complex(prec)).collect();
    let found = complex_roots(&cs, prec)?;
    Ok(found
        .into_iter()
        .map(|value| {
            let exact = value.recognize_rational();
            match exact {
                Some(q) => Root::exact(q, prec),
                None => Root { exact: None, value },
            }
        })
        .collect())
}

/// `Q(β) = Σ_i H_{i,d_0} β^i` with `d_0` the lowest exponent in `H`: the
/// lowest-order coefficient of `x^{−β} H x^{β}`.
pub fn indicial_polynomial<R: Scalar>(h: &ThetaOperator<R>) -> Result<IndicialData<R>> {
    let d0 = h
        .support()
        .iter()
        .map(|&(_, p)| p)
        .min()
        .ok_or_else(|| Error::Degenerate("zero operator".into()))?;
    let q = Poly::new(h.coeffs().iter().map(|c| c.coeff(d0)).collect());
    if q.degree().unwrap_or(0) == 0 {
        return Err(Error::NoFormalSolution(
            "the polygon at 0 has no horizontal slope, so no solution in x^beta C[[x]]".into(),
        ));
    }
    let roots = scalar_roots(&q, working_precision())?;
    Ok(IndicialData { polynomial: q, lowest_exponent: d0, roots })
}

/// Determining polynomial `P(u)` of the twist by `e^{u/x^q}` and its
/// nonzero roots.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingData<R> {
    pub polynomial: Poly<R>,
    pub nonzero_roots: Vec<Root>,
    pub q: Rational,
    /// `|P(u_i)|` at each returned root, at working precision.
    pub residuals: Vec<f64>,
}

/// The lowest-x-degree part of the `θ^0` coefficient of
/// `e^{−u/x^q} H e^{u/x^q}`, with its nonzero roots (which must be simple).
pub fn determining_polynomial<R: Scalar>(h: &ThetaOperator<R>, q: &Rational) -> Result<DeterminingData<R>> {
    let twisted = h.twist(q)?;
    let h0 = twisted.coeff(0);
    let Some(low) = h0.valuation() else {
        return Err(Error::Degenerate("the twisted operator has no theta^0 term".into()));
    };
    let p = h0.coeff(low);
    if p.degree().unwrap_or(0) == 0 {
        return Err(Error::Degenerate("determining polynomial is constant".into()));
    }
    let prec = working_precision();
    let stripped = p.shift_down(p.valuation().unwrap_or(0));
    let all = scalar_roots(&stripped, prec)?;
    check_simple(&stripped, &all, prec)?;
    let residuals = all
        .iter()
        .map(|r| {
            let pc = stripped.map(|c| c.to_complex(prec));
            cabs(&pc.eval(&r.value)).to_f64()
        })
        .collect();
    Ok(DeterminingData { polynomial: p, nonzero_roots: all, q: q.clone(), residuals })
}

fn check_simple<R: Scalar>(p: &Poly<R>, found: &[Root], prec: u32) -> Result<()> {
    if R::is_exact() {
        let exact: Poly<Rational> = p.map(|c| c.recognize_rational().expect("exact scalar"));
        if !exact.is_squarefree() {
            return Err(Error::MultipleRoot(format!("determining polynomial cofactor {exact} has a repeated root")));
        }
        return Ok(());
    }
    let tol = 2f64.powi(-(prec as i32) / 3);
    for i in 0..found.len() {
        for j in i + 1..found.len() {
            let d = cabs(&Ring::sub(&found[i].value, &found[j].value)).to_f64();
            let s = cabs(&found[i].value).to_f64().max(1.0);
            if d <= tol * s {
                return Err(Error::MultipleRoot(format!("roots {i} and {j} coincide numerically")));
            }
        }
    }
    Ok(())
}
