use rug::Integer;

use crate::exactnum::{Poly, Rational, Ring};

/// Exponential polynomial `T_n(X) = Σ_k S(n, k) X^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TouchardPolynomial {
    poly: Poly<Rational>,
}

impl TouchardPolynomial {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// `s_{n,k}`.
    pub fn coeff(&self, k: usize) -> Rational {
        self.poly.coeff(k)
    }

    pub fn as_poly(&self) -> &Poly<Rational> {
        &self.poly
    }
}

/// `T_n` from `T_0 = 1`, `T_n = (X + X d/dX) T_{n−1}`.
pub fn touchard(n: usize) -> TouchardPolynomial {
    let mut t = Poly::constant(Rational::from(1));
    let x = Poly::<Rational>::var();
    for _ in 0..n {
        t = x.mul(&t.add(&t.derivative()));
    }
    TouchardPolynomial { poly: t }
}

/// Stirling number of the second kind `S(n, k)`.
pub fn stirling2(n: usize, k: usize) -> Integer {
    let mut row = vec![Integer::from(1)];
    for i in 1..=n {
        let mut next = vec![Integer::new(); i + 1];
        for j in 1..=i {
            let keep = if j < row.len() { Integer::from(&row[j] * j as u32) } else { Integer::new() };
            next[j] = keep + &row[j - 1];
        }
        row = next;
    }
    row.get(k).cloned().unwrap_or_default()
}
