//! Truncated power series in `q = e^-t` with rational coefficients.

use num_rational::Rational64;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    /// Coefficients of `q^0 .. q^order`.
    pub coeffs: Vec<Rational64>,
}

impl QSeries {
    pub fn zero(order: usize) -> Self {
        QSeries { coeffs: vec![Rational64::zero(); order + 1] }
    }

    pub fn from_terms(order: usize, terms: &[(usize, i64)]) -> Self {
        let mut s = Self::zero(order);
        for &(k, c) in terms {
            if k <= order {
                s.coeffs[k] += Rational64::from_integer(c);
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Rational64 {
        self.coeffs.get(k).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn scale(&self, c: Rational64) -> Self {
        QSeries { coeffs: self.coeffs.iter().map(|&x| x * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        QSeries { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = Self::zero(n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                out.coeffs[i + j] += self.coeffs[i] * other.coeffs[j];
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inverse(&self) -> Option<Self> {
        let c0 = self.coeffs[0];
        if c0.is_zero() {
            return None;
        }
        let n = self.order();
        let mut out = Self::zero(n);
        out.coeffs[0] = Rational64::one() / c0;
        for k in 1..=n {
            let mut acc = Rational64::zero();
            for j in 1..=k {
                acc += self.coeffs[j] * out.coeffs[k - j];
            }
            out.coeffs[k] = -acc / c0;
        }
        Some(out)
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * q + *c.numer() as f64 / *c.denom() as f64)
    }
}

/// The hyperbolic coefficient functions of the radial operator as series in `q`.
pub struct HyperbolicSeries {
    pub coth_sq: QSeries,
    pub csch_sq: QSeries,
    /// `cosh t / sinh^2 t`.
    pub cosh_csch_sq: QSeries,
}

impl HyperbolicSeries {
    pub fn new(order: usize) -> Self {
        let one_minus_q2 = QSeries::from_terms(order, &[(0, 1), (2, -1)]);
        let inv = one_minus_q2.mul(&one_minus_q2).inverse().expect("unit constant term");
        let one_plus_q2 = QSeries::from_terms(order, &[(0, 1), (2, 1)]);
        HyperbolicSeries {
            coth_sq: one_plus_q2.mul(&one_plus_q2).mul(&inv),
            csch_sq: QSeries::from_terms(order, &[(2, 4)]).mul(&inv),
            cosh_csch_sq: QSeries::from_terms(order, &[(1, 2), (3, 2)]).mul(&inv),
        }
    }
}
