//! Linear models of real and complex hyperbolic space.
//!
//! Both are realized on `K^(n+1)` with the form
//! `h(x, y) = conj(x_0) y_0 + ... + conj(x_(n-1)) y_(n-1) - conj(x_n) y_n`;
//! points are negative lines. For the real model the entries are real and
//! the lines meet the hyperboloid `q(x, x) = -1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::OrbitError;
use crate::space_constants::Field;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsometryModel {
    /// `H^n_R` in the Minkowski space of signature `(n, 1)`.
    RealHyperboloid { n: usize },
    /// `H^n_C` as negative lines for the Hermitian form of signature `(n, 1)`,
    /// normalized to holomorphic sectional curvature -4, so that
    /// `cosh^2 d = h(x, y) h(y, x) / (h(x, x) h(y, y))`.
    ComplexProjective { n: usize },
}

impl IsometryModel {
    pub fn n(&self) -> usize {
        match *self {
            IsometryModel::RealHyperboloid { n } | IsometryModel::ComplexProjective { n } => n,
        }
    }

    pub fn field(&self) -> Field {
        match self {
            IsometryModel::RealHyperboloid { .. } => Field::Real,
            IsometryModel::ComplexProjective { .. } => Field::Complex,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, IsometryModel::RealHyperboloid { .. })
    }

    /// Dimension of the ambient vector space.
    pub fn dim(&self) -> usize {
        self.n() + 1
    }

    /// `rho` of the space, which bounds the critical exponent by `2 rho`.
    pub fn rho(&self) -> f64 {
        match *self {
            IsometryModel::RealHyperboloid { n } => (n as f64 - 1.0) / 2.0,
            IsometryModel::ComplexProjective { n } => n as f64,
        }
    }

    pub fn validate(&self) -> Result<(), OrbitError> {
        if self.n() < 1 {
            return Err(OrbitError::DomainError("model dimension n must be at least 1".into()));
        }
        Ok(())
    }

    /// The diagonal signature matrix `J`.
    pub fn form_matrix(&self) -> CMat {
        let d = self.dim();
        CMat::from_fn(d, d, |i, j| match (i == j, i + 1 == d) {
            (true, false) => Complex64::new(1.0, 0.0),
            (true, true) => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 0.0),
        })
    }

    pub fn form(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let last = x.len() - 1;
        let mut acc = -x[last].conj() * y[last];
        for i in 0..last {
            acc += x[i].conj() * y[i];
        }
        acc
    }

    /// The point `e_n`.
    pub fn base_point(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[self.dim() - 1] = Complex64::new(1.0, 0.0);
        v
    }

    /// `-h(x, x)`, or an error if `x` is not a negative vector of the model.
    pub fn point_norm(&self, x: &[Complex64]) -> Result<f64, OrbitError> {
        if x.len() != self.dim() {
            return Err(OrbitError::DomainError(format!("point has {} entries, model needs {}", x.len(), self.dim())));
        }
        if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(OrbitError::DomainError("point has non-finite entries".into()));
        }
        if self.is_real() && x.iter().any(|v| v.im != 0.0) {
            return Err(OrbitError::DomainError("real model point has imaginary entries".into()));
        }
        let q = -self.form(x, x).re;
        if !(q > 0.0) {
            return Err(OrbitError::DomainError(format!("point is not timelike (h(x, x) = {:e})", -q)));
        }
        Ok(q)
    }

    /// `max |M* J M - J|`, relative to `max(1, |M|^2)`.
    pub fn form_defect(&self, m: &CMat) -> f64 {
        let j = self.form_matrix();
        let scale = m.iter().map(|v| v.norm_sqr()).fold(1.0, f64::max);
        (m.adjoint() * &j * m - j).iter().map(|v| v.norm()).fold(0.0, f64::max) / scale
    }

    /// Inverse of a form-preserving matrix, `J M* J`.
    pub fn isometry_inverse(&self, m: &CMat) -> CMat {
        let j = self.form_matrix();
        &j * m.adjoint() * j
    }
}

/// Hyperbolic distance between two admissible points.
pub fn distance(model: &IsometryModel, x: &[Complex64], y: &[Complex64]) -> Result<f64, OrbitError> {
    let nx = model.point_norm(x)?;
    let ny = model.point_norm(y)?;
    Ok(distance_with_norms(model, x, y, nx, ny))
}

/// Distance with the norms `-h(x, x)`, `-h(y, y)` supplied by the caller.
/// Far apart points use `cosh d` directly; nearby points use
/// `cosh d - 1 = h(w, w) / 2` for the difference `w` of the normalized,
/// phase-aligned representatives, which avoids the cancellation.
pub(crate) fn distance_with_norms(model: &IsometryModel, x: &[Complex64], y: &[Complex64], nx: f64, ny: f64) -> f64 {
    let h = model.form(x, y);
    let (sx, sy) = (nx.sqrt(), ny.sqrt());
    let cosh = h.norm() / (sx * sy);
    if cosh > 2.0 {
        return (cosh + (cosh * cosh - 1.0).sqrt()).ln();
    }
    let phase = if h.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { -h.conj() / h.norm() };
    let w: Vec<Complex64> = x.iter().zip(y).map(|(a, b)| b * phase / sy - a / sx).collect();
    let u = (model.form(&w, &w).re / 2.0).max(0.0);
    (u + (u * (u + 2.0)).sqrt()).ln_1p()
}
