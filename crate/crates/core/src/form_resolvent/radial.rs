//! The radial form of `Delta_p - alpha_p + s^2` acting on `End(V)`-valued
//! functions of `t`, conjugated by `sinh^((n-1)/2) t` and expanded in
//! `q = e^-t`.
//!
//! Before conjugation the equation reads
//!
//! ```text
//! -F'' - (n-1) coth t F' - coth^2 t L(F) - csch^2 t R(F)
//!     + 2 cosh t csch^2 t S(F) + (Omega_k - alpha_p + s^2) F = 0
//! ```
//!
//! with `L(X) = sum Y_r^2 X`, `R(X) = X sum Y_r^2`, `S(X) = sum Y_r X Y_r`.
//! Substituting `F = sinh^-((n-1)/2) t v` removes the first-order term and
//! adds `(n-1)^2/4 coth^2 t - (n-1)/2 csch^2 t`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use super::qseries::HyperbolicSeries;
use super::tau::{build_tau_p_action, IntMatrix, TauPAction};
use super::ResolventError;
use crate::space_constants::{alpha_p, make_space, rational_to_f64, Field};

pub type CMatrix = DMatrix<Complex64>;

/// `X -> scalar X + left L(X) + right R(X) + sandwich S(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralMap {
    #[serde(serialize_with = "ser_rational")]
    pub scalar: Rational64,
    #[serde(serialize_with = "ser_rational")]
    pub left: Rational64,
    #[serde(serialize_with = "ser_rational")]
    pub right: Rational64,
    #[serde(serialize_with = "ser_rational")]
    pub sandwich: Rational64,
}

fn ser_rational<S: serde::Serializer>(x: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::space_constants::rational_string(x))
}

impl StructuralMap {
    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero() && self.left.is_zero() && self.right.is_zero() && self.sandwich.is_zero()
    }
}

/// Which powers of `q` carry a nonzero `W_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QParity {
    pub even_powers: bool,
    pub odd_powers: bool,
    pub nonzero_powers: Vec<usize>,
}

/// Images of one matrix under the structural maps, computed once and
/// reused for every `W_k`.
pub struct Images {
    pub x: CMatrix,
    pub l: CMatrix,
    pub r: CMatrix,
    pub s: CMatrix,
}

impl Images {
    pub fn combine(&self, m: &StructuralMap) -> CMatrix {
        let f = |q: Rational64| Complex64::new(rational_to_f64(&q), 0.0);
        let mut out = &self.x * f(m.scalar);
        if !m.left.is_zero() {
            out += &self.l * f(m.left);
        }
        if !m.right.is_zero() {
            out += &self.r * f(m.right);
        }
        if !m.sandwich.is_zero() {
            out += &self.s * f(m.sandwich);
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialOperator {
    pub n: usize,
    pub p: usize,
    pub end_dim: usize,
    #[serde(skip)]
    pub tau: TauPAction,
    #[serde(serialize_with = "ser_rational")]
    pub alpha_p: Rational64,
    /// `q^0` part of the conjugated operator minus `s^2`.
    pub constant: StructuralMap,
    /// The element `c(sigma_max) Id + Omega_m`; `E` is left multiplication by it.
    #[serde(skip)]
    pub e_operator: DMatrix<f64>,
    /// `W_k` for `k = 1..=L_w`, stored at index `k - 1`.
    pub w_coeffs: Vec<StructuralMap>,
    pub q_parity: QParity,
    #[serde(skip)]
    ys: Vec<CMatrix>,
    #[serde(skip)]
    ysq: CMatrix,
}

fn to_complex(m: &IntMatrix) -> CMatrix {
    m.map(|v| Complex64::new(v as f64, 0.0))
}

pub fn build_radial_operator(n: usize, p: usize, l_w: usize) -> Result<RadialOperator, ResolventError> {
    if l_w < 1 {
        return Err(ResolventError::InvalidDegree("L_w must be at least 1".into()));
    }
    let tau = build_tau_p_action(n, p)?;
    let space = make_space(Field::Real, n as i64).map_err(|e| ResolventError::InvalidDegree(e.to_string()))?;
    let alpha = alpha_p(&space, p as i64).map_err(|e| ResolventError::InvalidDegree(e.to_string()))?;

    let h = HyperbolicSeries::new(l_w);
    let nm1 = Rational64::from_integer(n as i64 - 1);
    let conj_coth = nm1 * nm1 / 4;
    let conj_csch = -nm1 / 2;
    let static_part = Rational64::from_integer(tau.omega_k_scalar_blocks) - alpha;
    let term = |k: usize| StructuralMap {
        scalar: conj_coth * h.coth_sq.coeff(k) + conj_csch * h.csch_sq.coeff(k) + if k == 0 { static_part } else { Rational64::zero() },
        left: -h.coth_sq.coeff(k),
        right: -h.csch_sq.coeff(k),
        sandwich: h.cosh_csch_sq.coeff(k) * 2,
    };
    let constant = term(0);
    verify_constant_term(&tau, &space.rho_squared(), &alpha, &constant)?;

    let w_coeffs: Vec<StructuralMap> = (1..=l_w).map(term).collect();
    let nonzero_powers: Vec<usize> = (1..=l_w).filter(|&k| !w_coeffs[k - 1].is_zero()).collect();
    // A structural map can vanish on V even if its coefficients do not.
    let sandwich_trivial = tau.y_matrices.iter().all(|y| y.iter().all(|&v| v == 0));
    let effective: Vec<usize> = nonzero_powers
        .iter()
        .copied()
        .filter(|&k| {
            let w = &w_coeffs[k - 1];
            !(sandwich_trivial && w.scalar.is_zero())
        })
        .collect();
    let q_parity = QParity {
        even_powers: effective.iter().any(|k| k % 2 == 0),
        odd_powers: effective.iter().any(|k| k % 2 == 1),
        nonzero_powers: effective,
    };

    let cmax = tau.casimir_max();
    let e_operator = tau.omega_m_element.map(|v| v as f64) + DMatrix::<f64>::identity(tau.dim_v, tau.dim_v) * cmax as f64;
    let ys = tau.y_matrices.iter().map(to_complex).collect();
    let ysq = to_complex(&tau.y_square_sum);
    Ok(RadialOperator {
        n,
        p,
        end_dim: tau.dim_v * tau.dim_v,
        alpha_p: alpha,
        constant,
        e_operator,
        w_coeffs,
        q_parity,
        ys,
        ysq,
        tau,
    })
}

/// The `q^0` coefficient must be `rho^2 - alpha_p + Omega_m`, checked on `V`
/// in exact integer arithmetic after clearing denominators.
fn verify_constant_term(
    tau: &TauPAction,
    rho_sq: &Rational64,
    alpha: &Rational64,
    constant: &StructuralMap,
) -> Result<(), ResolventError> {
    if !constant.right.is_zero() || !constant.sandwich.is_zero() {
        return Err(ResolventError::AssemblyMismatch("q^0 part has two-sided terms".into()));
    }
    let denom = constant.scalar.denom() * constant.left.denom() * rho_sq.denom() * alpha.denom();
    let int = |q: Rational64| {
        let v = q * denom;
        debug_assert!(v.is_integer());
        v.to_integer()
    };
    let id = IntMatrix::identity(tau.dim_v, tau.dim_v);
    let assembled = &id * int(constant.scalar) + &tau.y_square_sum * int(constant.left);
    let expected = &id * int(*rho_sq - *alpha) + &tau.omega_m_element * denom;
    if assembled != expected {
        return Err(ResolventError::AssemblyMismatch(format!(
            "q^0 coefficient differs from rho^2 - alpha_p + D for (n, p) = ({}, {})",
            tau.n, tau.p
        )));
    }
    Ok(())
}

impl RadialOperator {
    pub fn dim_v(&self) -> usize {
        self.tau.dim_v
    }

    pub fn l_w(&self) -> usize {
        self.w_coeffs.len()
    }

    pub fn w(&self, k: usize) -> Option<&StructuralMap> {
        if k == 0 {
            None
        } else {
            self.w_coeffs.get(k - 1)
        }
    }

    pub fn images(&self, x: &CMatrix) -> Images {
        let mut s = CMatrix::zeros(x.nrows(), x.ncols());
        for y in &self.ys {
            s += y * x * y;
        }
        Images { l: &self.ysq * x, r: x * &self.ysq, s, x: x.clone() }
    }

    pub fn left_sq(&self) -> &CMatrix {
        &self.ysq
    }

    /// `-v'' + P(t) v` with `P` summed from the `q`-series, without `s^2`.
    pub fn series_potential(&self, t: f64, x: &CMatrix) -> CMatrix {
        let q = (-t).exp();
        let im = self.images(x);
        let mut out = im.combine(&self.constant);
        let mut qk = 1.0;
        for w in &self.w_coeffs {
            qk *= q;
            out += im.combine(w) * Complex64::new(qk, 0.0);
        }
        out
    }

    /// The same potential from the closed-form hyperbolic functions.
    pub fn direct_potential(&self, t: f64, x: &CMatrix) -> CMatrix {
        let n1 = self.n as f64 - 1.0;
        let (sh, ch) = (t.sinh(), t.cosh());
        let coth2 = (ch / sh).powi(2);
        let csch2 = sh.powi(-2);
        let im = self.images(x);
        let scalar = n1 * n1 / 4.0 * coth2 - n1 / 2.0 * csch2 + self.tau.omega_k_scalar_blocks as f64 - rational_to_f64(&self.alpha_p);
        let c = |v: f64| Complex64::new(v, 0.0);
        &im.x * c(scalar) - &im.l * c(coth2) - &im.r * c(csch2) + &im.s * c(2.0 * ch * csch2)
    }

    /// Relative difference between the series and closed-form potentials
    /// applied to a fixed test matrix.
    pub fn validate_at(&self, t: f64) -> f64 {
        let d = self.dim_v();
        let x = CMatrix::from_fn(d, d, |i, j| Complex64::new(((i * 7 + j * 3) as f64).sin(), ((i + 2 * j) as f64).cos()));
        let a = self.series_potential(t, &x);
        let b = self.direct_potential(t, &x);
        (a - &b).norm() / b.norm().max(f64::MIN_POSITIVE)
    }

    /// Unconjugated residual operator applied to `F`, given `F'` and `F''`:
    /// `-F'' - (n-1) coth F' - coth^2 L F - csch^2 R F + 2 cosh csch^2 S F + (Omega_k - alpha + s^2) F`.
    pub fn bochner_residual(&self, t: f64, s: Complex64, f: &CMatrix, f1: &CMatrix, f2: &CMatrix) -> CMatrix {
        let n1 = self.n as f64 - 1.0;
        let (sh, ch) = (t.sinh(), t.cosh());
        let coth = ch / sh;
        let csch2 = sh.powi(-2);
        let im = self.images(f);
        let c = |v: f64| Complex64::new(v, 0.0);
        let shift = c(self.tau.omega_k_scalar_blocks as f64 - rational_to_f64(&self.alpha_p)) + s * s;
        -f2 - f1 * c(n1 * coth) - &im.l * c(coth * coth) - &im.r * c(csch2) + &im.s * c(2.0 * ch * csch2) + &im.x * shift
    }

    /// `F''` solved from the unconjugated equation.
    pub fn second_derivative(&self, t: f64, s: Complex64, f: &CMatrix, f1: &CMatrix) -> CMatrix {
        let zero = CMatrix::zeros(f.nrows(), f.ncols());
        self.bochner_residual(t, s, f, f1, &zero)
    }
}
