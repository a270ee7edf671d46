//! Scalar Green kernel `g0(s, r)` of `Delta - rho^2 + s^2` on `H^n_K`.
//!
//! The kernel is the hypergeometric closed form
//!
//! ```text
//! g0(s, r) = f(s) (2 sinh r)^-(s+rho) 2F1((s+rho)/2, (s+1)/2 - d(n-1)/4; s+1; -1/sinh^2 r)
//! ```
//!
//! with the Plancherel-type prefactor `f` of [`plancherel_prefactor`].

pub mod gamma;
pub mod hypergeometric;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space_constants::{rational_to_f64, SpaceDescriptor};

pub use hypergeometric::gauss_2f1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreenError {
    #[error("series did not converge within {terms} terms")]
    NoConvergence { terms: usize },
    #[error("pole of Gamma: {0}")]
    PoleOfGamma(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenEvalConfig {
    pub series_tolerance: f64,
    pub max_terms: usize,
    /// Largest `|w|` a transformed argument may have before the series is used.
    pub transformation_threshold: f64,
}

impl Default for GreenEvalConfig {
    fn default() -> Self {
        GreenEvalConfig {
            series_tolerance: 1e-14,
            max_terms: 10_000,
            transformation_threshold: 0.9,
        }
    }
}

impl GreenEvalConfig {
    pub fn validate(&self) -> Result<(), GreenError> {
        if !(self.series_tolerance > 0.0) || self.max_terms < 1 {
            return Err(GreenError::DomainError(format!("invalid configuration {self:?}")));
        }
        if !(self.transformation_threshold > 0.0 && self.transformation_threshold < 1.0) {
            return Err(GreenError::DomainError(format!(
                "transformation threshold {} outside (0, 1)",
                self.transformation_threshold
            )));
        }
        Ok(())
    }
}

struct Params {
    sigma: Complex64,
    a: Complex64,
    b: Complex64,
    c: Complex64,
}

fn params(space: &SpaceDescriptor, s: Complex64) -> Params {
    let rho = space.rho_f64();
    let quarter = rational_to_f64(&space.half_m_alpha()) / 2.0;
    Params {
        sigma: s + rho,
        a: (s + rho) / 2.0,
        b: (s + 1.0) / 2.0 - quarter,
        c: s + 1.0,
    }
}

/// `f(s) = 2^(d-2) pi^-((dn-1)/2) G((s+rho)/2) G(s + d(n-1)/2) / [G(s+1) G(s/2 + d(n-1)/4)]`.
pub fn plancherel_prefactor(space: &SpaceDescriptor, s: Complex64) -> Result<Complex64, GreenError> {
    use gamma::{gamma, nonpositive_integer, rgamma};
    let half = rational_to_f64(&space.half_m_alpha());
    let rho = space.rho_f64();
    let num1 = (s + rho) / 2.0;
    let num2 = s + half;
    for x in [num1, num2] {
        if nonpositive_integer(x).is_some() {
            return Err(GreenError::PoleOfGamma(format!("Gamma({x}) in the prefactor at s = {s}")));
        }
    }
    let constant = 2f64.powi(space.d as i32 - 2) * PI.powf(-((space.dim - 1) as f64) / 2.0);
    Ok(constant * gamma(num1) * gamma(num2) * rgamma(s + 1.0) * rgamma(s / 2.0 + half / 2.0))
}

fn check_inputs(space: &SpaceDescriptor, s: Complex64, r: f64) -> Result<(), GreenError> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(GreenError::DomainError(format!("r = {r} must be positive and finite")));
    }
    let floor = -rational_to_f64(&space.half_m_alpha());
    if !(s.re > floor) {
        return Err(GreenError::DomainError(format!(
            "Re s = {} outside the half-plane Re s > {floor}",
            s.re
        )));
    }
    Ok(())
}

/// `ln(2 sinh r)` without overflow for large `r`.
fn log_two_sinh(r: f64) -> f64 {
    r + (-(-2.0 * r).exp()).ln_1p()
}

/// `-1 / sinh^2 r`.
fn argument(r: f64) -> f64 {
    let e = (-2.0 * r).exp();
    let denom = -(-2.0 * r).exp_m1();
    -4.0 * e / (denom * denom)
}

/// `g0(s, r)`.
pub fn green0_eval(space: &SpaceDescriptor, s: Complex64, r: f64) -> Result<Complex64, GreenError> {
    green0_eval_with(space, s, r, &GreenEvalConfig::default())
}

pub fn green0_eval_with(
    space: &SpaceDescriptor,
    s: Complex64,
    r: f64,
    cfg: &GreenEvalConfig,
) -> Result<Complex64, GreenError> {
    cfg.validate()?;
    check_inputs(space, s, r)?;
    let p = params(space, s);
    let f = plancherel_prefactor(space, s)?;
    let pref = (-p.sigma * log_two_sinh(r)).exp();
    let z = Complex64::new(argument(r), 0.0);
    Ok(f * pref * gauss_2f1(p.a, p.b, p.c, z, cfg)?)
}

/// Value and first two `r`-derivatives of `g0`, differentiated analytically
/// through the contiguous functions `d/dz 2F1(a,b;c;z) = (ab/c) 2F1(a+1,b+1;c+1;z)`.
pub fn green0_with_derivatives(
    space: &SpaceDescriptor,
    s: Complex64,
    r: f64,
    cfg: &GreenEvalConfig,
) -> Result<[Complex64; 3], GreenError> {
    cfg.validate()?;
    check_inputs(space, s, r)?;
    let Params { sigma, a, b, c } = params(space, s);
    let f = plancherel_prefactor(space, s)?;
    let z = Complex64::new(argument(r), 0.0);

    let f0 = gauss_2f1(a, b, c, z, cfg)?;
    let f1 = a * b / c * gauss_2f1(a + 1.0, b + 1.0, c + 1.0, z, cfg)?;
    let f2 = a * (a + 1.0) * b * (b + 1.0) / (c * (c + 1.0)) * gauss_2f1(a + 2.0, b + 2.0, c + 2.0, z, cfg)?;

    let (sh, ch) = (r.sinh(), r.cosh());
    let coth = ch / sh;
    let p0 = (-sigma * log_two_sinh(r)).exp();
    let p1 = -sigma * coth * p0;
    let p2 = p0 * (sigma * sigma * coth * coth + sigma / (sh * sh));
    let z1 = 2.0 * ch / (sh * sh * sh);
    let z2 = 2.0 * (sh * sh - 3.0 * ch * ch) / (sh * sh * sh * sh);

    let g0 = f * p0 * f0;
    let g1 = f * (p1 * f0 + p0 * f1 * z1);
    let g2 = f * (p2 * f0 + 2.0 * p1 * f1 * z1 + p0 * (f2 * z1 * z1 + f1 * z2));
    Ok([g0, g1, g2])
}

/// Relative residual of the radial Jacobi equation
/// `g'' + [(dn-1) coth r + (d-1) tanh r] g' + (rho^2 - s^2) g = 0`.
pub fn green0_ode_residual(space: &SpaceDescriptor, s: Complex64, r: f64) -> Result<f64, GreenError> {
    green0_ode_residual_with(space, s, r, &GreenEvalConfig::default())
}

pub fn green0_ode_residual_with(
    space: &SpaceDescriptor,
    s: Complex64,
    r: f64,
    cfg: &GreenEvalConfig,
) -> Result<f64, GreenError> {
    if r < 1e-6 {
        return Err(GreenError::DomainError(format!(
            "r = {r} too close to the origin for a normalized residual"
        )));
    }
    let [g0, g1, g2] = green0_with_derivatives(space, s, r, cfg)?;
    if g0.norm() == 0.0 || !g0.norm().is_finite() {
        return Err(GreenError::DomainError(format!("g0 = {g0} cannot normalize the residual")));
    }
    let rho = space.rho_f64();
    let drift = (space.dim - 1) as f64 / r.tanh() + (space.d - 1) as f64 * r.tanh();
    let res = g2 + drift * g1 + (rho * rho - s * s) * g0;
    Ok(res.norm() / g0.norm())
}

/// Leading singular term of `g0` at the origin:
/// `r^(2-m) / ((m-2) vol S^(m-1))` for `m = dn > 2`, `-(1/2pi) log r` for `m = 2`.
pub fn small_r_leading(space: &SpaceDescriptor, r: f64) -> f64 {
    let m = space.dim;
    if m == 2 {
        -r.ln() / (2.0 * PI)
    } else {
        r.powi(2 - m as i32) / ((m - 2) as f64 * gamma::sphere_volume(m as u32))
    }
}

/// Least-squares slope of `-log(value)` against `r`.
pub fn decay_rate_fit(samples: &[(f64, f64)]) -> Result<f64, GreenError> {
    if samples.len() < 2 {
        return Err(GreenError::DegenerateFit(format!("{} samples, need at least 2", samples.len())));
    }
    if let Some((r, v)) = samples.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(GreenError::DomainError(format!("non-positive value {v} at r = {r}")));
    }
    let n = samples.len() as f64;
    let mean_r = samples.iter().map(|(r, _)| r).sum::<f64>() / n;
    let mean_y = samples.iter().map(|(_, v)| -v.ln()).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|(r, _)| (r - mean_r).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|(r, v)| (r - mean_r) * (-v.ln() - mean_y)).sum();
    let scale = samples.iter().map(|(r, _)| r.abs()).fold(1.0, f64::max);
    if sxx <= (1e-12 * scale).powi(2) {
        return Err(GreenError::DegenerateFit("sample radii coincide".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_constants::{make_space, Field};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sp(f: Field, n: i64) -> SpaceDescriptor {
        make_space(f, n).unwrap()
    }

    fn h3_oracle(s: Complex64, r: f64) -> Complex64 {
        (-s * r).exp() / (4.0 * PI * r.sinh())
    }

    #[test]
    fn prefactor_examples() {
        let r3 = sp(Field::Real, 3);
        for s in [1.0, 2.0, 0.37] {
            let f = plancherel_prefactor(&r3, c(s, 0.0)).unwrap();
            assert!((f.re - 1.0 / (2.0 * PI)).abs() < 1e-15);
        }
        // Real n = 2, s = 1: pi^-1/2 G(3/4) G(3/2) / (2 G(2) G(3/4)) = 1/4.
        let f = plancherel_prefactor(&sp(Field::Real, 2), c(1.0, 0.0)).unwrap();
        assert!((f.re - 0.25).abs() < 1e-14, "{f}");
        assert!(matches!(
            plancherel_prefactor(&r3, c(-1.0, 0.0)),
            Err(GreenError::PoleOfGamma(_))
        ));
    }

    #[test]
    fn h3_closed_form() {
        let r3 = sp(Field::Real, 3);
        for s in [c(0.5, 0.0), c(1.0, 0.0), c(2.0, 1.0)] {
            for i in 0..=40 {
                let r = 0.1 + 9.9 * i as f64 / 40.0;
                let g = green0_eval(&r3, s, r).unwrap();
                let o = h3_oracle(s, r);
                assert!((g - o).norm() <= 1e-10 * o.norm(), "s={s} r={r}: {g} vs {o}");
            }
        }
        let g = green0_eval(&r3, c(1.0, 0.0), 1.0).unwrap();
        assert!((g.re - 0.024_91).abs() < 1e-5);
    }

    #[test]
    fn odd_residuals() {
        let cases = [
            (sp(Field::Real, 3), 1.0, 2.0),
            (sp(Field::Complex, 2), 1.5, 3.0),
            (sp(Field::Real, 2), 0.5, 1.0),
        ];
        for (space, s, r) in cases {
            let res = green0_ode_residual(&space, c(s, 0.0), r).unwrap();
            assert!(res < 1e-8, "{space} s={s} r={r}: {res}");
        }
    }

    #[test]
    fn residual_sweep() {
        for (f, n) in [(Field::Real, 2), (Field::Real, 4), (Field::Real, 5), (Field::Complex, 3), (Field::Quaternion, 2), (Field::Octonion, 2)] {
            let space = sp(f, n);
            for s in [0.5, 1.5, 3.0] {
                for i in 0..20 {
                    let r = 0.1 * (100f64).powf(i as f64 / 19.0);
                    let res = green0_ode_residual(&space, c(s, 0.0), r).unwrap();
                    assert!(res < 1e-8, "{space} s={s} r={r}: {res}");
                }
            }
        }
    }

    #[test]
    fn small_r_two_dimensional_log() {
        let r2 = sp(Field::Real, 2);
        let r = 1e-6;
        let g = green0_eval(&r2, c(0.8, 0.0), r).unwrap().re;
        // g0 = -(1/2pi) log r + O(1).
        let diff = g - small_r_leading(&r2, r);
        let diff2 = green0_eval(&r2, c(0.8, 0.0), 1e-8).unwrap().re - small_r_leading(&r2, 1e-8);
        assert!((diff - diff2).abs() < 1e-6, "{diff} {diff2}");
    }

    #[test]
    fn small_r_h3_literal_law() {
        // On H^3 the leading term is r^-1 / vol(S^2).
        let r3 = sp(Field::Real, 3);
        let r = 1e-4;
        let g = green0_eval(&r3, c(1.0, 0.0), r).unwrap().re;
        assert!((g * r * gamma::sphere_volume(3) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn small_r_general() {
        for (f, n) in [(Field::Real, 4), (Field::Complex, 2), (Field::Quaternion, 2), (Field::Real, 7)] {
            let space = sp(f, n);
            let ratio = |r: f64| green0_eval(&space, c(1.0, 0.0), r).unwrap().re / small_r_leading(&space, r);
            let (a, b) = (ratio(1e-3), ratio(1e-4));
            assert!((b - 1.0).abs() < 1e-2, "{space}: {a} {b}");
        }
    }

    #[test]
    fn positivity() {
        for (f, n) in [(Field::Real, 2), (Field::Real, 3), (Field::Complex, 2), (Field::Quaternion, 3)] {
            let space = sp(f, n);
            for s in [0.1, 1.0, 4.0] {
                for i in 0..60 {
                    let r = 1e-3 * (2e4f64).powf(i as f64 / 59.0);
                    let g = green0_eval(&space, c(s, 0.0), r).unwrap();
                    assert!(g.re > 0.0 && g.im.abs() <= 1e-12 * g.re, "{space} s={s} r={r}: {g}");
                }
            }
        }
    }

    #[test]
    fn holomorphy_in_s() {
        let space = sp(Field::Complex, 2);
        let h = 1e-5;
        for s in [c(0.7, 0.3), c(1.5, -1.0), c(3.0, 2.0)] {
            for r in [0.5, 2.0] {
                let g = |s: Complex64| green0_eval(&space, s, r).unwrap();
                let dx = (g(s + h) - g(s - h)) / (2.0 * h);
                let dy = (g(s + c(0.0, h)) - g(s - c(0.0, h))) / (2.0 * h);
                // Cauchy-Riemann: dg/dy = i dg/dx.
                let cr = (dy - c(0.0, 1.0) * dx).norm() / dx.norm().max(g(s).norm());
                assert!(cr < 1e-6, "s={s} r={r}: {cr}");
            }
        }
    }

    #[test]
    fn decay_fits() {
        let exact: Vec<_> = (0..10).map(|i| (i as f64, (-3.0 * i as f64).exp())).collect();
        assert!((decay_rate_fit(&exact).unwrap() - 3.0).abs() < 1e-12);
        let fit = |space: SpaceDescriptor, s: f64| {
            let samples: Vec<_> = (5..=15)
                .map(|r| (r as f64, green0_eval(&space, c(s, 0.0), r as f64).unwrap().re))
                .collect();
            decay_rate_fit(&samples).unwrap()
        };
        assert!((fit(sp(Field::Real, 3), 1.0) - 2.0).abs() < 1e-3);
        assert!((fit(sp(Field::Quaternion, 2), 0.5) - 5.5).abs() < 1e-2);
        assert!(matches!(decay_rate_fit(&[(1.0, 1.0), (1.0, 2.0)]), Err(GreenError::DegenerateFit(_))));
        assert!(decay_rate_fit(&[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn domain_errors() {
        let r3 = sp(Field::Real, 3);
        assert!(matches!(green0_eval(&r3, c(1.0, 0.0), 0.0), Err(GreenError::DomainError(_))));
        assert!(matches!(green0_eval(&r3, c(-1.5, 0.0), 1.0), Err(GreenError::DomainError(_))));
        assert!(green0_ode_residual(&r3, c(1.0, 0.0), 1e-9).is_err());
    }
}
