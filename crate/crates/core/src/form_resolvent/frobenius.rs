//! Frobenius solution at `t = infinity` of the conjugated radial equation
//! `-v'' + (s^2 + E) v + sum_k q^k W_k(v) = 0`.
//!
//! The solution is assembled block by block: for each eigenvalue `e_j` of
//! the `E` element the chain starts at its spectral projector `P_j` with
//! exponent `mu_j = sqrt(s^2 + e_j)` (the cover point supplies the branch)
//! and
//!
//! ```text
//! v_j(t) = sum_l a_{j,l}(t) e^-(mu_j + l) t,
//! [(mu_j + l)^2 - s^2 - E] a_{j,l} = sum_k W_k(a_{j,l-k}).
//! ```
//!
//! When `mu_j + l = +-mu_i` for some block `i` the recursion is singular.
//! Under [`ResonancePolicy::LogTerms`] the coefficients then become
//! polynomials in `t`, which is the standard logarithmic Frobenius case in
//! the variable `q`. Points merely close to a resonance are rejected.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::cover::CoverPoint;
use super::radial::{CMatrix, RadialOperator};
use super::ResolventError;
use crate::scalar_green::decay_rate_fit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResonancePolicy {
    /// Exact resonances are resolved with polynomial-in-`t` coefficients.
    LogTerms,
    /// Any resonance is an error.
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrobeniusConfig {
    pub truncation: usize,
    /// Near-resonance floor, scaled by `1 + |s|^2`.
    pub resonance_floor: f64,
    /// Relative size below which a recursion denominator counts as exactly zero.
    pub exact_resonance_tol: f64,
    pub policy: ResonancePolicy,
    /// Target size of the neglected tail relative to the leading term.
    pub tail_tolerance: f64,
    /// Smallest `t` at which the series must be usable; a larger tail
    /// threshold raises the truncation warning.
    pub required_validity: f64,
}

impl Default for FrobeniusConfig {
    fn default() -> Self {
        FrobeniusConfig {
            truncation: 40,
            resonance_floor: 1e-8,
            exact_resonance_tol: 1e-13,
            policy: ResonancePolicy::LogTerms,
            tail_tolerance: 1e-12,
            required_validity: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub block: i64,
    pub l: usize,
    pub target: i64,
    /// Whether the right-hand side forced a logarithmic term.
    pub logarithmic: bool,
}

#[derive(Debug, Clone)]
pub struct Block {
    pub e: i64,
    pub mu: Complex64,
    pub projector: CMatrix,
    /// `coeffs[l][k]` multiplies `t^k e^-(mu + l) t`.
    pub coeffs: Vec<Vec<CMatrix>>,
}

impl Block {
    pub fn coefficient_norm(&self, l: usize) -> f64 {
        self.coeffs[l].iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct FrobeniusKernel {
    pub cover_point: CoverPoint,
    pub n: usize,
    pub p: usize,
    pub dim_v: usize,
    /// `(n - 1) / 2`.
    pub rho: f64,
    pub blocks: Vec<Block>,
    pub truncation: usize,
    /// Smallest recursion denominator met away from exact resonances.
    pub resonance_margin: f64,
    pub resonances: Vec<Resonance>,
    /// Below this `t` the truncated tail is not controlled.
    pub tail_threshold: f64,
    pub truncation_warning: bool,
}

pub fn frobenius_solve(
    op: &RadialOperator,
    point: &CoverPoint,
    cfg: &FrobeniusConfig,
) -> Result<FrobeniusKernel, ResolventError> {
    if cfg.truncation < 1 {
        return Err(ResolventError::InvalidDegree("truncation must be at least 1".into()));
    }
    let d = op.dim_v();
    let s = point.s;
    let s2 = s * s;
    let projectors: Vec<(i64, CMatrix)> = op
        .tau
        .e_projectors()
        .into_iter()
        .map(|(e, m)| (e, m.map(|v| Complex64::new(v, 0.0))))
        .collect();
    let floor = cfg.resonance_floor * (1.0 + s.norm_sqr());
    let e_scale = projectors.iter().map(|(e, _)| *e as f64).fold(0.0, f64::max);

    let mut blocks = Vec::new();
    let mut margin = f64::INFINITY;
    let mut resonances = Vec::new();
    for (e_j, p_j) in &projectors {
        let mu = point.exponent(*e_j).ok_or_else(|| {
            ResolventError::InvalidDegree(format!("cover point has no branch value for e = {e_j}"))
        })?;
        let mut coeffs: Vec<Vec<CMatrix>> = vec![vec![p_j.clone()]];
        let mut images = vec![vec![op.images(p_j)]];
        for l in 1..=cfg.truncation {
            // Right-hand side as a polynomial in t.
            let mut rhs: Vec<CMatrix> = Vec::new();
            for k in 1..=l.min(op.l_w()) {
                let w = op.w(k).expect("k within L_w");
                if w.is_zero() {
                    continue;
                }
                for (deg, im) in images[l - k].iter().enumerate() {
                    let term = im.combine(w);
                    if rhs.len() <= deg {
                        rhs.resize(deg + 1, CMatrix::zeros(d, d));
                    }
                    rhs[deg] += term;
                }
            }
            if rhs.is_empty() {
                rhs.push(CMatrix::zeros(d, d));
            }
            let nu = mu + l as f64;
            let rhs_scale = rhs.iter().map(|r| r.norm()).fold(0.0, f64::max);
            let mut next: Vec<CMatrix> = vec![CMatrix::zeros(d, d); rhs.len() + 1];
            for (e_i, p_i) in &projectors {
                let m = nu * nu - s2 - *e_i as f64;
                let scale = nu.norm_sqr() + s2.norm() + e_scale + 1.0;
                let block_rhs: Vec<CMatrix> = rhs.iter().map(|r| p_i * r).collect();
                let block_size = block_rhs.iter().map(|r| r.norm()).fold(0.0, f64::max);
                if m.norm() <= cfg.exact_resonance_tol * scale {
                    let forced = block_size > 1e-12 * rhs_scale.max(f64::MIN_POSITIVE) && block_size > 0.0;
                    if cfg.policy == ResonancePolicy::Reject {
                        return Err(ResolventError::ResonanceDetected { s, block: *e_j, l, target: *e_i, margin: m.norm() });
                    }
                    resonances.push(Resonance { block: *e_j, l, target: *e_i, logarithmic: forced });
                    if forced {
                        solve_resonant(&block_rhs, nu, &mut next);
                    }
                    continue;
                }
                if m.norm() < floor {
                    return Err(ResolventError::ResonanceDetected { s, block: *e_j, l, target: *e_i, margin: m.norm() });
                }
                margin = margin.min(m.norm());
                solve_regular(&block_rhs, nu, m, &mut next);
            }
            while next.len() > 1 && next.last().map(|c| c.norm() == 0.0).unwrap_or(false) {
                next.pop();
            }
            images.push(next.iter().map(|c| op.images(c)).collect());
            coeffs.push(next);
        }
        blocks.push(Block { e: *e_j, mu, projector: p_j.clone(), coeffs });
    }

    let tail_threshold = tail_threshold(&blocks, cfg);
    Ok(FrobeniusKernel {
        cover_point: point.clone(),
        n: op.n,
        p: op.p,
        dim_v: d,
        rho: (op.n as f64 - 1.0) / 2.0,
        blocks,
        truncation: cfg.truncation,
        resonance_margin: margin,
        resonances,
        tail_threshold,
        truncation_warning: tail_threshold > cfg.required_validity,
    })
}

/// `m C_k + (k+2)(k+1) C_{k+2} - 2 nu (k+1) C_{k+1} = R_k`, solved downward in `k`.
fn solve_regular(rhs: &[CMatrix], nu: Complex64, m: Complex64, out: &mut [CMatrix]) {
    let top = rhs.len() - 1;
    let mut c: Vec<CMatrix> = vec![CMatrix::zeros(rhs[0].nrows(), rhs[0].ncols()); top + 3];
    for k in (0..=top).rev() {
        let kf = k as f64;
        let val = &rhs[k] - &c[k + 2] * Complex64::new((kf + 2.0) * (kf + 1.0), 0.0) + &c[k + 1] * (nu * 2.0 * (kf + 1.0));
        c[k] = val / m;
    }
    for k in 0..=top {
        out[k] += &c[k];
    }
}

/// Resonant block (`m = 0`): `-2 nu (k+1) C_{k+1} + (k+2)(k+1) C_{k+2} = R_k`,
/// with the free constant `C_0` set to zero.
fn solve_resonant(rhs: &[CMatrix], nu: Complex64, out: &mut [CMatrix]) {
    let top = rhs.len() - 1;
    let mut c: Vec<CMatrix> = vec![CMatrix::zeros(rhs[0].nrows(), rhs[0].ncols()); top + 3];
    for k in (0..=top).rev() {
        let kf = k as f64;
        let val = &c[k + 2] * Complex64::new((kf + 2.0) * (kf + 1.0), 0.0) - &rhs[k];
        c[k + 1] = val / (nu * 2.0 * (kf + 1.0));
    }
    for k in 1..=top + 1 {
        out[k] += &c[k];
    }
}

/// Smallest `t` with `|a_l| e^-(Re mu + l) t` below the tail tolerance for
/// the last five coefficients, relative to the leading term.
fn tail_threshold(blocks: &[Block], cfg: &FrobeniusConfig) -> f64 {
    let mut threshold: f64 = 0.0;
    for b in blocks {
        let lead = b.coefficient_norm(0).max(f64::MIN_POSITIVE);
        let last = b.coeffs.len() - 1;
        for l in last.saturating_sub(4).max(1)..=last {
            let ratio = b.coefficient_norm(l) / (lead * cfg.tail_tolerance);
            if ratio > 1.0 {
                threshold = threshold.max(ratio.ln() / l as f64);
            }
        }
    }
    threshold
}

fn ln_sinh(t: f64) -> f64 {
    t + (-(-2.0 * t).exp_m1()).ln() - std::f64::consts::LN_2
}

impl FrobeniusKernel {
    fn check_t(&self, t: f64) -> Result<(), ResolventError> {
        if !(t > 0.0) || t < self.tail_threshold {
            return Err(ResolventError::TailBoundExceeded { t, threshold: self.tail_threshold });
        }
        Ok(())
    }

    /// `v, v', v''` of the conjugated solution scaled by `sinh^-rho t`
    /// folded into the exponentials for stability.
    fn conjugated(&self, t: f64) -> [CMatrix; 3] {
        let d = self.dim_v;
        let mut out = [CMatrix::zeros(d, d), CMatrix::zeros(d, d), CMatrix::zeros(d, d)];
        let lnsh = ln_sinh(t);
        for b in &self.blocks {
            for (l, poly) in b.coeffs.iter().enumerate() {
                let nu = b.mu + l as f64;
                let ex = (-nu * t - self.rho * lnsh).exp();
                for (k, c) in poly.iter().enumerate() {
                    let kf = k as f64;
                    let tk = t.powi(k as i32);
                    let tk1 = if k >= 1 { kf * t.powi(k as i32 - 1) } else { 0.0 };
                    let tk2 = if k >= 2 { kf * (kf - 1.0) * t.powi(k as i32 - 2) } else { 0.0 };
                    let u0 = ex * tk;
                    let u1 = ex * (tk1 - nu * tk);
                    let u2 = ex * (tk2 - nu * 2.0 * tk1 + nu * nu * tk);
                    out[0] += c * u0;
                    out[1] += c * u1;
                    out[2] += c * u2;
                }
            }
        }
        out
    }

    /// `F, F', F''` at `t`.
    pub fn eval_with_derivatives(&self, t: f64) -> Result<[CMatrix; 3], ResolventError> {
        self.check_t(t)?;
        let [w0, w1, w2] = self.conjugated(t);
        // F = sigma v with sigma = sinh^-rho; w = sigma v_i already.
        let b = self.rho;
        let coth = 1.0 / t.tanh();
        let csch2 = t.sinh().powi(-2);
        let c = |v: f64| Complex64::new(v, 0.0);
        let f0 = w0.clone();
        let f1 = &w1 - &w0 * c(b * coth);
        let f2 = &w2 - &w1 * c(2.0 * b * coth) + &w0 * c(b * b * coth * coth + b * csch2);
        Ok([f0, f1, f2])
    }

    /// Relative residual (operator norm) of the unconjugated equation.
    pub fn ode_residual(&self, op: &RadialOperator, t: f64) -> Result<f64, ResolventError> {
        let [f0, f1, f2] = self.eval_with_derivatives(t)?;
        let res = op.bochner_residual(t, self.cover_point.s, &f0, &f1, &f2);
        Ok(operator_norm(&res) / operator_norm(&f0).max(f64::MIN_POSITIVE))
    }

    /// Coefficient norms of the whole kernel, `max_j |a_{j,l}|`.
    pub fn coefficient_norms(&self) -> Vec<f64> {
        (0..=self.truncation)
            .map(|l| self.blocks.iter().map(|b| b.coefficient_norm(l)).fold(0.0, f64::max))
            .collect()
    }

    /// Norm of the block started at `P_j`, evaluated at `t`.
    pub fn block_norms(&self, t: f64) -> Result<Vec<(i64, f64)>, ResolventError> {
        self.check_t(t)?;
        let lnsh = ln_sinh(t);
        Ok(self
            .blocks
            .iter()
            .map(|b| {
                let mut acc = CMatrix::zeros(self.dim_v, self.dim_v);
                for (l, poly) in b.coeffs.iter().enumerate() {
                    let ex = (-(b.mu + l as f64) * t - self.rho * lnsh).exp();
                    for (k, c) in poly.iter().enumerate() {
                        acc += c * (ex * t.powi(k as i32));
                    }
                }
                (b.e, operator_norm(&acc))
            })
            .collect())
    }

    /// The kernel restricted to the chain started at block `j`.
    pub fn single_block(&self, j: usize) -> FrobeniusKernel {
        FrobeniusKernel { blocks: vec![self.blocks[j].clone()], ..self.clone() }
    }

    pub fn max_log_degree(&self) -> usize {
        self.blocks.iter().flat_map(|b| b.coeffs.iter().map(|p| p.len() - 1)).max().unwrap_or(0)
    }
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `F_p` at `t`.
pub fn kernel_eval(kernel: &FrobeniusKernel, t: f64) -> Result<CMatrix, ResolventError> {
    let [f, _, _] = kernel.eval_with_derivatives(t)?;
    Ok(f)
}

/// Exponential decay rate of `|F_p(t)|` fitted over `t_grid`.
pub fn decay_check(kernel: &FrobeniusKernel, t_grid: &[f64]) -> Result<f64, ResolventError> {
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        samples.push((t, operator_norm(&kernel_eval(kernel, t)?)));
    }
    decay_rate_fit(&samples).map_err(|e| ResolventError::DegenerateFit(e.to_string()))
}

/// Smallest singular value of a square matrix.
pub fn smallest_singular_value(m: &DMatrix<Complex64>) -> f64 {
    m.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}
