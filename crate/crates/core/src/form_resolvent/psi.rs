//! Singular behavior of `F_p` at the origin.
//!
//! Starting from the Frobenius values at `T`, the unconjugated equation is
//! integrated inward in `x = ln t` as the first-order system
//! `F_x = G`, `G_x = t^2 F'' + G`, which keeps the `t^-k` growth at a
//! constant exponential rate in `x`. Near `t0` the norm is fitted by a
//! power law and `Psi = vol(S^(n-1)) t^(n-2) F(t)` is extrapolated to `t = 0`.

use num_complex::Complex64;
use serde::Serialize;

use super::frobenius::{operator_norm, smallest_singular_value, FrobeniusKernel};
use super::ode::{integrate, Rk45Config, Rk45Stats};
use super::radial::{CMatrix, RadialOperator};
use super::ResolventError;
use crate::scalar_green::gamma::sphere_volume;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiConfig {
    /// Fit window is `[t0, fit_span * t0]`.
    pub fit_span: f64,
    pub fit_points: usize,
    /// Largest acceptable rms deviation of `ln |F|` from the fitted line.
    pub fit_tolerance: f64,
    pub rk: Rk45Config,
}

impl Default for PsiConfig {
    fn default() -> Self {
        PsiConfig { fit_span: 10.0, fit_points: 9, fit_tolerance: 0.05, rk: Rk45Config::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiReport {
    #[serde(skip)]
    pub psi: CMatrix,
    /// `-d ln |F| / d ln t` near the origin.
    pub singularity_exponent: f64,
    pub smallest_singular_value: f64,
    pub fit_rms: f64,
    /// `(t, |F(t)|)` on the fit window.
    pub samples: Vec<(f64, f64)>,
}

pub fn psi_extract(
    op: &RadialOperator,
    kernel: &FrobeniusKernel,
    t0: f64,
    t_start: f64,
) -> Result<PsiReport, ResolventError> {
    psi_extract_with(op, kernel, t0, t_start, &PsiConfig::default())
}

pub fn psi_extract_with(
    op: &RadialOperator,
    kernel: &FrobeniusKernel,
    t0: f64,
    t_start: f64,
    cfg: &PsiConfig,
) -> Result<PsiReport, ResolventError> {
    let n = op.n;
    check_window(n, t0, t_start, cfg)?;
    let outputs = output_radii(t0, cfg);
    let values = integrate_inward(op, kernel, t_start, &outputs, cfg)?;
    report(n, t0, values, cfg)
}

/// Coefficient `c` for which `F_0 + c F_e` (the chains started at the two
/// block projectors) has the weakest singularity at `t0`, together with the
/// report for that combination. Requires exactly two blocks.
pub fn psi_extract_block_combination(
    op: &RadialOperator,
    kernel: &FrobeniusKernel,
    t0: f64,
    t_start: f64,
    cfg: &PsiConfig,
) -> Result<(Complex64, PsiReport), ResolventError> {
    if kernel.blocks.len() != 2 {
        return Err(ResolventError::InvalidDegree(format!("{} blocks, need 2", kernel.blocks.len())));
    }
    check_window(op.n, t0, t_start, cfg)?;
    let outputs = output_radii(t0, cfg);
    let first = integrate_inward(op, &kernel.single_block(0), t_start, &outputs, cfg)?;
    let second = integrate_inward(op, &kernel.single_block(1), t_start, &outputs, cfg)?;
    let (a, b) = (&first.last().expect("outputs").1, &second.last().expect("outputs").1);
    let c = -b.dotc(a) / b.dotc(b);
    let combined: Vec<(f64, CMatrix)> = first
        .iter()
        .zip(&second)
        .map(|((t, x), (_, y))| (*t, x + y * c))
        .collect();
    Ok((c, report(op.n, t0, combined, cfg)?))
}

fn check_window(n: usize, t0: f64, t_start: f64, cfg: &PsiConfig) -> Result<(), ResolventError> {
    if n < 3 {
        return Err(ResolventError::InvalidDegree("psi extraction needs n >= 3".into()));
    }
    if !(t0 > 0.0 && t0 * cfg.fit_span < t_start) {
        return Err(ResolventError::InvalidDegree(format!("need 0 < t0 and t0 * {} < T (t0 = {t0}, T = {t_start})", cfg.fit_span)));
    }
    Ok(())
}

/// Output radii, descending: the fit grid plus `2 t0` for extrapolation.
fn output_radii(t0: f64, cfg: &PsiConfig) -> Vec<f64> {
    let mut outputs: Vec<f64> = (0..cfg.fit_points)
        .map(|i| t0 * cfg.fit_span.powf(i as f64 / (cfg.fit_points - 1) as f64))
        .collect();
    outputs.push(2.0 * t0);
    outputs.sort_by(|a, b| b.total_cmp(a));
    outputs.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs());
    outputs
}

fn integrate_inward(
    op: &RadialOperator,
    kernel: &FrobeniusKernel,
    t_start: f64,
    outputs: &[f64],
    cfg: &PsiConfig,
) -> Result<Vec<(f64, CMatrix)>, ResolventError> {
    let [f, f1, _] = kernel.eval_with_derivatives(t_start)?;
    let d = op.dim_v();
    let dd = d * d;
    let s = kernel.cover_point.s;
    let mut state: Vec<Complex64> = f.iter().copied().chain(f1.iter().map(|v| v * t_start)).collect();
    let rhs = |x: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let t = x.exp();
        let fm = CMatrix::from_column_slice(d, d, &y[..dd]);
        let g = CMatrix::from_column_slice(d, d, &y[dd..]);
        let fp = &g / Complex64::new(t, 0.0);
        let f2 = op.second_derivative(t, s, &fm, &fp);
        dy[..dd].copy_from_slice(g.as_slice());
        let gx = f2 * Complex64::new(t * t, 0.0) + g;
        dy[dd..].copy_from_slice(gx.as_slice());
    };
    let mut stats = Rk45Stats { accepted: 0, rejected: 0 };
    let mut x = t_start.ln();
    let mut values = Vec::with_capacity(outputs.len());
    for &t in outputs {
        let target = t.ln();
        state = integrate(rhs, x, target, &state, &cfg.rk, &mut stats).map_err(ResolventError::StiffIntegration)?;
        x = target;
        values.push((t, CMatrix::from_column_slice(d, d, &state[..dd])));
    }
    Ok(values)
}

fn report(n: usize, t0: f64, values: Vec<(f64, CMatrix)>, cfg: &PsiConfig) -> Result<PsiReport, ResolventError> {
    let samples: Vec<(f64, f64)> = values
        .iter()
        .filter(|(t, _)| *t <= t0 * cfg.fit_span * (1.0 + 1e-12))
        .map(|(t, m)| (*t, operator_norm(m)))
        .collect();
    let (slope, rms) = log_log_fit(&samples)?;
    if rms > cfg.fit_tolerance {
        return Err(ResolventError::FitFailure(format!("rms {rms:.3e} above {:.3e}", cfg.fit_tolerance)));
    }
    let vol = sphere_volume(n as u32);
    let psi_at = |t: f64| -> CMatrix {
        let m = &values.iter().find(|(tt, _)| (tt - t).abs() <= 1e-12 * t).expect("sampled radius").1;
        m * Complex64::new(vol * t.powi(n as i32 - 2), 0.0)
    };
    let order = ((n - 2) as f64).min(2.0);
    let (a, b) = (psi_at(t0), psi_at(2.0 * t0));
    let w = 2f64.powf(order);
    let psi = (a * Complex64::new(w, 0.0) - b) / Complex64::new(w - 1.0, 0.0);
    let smallest = smallest_singular_value(&psi);
    Ok(PsiReport {
        psi,
        singularity_exponent: -slope,
        smallest_singular_value: smallest,
        fit_rms: rms,
        samples,
    })
}

/// Least-squares line through `(ln t, ln v)`; returns slope and rms residual.
fn log_log_fit(samples: &[(f64, f64)]) -> Result<(f64, f64), ResolventError> {
    if samples.len() < 2 || samples.iter().any(|(_, v)| !(*v > 0.0) || !v.is_finite()) {
        return Err(ResolventError::FitFailure("need at least two positive finite samples".into()));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|(t, v)| (t.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ResolventError::DegenerateFit("coincident radii".into()));
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let rms = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / n).sqrt();
    Ok((slope, rms))
}
