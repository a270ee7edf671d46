//! Poincaré partial sums and estimates of the critical exponent.

use num_complex::Complex64;
use serde::Serialize;

use super::enumerate::OrbitSample;
use super::OrbitError;
use crate::scalar_green::green0_eval;
use crate::space_constants::SpaceDescriptor;

/// `sum exp(-s d)` over the sample, identity included.
pub fn poincare_partial_sum(sample: &OrbitSample, s: f64) -> f64 {
    // Largest distances first so the small terms are not lost.
    sample.distances.iter().rev().map(|d| (-s * d).exp()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaConfig {
    /// Fraction of `[0, R]` at its outer end used by both estimators.
    pub outer_fraction: f64,
    /// Largest number of radial shells covering `[0, R]` for the bisection estimator.
    pub shells: usize,
    pub grid_points: usize,
    pub bisection_tol: f64,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        DeltaConfig { outer_fraction: 0.5, shells: 12, grid_points: 64, bisection_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaEstimate {
    /// Slope of `ln N(R)` against `R` on the outer window.
    pub growth_fit: f64,
    /// Exponent at which the fitted shell ratio of the partial sums crosses one.
    pub bisection: f64,
    pub spread: f64,
    /// The radius `R` bounding the window.
    pub radius: f64,
    /// Shells used by the bisection estimator.
    pub shells: usize,
}

pub fn estimate_delta(sample: &OrbitSample) -> Result<DeltaEstimate, OrbitError> {
    estimate_delta_with(sample, &DeltaConfig::default())
}

fn slope(points: &[(f64, f64)]) -> Result<f64, OrbitError> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(OrbitError::DegenerateFit("window has no spread in R".into()));
    }
    Ok(points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

pub fn estimate_delta_with(sample: &OrbitSample, cfg: &DeltaConfig) -> Result<DeltaEstimate, OrbitError> {
    if !(cfg.outer_fraction > 0.0 && cfg.outer_fraction <= 1.0) || cfg.shells < 4 || cfg.grid_points < 3 {
        return Err(OrbitError::DomainError("invalid estimator configuration".into()));
    }
    let mut distinct = sample.distances.clone();
    distinct.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    if distinct.len() < 3 {
        return Err(OrbitError::DegenerateFit(format!("{} distinct radii, need 3", distinct.len())));
    }
    let radius = sample.completeness_radius();
    if !(radius > 0.0) {
        return Err(OrbitError::DegenerateFit("completeness radius is zero".into()));
    }
    let lo = radius * (1.0 - cfg.outer_fraction);

    let grid: Vec<(f64, f64)> = (0..cfg.grid_points)
        .map(|i| {
            let r = lo + (radius - lo) * i as f64 / (cfg.grid_points - 1) as f64;
            (r, (sample.count_by_radius(r) as f64).ln())
        })
        .collect();
    let growth_fit = slope(&grid)?;

    // Shell sums S_j(s); with a geometric tail S_(j+1) / S_j = exp(f(s) h),
    // the series converges exactly when the fitted rate f(s) is negative.
    // The shell count drops from the configured value until every outer
    // shell is occupied.
    let shells = (4..=cfg.shells)
        .rev()
        .map(|k| outer_shells(sample, radius, k, cfg.outer_fraction))
        .find(|sh| sh.len() >= 2 && sh.iter().all(|(_, d)| !d.is_empty()))
        .ok_or_else(|| OrbitError::DegenerateFit("empty radial shell in the outer window".into()))?;
    let rate = |s: f64| -> Result<f64, OrbitError> {
        let pts: Vec<(f64, f64)> = shells
            .iter()
            .map(|(c, ds)| (*c, ds.iter().map(|d| (-s * (d - c)).exp()).sum::<f64>().ln() - s * c))
            .collect();
        slope(&pts)
    };
    let upper = 2.0 * sample.model.rho();
    let bisection = if rate(0.0)? <= 0.0 {
        0.0
    } else if upper <= 0.0 || rate(upper)? >= 0.0 {
        upper.max(0.0)
    } else {
        let (mut a, mut b) = (0.0, upper);
        while b - a > cfg.bisection_tol {
            let m = 0.5 * (a + b);
            if rate(m)? > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    Ok(DeltaEstimate {
        growth_fit,
        bisection,
        spread: (growth_fit - bisection).abs(),
        radius,
        shells: shells.len(),
    })
}

/// Centers and contents of the shells of `[0, radius]` cut into `k` pieces
/// that lie in the outer window.
fn outer_shells(sample: &OrbitSample, radius: f64, k: usize, outer: f64) -> Vec<(f64, Vec<f64>)> {
    let h = radius / k as f64;
    let first = ((k as f64) * (1.0 - outer)).floor() as usize;
    (first..k)
        .map(|j| {
            let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
            let lo = sample.distances.partition_point(|&d| d < a);
            let hi = sample.distances.partition_point(|&d| d < b);
            ((a + b) / 2.0, sample.distances[lo..hi].to_vec())
        })
        .collect()
}

/// `sum g0(s, d)` over the nonzero distances of the sample.
pub fn pullback_green_partial_sum(space: &SpaceDescriptor, s: f64, sample: &OrbitSample) -> Result<f64, OrbitError> {
    if !(s > 0.0) {
        return Err(OrbitError::DomainError(format!("s = {s} must be positive")));
    }
    if space.field != sample.model.field() || space.n != sample.model.n() as i64 {
        return Err(OrbitError::DomainError(format!(
            "space {}^{} does not match the sample's model",
            space.field.symbol(),
            space.n
        )));
    }
    let mut total = 0.0;
    for &d in sample.distances.iter().rev().filter(|&&d| d > 0.0) {
        total += green0_eval(space, Complex64::new(s, 0.0), d)?.re;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit_geometry::enumerate::{enumerate_orbit, DedupPolicy};
    use crate::orbit_geometry::generators::{cyclic_boost, schottky_pair};
    use crate::space_constants::{make_space, Field};

    fn cyclic(ell: f64, m: usize) -> OrbitSample {
        let g = cyclic_boost(3, ell).unwrap();
        enumerate_orbit(&g, &g.base(), m, DedupPolicy::FreeReduction).unwrap()
    }

    #[test]
    fn partial_sums() {
        let s = cyclic(1.0, 8);
        let expected = 1.0 + 2.0 * (1..=8).map(|k| (-0.7 * k as f64).exp()).sum::<f64>();
        assert!((poincare_partial_sum(&s, 0.7) - expected).abs() < 1e-14);
        assert!(poincare_partial_sum(&s, 0.5) > poincare_partial_sum(&s, 0.6));
    }

    #[test]
    fn cyclic_pullback_matches_closed_form() {
        let space = make_space(Field::Real, 3).unwrap();
        let s = cyclic(1.0, 6);
        let expected: f64 = (1..=6)
            .map(|k| {
                let r = k as f64;
                2.0 * (-r).exp() / (4.0 * std::f64::consts::PI * r.sinh())
            })
            .sum();
        let got = pullback_green_partial_sum(&space, 1.0, &s).unwrap();
        assert!((got / expected - 1.0).abs() < 1e-10);
        let wrong = make_space(Field::Real, 4).unwrap();
        assert!(pullback_green_partial_sum(&wrong, 1.0, &s).is_err());
        assert!(pullback_green_partial_sum(&space, 0.0, &s).is_err());
    }

    #[test]
    fn cyclic_delta_is_small() {
        let e = estimate_delta(&cyclic(2.0, 30)).unwrap();
        assert!(e.growth_fit.abs() < 0.05 && e.bisection < 0.05, "{e:?}");
    }

    #[test]
    fn schottky_estimate_matches_word_shell_oracle() {
        // For a Schottky group the word-length shell sums I_k(s) have ratio
        // I_(k+1) / I_k crossing one at s = delta.
        let g = schottky_pair(2.0, 3.0).unwrap();
        let s: Vec<OrbitSample> =
            (9..=12).map(|m| enumerate_orbit(&g, &g.base(), m, DedupPolicy::FreeReduction).unwrap()).collect();
        let shell = |x: f64, k: usize| poincare_partial_sum(&s[k], x) - poincare_partial_sum(&s[k - 1], x);
        let (mut a, mut b) = (0.0, 1.0);
        while b - a > 1e-10 {
            let m = 0.5 * (a + b);
            if shell(m, 3) > shell(m, 2) {
                a = m;
            } else {
                b = m;
            }
        }
        let e = estimate_delta(&s[3]).unwrap();
        assert!((e.growth_fit - a).abs() < 0.02 && (e.bisection - a).abs() < 0.02, "{e:?} vs {a}");
    }

    #[test]
    fn degenerate_samples() {
        assert!(matches!(estimate_delta(&cyclic(1.0, 1)), Err(OrbitError::DegenerateFit(_))));
    }

    #[test]
    fn estimates_within_range() {
        for (ell, sep) in [(2.0, 2.0), (2.0, 3.5), (3.0, 3.0)] {
            let g = schottky_pair(ell, sep).unwrap();
            let s = enumerate_orbit(&g, &g.base(), 10, DedupPolicy::FreeReduction).unwrap();
            let e = estimate_delta(&s).unwrap();
            for v in [e.growth_fit, e.bisection] {
                assert!((0.0..=1.0).contains(&v), "{e:?}");
            }
            assert!(e.spread < 0.05, "{e:?}");
        }
    }
}
