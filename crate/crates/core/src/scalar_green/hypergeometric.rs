//! Gauss hypergeometric function `2F1(a, b; c; z)` for complex parameters.
//!
//! The defining series is used on `|z| <= threshold`. Elsewhere the
//! argument is mapped by one of the linear transformations
//! `z/(z-1)`, `1/z`, `1-z`, `1/(1-z)`, whichever lands deepest inside the
//! unit disk. When the connection coefficients of the `1/z` map are
//! singular (`a - b` an integer) the logarithmic connection formula is
//! used. The `1-z` and `1/(1-z)` maps fall back to a symmetric parameter
//! perturbation of size [`PERTURBATION`] in the integer case, which costs
//! roughly `eps / PERTURBATION` relative precision.

use num_complex::Complex64;

use super::gamma::{digamma, digamma_over_gamma, factorial, gamma, nonpositive_integer, rgamma};
use super::{GreenError, GreenEvalConfig};

pub const PERTURBATION: f64 = 1e-6;

const INTEGER_SLACK: f64 = 1e-12;

fn near_integer(x: Complex64) -> Option<i64> {
    let r = x.re.round();
    if x.im.abs() <= INTEGER_SLACK && (x.re - r).abs() <= INTEGER_SLACK * r.abs().max(1.0) {
        Some(r as i64)
    } else {
        None
    }
}

/// Plain power series; `z` must lie inside the unit disk.
pub fn series(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    cfg: &GreenEvalConfig,
) -> Result<Complex64, GreenError> {
    if nonpositive_integer(c).is_some() {
        return Err(GreenError::PoleOfGamma(format!("c = {c} is a non-positive integer")));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small_run = 0;
    for k in 0..cfg.max_terms {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        if term.norm() <= cfg.series_tolerance * sum.norm() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(GreenError::NoConvergence { terms: cfg.max_terms })
}

fn polynomial(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    degree: u64,
) -> Result<Complex64, GreenError> {
    if let Some(jc) = nonpositive_integer(c) {
        if jc < degree {
            return Err(GreenError::PoleOfGamma(format!("c = {c} truncates before the polynomial does")));
        }
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..degree {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Series,
    Pfaff,
    Inverse,
    Reflection,
    InverseReflection,
}

/// `2F1(a, b; c; z)`.
pub fn gauss_2f1(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: Complex64,
    cfg: &GreenEvalConfig,
) -> Result<Complex64, GreenError> {
    if z.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if let Some(j) = nonpositive_integer(a) {
        return polynomial(a, b, c, z, j);
    }
    if let Some(j) = nonpositive_integer(b) {
        return polynomial(b, a, c, z, j);
    }
    if nonpositive_integer(c).is_some() {
        return Err(GreenError::PoleOfGamma(format!("c = {c} is a non-positive integer")));
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(GreenError::DomainError(format!("z = {} lies on the branch cut [1, inf)", z.re)));
    }
    match choose_route(a, b, c, z, cfg.transformation_threshold) {
        Some(Route::Series) => series(a, b, c, z, cfg),
        Some(Route::Pfaff) => pfaff(a, b, c, z, cfg),
        Some(Route::Inverse) => inverse(a, b, c, z, cfg),
        Some(Route::Reflection) => reflection(a, b, c, z, cfg),
        Some(Route::InverseReflection) => inverse_reflection(a, b, c, z, cfg),
        None => {
            // Nothing lands inside the threshold disk; sum slowly if possible.
            if z.norm() < 1.0 {
                series(a, b, c, z, cfg)
            } else if (z / (z - 1.0)).norm() < 1.0 {
                pfaff(a, b, c, z, cfg)
            } else {
                Err(GreenError::NoConvergence { terms: 0 })
            }
        }
    }
}

fn choose_route(a: Complex64, b: Complex64, c: Complex64, z: Complex64, threshold: f64) -> Option<Route> {
    if z.norm() <= threshold {
        return Some(Route::Series);
    }
    if (z / (z - 1.0)).norm() <= threshold {
        return Some(Route::Pfaff);
    }
    // The reflection routes lose precision through the perturbation
    // fallback, so they only win over an exact route when nothing exact fits.
    let candidates = [
        (Route::Inverse, 1.0 / z.norm(), false),
        (Route::Reflection, (1.0 - z).norm(), near_integer(c - a - b).is_some()),
        (Route::InverseReflection, 1.0 / (1.0 - z).norm(), near_integer(a - b).is_some()),
    ];
    let pick = |perturbed: bool| {
        candidates
            .iter()
            .filter(|(_, m, p)| *m <= threshold && *p == perturbed)
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(r, _, _)| *r)
    };
    pick(false).or_else(|| pick(true))
}

fn pfaff(a: Complex64, b: Complex64, c: Complex64, z: Complex64, cfg: &GreenEvalConfig) -> Result<Complex64, GreenError> {
    let w = z / (z - 1.0);
    Ok((1.0 - z).powc(-a) * series(a, c - b, c, w, cfg)?)
}

fn inverse(a: Complex64, b: Complex64, c: Complex64, z: Complex64, cfg: &GreenEvalConfig) -> Result<Complex64, GreenError> {
    if let Some(m) = near_integer(b - a) {
        return if m >= 0 {
            inverse_log(a, m as u64, c, z, cfg)
        } else {
            inverse_log(b, (-m) as u64, c, z, cfg)
        };
    }
    let w = 1.0 / z;
    let mz = -z;
    let gc = gamma(c);
    let t1 = gc * gamma(b - a) * rgamma(b) * rgamma(c - a) * mz.powc(-a) * series(a, 1.0 - c + a, 1.0 - b + a, w, cfg)?;
    let t2 = gc * gamma(a - b) * rgamma(a) * rgamma(c - b) * mz.powc(-b) * series(b, 1.0 - c + b, 1.0 - a + b, w, cfg)?;
    Ok(t1 + t2)
}

/// `2F1(a, a+m; c; z)` for `|z| > 1`, logarithmic case of the `1/z`
/// connection formula.
fn inverse_log(a: Complex64, m: u64, c: Complex64, z: Complex64, cfg: &GreenEvalConfig) -> Result<Complex64, GreenError> {
    let mz = -z;
    let log_mz = mz.ln();
    let pref = mz.powc(-a);
    let inv_z = 1.0 / z;
    let mf = m as f64;

    // Finite part: sum_{k<m} (a)_k (m-k-1)! / (k! Gamma(c-a-k)) z^-k.
    let mut finite = Complex64::new(0.0, 0.0);
    let mut poch = Complex64::new(1.0, 0.0);
    let mut zpow = Complex64::new(1.0, 0.0);
    for k in 0..m {
        let kf = k as f64;
        finite += poch * factorial(m - k - 1) / factorial(k) * rgamma(c - a - kf) * zpow;
        poch *= a + kf;
        zpow *= inv_z;
    }
    finite *= rgamma(a + mf);

    // Logarithmic part.
    // (a+m)_k / (k! (k+m)!) (-1)^k z^(-k-m), advanced by recurrence.
    let mut coef = inv_z.powu(m as u32) / factorial(m);
    let mut psi_m1k = digamma(Complex64::new(1.0 + mf, 0.0));
    let mut psi_1k = digamma(Complex64::new(1.0, 0.0));
    let mut psi_amk = digamma(a + mf);
    let mut x = c - a - mf;
    let mut rg_x = rgamma(x);
    let mut pg_x = digamma_over_gamma(x);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small_run = 0;
    let mut converged = false;
    for k in 0..cfg.max_terms {
        let kf = k as f64;
        let bracket = (log_mz + psi_m1k + psi_1k - psi_amk) * rg_x - pg_x;
        let term = coef * bracket;
        sum += term;
        if term.norm() <= cfg.series_tolerance * sum.norm() {
            small_run += 1;
            if small_run >= 3 {
                converged = true;
                break;
            }
        } else {
            small_run = 0;
        }
        // Advance k -> k+1.
        coef *= (a + mf + kf) / ((kf + 1.0) * (kf + mf + 1.0)) * (-inv_z);
        psi_m1k += 1.0 / (1.0 + mf + kf);
        psi_1k += 1.0 / (1.0 + kf);
        psi_amk += 1.0 / (a + mf + kf);
        // x -> x - 1: rg(x-1) = (x-1) rg(x), pg(x-1) = (x-1) pg(x) - rg(x).
        let xm1 = x - 1.0;
        let new_pg = xm1 * pg_x - rg_x;
        rg_x *= xm1;
        pg_x = new_pg;
        x = xm1;
    }
    if !converged {
        return Err(GreenError::NoConvergence { terms: cfg.max_terms });
    }
    let log_part = sum * rgamma(a);
    Ok(gamma(c) * pref * (finite + log_part))
}

fn reflection(a: Complex64, b: Complex64, c: Complex64, z: Complex64, cfg: &GreenEvalConfig) -> Result<Complex64, GreenError> {
    if near_integer(c - a - b).is_some() {
        return perturbed(a, b, c, z, cfg, reflection_generic);
    }
    reflection_generic(a, b, c, z, cfg)
}

fn reflection_generic(a: Complex64, b: Complex64, c: Complex64, z: Complex64, cfg: &GreenEvalConfig) -> Result<Complex64, GreenError> {
    let w = 1.0 - z;
    let gc = gamma(c);
    let t1 = gc * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b) * series(a, b, a + b - c + 1.0, w, cfg)?;
    let t2 = w.powc(c - a - b) * gc * gamma(a + b - c) * rgamma(a) * rgamma(b) * series(c - a, c - b, c - a - b + 1.0, w, cfg)?;
    Ok(t1 + t2)
}

fn inverse_reflection(a: Complex64, b: Complex64, c: Complex64, z: Complex64, cfg: &GreenEvalConfig) -> Result<Complex64, GreenError> {
    if near_integer(a - b).is_some() {
        return perturbed(a, b, c, z, cfg, inverse_reflection_generic);
    }
    inverse_reflection_generic(a, b, c, z, cfg)
}

fn inverse_reflection_generic(a: Complex64, b: Complex64, c: Complex64, z: Complex64, cfg: &GreenEvalConfig) -> Result<Complex64, GreenError> {
    let w = 1.0 / (1.0 - z);
    let omz = 1.0 - z;
    let gc = gamma(c);
    let t1 = gc * gamma(b - a) * rgamma(b) * rgamma(c - a) * omz.powc(-a) * series(a, c - b, a - b + 1.0, w, cfg)?;
    let t2 = gc * gamma(a - b) * rgamma(a) * rgamma(c - b) * omz.powc(-b) * series(b, c - a, b - a + 1.0, w, cfg)?;
    Ok(t1 + t2)
}

type Evaluator = fn(Complex64, Complex64, Complex64, Complex64, &GreenEvalConfig) -> Result<Complex64, GreenError>;

fn perturbed(a: Complex64, b: Complex64, c: Complex64, z: Complex64, cfg: &GreenEvalConfig, f: Evaluator) -> Result<Complex64, GreenError> {
    let eps = PERTURBATION;
    let up = f(a + eps, b, c, z, cfg)?;
    let down = f(a - eps, b, c, z, cfg)?;
    Ok(0.5 * (up + down))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> GreenEvalConfig {
        GreenEvalConfig::default()
    }

    /// Independent oracle: naive term-by-term summation from scratch.
    fn naive(a: f64, b: f64, cc: f64, z: f64, terms: usize) -> f64 {
        let mut total = 0.0;
        for k in 0..terms {
            let mut t = 1.0;
            for j in 0..k {
                let jf = j as f64;
                t *= (a + jf) * (b + jf) / ((cc + jf) * (jf + 1.0)) * z;
            }
            total += t;
        }
        total
    }

    #[test]
    fn zero_argument() {
        assert_eq!(gauss_2f1(c(0.3, 0.0), c(1.2, 0.0), c(2.0, 0.0), c(0.0, 0.0), &cfg()).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn log_identity() {
        let z = 0.5;
        let v = gauss_2f1(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(z, 0.0), &cfg()).unwrap();
        let expect = -(1.0f64 - z).ln() / z;
        assert!((v.re - expect).abs() < 1e-14);
        assert!((v.re - 1.386_294_361_119_890_6).abs() < 1e-13);
    }

    #[test]
    fn naive_summation_agreement() {
        let v = gauss_2f1(c(0.5, 0.0), c(1.5, 0.0), c(2.0, 0.0), c(0.3, 0.0), &cfg()).unwrap();
        let oracle = naive(0.5, 1.5, 2.0, 0.3, 80);
        assert!((v.re - oracle).abs() < 1e-12);
    }

    #[test]
    fn quadratic_identity_negative_axis() {
        // F(b, b + 1/2; 2b + 1; z) = ((1 + sqrt(1 - z)) / 2)^(-2b).
        for z in [-0.3, -2.0, -15.0, -400.0] {
            for bb in [0.25, 1.0, 1.7] {
                let v = gauss_2f1(c(bb, 0.0), c(bb + 0.5, 0.0), c(2.0 * bb + 1.0, 0.0), c(z, 0.0), &cfg()).unwrap();
                let expect = ((1.0 + (1.0 - z).sqrt()) / 2.0).powf(-2.0 * bb);
                assert!((v.re - expect).abs() < 1e-13 * expect.abs(), "b={bb} z={z}: {v} vs {expect}");
            }
        }
    }

    #[test]
    fn logarithmic_connection_matches_pfaff() {
        // a - b integer: compare the log route with the Pfaff series on
        // an argument both can reach.
        let cases = [
            (c(0.75, 0.0), c(1.75, 0.0), c(1.5, 0.0)),
            (c(0.6, 0.3), c(2.6, 0.3), c(2.2, 0.3)),
            (c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)),
            (c(0.5, 0.0), c(0.5, 0.0), c(1.5, 0.0)),
            // c - a - m hits a pole of Gamma.
            (c(0.75, 0.0), c(1.75, 0.0), c(1.75, 0.0)),
        ];
        for (a, b, cc) in cases {
            for z in [-1.3, -2.5, -4.0] {
                let z = c(z, 0.0);
                let m = (b - a).re.round() as u64;
                let via_log = inverse_log(a, m, cc, z, &cfg()).unwrap();
                let via_pfaff = pfaff(a, b, cc, z, &cfg()).unwrap();
                assert!((via_log - via_pfaff).norm() < 1e-12 * via_pfaff.norm(), "{a} {b} {cc} {z}: {via_log} vs {via_pfaff}");
            }
        }
    }

    #[test]
    fn generic_inverse_matches_pfaff() {
        let (a, b, cc) = (c(0.3, 0.1), c(1.1, -0.2), c(1.7, 0.0));
        let z = c(-2.0, 0.5);
        let x = inverse(a, b, cc, z, &cfg()).unwrap();
        let y = pfaff(a, b, cc, z, &cfg()).unwrap();
        assert!((x - y).norm() < 1e-12 * y.norm());
    }

    #[test]
    fn reflection_routes() {
        // Gauss sum at z -> 1: F(a,b;c;1) = G(c)G(c-a-b)/(G(c-a)G(c-b)).
        let (a, b, cc) = (c(0.3, 0.0), c(0.4, 0.0), c(1.9, 0.0));
        let near_one = gauss_2f1(a, b, cc, c(0.97, 0.02), &cfg()).unwrap();
        let series_val = series(a, b, cc, c(0.97, 0.02), &cfg()).unwrap();
        assert!((near_one - series_val).norm() < 1e-11);
        // Integer c - a - b uses the perturbation fallback.
        let (a, b, cc) = (c(0.5, 0.0), c(0.5, 0.0), c(2.0, 0.0));
        let v = gauss_2f1(a, b, cc, c(0.95, 0.0), &cfg()).unwrap();
        let s = series(a, b, cc, c(0.95, 0.0), &cfg()).unwrap();
        assert!((v - s).norm() < 1e-8 * s.norm(), "{v} vs {s}");
    }

    #[test]
    fn polynomial_case_any_argument() {
        // F(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1)).
        let (b, cc, z) = (1.5, 2.5, 7.0);
        let v = gauss_2f1(c(-2.0, 0.0), c(b, 0.0), c(cc, 0.0), c(z, 0.0), &cfg()).unwrap();
        let expect = 1.0 - 2.0 * b * z / cc + b * (b + 1.0) * z * z / (cc * (cc + 1.0));
        assert!((v.re - expect).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            gauss_2f1(c(0.5, 0.0), c(0.5, 0.0), c(-1.0, 0.0), c(0.2, 0.0), &cfg()),
            Err(GreenError::PoleOfGamma(_))
        ));
        assert!(matches!(
            gauss_2f1(c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(2.0, 0.0), &cfg()),
            Err(GreenError::DomainError(_))
        ));
        let tight = GreenEvalConfig { max_terms: 3, ..GreenEvalConfig::default() };
        assert!(matches!(
            gauss_2f1(c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(0.8, 0.0), &tight),
            Err(GreenError::NoConvergence { .. })
        ));
    }
}
