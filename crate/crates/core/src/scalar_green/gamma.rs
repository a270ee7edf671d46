//! Complex Gamma, reciprocal Gamma and digamma.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Returns `Some(j)` when `z = -j` for a non-negative integer `j`.
pub fn nonpositive_integer(z: Complex64) -> Option<u64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 && z.re > -1e15 {
        Some((-z.re) as u64)
    } else {
        None
    }
}

/// `sin(pi z)` with the integer part of `Re z` removed exactly, so the
/// result keeps full relative precision next to the integers.
fn sin_pi(z: Complex64) -> Complex64 {
    let k = z.re.round();
    let w = Complex64::new(z.re - k, z.im);
    let v = (PI * w).sin();
    if k.rem_euclid(2.0) == 0.0 {
        v
    } else {
        -v
    }
}

fn lanczos(z: Complex64) -> Complex64 {
    // Valid for Re z >= 0.5; computes Gamma(z).
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// `Gamma(z)`; infinite at the poles.
pub fn gamma(z: Complex64) -> Complex64 {
    if nonpositive_integer(z).is_some() {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        PI / (sin_pi(z) * lanczos(1.0 - z))
    } else {
        lanczos(z)
    }
}

/// `1 / Gamma(z)`, an entire function; exactly zero at the poles of Gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    if nonpositive_integer(z).is_some() {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        sin_pi(z) * lanczos(1.0 - z) / PI
    } else {
        1.0 / lanczos(z)
    }
}

/// Digamma `psi(z) = Gamma'(z)/Gamma(z)`.
pub fn digamma(z: Complex64) -> Complex64 {
    if let Some(_) = nonpositive_integer(z) {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    if z.re < 0.5 {
        let k = z.re.round();
        let pw = PI * Complex64::new(z.re - k, z.im);
        return digamma(1.0 - z) - PI * pw.cos() / pw.sin();
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 12.0 {
        acc -= 1.0 / w;
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    // Bernoulli tail: sum B_2k / (2k w^2k).
    let coeffs = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32_760.0,
        1.0 / 12.0,
    ];
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv2;
    for c in coeffs {
        series += c * pow;
        pow *= inv2;
    }
    acc + w.ln() - 0.5 * inv - series
}

/// `psi(z) / Gamma(z)`, continued through the poles where it equals
/// `(-1)^(j+1) j!` at `z = -j`.
pub fn digamma_over_gamma(z: Complex64) -> Complex64 {
    if let Some(j) = nonpositive_integer(z) {
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        return Complex64::new(sign * factorial(j), 0.0);
    }
    digamma(z) * rgamma(z)
}

pub fn factorial(k: u64) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Volume of the unit sphere `S^(m-1)` in `R^m`.
pub fn sphere_volume(m: u32) -> f64 {
    let half = m as f64 / 2.0;
    2.0 * PI.powf(half) * rgamma(Complex64::new(half, 0.0)).re
}
