//! Adaptive Dormand-Prince 5(4) integrator for complex first-order systems.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk45Config {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub initial_step: f64,
}

impl Default for Rk45Config {
    fn default() -> Self {
        Rk45Config { rtol: 1e-11, atol: 1e-300, max_steps: 200_000, initial_step: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rk45Stats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction), returning
/// the final state. `f` writes the derivative into its third argument.
pub fn integrate<F>(
    mut f: F,
    x0: f64,
    x1: f64,
    y0: &[Complex64],
    cfg: &Rk45Config,
    stats: &mut Rk45Stats,
) -> Result<Vec<Complex64>, String>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    if span == 0.0 {
        return Ok(y0.to_vec());
    }
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut h = cfg.initial_step.min(span);
    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    f(x, &y, &mut k[0]);
    let mut steps = 0;
    while (x1 - x) * dir > 0.0 {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(format!("step limit {} reached at x = {x}", cfg.max_steps));
        }
        let remaining = (x1 - x).abs();
        if h >= remaining {
            h = remaining;
        }
        let hs = h * dir;
        for stage in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..stage {
                    acc += k[j][i] * (hs * A[stage][j]);
                }
                tmp[i] = acc;
            }
            f(x + C[stage] * hs, &tmp, &mut k[stage]);
        }
        // Error measured against the size of the whole state, so entries
        // that vanish by symmetry do not force tiny steps.
        let mut diff: f64 = 0.0;
        let mut size: f64 = 0.0;
        let mut y_new = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut hi = y[i];
            let mut lo = y[i];
            for j in 0..7 {
                hi += k[j][i] * (hs * B5[j]);
                lo += k[j][i] * (hs * B4[j]);
            }
            diff = diff.max((hi - lo).norm());
            size = size.max(y[i].norm()).max(hi.norm());
            y_new[i] = hi;
        }
        let err = diff / (cfg.atol + cfg.rtol * size);
        let err = if err.is_nan() { f64::INFINITY } else { err };
        if err <= 1.0 {
            x += hs;
            if (x1 - x) * dir <= 0.0 {
                x = x1;
            }
            y = y_new;
            // FSAL: the last stage is the derivative at the new point.
            k.swap(0, 6);
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * span {
            return Err(format!("step size underflow at x = {x}"));
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_oscillator() {
        let mut stats = Rk45Stats { accepted: 0, rejected: 0 };
        let y = integrate(
            |_, y, dy| dy[0] = y[0] * Complex64::new(-1.0, 2.0),
            0.0,
            3.0,
            &[Complex64::new(1.0, 0.0)],
            &Rk45Config::default(),
            &mut stats,
        )
        .unwrap();
        let exact = (Complex64::new(-1.0, 2.0) * 3.0).exp();
        assert!((y[0] - exact).norm() < 1e-9);

        // y'' = -y backwards from pi to 0.
        let y = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            std::f64::consts::PI,
            0.0,
            &[Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
            &Rk45Config::default(),
            &mut stats,
        )
        .unwrap();
        assert!(y[0].norm() < 1e-9 && (y[1] - 1.0).norm() < 1e-9);
    }
}
