//! The representation `tau_p` of `so(n)` on `Lambda^p R^n` and the pieces of
//! it that enter the radial operator.
//!
//! `so(n, 1)` is realized on `R^(n+1)` with spatial indices `0..n` and time
//! index `n`; `H0` is the boost in the `e_0` direction. The compact part
//! `so(n)` is spanned by `K_ij = E_ij - E_ji` and `m = so(n-1)` by the
//! `K_ij` with `1 <= i < j < n`. Projecting the root vectors of `g_alpha`
//! to `k` gives `Y_r = K_0r`, already of norm `-1` for the form
//! `B(X, Y) / B(H0, H0)`.
//!
//! All matrices have integer entries in the standard basis of
//! `Lambda^p R^n`, so spectra are certified exactly.

use nalgebra::DMatrix;
use num_rational::Rational64;

use super::ResolventError;
use crate::space_constants::{casimir_m_exterior, make_space, Field};

pub type IntMatrix = DMatrix<i64>;

#[derive(Debug, Clone)]
pub struct TauPAction {
    pub n: usize,
    pub p: usize,
    pub dim_v: usize,
    /// `tau_p(Y_r)` for `r = 1..n-1`.
    pub y_matrices: Vec<IntMatrix>,
    /// `tau_p(Omega_k)`, a scalar since `Lambda^p R^n` is `so(n)`-isotypic.
    pub omega_k_scalar_blocks: i64,
    /// `tau_p(Omega_m)` on `V`.
    pub omega_m_element: IntMatrix,
    /// `sum_r tau_p(Y_r)^2`.
    pub y_square_sum: IntMatrix,
    /// Distinct eigenvalues of `omega_m_element`, certified by
    /// [`TauPAction::minimal_polynomial_certificate`]; ascending.
    pub omega_m_spectrum: Vec<i64>,
}

/// Sorted `p`-subsets of `0..n`, the standard basis of `Lambda^p R^n`.
pub fn exterior_basis(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=(n - left) {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= n {
        rec(0, n, p, &mut Vec::new(), &mut out);
    }
    out
}

/// `tau_p(K_ij)` by the Leibniz rule, using `K_ij e_j = e_i`, `K_ij e_i = -e_j`.
pub fn generator_action(n: usize, p: usize, i: usize, j: usize) -> IntMatrix {
    let basis = exterior_basis(n, p);
    let index = |set: &[usize]| basis.iter().position(|b| b.as_slice() == set);
    let dim = basis.len();
    let mut m = IntMatrix::zeros(dim, dim);
    for (col, set) in basis.iter().enumerate() {
        for (slot, &k) in set.iter().enumerate() {
            let (target, coeff) = if k == j {
                (i, 1)
            } else if k == i {
                (j, -1)
            } else {
                continue;
            };
            if set.contains(&target) {
                continue;
            }
            let mut image = set.clone();
            image[slot] = target;
            // Sort back into increasing order, tracking the permutation sign.
            let mut sign = coeff;
            let mut pos = slot;
            while pos > 0 && image[pos - 1] > image[pos] {
                image.swap(pos - 1, pos);
                pos -= 1;
                sign = -sign;
            }
            while pos + 1 < image.len() && image[pos] > image[pos + 1] {
                image.swap(pos, pos + 1);
                pos += 1;
                sign = -sign;
            }
            let row = index(&image).expect("image lies in the basis");
            m[(row, col)] += sign;
        }
    }
    m
}

pub fn build_tau_p_action(n: usize, p: usize) -> Result<TauPAction, ResolventError> {
    if n < 2 {
        return Err(ResolventError::InvalidDegree(format!("n = {n} < 2")));
    }
    if p > n {
        return Err(ResolventError::InvalidDegree(format!("p = {p} outside [0, {n}]")));
    }
    let dim_v = exterior_basis(n, p).len();
    let y_matrices: Vec<IntMatrix> = (1..n).map(|r| generator_action(n, p, 0, r)).collect();
    let mut omega_k = IntMatrix::zeros(dim_v, dim_v);
    let mut omega_m = IntMatrix::zeros(dim_v, dim_v);
    for i in 0..n {
        for j in (i + 1)..n {
            let k = generator_action(n, p, i, j);
            let sq = &k * &k;
            if i >= 1 {
                omega_m += &sq;
            }
            omega_k += sq;
        }
    }
    let scalar = omega_k[(0, 0)];
    if omega_k != IntMatrix::identity(dim_v, dim_v) * scalar {
        return Err(ResolventError::AssemblyMismatch(format!(
            "tau_p(Omega_k) is not scalar for (n, p) = ({n}, {p})"
        )));
    }
    let y_square_sum = y_matrices.iter().fold(IntMatrix::zeros(dim_v, dim_v), |acc, y| acc + y * y);
    let mut action = TauPAction {
        n,
        p,
        dim_v,
        y_matrices,
        omega_k_scalar_blocks: scalar,
        omega_m_element: omega_m,
        y_square_sum,
        omega_m_spectrum: Vec::new(),
    };
    action.omega_m_spectrum = action.minimal_polynomial_certificate()?;
    Ok(action)
}

impl TauPAction {
    /// Distinct eigenvalues of `tau_p(Omega_m)`, proven exactly: the
    /// candidates are the `-c(Lambda^q)` of `SO(n-1)` for `q in {p-1, p}`,
    /// their product `prod (Omega_m - lambda)` vanishes in integer
    /// arithmetic, and no proper sub-product does.
    pub fn minimal_polynomial_certificate(&self) -> Result<Vec<i64>, ResolventError> {
        let mut candidates: Vec<i64> = Vec::new();
        if self.n >= 2 {
            let space = make_space(Field::Real, self.n as i64).map_err(|e| ResolventError::InvalidDegree(e.to_string()))?;
            for q in [self.p as i64 - 1, self.p as i64] {
                if q >= 0 && q <= self.n as i64 - 1 {
                    let c = casimir_m_exterior(&space, q).map_err(|e| ResolventError::InvalidDegree(e.to_string()))?;
                    candidates.push(-*c.numer());
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        let id = IntMatrix::identity(self.dim_v, self.dim_v);
        let product = |vals: &[i64]| {
            vals.iter()
                .fold(id.clone(), |acc, &l| acc * (&self.omega_m_element - &id * l))
        };
        if product(&candidates) != IntMatrix::zeros(self.dim_v, self.dim_v) {
            return Err(ResolventError::AssemblyMismatch(format!(
                "Omega_m is not annihilated by its expected minimal polynomial with roots {candidates:?}"
            )));
        }
        for skip in 0..candidates.len() {
            let rest: Vec<i64> = candidates.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
            if product(&rest) == IntMatrix::zeros(self.dim_v, self.dim_v) {
                return Err(ResolventError::AssemblyMismatch(format!(
                    "eigenvalue {} of Omega_m does not occur",
                    candidates[skip]
                )));
            }
        }
        Ok(candidates)
    }

    /// `c(sigma_max) = max_sigma c(sigma)` over the `M`-types in `V`.
    pub fn casimir_max(&self) -> i64 {
        -self.omega_m_spectrum.iter().copied().min().unwrap_or(0)
    }

    /// Distinct eigenvalues `c(sigma_max) - c(sigma)` of the `E` element, ascending.
    pub fn e_spectrum(&self) -> Vec<i64> {
        let cmax = self.casimir_max();
        let mut e: Vec<i64> = self.omega_m_spectrum.iter().map(|&l| cmax + l).collect();
        e.sort_unstable();
        e
    }

    /// `rho^2 - c(sigma_max)` from the representation data alone.
    pub fn machinery_alpha(&self) -> Rational64 {
        let rho = Rational64::new(self.n as i64 - 1, 2);
        rho * rho - Rational64::from_integer(self.casimir_max())
    }

    /// Spectral projectors of the `E` element by exact Lagrange
    /// interpolation in `Omega_m`, paired with their eigenvalue of `E`.
    pub fn e_projectors(&self) -> Vec<(i64, DMatrix<f64>)> {
        let spec = &self.omega_m_spectrum;
        let cmax = self.casimir_max();
        let id = IntMatrix::identity(self.dim_v, self.dim_v);
        spec.iter()
            .map(|&li| {
                let mut num = id.clone();
                let mut den: i64 = 1;
                for &lj in spec.iter().filter(|&&lj| lj != li) {
                    num = num * (&self.omega_m_element - &id * lj);
                    den *= li - lj;
                }
                (cmax + li, num.map(|v| v as f64 / den as f64))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_constants::alpha_p;

    #[test]
    fn basis_sizes() {
        assert_eq!(exterior_basis(5, 2).len(), 10);
        assert_eq!(exterior_basis(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(exterior_basis(3, 3).len(), 1);
    }

    #[test]
    fn generators_antisymmetric_and_bracket() {
        let n = 4;
        for p in 0..=n {
            let k01 = generator_action(n, p, 0, 1);
            let k12 = generator_action(n, p, 1, 2);
            let k02 = generator_action(n, p, 0, 2);
            assert_eq!(k01.transpose(), -&k01);
            // [K_01, K_12] = K_02 in the defining representation.
            assert_eq!(&k01 * &k12 - &k12 * &k01, k02, "p={p}");
        }
    }

    #[test]
    fn trivial_degree() {
        let t = build_tau_p_action(4, 0).unwrap();
        assert_eq!(t.dim_v, 1);
        assert!(t.y_matrices.iter().all(|y| y[(0, 0)] == 0));
    }

    #[test]
    fn omega_m_spectra() {
        let t = build_tau_p_action(5, 1).unwrap();
        assert_eq!(t.omega_m_spectrum, vec![-3, 0]);
        for n in 2..=7 {
            for p in 0..=n {
                let t = build_tau_p_action(n, p).unwrap();
                assert_eq!(t.omega_k_scalar_blocks, -((p * (n - p)) as i64));
                assert_eq!(
                    &t.omega_m_element,
                    &(IntMatrix::identity(t.dim_v, t.dim_v) * t.omega_k_scalar_blocks - &t.y_square_sum)
                );
            }
        }
    }

    #[test]
    fn machinery_alpha_matches_table() {
        for n in 2..=7usize {
            let space = make_space(Field::Real, n as i64).unwrap();
            for p in 0..=n {
                let t = build_tau_p_action(n, p).unwrap();
                assert_eq!(t.machinery_alpha(), alpha_p(&space, p as i64).unwrap(), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn e_spectrum_gap() {
        for n in 3..=7usize {
            for p in 1..=n / 2 {
                let t = build_tau_p_action(n, p).unwrap();
                let expected = if 2 * p == n { vec![0] } else { vec![0, (n - 2 * p) as i64] };
                assert_eq!(t.e_spectrum(), expected);
                let projs = t.e_projectors();
                let sum = projs.iter().fold(DMatrix::<f64>::zeros(t.dim_v, t.dim_v), |a, (_, p)| a + p);
                assert!((sum - DMatrix::identity(t.dim_v, t.dim_v)).amax() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_bad_degree() {
        assert!(build_tau_p_action(3, 4).is_err());
        assert!(build_tau_p_action(1, 0).is_err());
    }
}
