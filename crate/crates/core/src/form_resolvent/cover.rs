//! Points of the branched cover on which all `sqrt(s^2 + e_i)` are
//! single-valued.

use num_complex::Complex64;

use super::tau::build_tau_p_action;
use super::ResolventError;
use crate::space_constants::{Field, SpaceDescriptor};

#[derive(Debug, Clone, PartialEq)]
pub struct CoverPoint {
    pub s: Complex64,
    /// Positive eigenvalues `e_i` of the `E` element, ascending.
    pub e_values: Vec<i64>,
    /// `y_i` with `y_i^2 = s^2 + e_i`.
    pub branch_values: Vec<Complex64>,
    /// `min(Re s, Re y_i)`.
    pub h: f64,
    pub on_physical_sheet: bool,
}

/// Builds the cover point over `s`. `branch_signs[i]` selects the sign of
/// `y_i` relative to the principal root; missing entries mean `+1`.
pub fn cover_point(
    space: &SpaceDescriptor,
    p: i64,
    s: Complex64,
    branch_signs: &[i8],
) -> Result<CoverPoint, ResolventError> {
    if space.field != Field::Real {
        return Err(ResolventError::NotImplemented(space.field));
    }
    if p < 0 || p > space.n {
        return Err(ResolventError::InvalidDegree(format!("p = {p} outside [0, {}]", space.n)));
    }
    let tau = build_tau_p_action(space.n as usize, p as usize)?;
    let e_values: Vec<i64> = tau.e_spectrum().into_iter().filter(|&e| e > 0).collect();
    if branch_signs.len() > e_values.len() {
        return Err(ResolventError::InvalidDegree(format!(
            "{} branch signs given for {} branch values",
            branch_signs.len(),
            e_values.len()
        )));
    }
    let mut branch_values = Vec::with_capacity(e_values.len());
    for (i, &e) in e_values.iter().enumerate() {
        let sq = s * s + e as f64;
        if sq.norm() <= 1e-14 * (1.0 + e as f64) {
            return Err(ResolventError::BranchPoint { s, e });
        }
        let sign = match branch_signs.get(i).copied().unwrap_or(1) {
            1 => 1.0,
            -1 => -1.0,
            other => return Err(ResolventError::InvalidDegree(format!("branch sign {other} is not +-1"))),
        };
        branch_values.push(sq.sqrt() * sign);
    }
    let h = branch_values.iter().map(|y| y.re).fold(s.re, f64::min);
    let on_physical_sheet = s.re > 0.0 && branch_values.iter().all(|y| y.re > 0.0);
    Ok(CoverPoint { s, e_values, branch_values, h, on_physical_sheet })
}

impl CoverPoint {
    /// Frobenius exponent attached to an eigenvalue `e` of the `E` element.
    pub fn exponent(&self, e: i64) -> Option<Complex64> {
        if e == 0 {
            return Some(self.s);
        }
        self.e_values.iter().position(|&x| x == e).map(|i| self.branch_values[i])
    }
}
