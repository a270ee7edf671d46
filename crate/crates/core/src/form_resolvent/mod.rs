//! Form-valued radial resolvent kernel `F_p` on real hyperbolic space.
//!
//! Pipeline: [`tau`] builds the `K`-type matrices, [`radial`] assembles the
//! conjugated radial operator as a series in `q = e^-t`, [`cover`] fixes a
//! point of the branched cover, [`frobenius`] solves the recursion for the
//! decaying solution and evaluates it, and [`psi`] integrates inward to read
//! off the singular coefficient at the origin.

pub mod cover;
pub mod frobenius;
pub mod ode;
pub mod psi;
pub mod qseries;
pub mod radial;
pub mod tau;

use num_complex::Complex64;
use thiserror::Error;

use crate::space_constants::Field;

pub use cover::{cover_point, CoverPoint};
pub use frobenius::{decay_check, frobenius_solve, kernel_eval, FrobeniusConfig, FrobeniusKernel, ResonancePolicy};
pub use psi::{psi_extract, psi_extract_with, PsiConfig, PsiReport};
pub use radial::{build_radial_operator, RadialOperator};
pub use tau::{build_tau_p_action, TauPAction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolventError {
    #[error("form resolvent is only implemented over R (got {0})")]
    NotImplemented(Field),
    #[error("invalid input: {0}")]
    InvalidDegree(String),
    #[error("assembly mismatch: {0}")]
    AssemblyMismatch(String),
    #[error("s = {s} is a branch point (s^2 + {e} = 0)")]
    BranchPoint { s: Complex64, e: i64 },
    #[error("resonance at s = {s}: block e = {block} step l = {l} against e = {target}, margin {margin:e}")]
    ResonanceDetected { s: Complex64, block: i64, l: usize, target: i64, margin: f64 },
    #[error("t = {t} lies below the series validity threshold {threshold}")]
    TailBoundExceeded { t: f64, threshold: f64 },
    #[error("integration failed: {0}")]
    StiffIntegration(String),
    #[error("power-law fit failed: {0}")]
    FitFailure(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}
