//! Models of real and complex hyperbolic space, orbits of free groups of
//! isometries and their Poincaré series.

use thiserror::Error;

use crate::scalar_green::GreenError;

pub mod enumerate;
pub mod estimate;
pub mod generators;
pub mod model;

pub use enumerate::{enumerate_orbit, enumerate_orbit_capped, word_count, DedupPolicy, OrbitSample};
pub use estimate::{estimate_delta, estimate_delta_with, poincare_partial_sum, pullback_green_partial_sum, DeltaConfig, DeltaEstimate};
pub use generators::{cyclic_boost, punctured_torus, schottky_pair, sl2_to_so21, GroupGenerators};
pub use model::{distance, IsometryModel};

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("{words} words exceed the cap of {cap} (set HYPSPEC_MAX_WORDS)")]
    CombinatorialBlowup { words: u128, cap: u64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error(transparent)]
    Green(#[from] GreenError),
}
