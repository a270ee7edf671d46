//! Spectral constants, bounds and kernels for differential forms on
//! rank-one hyperbolic spaces and their quotients.

pub mod bounds_engine;
pub mod cli;
pub mod form_resolvent;
pub mod orbit_geometry;
pub mod scalar_green;
pub mod space_constants;
