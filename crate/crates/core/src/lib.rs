//! Fractal surface codes: CSS codes on hypercubic cell complexes with
//! recursively punched holes, their homology, distances and transversal
//! gate conditions.

pub mod code;
pub mod complex;
pub mod distance;
pub mod error;
pub mod gates;
pub mod gf2;
pub mod homology;

pub use error::{Error, Result};
