//! Design and analysis tools for fiber jamming modules (FJMs).

pub mod curve;
pub mod error;
pub mod explorer;
pub mod fitting;
pub mod geometry;
pub mod mechanics;

pub use error::{FjmError, Result};
