//! Equal-circle packing in a circle and packing density.

mod construct;
mod density;
pub mod known;
mod layout;
mod packing;
mod relax;

pub use density::{fiber_count_for_density, packing_density};
pub use layout::{Certificate, CirclePackingLayout, PackingResult, CERT_TOL};
pub use packing::{
    max_fibers_in_circle, max_fibers_in_circle_with, min_enclosing_layout_with,
    min_enclosing_ratio, min_enclosing_ratio_with, PackingOptions,
};

/// Density of the hexagonal lattice, π/√12: the upper bound for equal circles.
pub const HEX_DENSITY: f64 = 0.906_899_682_117_108_9;
