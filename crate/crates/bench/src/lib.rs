//! Shared fixtures for the benchmarks in `benches/`.

use conical::polytope::{centering_projector, validate_projector, DesignProjector};

/// The validated centering projector for `d²` elements.
pub fn centering(d: usize) -> DesignProjector {
    validate_projector(&centering_projector(d * d), d, 1e-12).expect("centering projector is valid")
}
