//! Weyl sums, arc dissection and circle-method quadrature diagnostics.

pub mod arcs;
pub mod integrals;
pub mod weyl;

pub use arcs::*;
pub use integrals::*;
pub use weyl::*;
