//! Numerical invariants of area-preserving maps of the closed unit disk: the
//! flux homomorphism and its extension τ, the Calabi invariant, the
//! Ismagilov–Losik–Michor 2-cocycle, the circle Euler cocycle, and checkers
//! for the identities relating them.
//!
//! Everything numeric is generic over [`Scalar`]; the aliases below fix `f64`.

pub mod error;
pub mod geometry;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub mod circle;
pub mod cochain;
pub mod invariants;
pub mod maps;

pub type Point64 = geometry::Point<f64>;
pub type Cotangent64 = geometry::CotangentSample<f64>;
pub type Path64 = geometry::Path<f64>;
pub type MapWord64 = maps::MapWord<f64>;
pub type Jacobian64 = maps::JacobianSample<f64>;
pub type CircleLift64 = circle::CircleLift<f64>;
pub type InvariantValue64 = invariants::InvariantValue<f64>;
pub type AreaProfile64 = invariants::AreaProfile<f64>;
