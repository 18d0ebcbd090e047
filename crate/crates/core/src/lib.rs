//! Exact stress spaces of simplicial complexes.
//!
//! The crate builds simplicial complexes, realizes them with rational
//! coordinates and computes their affine and projective stress spaces, the
//! product on stresses, Maxwell–Cremona liftings and reciprocals, and the
//! skeletal rigidity chain complexes. All authoritative arithmetic is exact.

pub mod complex;
pub mod exterior;
pub mod realization;
pub mod rigidity;
pub mod maxwell;
pub mod algebra;
pub mod skeletal;
pub mod numeric;

pub use numeric::{QuadExt, QuadMatrix, RatMatrix, Rational};
