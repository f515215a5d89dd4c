//! Core library of the dgw workbench.
//!
//! The crate models groupoids equipped with a distinguished generating set
//! that carries a second involution besides inversion.  It provides finite
//! models and presented models of such structures, constructions that
//! produce them (pair groupoids, triple groupoids, unit-group examples over
//! finite rings, malnormal group pairs, ideal triangulations), ring functors
//! attached to them, and a tuple homology theory.  Exact integer and
//! rational arithmetic is used throughout; there are no floating point
//! computations anywhere in the crate.

pub mod error;
pub mod finring;
pub mod groupoid;
pub mod grouppair;
pub mod homology;
pub mod perm;
pub mod presentation;
pub mod rewrite;
pub mod ringfun;
pub mod strip;
pub mod tetra;
pub mod zlin;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
