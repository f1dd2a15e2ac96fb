//! Voronoi chains of lattice minima in pure cubic fields and the principal
//! factorization types they reveal.

pub mod classify;
pub mod criteria;
pub mod dyadic;
pub mod error;
pub mod factor;
pub mod field;
pub mod kummer;
pub mod lattice;
pub mod radicand;
pub mod survey;
pub mod voronoi;

pub use error::{Error, Result};
pub use field::{exact_sign, FieldElement, SignedValue};
pub use radicand::{normalize, CanonicalSplit, CosetNorms, Radicand, Species};
