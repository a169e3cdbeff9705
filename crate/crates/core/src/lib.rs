//! Construction and exhaustive verification of hyperovals of the Klein
//! quadric Q+(5,q), q even, built from ovoids of the symplectic quadrangle
//! W(q), together with the isomorphism classification of the resulting family.

pub mod analysis;
pub mod constructions;
pub mod error;
pub mod gf2h;
pub mod projspace;
pub mod ovoids;
pub mod quadrics;

pub use error::{Error, Result};
