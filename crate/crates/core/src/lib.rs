//! Symplectic homogenization of compactly supported functions on the
//! cylinder, computed from Reeb graphs, together with the quasi-integrals
//! and topological measures it is compared against.

pub mod error;
pub mod cli;
pub mod compare;
pub mod contour;
pub mod expr;
pub mod field;
pub mod homog;
pub mod numfmt;
pub mod reeb;
pub mod suite;
pub mod tmeasure;

pub use error::{Error, Result};
