//! Notions of amalgamation on concrete finite algebraic classes.
//!
//! The crate models abstract classes with a strong-substructure order, selects
//! "nice" amalgams through a [`notion::Notion`], and checks the resulting
//! axioms, structural properties, independence calculus and categoricity
//! analogues by exhaustive or seeded enumeration.

pub mod catlab;
pub mod class;
pub mod error;
pub mod indep;
pub mod instances;
pub mod notion;
pub mod pregeom;
pub mod report;
pub mod seqamal;
pub mod uniqueness;

pub use error::{Error, Result};
