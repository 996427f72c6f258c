//! Concrete classes.

pub mod group;
pub mod vec;
