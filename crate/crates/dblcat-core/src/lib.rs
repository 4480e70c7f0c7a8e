//! Core library of the dblcat workbench: finite-set combinatorics, double
//! categories over them, and exhaustive/sampled checkers for the structure
//! (companions, Cartesian cells, tabulators, module composites) that the
//! CLI reports on.

pub mod cartesian;
pub mod double;
pub mod error;
pub mod fibrancy;
pub mod finset;
pub mod instances;
pub mod tabulators;

pub use error::{CoreError, DblError};
