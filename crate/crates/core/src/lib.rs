//! Khovanov homology, Bar-Natan filtrations, s-invariants and their
//! refinements by stable cohomology operations.

pub mod complex;
pub mod cube;
pub mod diagram;
pub mod error;
pub mod homology;
pub mod refine;
pub mod cli;
pub mod cobordism;
pub mod exactalg;

pub use error::{Error, Result};
