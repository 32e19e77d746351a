//! Quantum-cohomology central charges of line bundles on toric Fano
//! orbifolds, computed on both sides of mirror symmetry: the A-side
//! Gamma-class/hypergeometric series, the B-side Mellin-Barnes and
//! oscillatory integrals, and the combinatorial mirror cycles that serve as
//! integration contours.

pub mod amodel;
pub mod bmodel;
pub mod config;
pub mod cycles;
pub mod divisor;
pub mod error;
pub mod gamma;
pub mod lattice;
pub mod polyhedra;
pub mod quad;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
