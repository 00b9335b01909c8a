//! Scattering resonances of Δ + V on cylinders and half-cylinders.
//!
//! Resonances on a chosen sheet are the zeros of det(I + B(z)), a finite
//! determinant assembled from scattered mode waves. The crate discretizes
//! that determinant, counts and locates its zeros with winding numbers, and
//! checks counting slopes against the known bounds.

pub mod config;
pub mod error;
pub mod experiment;
pub mod finder;
pub mod oracle;
pub mod potential;
pub mod quadrature;
pub mod resolvent;
pub mod sheet;
pub mod transverse;

pub use error::{Result, ScatterError};
