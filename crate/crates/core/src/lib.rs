//! Spectrum broadcasting in the illuminated-sphere decoherence model.
//!
//! A dielectric sphere sits at one of two positions and scatters a photon
//! bath. The crate builds the resulting system–environment states, checks
//! how fast they approach spectrum-broadcast form, and evaluates the
//! information-theoretic bounds on that convergence.
//!
//! - [`qmat`]: dense linear algebra, entropies, overlaps.
//! - [`scatter`]: photon overlaps, decoherence times, receptivity.
//! - [`broadcast`]: factored and explicit system–environment states.
//! - [`qinfo`]: mutual information, Holevo quantity, convergence bounds.
//! - [`phases`]: information phase diagram and Perron–Frobenius broadcasting.

pub mod broadcast;
pub mod error;
pub mod phases;
pub mod qinfo;
pub mod qmat;
pub mod scatter;

pub use error::{Error, Result};
