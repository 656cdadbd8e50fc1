//! Direct and inverse spectral problems for the operator
//!
//! ```text
//! (L y)(x) = -y''(x) + α ⟨y, v⟩ v(x),   x ∈ (0, π),
//! y(0) = y(π),  y'(0) = y'(π),
//! ```
//!
//! a rank-one (non-local) perturbation of the periodic second-derivative
//! operator `L₀`. The crate evaluates the characteristic function of `L`,
//! computes and classifies its spectrum through the secular equation,
//! recovers `α` and a real potential `v` from three spectra, and ships an
//! independent dense-matrix oracle to check all of it.
//!
//! Potentials are finite Fourier series in the orthonormal basis
//! `1/√π, √(2/π) cos 2kx, √(2/π) sin 2kx` of `L²(0, π)`.

pub mod charfn;
pub mod cli;
pub mod error;
pub mod json;
pub mod oracle;
pub mod potential;
pub mod quadrature;
pub mod recovery;
pub mod spectrum;

pub use error::{Error, Result};
pub use potential::{L0Spectrum, OperatorSpec, PotentialSpec, Term};
pub use spectrum::{ClassifiedSpectrum, SpectrumEntry, Tag, WeightTable};
