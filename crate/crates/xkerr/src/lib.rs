//! Generalized cross-Kerr optomechanics on a Cooper-pair-transistor circuit.
//!
//! The model Hamiltonian is
//!
//! ```text
//! H = ω_c n_a + ω_M n_b + g₀ n_a (b + b†) + ḡ_CK n_a n_b + g′_CK n_a n_b²
//! ```
//!
//! with `ḡ_CK = g_CK + g′_CK`. All frequencies and couplings are angular
//! (rad/s); see [`units`] for conversions.
//!
//! Modules, in pipeline order:
//!
//! - [`circuit`]: device parameters to effective couplings, plus validity checks.
//! - [`fockspace`]: truncated two-mode operators and Hamiltonians.
//! - [`lindblad`]: master equation, steady states, propagation, g⁽ⁿ⁾(0).
//! - [`analytic`]: polaron spectrum, Franck–Condon factors, perturbative g⁽ⁿ⁾(0).
//! - [`catgen`]: mechanical cat states, Wigner functions and negativity.
//! - [`gaussian`]: linearized strong-drive branch and logarithmic negativity.

pub mod analytic;
pub mod catgen;
pub mod circuit;
pub mod error;
pub mod fockspace;
pub mod gaussian;
pub mod lindblad;
pub mod units;

pub use num_complex::Complex64 as C64;

pub use analytic::PolaronSpectrum;
pub use catgen::{CatSpec, WignerGrid};
pub use circuit::{
    CircuitParams, EffectiveCouplings, GmModel, IntermediateCouplings, ValidityReport,
};
pub use error::{Error, Result};
pub use fockspace::{FockOperator, Mode, SpaceSpec};
pub use gaussian::{CovarianceState, MeanField};
pub use lindblad::{DensityMatrix, Drive, DriveAndBath, Liouvillian, PhotonStatistics, Thermal};
