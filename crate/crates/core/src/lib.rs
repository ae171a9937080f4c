//! Simulation toolkit for a quantum-dot micropillar acting as a single-photon
//! filter under coherent-pulse excitation.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`] builds the truncated Hilbert space (exciton ⊗ H mode ⊗ V mode),
//!   the ladder/transition operators and the device parameters.
//! * [`dynamics`] assembles the Lindblad master equation and integrates it for
//!   pulsed and continuous-wave drives, or solves for its steady state.
//! * [`correlations`] turns trajectories into output flux and time-integrated
//!   intensity correlations via the quantum regression theorem.
//! * [`experiments`] reproduces the device measurements (CW spectra, pulsed
//!   sweeps, figures of merit, spectrum fitting).
//! * [`statistics`] decomposes the output into coherent and single-photon parts
//!   and reconstructs Fock occupation probabilities.
//! * [`tttr`] simulates time-tagged detector clicks and histograms them.
//!
//! Units: energies in µeV, times in ps, rates in ps⁻¹ (energy / ħ).

pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod quantum;
pub mod statistics;
pub mod tttr;
pub mod units;

pub use error::{Error, Result};

/// Complex scalar used for every operator and state entry.
pub type C64 = num_complex::Complex64;
