//! Lindblad master equation for the driven QD–cavity system.
//!
//! All terms are written in the frame rotating at the laser frequency. Two
//! integration frames are available:
//!
//! * [`Frame::Lab`] integrates the master equation exactly as written, with the
//!   classical drive acting on the H mode.
//! * [`Frame::Displaced`] moves the coherent part α(t) of the H mode into a
//!   c-number that is integrated alongside ρ. The QD then sees the drive g·α(t)
//!   and the residual cavity field stays close to vacuum, so a small Fock
//!   truncation suffices even for tens of photons per pulse. Observables are
//!   mapped back with a_H = α + a'.

mod drive;
mod evolve;
mod hamiltonian;
mod integrator;
mod model;
mod steady;
mod superop;
mod truncation;

pub use drive::{input_amplitude, rabi_amplitude, DriveSpec};
pub use evolve::{evolve, exciton_decay_rate, IntegratorConfig, TimeGrid, Trajectory};
pub use hamiltonian::{dissipator, hamiltonian, lindblad_rhs, Detunings};
pub use integrator::{Dopri5, IntegrationStats, Tolerances};
pub use model::{Frame, Model};
pub use steady::{steady_state, SteadyState};
pub use superop::CsrMatrix;
pub use truncation::{converge_truncation, TRUNCATION_CAP};
