//! Truncated Hilbert space, operators and device parameters.
//!
//! The composite space is ordered exciton ⊗ H-mode ⊗ V-mode. The exciton
//! factor is three-dimensional with basis (|G⟩, |H⟩, |V⟩), where |H⟩ and |V⟩
//! are the exciton states projected on the cavity axes.

mod operators;
mod params;
mod space;
pub(crate) mod state;

pub use operators::{annihilation, build_operators, exciton_rotation, qd_detunings, ExcitonBasis, OperatorSet};
pub use params::DeviceParams;
pub use space::HilbertSpace;
pub use state::{QuantumState, StateDiagnostics};

use crate::C64;
use nalgebra::DMatrix;

/// Dense complex operator on the truncated space.
pub type Operator = DMatrix<C64>;

/// Exciton level index inside the three-level factor.
pub const GROUND: usize = 0;
pub const EXCITON_H: usize = 1;
pub const EXCITON_V: usize = 2;

pub(crate) fn dagger(op: &Operator) -> Operator {
    op.adjoint()
}

pub(crate) fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}
