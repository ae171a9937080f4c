use super::{HilbertSpace, Operator};
use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;
use serde::Serialize;

/// Density matrix on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    rho: Operator,
}

/// Deviations of a density matrix from a physical state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StateDiagnostics {
    /// max |ρ − ρ†| over entries.
    pub hermiticity: f64,
    /// |Tr ρ − 1|
    pub trace: f64,
    /// Smallest eigenvalue of the Hermitian part of ρ.
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    /// Thresholds required of every stored state.
    pub fn is_valid(&self) -> bool {
        self.hermiticity <= 1e-10 && self.trace <= 1e-8 && self.min_eigenvalue >= -1e-9
    }

    /// Componentwise worst case of two diagnostics.
    pub fn worst(self, other: Self) -> Self {
        Self {
            hermiticity: self.hermiticity.max(other.hermiticity),
            trace: self.trace.max(other.trace),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }
}

impl QuantumState {
    pub fn from_matrix(rho: Operator) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::DimensionMismatch {
                expected: rho.nrows(),
                got: rho.ncols(),
            });
        }
        Ok(Self { rho })
    }

    /// Pure state |index⟩⟨index|.
    pub fn basis(space: HilbertSpace, index: usize) -> Self {
        let mut rho = DMatrix::zeros(space.dim(), space.dim());
        rho[(index, index)] = C64::from(1.0);
        Self { rho }
    }

    /// |G, 0, 0⟩⟨G, 0, 0|
    pub fn ground(space: HilbertSpace) -> Self {
        Self::basis(space, space.ground_index())
    }

    pub fn maximally_mixed(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self {
            rho: DMatrix::identity(d, d) / C64::from(d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &Operator {
        &self.rho
    }

    pub fn into_matrix(self) -> Operator {
        self.rho
    }

    /// Tr(O ρ)
    pub fn expect(&self, op: &Operator) -> C64 {
        trace_product(op, &self.rho)
    }

    /// Checks the state against a space of the expected dimension.
    pub fn validate_in(&self, space: &HilbertSpace) -> Result<StateDiagnostics> {
        if self.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: self.dim(),
            });
        }
        Ok(self.diagnostics())
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        diagnostics(&self.rho)
    }
}

/// Tr(A B) without forming the product.
pub(crate) fn trace_product(a: &Operator, b: &Operator) -> C64 {
    let d = a.nrows();
    let mut acc = C64::from(0.0);
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub(crate) fn hermiticity_defect(rho: &Operator) -> f64 {
    let d = rho.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn diagnostics(rho: &Operator) -> StateDiagnostics {
    let hermitian_part = (rho + rho.adjoint()) * C64::from(0.5);
    let eig = hermitian_part.symmetric_eigenvalues();
    StateDiagnostics {
        hermiticity: hermiticity_defect(rho),
        trace: (rho.trace().re - 1.0).abs(),
        min_eigenvalue: eig.iter().cloned().fold(f64::INFINITY, f64::min),
    }
}
