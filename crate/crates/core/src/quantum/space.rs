use super::{EXCITON_H, EXCITON_V, GROUND};
use crate::error::{invalid, Result};

/// Composite space exciton ⊗ H-mode ⊗ V-mode with independent Fock cut-offs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    n_fock_h: usize,
    n_fock_v: usize,
}

impl HilbertSpace {
    pub fn new(n_fock_h: usize, n_fock_v: usize) -> Result<Self> {
        if n_fock_h == 0 {
            return Err(invalid("n_fock_h", "must be at least 1"));
        }
        if n_fock_v == 0 {
            return Err(invalid("n_fock_v", "must be at least 1"));
        }
        Ok(Self { n_fock_h, n_fock_v })
    }

    pub fn n_fock_h(&self) -> usize {
        self.n_fock_h
    }

    pub fn n_fock_v(&self) -> usize {
        self.n_fock_v
    }

    pub fn dim(&self) -> usize {
        3 * self.n_fock_h * self.n_fock_v
    }

    /// Flat index of |exciton, n_h, n_v⟩.
    pub fn index(&self, exciton: usize, n_h: usize, n_v: usize) -> usize {
        debug_assert!(exciton <= EXCITON_V && n_h < self.n_fock_h && n_v < self.n_fock_v);
        (exciton * self.n_fock_h + n_h) * self.n_fock_v + n_v
    }

    /// Inverse of [`HilbertSpace::index`].
    pub fn labels(&self, index: usize) -> (usize, usize, usize) {
        let n_v = index % self.n_fock_v;
        let rest = index / self.n_fock_v;
        (rest / self.n_fock_h, rest % self.n_fock_h, n_v)
    }

    /// Index of the dark state |G, 0, 0⟩.
    pub fn ground_index(&self) -> usize {
        self.index(GROUND, 0, 0)
    }

    pub fn excited_h_index(&self) -> usize {
        self.index(EXCITON_H, 0, 0)
    }
}
