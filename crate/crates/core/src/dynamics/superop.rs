use crate::quantum::Operator;
use crate::C64;
use nalgebra::DMatrix;

/// Compressed sparse-row complex matrix acting on vectorized density matrices.
///
/// Vectorization is column-major (`x[i + j·d] = ρ_ij`), matching nalgebra's
/// storage so that a `DMatrix` slice can be used directly.
#[derive(Debug, Clone, Default)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl CsrMatrix {
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        // cancellations leave explicit zeros; drop them
        let mut out = Self { n, row_ptr, cols, vals };
        out.prune();
        out
    }

    fn prune(&mut self) {
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut vals = Vec::with_capacity(self.vals.len());
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[k].norm() > 0.0 {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        self.row_ptr = row_ptr;
        self.cols = cols;
        self.vals = vals;
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Largest absolute row sum, a bound on the spectral radius.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|r| self.vals[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|v| v.norm()).sum())
            .fold(0.0, f64::max)
    }

    /// out += scale · M x
    pub fn mul_add(&self, scale: C64, x: &[C64], out: &mut [C64]) {
        for r in 0..self.n {
            let mut acc = C64::from(0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            out[r] += scale * acc;
        }
    }

    /// out = M x
    pub fn mul(&self, x: &[C64], out: &mut [C64]) {
        for r in 0..self.n {
            let mut acc = C64::from(0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            out[r] = acc;
        }
    }

    /// dense += scale · M
    pub fn add_to_dense(&self, scale: C64, dense: &mut DMatrix<C64>) {
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                dense[(r, self.cols[k])] += scale * self.vals[k];
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        self.add_to_dense(C64::from(1.0), &mut m);
        m
    }
}

/// Accumulates superoperator terms on a `d`-dimensional space.
pub(crate) struct SuperOpBuilder {
    d: usize,
    triplets: Vec<(usize, usize, C64)>,
}

fn nonzeros(op: &Operator) -> Vec<(usize, usize, C64)> {
    let mut out = Vec::new();
    for j in 0..op.ncols() {
        for i in 0..op.nrows() {
            let v = op[(i, j)];
            if v.norm() > 0.0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

impl SuperOpBuilder {
    pub fn new(d: usize) -> Self {
        Self { d, triplets: Vec::new() }
    }

    /// ρ ↦ scale · A ρ
    pub fn left(&mut self, a: &Operator, scale: C64) {
        let d = self.d;
        for (i, k, v) in nonzeros(a) {
            for j in 0..d {
                self.triplets.push((i + j * d, k + j * d, scale * v));
            }
        }
    }

    /// ρ ↦ scale · ρ B
    pub fn right(&mut self, b: &Operator, scale: C64) {
        let d = self.d;
        for (k, j, v) in nonzeros(b) {
            for i in 0..d {
                self.triplets.push((i + j * d, i + k * d, scale * v));
            }
        }
    }

    /// ρ ↦ scale · A ρ B
    pub fn sandwich(&mut self, a: &Operator, b: &Operator, scale: C64) {
        let d = self.d;
        let nb = nonzeros(b);
        for (i, k, va) in nonzeros(a) {
            for &(l, j, vb) in &nb {
                self.triplets.push((i + j * d, k + l * d, scale * va * vb));
            }
        }
    }

    /// ρ ↦ scale · [A, ρ]
    pub fn commutator(&mut self, a: &Operator, scale: C64) {
        self.left(a, scale);
        self.right(a, -scale);
    }

    /// ρ ↦ rate (XρX† − ½{X†X, ρ})
    pub fn dissipator(&mut self, rate: f64, x: &Operator) {
        if rate == 0.0 {
            return;
        }
        let xd = x.adjoint();
        let xdx = &xd * x;
        self.sandwich(x, &xd, C64::from(rate));
        self.left(&xdx, C64::from(-0.5 * rate));
        self.right(&xdx, C64::from(-0.5 * rate));
    }

    pub fn build(self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.d * self.d, self.triplets)
    }
}
