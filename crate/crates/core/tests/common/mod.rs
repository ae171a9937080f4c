//! Dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qfilter::correlations::quantum_regression;
use qfilter::dynamics::{
    evolve, lindblad_rhs, DriveSpec, Frame, IntegratorConfig, Model, TimeGrid, Tolerances,
};
use qfilter::quantum::{DeviceParams, HilbertSpace, Operator, QuantumState};
use qfilter::C64;

/// Lab-frame Liouvillian as a dense matrix acting on column-major vec(ρ),
/// assembled column by column from the dense right-hand side.
pub fn dense_liouvillian(model: &Model) -> DMatrix<C64> {
    let d = model.dim();
    let n = d * d;
    let mut l = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut e = Operator::zeros(d, d);
        e[(col % d, col / d)] = C64::from(1.0);
        let out = lindblad_rhs(&e, 0.0, &model.params, &model.ops, &model.drive, &model.detunings);
        for (row, v) in out.iter().enumerate() {
            l[(row, col)] = *v;
        }
    }
    l
}

/// Applies `step` (= e^{L h}) `n` times.
fn propagate_steps(step: &DMatrix<C64>, n: usize, v: &DVector<C64>) -> DVector<C64> {
    (0..n).fold(v.clone(), |acc, _| step * acc)
}

pub struct QrtComparison {
    pub worst_relative: f64,
    pub points: usize,
}

/// G(t₁, τ) = Tr[a†a e^{Lτ}(a ρ(t₁) a†)] on a 10×10 grid, once via
/// `evolve` + `quantum_regression` and once via dense matrix exponentials.
pub fn qrt_vs_expm(n_h: usize, n_v: usize) -> QrtComparison {
    let space = HilbertSpace::new(n_h, n_v).unwrap();
    let params = DeviceParams::default();
    let drive = DriveSpec::Cw { photon_flux: 2e9 };
    let model = Model::new(params, drive, 0.0, space, Frame::Lab).unwrap();
    let d = model.dim();
    let cfg = IntegratorConfig { tol: Tolerances { atol: 1e-14, rtol: 1e-12 }, ..Default::default() };

    // every t₁ and τ below is a multiple of 2 ps
    let h = 2.0;
    let step = (dense_liouvillian(&model) * C64::from(h)).exp();
    let rho0 = QuantumState::ground(space);
    let v0 = DVector::from_column_slice(rho0.matrix().as_slice());
    let a = model.ops.a_h.clone();
    let ad = a.adjoint();
    let n_op = &ad * &a;

    let t1s: Vec<f64> = (1..=10).map(|i| 10.0 * i as f64).collect();
    let taus: Vec<f64> = (0..10).map(|j| 8.0 * j as f64).collect();
    let grid = TimeGrid::with_step(0.0, 100.0, 10.0).unwrap();
    let traj = evolve(&model, &rho0, &grid, &cfg).unwrap();

    let mut worst: f64 = 0.0;
    let mut points = 0;
    for &t1 in &t1s {
        let k = traj.times.iter().position(|&t| (t - t1).abs() < 1e-9).unwrap();
        let times: Vec<f64> = taus.iter().map(|tau| t1 + tau).collect();
        let got = quantum_regression(&model, &traj.states[k], traj.alpha[k], t1, &times, &a, &ad, &[n_op.clone()], &cfg)
            .unwrap();

        let rho_t1 = DMatrix::from_column_slice(d, d, propagate_steps(&step, (t1 / h).round() as usize, &v0).as_slice());
        let sigma = &a * rho_t1 * &ad;
        let sv = DVector::from_column_slice(sigma.as_slice());
        for (j, &tau) in taus.iter().enumerate() {
            let s = DMatrix::from_column_slice(d, d, propagate_steps(&step, (tau / h).round() as usize, &sv).as_slice());
            let reference = (&n_op * s).trace();
            let rel = (got[j][0] - reference).norm() / reference.norm();
            worst = worst.max(rel);
            points += 1;
        }
    }
    QrtComparison { worst_relative: worst, points }
}
