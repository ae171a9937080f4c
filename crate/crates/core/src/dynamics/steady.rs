use super::model::Model;
use crate::error::{invalid, Error, Result};
use crate::quantum::{Operator, QuantumState};
use crate::C64;
use nalgebra::{DMatrix, DVector};

/// Refinement passes allowed before the solve is declared unconverged.
const MAX_REFINEMENTS: usize = 4;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SteadyState {
    /// State in the integration frame of the model.
    pub state: QuantumState,
    /// Coherent H-mode amplitude of the frame (zero in the lab frame).
    pub alpha: C64,
    /// ‖L ρ‖ / ‖ρ‖ (Frobenius).
    pub residual: f64,
    /// Lab-frame ⟨a_H⟩.
    pub a_h: C64,
    /// Lab-frame ⟨a_H†a_H⟩.
    pub n_h: f64,
}

fn residual(l: &DMatrix<C64>, x: &DVector<C64>) -> f64 {
    (l * x).norm() / x.norm()
}

/// Fixed point of the master equation for a constant drive, from the null
/// space of the vectorized Liouvillian with Tr ρ = 1 replacing one equation.
pub fn steady_state(model: &Model) -> Result<SteadyState> {
    if !model.drive.is_cw() {
        return Err(invalid("drive", "steady state requires a continuous-wave drive"));
    }
    let d = model.dim();
    let n = d * d;
    let alpha = model.steady_alpha();
    let l = model.dense_liouvillian(alpha, 0.0);

    // the ρ_00 equation is redundant under trace preservation
    let mut m = l.clone();
    for c in 0..n {
        m[(0, c)] = C64::from(0.0);
    }
    for i in 0..d {
        m[(0, i + i * d)] = C64::from(1.0);
    }
    let mut b = DVector::zeros(n);
    b[0] = C64::from(1.0);

    let lu = m.clone().lu();
    let mut x = lu.solve(&b).ok_or(Error::Singular)?;
    let mut res = residual(&l, &x);
    let mut iterations = 0;
    while res > RESIDUAL_TOL * 1e-2 && iterations < MAX_REFINEMENTS {
        let r = &b - &m * &x;
        let dx = lu.solve(&r).ok_or(Error::Singular)?;
        x += dx;
        iterations += 1;
        res = residual(&l, &x);
    }

    let rho = DMatrix::from_column_slice(d, d, x.as_slice());
    let rho = (&rho + rho.adjoint()) * C64::from(0.5);
    let rho = &rho / rho.trace();
    let x = DVector::from_column_slice(rho.as_slice());
    res = residual(&l, &x);
    if !(res <= RESIDUAL_TOL) {
        return Err(Error::SteadyStateNotConverged {
            residual: res,
            iterations,
            detuning: Some(model.laser_detuning),
        });
    }

    let state = QuantumState::from_matrix(rho)?;
    let a: &Operator = &model.ops.a_h;
    let a_frame = state.expect(a);
    let n_frame = state.expect(&(a.adjoint() * a)).re;
    Ok(SteadyState {
        a_h: alpha + a_frame,
        n_h: alpha.norm_sqr() + 2.0 * (alpha.conj() * a_frame).re + n_frame,
        state,
        alpha,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, DriveSpec, Frame, IntegratorConfig, TimeGrid};
    use crate::quantum::{DeviceParams, HilbertSpace};
    use crate::units::rate;

    #[test]
    fn no_drive_gives_ground_state() {
        let space = HilbertSpace::new(3, 2).unwrap();
        let m = Model::new(DeviceParams::default(), DriveSpec::Cw { photon_flux: 0.0 }, 0.0, space, Frame::Lab).unwrap();
        let ss = steady_state(&m).unwrap();
        let g = QuantumState::ground(space);
        let diff = (ss.state.matrix() - g.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn empty_cavity_coherent_amplitude() {
        let p = DeviceParams { g: 0.0, ..Default::default() };
        let delta = -35.0;
        let drive = DriveSpec::Cw { photon_flux: 1e9 };
        for (frame, nh) in [(Frame::Lab, 7), (Frame::Displaced, 2)] {
            let space = HilbertSpace::new(nh, 1).unwrap();
            let m = Model::new(p, drive, delta, space, frame).unwrap();
            let ss = steady_state(&m).unwrap();
            let expected = -C64::from(m.rabi(0.0)) / C64::new(0.5 * rate(p.kappa), rate(-delta));
            assert!((ss.a_h - expected).norm() < 1e-8, "{frame:?}: {} vs {expected}", ss.a_h);
            assert!(ss.residual <= 1e-10);
        }
    }

    #[test]
    fn matches_long_time_evolution() {
        let p = DeviceParams::default();
        let space = HilbertSpace::new(3, 2).unwrap();
        let drive = DriveSpec::Cw { photon_flux: 5e7 };
        let m = Model::new(p, drive, 0.0, space, Frame::Lab).unwrap();
        let ss = steady_state(&m).unwrap();
        // the slowest relaxation mode here is ~1 ns
        let grid = TimeGrid::with_step(0.0, 8000.0, 500.0).unwrap();
        let cfg = IntegratorConfig {
            tol: crate::dynamics::Tolerances { atol: 1e-13, rtol: 1e-11 },
            ..Default::default()
        };
        let traj = evolve(&m, &QuantumState::ground(space), &grid, &cfg).unwrap();
        let last = traj.states.last().unwrap();
        let pi = &m.ops.pi_ex;
        assert!((last.expect(pi) - ss.state.expect(pi)).norm() < 1e-6);
        assert!((traj.a_h.last().unwrap() - ss.a_h).norm() < 1e-6 * ss.a_h.norm().max(1e-3), "{:?} {:?}", traj.a_h.last(), ss.a_h);
        assert!((traj.n_h.last().unwrap() - ss.n_h).abs() < 1e-6 * ss.n_h.max(1e-9));
    }

    #[test]
    fn pulse_rejected() {
        let space = HilbertSpace::new(2, 1).unwrap();
        let m = Model::new(DeviceParams::default(), DriveSpec::pulse(1.0, 10.0), 0.0, space, Frame::Lab).unwrap();
        assert!(steady_state(&m).is_err());
    }
}
