use super::drive::{rabi_amplitude, DriveSpec};
use crate::quantum::{commutator, dagger, qd_detunings, DeviceParams, Operator, OperatorSet};
use crate::units::{rate, HBAR};
use crate::C64;
use serde::Serialize;

/// Detunings from the laser frequency (µeV) of every mode and exciton line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detunings {
    /// ω_H − ω of the H cavity mode.
    pub cavity_h: f64,
    /// ω_V − ω of the V cavity mode.
    pub cavity_v: f64,
    /// δ_H^QD
    pub qd_h: f64,
    /// δ_V^QD
    pub qd_v: f64,
    /// Coefficient −Δ_FSS cosθ sinθ of σ_H†σ_V + σ_V†σ_H.
    pub fss_mixing: f64,
}

impl Detunings {
    /// `laser_detuning` is ω − ω_H (µeV), the laser energy measured from the H
    /// cavity mode.
    pub fn new(params: &DeviceParams, laser_detuning: f64) -> Self {
        let (s, c) = params.theta.sin_cos();
        let cavity_h = -laser_detuning;
        // pick δ_X, δ_Y so that δ_X − δ_Y = Δ_FSS and the H-projected line sits
        // at qd_detuning from the H cavity mode
        let target_h = params.qd_detuning - laser_detuning;
        let delta_y = target_h - params.delta_fss * s * s;
        let delta_x = delta_y + params.delta_fss;
        let (qd_h, qd_v) = qd_detunings(delta_x, delta_y, params.theta);
        Self {
            cavity_h,
            cavity_v: cavity_h + params.cavity_mode_splitting,
            qd_h,
            qd_v,
            fss_mixing: -params.delta_fss * c * s,
        }
    }
}

/// Drive-independent part of H (µeV).
pub(crate) fn static_hamiltonian(params: &DeviceParams, ops: &OperatorSet, det: &Detunings) -> Operator {
    let sh = &ops.sigma_h;
    let sv = &ops.sigma_v;
    let shd = dagger(sh);
    let svd = dagger(sv);
    let ahd = dagger(&ops.a_h);
    let avd = dagger(&ops.a_v);
    let c = |x: f64| C64::from(x);

    let h_qd = (&svd * sv) * c(det.qd_v) + (&shd * sh) * c(det.qd_h) + (&shd * sv + &svd * sh) * c(det.fss_mixing);
    let h_c = (&avd * &ops.a_v) * c(det.cavity_v) + (&ahd * &ops.a_h) * c(det.cavity_h);
    let coupling = &ops.a_v * &svd + &ops.a_h * &shd - &avd * sv - &ahd * sh;
    let h_i = coupling * C64::new(0.0, -params.g);
    h_qd + h_c + h_i
}

/// Full Hamiltonian H = H_QD + H_c + H_i + H_p(t) in µeV, laser rotating frame.
pub fn hamiltonian(t: f64, params: &DeviceParams, drive: &DriveSpec, ops: &OperatorSet, det: &Detunings) -> Operator {
    let omega = C64::from(rabi_amplitude(drive, params, t));
    let h_p = (&ops.a_h * omega.conj() - dagger(&ops.a_h) * omega) * C64::new(0.0, HBAR);
    static_hamiltonian(params, ops, det) + h_p
}

/// D_{rate,X}[ρ] = rate (XρX† − ½{X†X, ρ}).
pub fn dissipator(rate: f64, x: &Operator, rho: &Operator) -> Operator {
    let xd = dagger(x);
    let xdx = &xd * x;
    (x * rho * &xd - (&xdx * rho + rho * &xdx) * C64::from(0.5)) * C64::from(rate)
}

/// Collapse channels (rate in ps⁻¹, operator).
pub(crate) fn collapse_channels<'a>(params: &DeviceParams, ops: &'a OperatorSet) -> [(f64, &'a Operator); 5] {
    [
        (rate(params.gamma_sp), &ops.sigma_h),
        (rate(params.gamma_star), &ops.pi_ex),
        (rate(params.gamma_sp), &ops.sigma_v),
        (rate(params.kappa), &ops.a_h),
        (rate(params.kappa), &ops.a_v),
    ]
}

/// dρ/dt of the lab-frame master equation, evaluated densely.
pub fn lindblad_rhs(
    rho: &Operator,
    t: f64,
    params: &DeviceParams,
    ops: &OperatorSet,
    drive: &DriveSpec,
    det: &Detunings,
) -> Operator {
    let h = hamiltonian(t, params, drive, ops, det);
    let mut out = commutator(&h, rho) * C64::new(0.0, -1.0 / HBAR);
    for (r, x) in collapse_channels(params, ops) {
        if r != 0.0 {
            out += dissipator(r, x, rho);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{build_operators, state::hermiticity_defect, HilbertSpace, QuantumState, EXCITON_H};

    fn max_abs(m: &Operator) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn random_state(d: usize, seed: u64) -> Operator {
        // deterministic pseudo-random positive matrix
        let mut x = seed;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let m = Operator::from_fn(d, d, |_, _| C64::new(next(), next()));
        let rho = &m * m.adjoint();
        let tr = rho.trace();
        rho / tr
    }

    #[test]
    fn fss_term_vanishes_when_aligned() {
        let p = DeviceParams { theta: 0.0, delta_fss: 7.0, ..Default::default() };
        let det = Detunings::new(&p, 0.0);
        assert_eq!(det.fss_mixing.abs(), 0.0);
        let ops = build_operators(HilbertSpace::new(2, 2).unwrap(), 0.0);
        let h = hamiltonian(0.0, &p, &DriveSpec::Cw { photon_flux: 0.0 }, &ops, &det);
        let h_idx = ops.space.index(EXCITON_H, 0, 0);
        let v_idx = ops.space.index(crate::quantum::EXCITON_V, 0, 0);
        assert_eq!(h[(h_idx, v_idx)].norm(), 0.0);
    }

    #[test]
    fn paper_fss_mixing_coefficient() {
        let det = Detunings::new(&DeviceParams::default(), 0.0);
        assert!((det.fss_mixing + 0.75).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_zero_when_everything_off() {
        let p = DeviceParams {
            g: 0.0,
            delta_fss: 0.0,
            cavity_mode_splitting: 0.0,
            ..Default::default()
        };
        let det = Detunings::new(&p, 0.0);
        let ops = build_operators(HilbertSpace::new(3, 2).unwrap(), p.theta);
        let h = hamiltonian(5.0, &p, &DriveSpec::Cw { photon_flux: 0.0 }, &ops, &det);
        assert_eq!(max_abs(&h), 0.0);
    }

    #[test]
    fn hamiltonian_hermitian_and_diagonal_in_xy() {
        let p = DeviceParams::default();
        let det = Detunings::new(&p, 4.0);
        let ops = build_operators(HilbertSpace::new(3, 2).unwrap(), p.theta);
        let drive = DriveSpec::GaussianPulse { n_in: 2.0, tau: 50.0, t0: 0.0 };
        for t in [-40.0, 0.0, 17.0] {
            let h = hamiltonian(t, &p, &drive, &ops, &det);
            assert!(hermiticity_defect(&h) < 1e-12);
        }
        // in the natural X/Y basis the QD part is diagonal with splitting Δ_FSS
        let g0 = DeviceParams { g: 0.0, ..p };
        let h = static_hamiltonian(&g0, &ops, &det);
        let x_state = dagger(&ops.sigma_x).column(ops.space.ground_index()).into_owned();
        let y_state = dagger(&ops.sigma_y).column(ops.space.ground_index()).into_owned();
        let exx = (x_state.adjoint() * &h * &x_state)[(0, 0)].re;
        let eyy = (y_state.adjoint() * &h * &y_state)[(0, 0)].re;
        let exy = (x_state.adjoint() * &h * &y_state)[(0, 0)].norm();
        assert!((exx - eyy - p.delta_fss).abs() < 1e-12);
        assert!(exy < 1e-12);
        // the H line sits at the QD detuning when the laser is on the cavity
        assert!(Detunings::new(&p, 0.0).qd_h.abs() < 1e-12);
    }

    #[test]
    fn dark_fixed_point() {
        let p = DeviceParams::default();
        let ops = build_operators(HilbertSpace::new(3, 2).unwrap(), p.theta);
        let det = Detunings::new(&p, 0.0);
        let rho = QuantumState::ground(ops.space).into_matrix();
        let d = lindblad_rhs(&rho, 0.0, &p, &ops, &DriveSpec::Cw { photon_flux: 0.0 }, &det);
        assert!(max_abs(&d) < 1e-18);
    }

    #[test]
    fn trace_preserving_and_hermitian() {
        let p = DeviceParams::default();
        let ops = build_operators(HilbertSpace::new(3, 2).unwrap(), p.theta);
        let det = Detunings::new(&p, 10.0);
        let drive = DriveSpec::GaussianPulse { n_in: 3.0, tau: 40.0, t0: 0.0 };
        for seed in 0..5 {
            let rho = random_state(ops.dim(), seed);
            let d = lindblad_rhs(&rho, 3.0, &p, &ops, &drive, &det);
            assert!(d.trace().norm() < 1e-12);
            assert!(hermiticity_defect(&d) < 1e-12);
        }
    }

    #[test]
    fn bare_exciton_decays_at_gamma_sp() {
        let p = DeviceParams { g: 0.0, gamma_star: 0.0, ..Default::default() };
        let ops = build_operators(HilbertSpace::new(2, 2).unwrap(), p.theta);
        let det = Detunings::new(&p, 0.0);
        let rho = QuantumState::basis(ops.space, ops.space.excited_h_index()).into_matrix();
        let d = lindblad_rhs(&rho, 0.0, &p, &ops, &DriveSpec::Cw { photon_flux: 0.0 }, &det);
        let idx = ops.space.excited_h_index();
        assert!((d[(idx, idx)].re + rate(p.gamma_sp)).abs() < 1e-15);
    }
}
