use super::trapezoid;
use crate::dynamics::{Model, SteadyState, Trajectory};
use serde::Serialize;

/// Detected photon flux ⟨b_out†b_out⟩(t) on the trajectory grid.
#[derive(Debug, Clone, Serialize)]
pub struct OutputFlux {
    pub times: Vec<f64>,
    /// photons / ps
    pub flux: Vec<f64>,
    /// Photons per pulse, ∫ flux dt.
    pub n_out: f64,
}

fn flux_value(beta: num_complex::Complex64, s: f64, a_h: num_complex::Complex64, n_h: f64) -> f64 {
    beta.norm_sqr() + 2.0 * s * (beta.conj() * a_h).re + s * s * n_h
}

/// |⟨b_in⟩|² + 2√(η_top κ) Re(⟨b_in⟩*⟨a_H⟩) + η_top κ ⟨a_H†a_H⟩ with the
/// lab-frame expectations recorded on the trajectory.
pub fn output_flux(traj: &Trajectory, model: &Model) -> OutputFlux {
    let s = model.output_scale();
    let flux: Vec<f64> = traj
        .times
        .iter()
        .zip(traj.a_h.iter().zip(&traj.n_h))
        .map(|(&t, (&a, &n))| flux_value(model.reflected_input(t), s, a, n))
        .collect();
    let h = if traj.times.len() > 1 { traj.times[1] - traj.times[0] } else { 0.0 };
    OutputFlux {
        n_out: trapezoid(&flux, h),
        times: traj.times.clone(),
        flux,
    }
}

/// CW reflectivity: output flux over the flux coupled into the device mode.
pub fn steady_reflectivity(model: &Model, ss: &SteadyState) -> f64 {
    let input = model.coupled_input_flux(0.0);
    if input == 0.0 {
        return 0.0;
    }
    flux_value(model.reflected_input(0.0), model.output_scale(), ss.a_h, ss.n_h) / input
}
