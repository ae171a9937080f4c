use super::flux::output_flux;
use super::g2::{output_operator, IntensityFunctional};
use super::qrt::propagate;
use super::trapezoid_weights;
use crate::dynamics::{evolve, IntegratorConfig, Model, TimeGrid};
use crate::error::{Error, Result};
use crate::quantum::QuantumState;
use crate::C64;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct G3Result {
    /// ∫∫∫ G³ over all orderings
    pub numerator: f64,
    pub n_out: f64,
    pub g3_bar: f64,
}

/// Time-integrated ḡ³(0,0) = ∫∫∫ G³(t₁,t₂,t₃) / n_out³ by nested regression:
/// σ₁ = A ρ(t₁) A† is propagated to t₂, sandwiched again and propagated to
/// t₃. The ordered region t₁ ≤ t₂ ≤ t₃ is integrated and multiplied by 3!.
pub fn g3_zero_pulsed(model: &Model, grid: &TimeGrid, cfg: &IntegratorConfig) -> Result<G3Result> {
    let traj = evolve(model, &QuantumState::ground(model.space()), grid, cfg)?;
    let flux = output_flux(&traj, model);
    let n = traj.times.len();
    let d = model.dim();
    let h = traj.times[1] - traj.times[0];
    let intensity = IntensityFunctional::new(model);
    let w = trapezoid_weights(n, h);

    let middle: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let t1 = traj.times[i];
            let a1 = output_operator(model, model.classical_output(t1, traj.alpha[i]));
            let sigma1 = &a1 * traj.states[i].matrix() * a1.adjoint();
            let times = &traj.times[i..];
            let mut snapshots: Vec<(DMatrix<C64>, C64)> = Vec::with_capacity(times.len());
            propagate(model, &sigma1, traj.alpha[i], t1, times, cfg, |_, _, y, al, scale| {
                snapshots.push((DMatrix::from_column_slice(d, d, y) * C64::from(scale), al));
            })?;
            let mut inner = vec![0.0; times.len()];
            for (j, (sigma, al)) in snapshots.iter().enumerate() {
                let t2 = times[j];
                let a2 = output_operator(model, model.classical_output(t2, *al));
                let sigma2 = &a2 * sigma * a2.adjoint();
                let later = &times[j..];
                let mut g = vec![0.0; later.len()];
                propagate(model, &sigma2, *al, t2, later, cfg, |k, t, y, al3, scale| {
                    g[k] = scale * intensity.eval(model.classical_output(t, al3), y);
                })?;
                inner[j] = trapezoid_weights(g.len(), h).iter().zip(&g).map(|(w, v)| w * v).sum();
            }
            Ok(trapezoid_weights(inner.len(), h).iter().zip(&inner).map(|(w, v)| w * v).sum())
        })
        .collect::<Result<_>>()?;

    let numerator = 6.0 * w.iter().zip(&middle).map(|(w, m)| w * m).sum::<f64>();
    let norm = flux.n_out.powi(3);
    if norm > 0.0 && numerator < -1e-6 * norm {
        return Err(Error::NegativeCorrelation { value: numerator / norm });
    }
    Ok(G3Result {
        numerator,
        n_out: flux.n_out,
        g3_bar: if norm > 0.0 { (numerator / norm).max(0.0) } else { 0.0 },
    })
}
