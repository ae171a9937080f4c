use super::flux::{output_flux, OutputFlux};
use super::qrt::{propagate, LinearFunctional};
use super::trapezoid_weights;
use crate::dynamics::{evolve, IntegratorConfig, Model, TimeGrid, Trajectory};
use crate::error::{Error, Result};
use crate::quantum::{Operator, QuantumState, StateDiagnostics};
use crate::C64;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationOptions {
    /// Only integrate delays |τ| ≤ window (ps), mimicking a finite
    /// coincidence window. `None` integrates the whole pulse window.
    pub tau_window: Option<f64>,
    /// Keep the full G²(t₁, t₂) grid in the result.
    pub keep_map: bool,
}

#[derive(Debug, Clone)]
pub struct CorrelationResult {
    pub times: Vec<f64>,
    /// G²(tᵢ, tⱼ), symmetric, when requested.
    pub g2_map: Option<DMatrix<f64>>,
    /// ∫∫ G²(t, t+τ) dt dτ
    pub numerator: f64,
    pub g2_bar: f64,
    pub flux: OutputFlux,
    /// Worst state diagnostics of the underlying trajectory.
    pub diagnostics: StateDiagnostics,
    pub g3_zero: Option<f64>,
}

/// A = β + s·a in the integration frame.
pub(crate) fn output_operator(model: &Model, beta: C64) -> Operator {
    &model.ops.identity * beta + model.a_h() * C64::from(model.output_scale())
}

/// Tr[B†B σ] for B = β + s a, using Tr(a†σ) = Tr(aσ)* for Hermitian σ.
pub(crate) struct IntensityFunctional {
    trace: LinearFunctional,
    a: LinearFunctional,
    n: LinearFunctional,
    s: f64,
}

impl IntensityFunctional {
    pub fn new(model: &Model) -> Self {
        let a = model.a_h();
        Self {
            trace: LinearFunctional::trace_with(&model.ops.identity),
            a: LinearFunctional::trace_with(a),
            n: LinearFunctional::trace_with(&(a.adjoint() * a)),
            s: model.output_scale(),
        }
    }

    pub fn eval(&self, beta: C64, y: &[C64]) -> f64 {
        let tr = self.trace.eval(y).re;
        let ta = self.a.eval(y);
        let tn = self.n.eval(y).re;
        beta.norm_sqr() * tr + 2.0 * self.s * (beta.conj() * ta).re + self.s * self.s * tn
    }
}

/// One QRT row: G²(tᵢ, tⱼ) for j ≥ i.
pub(crate) fn g2_row(
    model: &Model,
    traj: &Trajectory,
    i: usize,
    intensity: &IntensityFunctional,
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>> {
    let t1 = traj.times[i];
    let alpha = traj.alpha[i];
    let a = output_operator(model, model.classical_output(t1, alpha));
    let sigma = &a * traj.states[i].matrix() * a.adjoint();
    let times = &traj.times[i..];
    let mut row = vec![0.0; times.len()];
    propagate(model, &sigma, alpha, t1, times, cfg, |j, t, y, al, scale| {
        row[j] = scale * intensity.eval(model.classical_output(t, al), y);
    })?;
    Ok(row)
}

/// Time-integrated ḡ²(0) of the reflected pulse:
///
/// ḡ²(0) = ∫∫ G²(t, t+τ) dt dτ / (∫ ⟨b_out†b_out⟩ dt)²,
///
/// with the τ < 0 half folded onto τ > 0 by symmetry.
pub fn g2_pulsed(model: &Model, grid: &TimeGrid, cfg: &IntegratorConfig, opts: &CorrelationOptions) -> Result<CorrelationResult> {
    let traj = evolve(model, &QuantumState::ground(model.space()), grid, cfg)?;
    g2_from_trajectory(model, &traj, cfg, opts)
}

pub(crate) fn g2_from_trajectory(
    model: &Model,
    traj: &Trajectory,
    cfg: &IntegratorConfig,
    opts: &CorrelationOptions,
) -> Result<CorrelationResult> {
    let flux = output_flux(traj, model);
    let n = traj.times.len();
    let h = traj.times[1] - traj.times[0];
    let intensity = IntensityFunctional::new(model);

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| g2_row(model, traj, i, &intensity, cfg))
        .collect::<Result<_>>()?;

    let max_lag = opts
        .tau_window
        .map(|w| ((w / h).floor() as usize).min(n - 1))
        .unwrap_or(n - 1);
    let outer = trapezoid_weights(n, h);
    let mut numerator = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let len = row.len().min(max_lag + 1);
        let inner: f64 = trapezoid_weights(len, h).iter().zip(row).map(|(w, g)| w * g).sum();
        numerator += outer[i] * 2.0 * inner;
    }

    let norm = flux.n_out * flux.n_out;
    if norm > 0.0 && numerator < -1e-6 * norm {
        return Err(Error::NegativeCorrelation { value: numerator / norm });
    }
    let g2_bar = if norm > 0.0 { (numerator / norm).max(0.0) } else { 0.0 };

    let g2_map = opts.keep_map.then(|| {
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            for (k, &g) in row.iter().enumerate() {
                m[(i, i + k)] = g;
                m[(i + k, i)] = g;
            }
        }
        m
    });

    Ok(CorrelationResult {
        times: traj.times.clone(),
        g2_map,
        numerator,
        g2_bar,
        flux,
        diagnostics: traj.worst,
        g3_zero: None,
    })
}
