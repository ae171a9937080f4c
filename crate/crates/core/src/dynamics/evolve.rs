use super::drive::DriveSpec;
use super::integrator::{Dopri5, IntegrationStats, Tolerances};
use super::model::{Frame, Model};
use crate::error::{invalid, Result};
use crate::quantum::{state::diagnostics, DeviceParams, HilbertSpace, Operator, QuantumState, StateDiagnostics};
use crate::quantum::state::trace_product;
use crate::C64;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Uniform output grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if !(t_start < t_end) {
            return Err(invalid("t_end", "must exceed t_start"));
        }
        if n_points < 2 {
            return Err(invalid("n_points", "need at least two output times"));
        }
        Ok(Self { t_start, t_end, n_points })
    }

    /// Grid with spacing at most `dt` covering [start, end].
    pub fn with_step(t_start: f64, t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(invalid("dt", "must be > 0"));
        }
        let n = ((t_end - t_start) / dt).ceil() as usize + 1;
        Self::new(t_start, t_end, n.max(2))
    }

    /// Window [t0 − 4τ, t0 + 4τ + tail] where the tail spans 14 lifetimes of
    /// the slowest of the cavity and the Purcell-enhanced exciton, so that the
    /// residual excitation has decayed below 1e-6 of its peak. An uncoupled
    /// dot is never excited, so only the cavity counts then.
    pub fn for_pulse(params: &DeviceParams, drive: &DriveSpec, dt: f64) -> Result<Self> {
        let DriveSpec::GaussianPulse { tau, t0, .. } = *drive else {
            return Err(invalid("drive", "pulse window requires a Gaussian pulse"));
        };
        let exciton = if params.g > 0.0 { params.exciton_lifetime_estimate() } else { 0.0 };
        let slowest = params.cavity_lifetime().max(exciton);
        Self::with_step(t0 - 4.0 * tau, t0 + 4.0 * tau + 14.0 * slowest, dt)
    }

    pub fn step(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n_points)
            .map(|i| if i + 1 == self.n_points { self.t_end } else { self.t_start + i as f64 * h })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub tol: Tolerances,
    /// Step cap; defaults to the output grid spacing.
    pub h_max: Option<f64>,
    /// Compute the minimum eigenvalue of ρ after every accepted step, not only
    /// at output times.
    pub validate_steps: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            h_max: None,
            validate_steps: false,
        }
    }
}

impl IntegratorConfig {
    pub(crate) fn solver(&self, grid_step: f64, model: &Model) -> Dopri5 {
        Dopri5::new(self.tol, self.h_max.unwrap_or(grid_step.min(model.stable_step())))
    }
}

/// States and H-mode expectations on the output grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub frame: Frame,
    pub times: Vec<f64>,
    /// States in the integration frame.
    pub states: Vec<QuantumState>,
    /// Coherent H-mode amplitude α(t) (zero in the lab frame).
    pub alpha: Vec<C64>,
    /// Lab-frame ⟨a_H⟩(t).
    pub a_h: Vec<C64>,
    /// Lab-frame ⟨a_H†a_H⟩(t).
    pub n_h: Vec<f64>,
    /// Worst diagnostics over all checked states.
    pub worst: StateDiagnostics,
    pub stats: IntegrationStats,
}

impl Trajectory {
    pub fn is_valid(&self) -> bool {
        self.worst.is_valid()
    }

    pub fn expect(&self, op: &Operator) -> Vec<C64> {
        self.states.iter().map(|s| s.expect(op)).collect()
    }
}

pub(crate) fn cheap_diagnostics(y: &[C64], d: usize) -> StateDiagnostics {
    let mut tr = 0.0;
    let mut herm = 0.0f64;
    for i in 0..d {
        tr += y[i + i * d].re;
        for j in i..d {
            herm = herm.max((y[i + j * d] - y[j + i * d].conj()).norm());
        }
    }
    StateDiagnostics {
        hermiticity: herm,
        trace: (tr - 1.0).abs(),
        min_eigenvalue: 0.0,
    }
}

/// Integrates the master equation from `rho0` at `grid.t_start`, with α = 0.
pub fn evolve(model: &Model, rho0: &QuantumState, grid: &TimeGrid, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let space = model.space();
    rho0.validate_in(&space)?;
    let d = space.dim();
    let times = grid.times();
    let mut y0 = rho0.matrix().as_slice().to_vec();
    y0.push(C64::from(0.0));

    let a = model.a_h().clone();
    let n_op = a.adjoint() * &a;
    let mut states = Vec::with_capacity(times.len());
    let mut alpha = Vec::with_capacity(times.len());
    let mut a_h = Vec::with_capacity(times.len());
    let mut n_h = Vec::with_capacity(times.len());
    let worst = std::cell::Cell::new(rho0.diagnostics());

    let solver = cfg.solver(grid.step(), model);
    let (_, stats) = solver.integrate(
        |t, y, dy| model.rhs(t, y, dy),
        grid.t_start,
        y0,
        &times,
        |_, _, y| {
            let rho = DMatrix::from_column_slice(d, d, &y[..d * d]);
            let al = y[d * d];
            let a_frame = trace_product(&a, &rho);
            let n_frame = trace_product(&n_op, &rho).re;
            worst.set(worst.get().worst(diagnostics(&rho)));
            a_h.push(al + a_frame);
            n_h.push(al.norm_sqr() + 2.0 * (al.conj() * a_frame).re + n_frame);
            alpha.push(al);
            states.push(QuantumState::from_matrix(rho).expect("square"));
        },
        |_, y| {
            let diag = if cfg.validate_steps {
                diagnostics(&DMatrix::from_column_slice(d, d, &y[..d * d]))
            } else {
                cheap_diagnostics(y, d)
            };
            worst.set(worst.get().worst(diag));
        },
    )?;

    Ok(Trajectory {
        frame: model.frame,
        times,
        states,
        alpha,
        a_h,
        n_h,
        worst: worst.get(),
        stats,
    })
}

/// Late-time decay rate (ps⁻¹) of the exciton population ⟨Π_ex⟩ after
/// preparing |H, 0, 0⟩ without drive, from a log-linear fit over
/// [t_fit_start, t_end].
pub fn exciton_decay_rate(
    params: &DeviceParams,
    space: HilbertSpace,
    t_fit_start: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let model = Model::new(*params, DriveSpec::Cw { photon_flux: 0.0 }, 0.0, space, Frame::Lab)?;
    let grid = TimeGrid::with_step(0.0, t_end, 1.0)?;
    let rho0 = QuantumState::basis(space, space.excited_h_index());
    let traj = evolve(&model, &rho0, &grid, cfg)?;
    let pop = traj.expect(&model.ops.pi_ex);
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(pop)
        .filter(|(t, p)| **t >= t_fit_start && p.re > 1e-12)
        .map(|(t, p)| (*t, p.re.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(invalid("t_end", "fit window holds fewer than three points"));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx).powi(2)));
    Ok(-sxy / sxx)
}
