use crate::correlations::{g2_pulsed, g3_zero_pulsed, output_flux, CorrelationOptions};
use crate::dynamics::{converge_truncation, evolve, DriveSpec, Frame, IntegratorConfig, Model, TimeGrid};
use crate::error::{invalid, Result};
use crate::quantum::{DeviceParams, HilbertSpace, QuantumState, StateDiagnostics};
use crate::statistics::decompose_output;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SWEEP_CSV_HEADER: &str = "n_in,R,g2,mu_qd,mu_alpha";

/// Reference for the reflectivity R = n_out / n_ref.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// n_ref = η_in·n_in, the light coupled to the device mode
    #[default]
    Coupled,
    /// n_ref = n_in
    Incident,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulsedConfig {
    /// Intensity FWHM (ps).
    pub tau: f64,
    /// Laser detuning from the H cavity mode (µeV).
    pub laser_detuning: f64,
    /// Output grid step (ps) of the two-time integral.
    pub dt: f64,
    /// Fixed (n_h, n_v); `None` converges the truncation on n_out per point.
    pub truncation: Option<(usize, usize)>,
    pub truncation_start: (usize, usize),
    pub frame: Frame,
    pub integrator: IntegratorConfig,
    pub correlation: CorrelationOptions,
    pub compute_g2: bool,
    /// Grid step for ḡ³(0,0); `None` skips it.
    pub g3_dt: Option<f64>,
    pub normalization: Normalization,
}

impl Default for PulsedConfig {
    fn default() -> Self {
        Self {
            tau: 125.0,
            laser_detuning: 0.0,
            dt: 10.0,
            truncation: None,
            truncation_start: (2, 2),
            frame: Frame::Displaced,
            integrator: IntegratorConfig::default(),
            correlation: CorrelationOptions::default(),
            compute_g2: true,
            g3_dt: None,
            normalization: Normalization::Coupled,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n_in: f64,
    pub reflectivity: f64,
    pub n_out: f64,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub mu_qd: Option<f64>,
    pub mu_alpha: Option<f64>,
    pub truncation: (usize, usize),
    pub diagnostics: StateDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub n_in: f64,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub r_max: f64,
    pub r_min: f64,
    /// (R_max − R_min) / R_min
    pub contrast: f64,
    /// n_in where R crosses (R_max + R_min)/2, interpolated in log n_in.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub tau: f64,
    pub points: Vec<SweepPoint>,
    pub failures: Vec<PointFailure>,
}

fn n_out_at(params: &DeviceParams, drive: DriveSpec, cfg: &PulsedConfig, space: HilbertSpace) -> Result<f64> {
    let model = Model::new(*params, drive, cfg.laser_detuning, space, cfg.frame)?;
    let grid = TimeGrid::for_pulse(params, &drive, cfg.dt)?;
    let traj = evolve(&model, &QuantumState::ground(space), &grid, &cfg.integrator)?;
    Ok(output_flux(&traj, &model).n_out)
}

/// Reflectivity, ḡ²(0) and optionally ḡ³(0,0) for one pulse of mean
/// photon number `n_in`.
pub fn pulsed_point(params: &DeviceParams, n_in: f64, cfg: &PulsedConfig) -> Result<SweepPoint> {
    if !(n_in > 0.0) {
        return Err(invalid("n_in", "must be positive"));
    }
    let drive = DriveSpec::pulse(n_in, cfg.tau);
    drive.validate()?;
    let (nh, nv) = match cfg.truncation {
        Some(t) => t,
        None => converge_truncation(
            |h, v| n_out_at(params, drive, cfg, HilbertSpace::new(h, v)?),
            cfg.truncation_start,
        )?,
    };
    let space = HilbertSpace::new(nh, nv)?;
    let model = Model::new(*params, drive, cfg.laser_detuning, space, cfg.frame)?;
    let grid = TimeGrid::for_pulse(params, &drive, cfg.dt)?;
    let reference = match cfg.normalization {
        Normalization::Coupled => params.eta_in * n_in,
        Normalization::Incident => n_in,
    };

    let (n_out, g2, diagnostics) = if cfg.compute_g2 {
        let c = g2_pulsed(&model, &grid, &cfg.integrator, &cfg.correlation)?;
        (c.flux.n_out, Some(c.g2_bar), c.diagnostics)
    } else {
        let traj = evolve(&model, &QuantumState::ground(space), &grid, &cfg.integrator)?;
        (output_flux(&traj, &model).n_out, None, traj.worst)
    };
    let g3 = match cfg.g3_dt {
        Some(dt) => {
            let coarse = TimeGrid::for_pulse(params, &drive, dt)?;
            Some(g3_zero_pulsed(&model, &coarse, &cfg.integrator)?.g3_bar)
        }
        None => None,
    };
    let decomposition = match g2 {
        Some(g) if n_out > 0.0 => Some(decompose_output(n_out, g)?),
        _ => None,
    };
    Ok(SweepPoint {
        n_in,
        reflectivity: n_out / reference,
        n_out,
        g2,
        g3,
        mu_qd: decomposition.map(|d| d.mu_qd),
        mu_alpha: decomposition.map(|d| d.mu_alpha),
        truncation: (nh, nv),
        diagnostics,
    })
}

/// Runs [`pulsed_point`] over a sorted list of input photon numbers. Points
/// that fail are reported individually.
pub fn pulsed_sweep(params: &DeviceParams, n_in: &[f64], cfg: &PulsedConfig) -> Result<SweepResult> {
    params.validate()?;
    if n_in.is_empty() {
        return Err(invalid("n_in", "empty sweep"));
    }
    if n_in.iter().any(|&n| !(n > 0.0)) {
        return Err(invalid("n_in", "must be positive"));
    }
    if n_in.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("n_in", "must be sorted"));
    }
    let results: Vec<_> = n_in.par_iter().map(|&n| (n, pulsed_point(params, n, cfg))).collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (n, r) in results {
        match r {
            Ok(p) => points.push(p),
            Err(e) => {
                log::error!("n_in = {n}: {e}");
                failures.push(PointFailure { n_in: n, error: e.to_string() });
            }
        }
    }
    Ok(SweepResult { tau: cfg.tau, points, failures })
}

impl SweepResult {
    pub fn summary(&self) -> Option<SweepSummary> {
        let r: Vec<f64> = self.points.iter().map(|p| p.reflectivity).collect();
        if r.is_empty() {
            return None;
        }
        let r_max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let r_min = r.iter().copied().fold(f64::INFINITY, f64::min);
        let mid = 0.5 * (r_max + r_min);
        let threshold = self.points.windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            if a.reflectivity >= mid && b.reflectivity < mid {
                let f = (a.reflectivity - mid) / (a.reflectivity - b.reflectivity);
                Some((a.n_in.ln() + f * (b.n_in.ln() - a.n_in.ln())).exp())
            } else {
                None
            }
        });
        Some(SweepSummary { r_max, r_min, contrast: (r_max - r_min) / r_min, threshold })
    }

    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.unwrap_or(f64::NAN);
        let mut out = format!("{SWEEP_CSV_HEADER}\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.n_in,
                p.reflectivity,
                opt(p.g2),
                opt(p.mu_qd),
                opt(p.mu_alpha)
            ));
        }
        out
    }
}
