use super::cw::{cw_spectrum, CwConfig};
use super::simplex::{nelder_mead, SimplexOptions};
use crate::error::{invalid, Result};
use crate::quantum::DeviceParams;
use serde::{Deserialize, Serialize};

/// Device parameters that can be adjusted to a measured spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitParam {
    G,
    Kappa,
    GammaSp,
    GammaStar,
    DeltaFss,
    Theta,
    EtaTop,
    QdDetuning,
}

impl FitParam {
    pub fn get(self, p: &DeviceParams) -> f64 {
        match self {
            Self::G => p.g,
            Self::Kappa => p.kappa,
            Self::GammaSp => p.gamma_sp,
            Self::GammaStar => p.gamma_star,
            Self::DeltaFss => p.delta_fss,
            Self::Theta => p.theta,
            Self::EtaTop => p.eta_top,
            Self::QdDetuning => p.qd_detuning,
        }
    }

    pub fn set(self, p: &mut DeviceParams, v: f64) {
        match self {
            Self::G => p.g = v,
            Self::Kappa => p.kappa = v,
            Self::GammaSp => p.gamma_sp = v,
            Self::GammaStar => p.gamma_star = v,
            Self::DeltaFss => p.delta_fss = v,
            Self::Theta => p.theta = v,
            Self::EtaTop => p.eta_top = v,
            Self::QdDetuning => p.qd_detuning = v,
        }
    }

    /// Physical search box.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Self::G => (0.0, 200.0),
            Self::Kappa => (1.0, 1000.0),
            Self::GammaSp => (1e-3, 20.0),
            Self::GammaStar => (0.0, 20.0),
            Self::DeltaFss => (0.0, 100.0),
            Self::Theta => (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
            Self::EtaTop => (0.0, 1.0),
            Self::QdDetuning => (-200.0, 200.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitOptions {
    /// CW power of the measurement (W).
    pub power: f64,
    pub cw: CwConfig,
    pub simplex: SimplexOptions,
    /// Initial simplex step relative to each starting value.
    pub initial_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            power: 14e-12,
            cw: CwConfig { truncation: (2, 2), ..CwConfig::default() },
            simplex: SimplexOptions::default(),
            initial_step: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: DeviceParams,
    /// Σ (R_model − R_measured)²
    pub residual: f64,
    pub initial_residual: f64,
    /// √(residual / N)
    pub rms: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn sum_squares(params: &DeviceParams, detuning: &[f64], measured: &[f64], opts: &FitOptions) -> f64 {
    if params.validate().is_err() {
        return f64::INFINITY;
    }
    match cw_spectrum(params, opts.power, detuning, &opts.cw) {
        Ok(s) => s.reflectivity.iter().zip(measured).map(|(m, r)| (m - r).powi(2)).sum(),
        Err(_) => f64::INFINITY,
    }
}

/// Least-squares adjustment of the `free` parameters to a measured CW
/// reflectivity spectrum `(detuning µeV, R)`.
pub fn fit_cw_spectrum(
    measured: &[(f64, f64)],
    initial: &DeviceParams,
    free: &[FitParam],
    opts: &FitOptions,
) -> Result<FitResult> {
    initial.validate()?;
    if measured.len() < 5 * free.len() {
        return Err(invalid("measured", "need at least five points per free parameter"));
    }
    if measured.is_empty() {
        return Err(invalid("measured", "empty spectrum"));
    }
    let detuning: Vec<f64> = measured.iter().map(|m| m.0).collect();
    let values: Vec<f64> = measured.iter().map(|m| m.1).collect();
    let initial_residual = sum_squares(initial, &detuning, &values, opts);

    let x0: Vec<f64> = free.iter().map(|p| p.get(initial)).collect();
    let (lower, upper): (Vec<f64>, Vec<f64>) = free.iter().map(|p| p.bounds()).unzip();
    let step: Vec<f64> = x0
        .iter()
        .zip(&lower)
        .zip(&upper)
        .map(|((x, lo), hi)| {
            let s = opts.initial_step * x.abs();
            if s > 0.0 {
                s
            } else {
                opts.initial_step * (hi - lo) * 0.1
            }
        })
        .collect();
    let with = |x: &[f64]| {
        let mut p = *initial;
        for (fp, &v) in free.iter().zip(x) {
            fp.set(&mut p, v);
        }
        p
    };

    let r = nelder_mead(|x| sum_squares(&with(x), &detuning, &values, opts), &x0, &step, &lower, &upper, &opts.simplex);
    let (params, residual) = if r.f <= initial_residual { (with(&r.x), r.f) } else { (*initial, initial_residual) };
    if !r.converged {
        log::warn!("spectrum fit stopped after {} evaluations without converging", r.evals);
    }
    Ok(FitResult {
        params,
        residual,
        initial_residual,
        rms: (residual / measured.len() as f64).sqrt(),
        evaluations: r.evals,
        converged: r.converged,
    })
}
