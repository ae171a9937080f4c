use crate::correlations::steady_reflectivity;
use crate::dynamics::{steady_state, DriveSpec, Frame, Model};
use crate::error::{invalid, Result};
use crate::quantum::{DeviceParams, HilbertSpace, StateDiagnostics};
use crate::units::photon_flux;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CwConfig {
    /// (n_h, n_v) Fock truncation
    pub truncation: (usize, usize),
    pub frame: Frame,
}

impl Default for CwConfig {
    fn default() -> Self {
        Self { truncation: (3, 2), frame: Frame::Displaced }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CwSpectrum {
    /// Laser detuning from the H cavity mode (µeV).
    pub detuning: Vec<f64>,
    pub reflectivity: Vec<f64>,
    /// Worst steady state over the grid.
    pub diagnostics: StateDiagnostics,
}

impl CwSpectrum {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("detuning_uev,R\n");
        for (d, r) in self.detuning.iter().zip(&self.reflectivity) {
            out.push_str(&format!("{d},{r}\n"));
        }
        out
    }
}

/// Steady-state reflectivity versus laser detuning for a CW power in W.
pub fn cw_spectrum(params: &DeviceParams, power: f64, detunings: &[f64], cfg: &CwConfig) -> Result<CwSpectrum> {
    if !(power >= 0.0) {
        return Err(invalid("power", "must be non-negative"));
    }
    let space = HilbertSpace::new(cfg.truncation.0, cfg.truncation.1)?;
    let drive = DriveSpec::Cw { photon_flux: photon_flux(power, params.omega_laser) };
    let points = detunings
        .par_iter()
        .map(|&d| {
            let model = Model::new(*params, drive, d, space, cfg.frame)?;
            let ss = steady_state(&model)?;
            Ok((steady_reflectivity(&model, &ss), ss.state.diagnostics()))
        })
        .collect::<Result<Vec<_>>>()?;
    let reflectivity = points.iter().map(|p| p.0).collect();
    let diagnostics = points.iter().map(|p| p.1).reduce(StateDiagnostics::worst).unwrap_or_default();
    Ok(CwSpectrum { detuning: detunings.to_vec(), reflectivity, diagnostics })
}
