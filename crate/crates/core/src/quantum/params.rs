use crate::error::{invalid, Result};
use crate::units::rate;
use serde::{Deserialize, Serialize};

/// Physical constants of the QD–micropillar device.
///
/// Energies are in µeV. The defaults describe the main device: g = 19,
/// κ = 90, γ_sp = 0.6, γ* = 0.03, Δ_FSS = 3, θ = 15°, η_top = 0.64,
/// η_in = 0.95, 70 µeV H/V mode splitting and an 82 MHz laser.
///
/// Of the total cavity damping, 64 % escapes through the top mirror, 10 %
/// through the bottom mirror and 26 % through the lateral ridges. Only the top
/// fraction (`eta_top`) enters the detected field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceParams {
    /// QD–cavity coupling ħg.
    pub g: f64,
    /// Total cavity damping ħκ (energy decay rate).
    pub kappa: f64,
    /// Spontaneous emission into non-cavity modes ħγ_sp.
    pub gamma_sp: f64,
    /// Pure dephasing ħγ*.
    pub gamma_star: f64,
    /// Fine-structure splitting ω_X − ω_Y.
    pub delta_fss: f64,
    /// Angle between QD and cavity axes (rad).
    pub theta: f64,
    /// Top-mirror output coupling fraction.
    pub eta_top: f64,
    /// Spatial overlap between the incident field and the cavity mode.
    pub eta_in: f64,
    /// V-mode energy minus H-mode energy.
    pub cavity_mode_splitting: f64,
    /// Energy of the H-projected exciton line relative to the H cavity mode.
    pub qd_detuning: f64,
    /// Laser photon energy (eV), used for power conversion only.
    pub omega_laser: f64,
    /// Laser repetition rate (Hz).
    pub rep_rate: f64,
    /// Add the mode-mismatched fraction (1 − η_in) of the incident field back
    /// to the detected field as a coherent background.
    pub uncoupled_background: bool,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            g: 19.0,
            kappa: 90.0,
            gamma_sp: 0.6,
            gamma_star: 0.03,
            delta_fss: 3.0,
            theta: 15f64.to_radians(),
            eta_top: 0.64,
            eta_in: 0.95,
            cavity_mode_splitting: 70.0,
            qd_detuning: 0.0,
            omega_laser: 1.34,
            rep_rate: 82e6,
            uncoupled_background: false,
        }
    }
}

impl DeviceParams {
    /// Second device used for the pulse-length study: g = 19, κ = 100,
    /// γ = γ_sp/2 + γ* = 0.5, Δ_FSS = 10, θ = 20°, η_top = 0.635.
    pub fn second_device() -> Self {
        Self {
            g: 19.0,
            kappa: 100.0,
            gamma_sp: 0.6,
            gamma_star: 0.2,
            delta_fss: 10.0,
            theta: 20f64.to_radians(),
            eta_top: 0.635,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("g", self.g),
            ("gamma_sp", self.gamma_sp),
            ("gamma_star", self.gamma_star),
        ];
        for (field, value) in non_negative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(invalid(field, format!("must be a finite rate >= 0, got {value}")));
            }
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(invalid("kappa", format!("must be > 0, got {}", self.kappa)));
        }
        for (field, value) in [("eta_top", self.eta_top), ("eta_in", self.eta_in)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(invalid(field, format!("must lie in [0, 1], got {value}")));
            }
        }
        for (field, value) in [
            ("delta_fss", self.delta_fss),
            ("theta", self.theta),
            ("cavity_mode_splitting", self.cavity_mode_splitting),
            ("qd_detuning", self.qd_detuning),
        ] {
            if !value.is_finite() {
                return Err(invalid(field, "must be finite"));
            }
        }
        if !(self.omega_laser > 0.0) {
            return Err(invalid("omega_laser", "photon energy must be > 0"));
        }
        if !(self.rep_rate > 0.0) {
            return Err(invalid("rep_rate", "repetition rate must be > 0"));
        }
        Ok(())
    }

    /// Total exciton dephasing γ = γ_sp/2 + γ* (µeV).
    pub fn gamma_total(&self) -> f64 {
        self.gamma_sp / 2.0 + self.gamma_star
    }

    /// Cavity photon lifetime 1/κ (ps).
    pub fn cavity_lifetime(&self) -> f64 {
        1.0 / rate(self.kappa)
    }

    /// Weak-excitation estimate of the exciton lifetime (ps) including the
    /// Purcell-enhanced decay into the resonant H mode.
    pub fn exciton_lifetime_estimate(&self) -> f64 {
        let k = rate(self.kappa);
        let g = rate(self.g);
        let d = rate(self.qd_detuning);
        let purcell = 4.0 * g * g * k / (k * k + 4.0 * d * d);
        1.0 / (rate(self.gamma_sp) + purcell)
    }
}
