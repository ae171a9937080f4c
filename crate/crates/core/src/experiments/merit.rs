use crate::error::{invalid, Result};
use crate::quantum::DeviceParams;
use crate::units::EV_IN_J;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiguresOfMerit {
    /// C = g²/(κγ)
    pub cooperativity: f64,
    /// F_P = 2C
    pub purcell: f64,
    /// β = F_P/(F_P + 1)
    pub beta: f64,
    /// n_c = γ_sp²/(8g²)
    pub n_c: f64,
    /// γ = γ_sp/2 + γ* (µeV)
    pub gamma_total: f64,
}

/// ⟨n_in⟩ = P / (Γ_rep ħω) for power in W, repetition rate in Hz and photon
/// energy in eV.
pub fn photons_per_pulse(power: f64, rep_rate: f64, omega_laser: f64) -> Result<f64> {
    if !(rep_rate > 0.0) {
        return Err(invalid("rep_rate", "must be positive"));
    }
    if !(omega_laser > 0.0) {
        return Err(invalid("omega_laser", "must be positive"));
    }
    if !(power >= 0.0) {
        return Err(invalid("power", "must be non-negative"));
    }
    Ok(power / (rep_rate * omega_laser * EV_IN_J))
}

pub fn figures_of_merit(params: &DeviceParams) -> FiguresOfMerit {
    let gamma = params.gamma_total();
    let c = params.g * params.g / (params.kappa * gamma);
    let fp = 2.0 * c;
    FiguresOfMerit {
        cooperativity: c,
        purcell: fp,
        beta: fp / (fp + 1.0),
        n_c: if params.g > 0.0 { params.gamma_sp.powi(2) / (8.0 * params.g * params.g) } else { f64::INFINITY },
        gamma_total: gamma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn photon_number_calibration() {
        assert_eq!(photons_per_pulse(0.0, 82e6, 1.34).unwrap(), 0.0);
        let n = photons_per_pulse(17.6e-12, 82e6, 1.34).unwrap();
        assert!((n - 1.0).abs() < 0.01, "{n}");
        let n2 = photons_per_pulse(35.2e-12, 82e6, 1.34).unwrap();
        assert!((n2 - 2.0 * n).abs() < 1e-15);
        assert!(photons_per_pulse(1e-12, 0.0, 1.34).is_err());
    }

    #[test]
    fn default_device() {
        let f = figures_of_merit(&DeviceParams::default());
        assert!((f.n_c - 0.36 / 2888.0).abs() < 1e-15);
        assert!((f.n_c - 1.25e-4).abs() < 5e-7);
        assert!((f.cooperativity - 361.0 / 29.7).abs() < 1e-12);
        assert_eq!(f.purcell, 2.0 * f.cooperativity);
        assert!((f.beta - 0.960).abs() < 5e-4);
    }

    #[test]
    fn uncoupled_dot() {
        let f = figures_of_merit(&DeviceParams { g: 0.0, ..Default::default() });
        assert_eq!(f.cooperativity, 0.0);
        assert_eq!(f.beta, 0.0);
    }
}
