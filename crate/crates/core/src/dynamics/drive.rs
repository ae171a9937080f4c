use crate::error::{invalid, Result};
use crate::quantum::DeviceParams;
use crate::units::rate;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// Classical H-polarized drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveSpec {
    /// Continuous wave; `photon_flux` in photons per second (P/ħω).
    Cw { photon_flux: f64 },
    /// Gaussian wavepacket carrying `n_in` photons on average, with
    /// intensity FWHM `tau` (ps) centered at `t0` (ps).
    GaussianPulse { n_in: f64, tau: f64, t0: f64 },
}

impl DriveSpec {
    pub fn pulse(n_in: f64, tau: f64) -> Self {
        DriveSpec::GaussianPulse { n_in, tau, t0: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DriveSpec::Cw { photon_flux } => {
                if !(photon_flux >= 0.0) {
                    return Err(invalid("photon_flux", "must be >= 0"));
                }
            }
            DriveSpec::GaussianPulse { n_in, tau, t0 } => {
                if !(n_in >= 0.0) {
                    return Err(invalid("n_in", "must be >= 0"));
                }
                if !(tau > 0.0) {
                    return Err(invalid("tau", "must be > 0"));
                }
                if !t0.is_finite() {
                    return Err(invalid("t0", "must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn is_cw(&self) -> bool {
        matches!(self, DriveSpec::Cw { .. })
    }
}

/// Incident amplitude ⟨b_in⟩(t) in ps^(-1/2), before mode-overlap losses.
///
/// For a pulse, |⟨b_in⟩|² integrates to `n_in` over time.
pub fn input_amplitude(drive: &DriveSpec, t: f64) -> f64 {
    match *drive {
        DriveSpec::Cw { photon_flux } => (photon_flux * 1e-12).sqrt(),
        DriveSpec::GaussianPulse { n_in, tau, t0 } => {
            let dt = t - t0;
            n_in.sqrt() * (4.0 * LN_2 / (PI * tau * tau)).powf(0.25) * (-2.0 * LN_2 * dt * dt / (tau * tau)).exp()
        }
    }
}

/// Classical Rabi frequency Ω(t) = √(η_top κ) · √η_in · ⟨b_in⟩(t) in ps⁻¹.
pub fn rabi_amplitude(drive: &DriveSpec, params: &DeviceParams, t: f64) -> f64 {
    (params.eta_top * rate(params.kappa) * params.eta_in).sqrt() * input_amplitude(drive, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn zero_photons_zero_drive() {
        let d = DriveSpec::pulse(0.0, 125.0);
        let p = DeviceParams::default();
        for t in [-200.0, 0.0, 13.0] {
            assert_eq!(rabi_amplitude(&d, &p, t), 0.0);
        }
    }

    #[test]
    fn pulse_normalization() {
        for tau in [20.0, 55.0, 125.0, 400.0] {
            let d = DriveSpec::pulse(1.0, tau);
            let n = simpson(|t| input_amplitude(&d, t).powi(2), -8.0 * tau, 8.0 * tau, 4000);
            assert!((n - 1.0).abs() < 1e-6, "tau={tau}: {n}");
        }
        // coupled intensity carries the η_in fraction
        let p = DeviceParams { eta_in: 0.8, ..Default::default() };
        let d = DriveSpec::pulse(2.0, 125.0);
        let s = p.eta_top * rate(p.kappa);
        let n = simpson(|t| rabi_amplitude(&d, &p, t).powi(2) / s, -1000.0, 1000.0, 4000);
        assert!((n - 0.8 * 2.0).abs() < 1e-6);
    }

    #[test]
    fn pulse_peak() {
        let d = DriveSpec::pulse(1.0, 125.0);
        let peak = input_amplitude(&d, 0.0).powi(2);
        let expected = (4.0 * LN_2 / (PI * 125.0f64.powi(2))).sqrt();
        assert!((peak - expected).abs() < 1e-15);
        assert!((peak - 7.51e-3).abs() < 1e-5);
    }
}
