//! Unit conversions between µeV, ps, W and photon numbers.

/// Reduced Planck constant in µeV·ps.
pub const HBAR: f64 = 658.2119;

/// Elementary charge in C (J per eV).
pub const EV_IN_J: f64 = 1.602_176_634e-19;

/// Converts an energy in µeV to an angular rate in ps⁻¹.
#[inline]
pub fn rate(energy_uev: f64) -> f64 {
    energy_uev / HBAR
}

/// Photon flux in photons per second carried by a beam of `power` watts.
pub fn photon_flux(power: f64, photon_energy_ev: f64) -> f64 {
    power / (photon_energy_ev * EV_IN_J)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_lifetime() {
        // 90 µeV cavity damping -> ~7.3 ps photon lifetime
        let tau = 1.0 / rate(90.0);
        assert!((tau - 7.3135).abs() < 1e-3);
    }
}
