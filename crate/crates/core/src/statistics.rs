//! Photon-number statistics of the reflected pulse.
//!
//! The output is modelled as the product of a one-photon mixture emitted by
//! the dot, with generating function (1 − μ_QD) + s·μ_QD, and a coherent
//! component e^{−μ_α(1−s)}. The first three factorial moments fix the
//! populations of the zero to three photon states.

use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};

/// Largest ḡ²(0) above unity attributed to noise rather than to the model.
pub const BUNCHING_TOLERANCE: f64 = 1.05;
const NEGATIVE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub n_out: f64,
    /// Mean number of photons re-emitted by the dot.
    pub mu_qd: f64,
    /// Mean number of coherent photons.
    pub mu_alpha: f64,
}

impl Decomposition {
    /// Single-photon fraction μ_QD / n_out.
    pub fn single_photon_fraction(&self) -> f64 {
        self.mu_qd / self.n_out
    }

    /// A one-photon mixture cannot carry more than one photon on average.
    pub fn exceeds_single_photon(&self) -> bool {
        self.mu_qd > 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonStats {
    pub n_out: f64,
    pub g2: f64,
    pub g3: f64,
    /// P(0..3)
    pub p: [f64; 4],
}

impl PhotonStats {
    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }
}

/// JSON record of one analysed output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub n_out: f64,
    pub g2: f64,
    pub g3: f64,
    pub mu_qd: f64,
    pub mu_alpha: f64,
    pub p: [f64; 4],
    pub poisson_ref: [f64; 4],
}

impl AnalysisRecord {
    pub fn new(n_out: f64, g2: f64, g3: f64) -> Result<Self> {
        let d = decompose_output(n_out, g2)?;
        let stats = reconstruct_fock(n_out, g2, g3)?;
        Ok(Self {
            n_out,
            g2,
            g3,
            mu_qd: d.mu_qd,
            mu_alpha: d.mu_alpha,
            p: stats.p,
            poisson_ref: poisson_reference(n_out),
        })
    }
}

/// ḡ²(0) of the mixture, G″(1)/⟨n⟩².
pub fn forward_g2(mu_qd: f64, mu_alpha: f64) -> Result<f64> {
    if !(mu_qd >= 0.0) || !(mu_alpha >= 0.0) {
        return Err(invalid("mu", "mean photon numbers must be non-negative"));
    }
    let n = mu_qd + mu_alpha;
    if n == 0.0 {
        return Err(invalid("n_out", "no photons"));
    }
    Ok((mu_alpha * mu_alpha + 2.0 * mu_qd * mu_alpha) / (n * n))
}

/// Splits n_out into dot and coherent parts from ḡ²(0).
///
/// Values in (1, 1.05] are treated as noise on a coherent field.
pub fn decompose_output(n_out: f64, g2: f64) -> Result<Decomposition> {
    if !(n_out > 0.0) || !n_out.is_finite() {
        return Err(invalid("n_out", "must be positive"));
    }
    if !(g2 >= 0.0) {
        return Err(invalid("g2", "must be non-negative"));
    }
    if g2 > BUNCHING_TOLERANCE {
        return Err(Error::BunchedLight { g2 });
    }
    if g2 > 1.0 {
        log::warn!("g2 = {g2} above 1, treating output as coherent");
        return Ok(Decomposition { n_out, mu_qd: 0.0, mu_alpha: n_out });
    }
    // 1 − √(1−g) without cancellation for small g
    let root = (1.0 - g2).sqrt();
    let mu_alpha = n_out * g2 / (1.0 + root);
    Ok(Decomposition { n_out, mu_qd: n_out * root, mu_alpha })
}

/// P(0..3) from the first three factorial moments, assuming P(k ≥ 4) = 0.
pub fn reconstruct_fock(n_out: f64, g2: f64, g3: f64) -> Result<PhotonStats> {
    let stats = reconstruct_fock_unchecked(n_out, g2, g3)?;
    for (k, &p) in stats.p.iter().enumerate() {
        if p < -NEGATIVE_SLACK {
            return Err(Error::InconsistentMoments { k, value: p });
        }
    }
    Ok(stats)
}

/// As [`reconstruct_fock`] but keeps negative populations, for diagnostics.
pub fn reconstruct_fock_unchecked(n_out: f64, g2: f64, g3: f64) -> Result<PhotonStats> {
    if !(n_out > 0.0) || !n_out.is_finite() {
        return Err(invalid("n_out", "must be positive"));
    }
    if !g2.is_finite() || !g3.is_finite() {
        return Err(invalid("g", "correlations must be finite"));
    }
    let n = n_out;
    let p3 = g3 * n.powi(3) / 6.0;
    let p2 = (g2 * n * n - 6.0 * p3) / 2.0;
    let p1 = n - 2.0 * p2 - 3.0 * p3;
    let p0 = 1.0 - p1 - p2 - p3;
    Ok(PhotonStats { n_out, g2, g3, p: [p0, p1, p2, p3] })
}

/// e^{−n} nᵏ/k! for k = 0..3.
pub fn poisson_reference(n: f64) -> [f64; 4] {
    let e = (-n).exp();
    [e, e * n, e * n * n / 2.0, e * n.powi(3) / 6.0]
}

/// Moments (n, g2, g3) of an explicit distribution over 0..=kmax photons.
pub fn moments(p: &[f64]) -> (f64, f64, f64) {
    let mut m = [0.0; 3];
    for (k, &pk) in p.iter().enumerate() {
        let k = k as f64;
        m[0] += k * pk;
        m[1] += k * (k - 1.0) * pk;
        m[2] += k * (k - 1.0) * (k - 2.0) * pk;
    }
    let n = m[0];
    (n, m[1] / (n * n), m[2] / n.powi(3))
}
