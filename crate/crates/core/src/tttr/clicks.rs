use crate::error::{invalid, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Pulses simulated per independently seeded RNG stream.
const BLOCK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClickRecord {
    /// Detector 1, 2 or 3.
    pub channel: u8,
    /// ps since acquisition start
    pub timestamp: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    /// Probability for a photon to reach detector 1, 2, 3.
    pub arm_probabilities: [f64; 3],
    pub efficiency: [f64; 3],
    /// ps; clicks closer than this to the previous click on a channel are lost
    pub dead_time: u64,
    /// Mean of the exponential emission delay (ps).
    pub emission_time_constant: f64,
    /// ps
    pub rep_period: u64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self::cascade(1.0 / 3.0, 0.5)
    }
}

impl DetectorConfig {
    /// Two beam splitters in series: detector 1 takes the fraction `first`,
    /// the rest is divided `second : 1 − second` between detectors 2 and 3.
    pub fn cascade(first: f64, second: f64) -> Self {
        let rest = 1.0 - first;
        Self {
            arm_probabilities: [first, rest * second, rest * (1.0 - second)],
            efficiency: [1.0; 3],
            dead_time: 0,
            emission_time_constant: 125.0,
            rep_period: 12_200,
        }
    }

    /// A single balanced beam splitter on detectors 1 and 2.
    pub fn two_detector() -> Self {
        Self::cascade(0.5, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.arm_probabilities.iter().sum();
        if self.arm_probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) || sum > 1.0 + 1e-12 {
            return Err(invalid("arm_probabilities", "must lie in [0, 1] and sum to at most 1"));
        }
        if self.efficiency.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(invalid("efficiency", "must lie in [0, 1]"));
        }
        if !(self.emission_time_constant >= 0.0) || !self.emission_time_constant.is_finite() {
            return Err(invalid("emission_time_constant", "must be non-negative"));
        }
        if self.rep_period == 0 {
            return Err(invalid("rep_period", "must be positive"));
        }
        Ok(())
    }

    /// Probability that a photon produces a click on some detector.
    pub fn detection_probability(&self) -> f64 {
        self.arm_probabilities.iter().zip(&self.efficiency).map(|(p, e)| p * e).sum()
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() || p.iter().any(|x| !(*x >= 0.0)) {
        return Err(invalid("distribution", "probabilities must be non-negative"));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Unnormalized { sum });
    }
    Ok(())
}

fn simulate_block(cdf: &[f64], cfg: &DetectorConfig, start: u64, end: u64, seed: u64, stream: u64) -> Vec<ClickRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let jitter = (cfg.emission_time_constant > 0.0).then(|| Exp::new(1.0 / cfg.emission_time_constant).expect("positive rate"));
    let mut arm_cdf = [0.0; 3];
    let mut acc = 0.0;
    for (c, p) in arm_cdf.iter_mut().zip(&cfg.arm_probabilities) {
        acc += p;
        *c = acc;
    }
    let mut out = Vec::new();
    for pulse in start..end {
        let u: f64 = rng.random();
        let k = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
        for _ in 0..k {
            let route: f64 = rng.random();
            let Some(arm) = arm_cdf.iter().position(|&c| route < c) else {
                continue;
            };
            if rng.random::<f64>() >= cfg.efficiency[arm] {
                continue;
            }
            let delay = jitter.map_or(0.0, |d| d.sample(&mut rng));
            out.push(ClickRecord { channel: arm as u8 + 1, timestamp: pulse * cfg.rep_period + delay.round() as u64 });
        }
    }
    out
}

fn apply_dead_time(clicks: Vec<ClickRecord>, dead_time: u64) -> Vec<ClickRecord> {
    if dead_time == 0 {
        return clicks;
    }
    let mut last: [Option<u64>; 3] = [None; 3];
    clicks
        .into_iter()
        .filter(|c| {
            let slot = &mut last[c.channel as usize - 1];
            match *slot {
                Some(t) if c.timestamp < t + dead_time => false,
                _ => {
                    *slot = Some(c.timestamp);
                    true
                }
            }
        })
        .collect()
}

/// Detector clicks for `n_pulses` pulses whose photon numbers follow
/// `distribution[k] = P(k)`. The stream is sorted by time, then channel, and
/// depends only on the inputs and `seed`.
pub fn simulate_clicks(distribution: &[f64], cfg: &DetectorConfig, n_pulses: u64, seed: u64) -> Result<Vec<ClickRecord>> {
    check_distribution(distribution)?;
    cfg.validate()?;
    let mut cdf = Vec::with_capacity(distribution.len());
    let mut acc = 0.0;
    for p in distribution {
        acc += p;
        cdf.push(acc);
    }
    let blocks = n_pulses.div_ceil(BLOCK);
    let parts: Vec<Vec<ClickRecord>> = (0..blocks)
        .into_par_iter()
        .map(|b| simulate_block(&cdf, cfg, b * BLOCK, ((b + 1) * BLOCK).min(n_pulses), seed, b))
        .collect();
    let mut clicks: Vec<ClickRecord> = parts.into_iter().flatten().collect();
    clicks.sort_unstable_by_key(|c| (c.timestamp, c.channel));
    Ok(apply_dead_time(clicks, cfg.dead_time))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_gives_nothing() {
        let c = simulate_clicks(&[1.0], &DetectorConfig::default(), 10_000, 1).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            simulate_clicks(&[0.5, 0.4], &DetectorConfig::default(), 10, 1),
            Err(Error::Unnormalized { .. })
        ));
        let bad = DetectorConfig { arm_probabilities: [0.6, 0.6, 0.0], ..Default::default() };
        assert!(simulate_clicks(&[1.0], &bad, 10, 1).is_err());
        let bad = DetectorConfig { rep_period: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cascade_is_balanced() {
        let c = DetectorConfig::default();
        for p in c.arm_probabilities {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn seeded_and_ordered() {
        let p = [0.5, 0.3, 0.2];
        let a = simulate_clicks(&p, &DetectorConfig::default(), 200_000, 7).unwrap();
        let b = simulate_clicks(&p, &DetectorConfig::default(), 200_000, 7).unwrap();
        let c = simulate_clicks(&p, &DetectorConfig::default(), 200_000, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
        assert!(a.iter().all(|c| (1..=3).contains(&c.channel)));
    }

    #[test]
    fn dead_time_drops_close_clicks() {
        let cfg = DetectorConfig { dead_time: 1_000_000, ..Default::default() };
        let c = simulate_clicks(&[0.0, 1.0], &cfg, 1000, 3).unwrap();
        for ch in 1..=3u8 {
            let t: Vec<u64> = c.iter().filter(|c| c.channel == ch).map(|c| c.timestamp).collect();
            assert!(t.windows(2).all(|w| w[1] - w[0] >= 1_000_000));
        }
    }
}
