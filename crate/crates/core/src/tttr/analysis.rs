use super::histogram::PeakGrid;
use super::{by_channel, window, ClickRecord, DetectorConfig};
use crate::error::{invalid, Error, Result};
use crate::statistics::reconstruct_fock_unchecked;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeakConfig {
    /// ps
    pub rep_period: u64,
    /// Side of the square (or length of the interval) integrated around each
    /// lattice peak, ps.
    pub window: u64,
    /// Peaks kept on each side of zero delay.
    pub peaks: usize,
    /// Batches for the standard errors.
    pub blocks: usize,
}

impl Default for PeakConfig {
    fn default() -> Self {
        Self { rep_period: 12_200, window: 5_000, peaks: 3, blocks: 20 }
    }
}

impl PeakConfig {
    fn validate(&self) -> Result<()> {
        if self.rep_period == 0 || self.window == 0 || self.window > self.rep_period {
            return Err(invalid("window", "must be positive and no longer than the repetition period"));
        }
        if self.peaks < 2 {
            return Err(invalid("peaks", "need at least two peaks on each side"));
        }
        if self.blocks < 2 {
            return Err(invalid("blocks", "need at least two batches"));
        }
        Ok(())
    }

    fn reach(&self) -> u64 {
        self.peaks as u64 * self.rep_period + self.window / 2
    }

    /// Lattice index of a delay, if it falls inside a peak window.
    fn lattice(&self, tau: i64) -> Option<i64> {
        let t = self.rep_period as i64;
        let m = (tau as f64 / t as f64).round() as i64;
        (m.unsigned_abs() as usize <= self.peaks && 2 * (tau - m * t).unsigned_abs() < self.window)
            .then_some(m)
    }
}

/// Value with a batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    /// |value − target| in standard errors.
    pub fn deviation(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.std_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClickAnalysis {
    pub n_pulses: u64,
    pub clicks: [u64; 3],
    /// Photons per pulse before routing and losses.
    pub mean_photons: Estimate,
    /// From all detector pairs.
    pub g2: Estimate,
    pub g3: Estimate,
    /// P(0..3) from (mean_photons, g2, g3); may be negative.
    pub fock: [Estimate; 4],
    pub g3_peaks: PeakGrid,
}

#[derive(Clone)]
struct Batch {
    clicks: [u64; 3],
    pairs: Vec<f64>,
    triples: Vec<f64>,
}

impl Batch {
    fn new(k: usize) -> Self {
        let w = 2 * k + 1;
        Self { clicks: [0; 3], pairs: vec![0.0; w], triples: vec![0.0; w * w] }
    }

    fn add(&mut self, other: &Batch) {
        for (a, b) in self.clicks.iter_mut().zip(&other.clicks) {
            *a += b;
        }
        for (a, b) in self.pairs.iter_mut().zip(&other.pairs) {
            *a += b;
        }
        for (a, b) in self.triples.iter_mut().zip(&other.triples) {
            *a += b;
        }
    }

    fn g2(&self, k: usize) -> f64 {
        let side: f64 = self.pairs.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v).sum();
        self.pairs[k] / (side / (2 * k) as f64)
    }

    fn g3(&self, k: usize) -> Result<f64> {
        Ok(PeakGrid::from_areas(k, 1, self.triples.clone())?.g3_zero())
    }
}

fn batch_of(t: u64, cfg: &PeakConfig, n_pulses: u64) -> usize {
    let pulse = t / cfg.rep_period;
    ((pulse as u128 * cfg.blocks as u128 / n_pulses.max(1) as u128) as usize).min(cfg.blocks - 1)
}

fn accumulate(chan: &[Vec<u64>; 3], cfg: &PeakConfig, n_pulses: u64) -> Vec<Batch> {
    let k = cfg.peaks;
    let w = 2 * k + 1;
    let reach = cfg.reach();
    let mut batches = vec![Batch::new(k); cfg.blocks];
    for (c, times) in chan.iter().enumerate() {
        for &t in times {
            batches[batch_of(t, cfg, n_pulses)].clicks[c] += 1;
        }
    }
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        for &tb in &chan[b] {
            let batch = &mut batches[batch_of(tb, cfg, n_pulses)];
            let (lo, hi) = window(&chan[a], tb, reach);
            for &ta in &chan[a][lo..hi] {
                if let Some(m) = cfg.lattice(ta as i64 - tb as i64) {
                    batch.pairs[(m + k as i64) as usize] += 1.0;
                }
            }
        }
    }
    let mut rows = Vec::new();
    for &t2 in &chan[1] {
        let (lo1, hi1) = window(&chan[0], t2, reach);
        let (lo3, hi3) = window(&chan[2], t2, reach);
        if lo1 == hi1 || lo3 == hi3 {
            continue;
        }
        rows.clear();
        rows.extend(chan[0][lo1..hi1].iter().filter_map(|&t1| cfg.lattice(t1 as i64 - t2 as i64)));
        if rows.is_empty() {
            continue;
        }
        let batch = &mut batches[batch_of(t2, cfg, n_pulses)];
        for &t3 in &chan[2][lo3..hi3] {
            if let Some(n) = cfg.lattice(t3 as i64 - t2 as i64) {
                for &m in &rows {
                    batch.triples[((m + k as i64) as usize) * w + (n + k as i64) as usize] += 1.0;
                }
            }
        }
    }
    batches
}

fn batch_error(values: &[f64]) -> f64 {
    let b = values.len() as f64;
    let mean = values.iter().sum::<f64>() / b;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1.0);
    (var / b).sqrt()
}

/// ḡ²(0), ḡ³ peak map and photon-number populations of a three-detector
/// click stream recorded over `n_pulses` pulses. Standard errors are batch
/// means over contiguous blocks of pulses.
pub fn analyze_clicks(
    clicks: &[ClickRecord],
    n_pulses: u64,
    detector: &DetectorConfig,
    cfg: &PeakConfig,
) -> Result<ClickAnalysis> {
    cfg.validate()?;
    detector.validate()?;
    if n_pulses < cfg.blocks as u64 {
        return Err(invalid("n_pulses", "fewer pulses than batches"));
    }
    let eta = detector.detection_probability();
    if !(eta > 0.0) {
        return Err(invalid("efficiency", "no photon can be detected"));
    }
    let chan = by_channel(clicks);
    let batches = accumulate(&chan, cfg, n_pulses);
    let mut total = Batch::new(cfg.peaks);
    for b in &batches {
        total.add(b);
    }
    let k = cfg.peaks;
    let pulses_per_batch = |i: usize| {
        let lo = (i as u128 * n_pulses as u128).div_ceil(cfg.blocks as u128);
        let hi = ((i + 1) as u128 * n_pulses as u128).div_ceil(cfg.blocks as u128);
        (hi - lo) as f64
    };
    let mean_of = |b: &Batch, pulses: f64| b.clicks.iter().sum::<u64>() as f64 / (pulses * eta);

    let g3_peaks = PeakGrid::from_areas(k, cfg.rep_period, total.triples.clone())?;
    let side: f64 = total.pairs.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v).sum();
    if !(side > 0.0) {
        return Err(Error::InsufficientStatistics("no counts in uncorrelated pair peaks".into()));
    }
    let n = mean_of(&total, n_pulses as f64);
    let g2 = total.g2(k);
    let g3 = g3_peaks.g3_zero();
    let fock = reconstruct_fock_unchecked(n, g2, g3)?;

    let mut per = vec![[0.0; 7]; batches.len()];
    for (i, b) in batches.iter().enumerate() {
        let nb = mean_of(b, pulses_per_batch(i));
        let g2b = b.g2(k);
        let g3b = b.g3(k).unwrap_or(f64::NAN);
        let pb = reconstruct_fock_unchecked(nb.max(f64::MIN_POSITIVE), g2b, g3b).map(|s| s.p).unwrap_or([f64::NAN; 4]);
        per[i] = [nb, g2b, g3b, pb[0], pb[1], pb[2], pb[3]];
    }
    let se = |j: usize| batch_error(&per.iter().map(|v| v[j]).collect::<Vec<_>>());
    let est = |value: f64, j: usize| Estimate { value, std_error: se(j) };

    Ok(ClickAnalysis {
        n_pulses,
        clicks: total.clicks,
        mean_photons: est(n, 0),
        g2: est(g2, 1),
        g3: est(g3, 2),
        fock: [est(fock.p[0], 3), est(fock.p[1], 4), est(fock.p[2], 5), est(fock.p[3], 6)],
        g3_peaks,
    })
}

/// ḡ²(0) from the two channels `a`, `b`: zero-delay peak area over the mean
/// of the side peaks.
pub fn g2_from_clicks(clicks: &[ClickRecord], channels: (u8, u8), n_pulses: u64, cfg: &PeakConfig) -> Result<Estimate> {
    cfg.validate()?;
    let (a, b) = channels;
    if a == b || !(1..=3).contains(&a) || !(1..=3).contains(&b) {
        return Err(invalid("channels", "need two distinct detectors"));
    }
    if n_pulses < cfg.blocks as u64 {
        return Err(invalid("n_pulses", "fewer pulses than batches"));
    }
    let chan = by_channel(clicks);
    let (ta, tb) = (&chan[a as usize - 1], &chan[b as usize - 1]);
    let k = cfg.peaks;
    let mut batches = vec![Batch::new(k); cfg.blocks];
    for &t in tb {
        let batch = &mut batches[batch_of(t, cfg, n_pulses)];
        let (lo, hi) = window(ta, t, cfg.reach());
        for &s in &ta[lo..hi] {
            if let Some(m) = cfg.lattice(s as i64 - t as i64) {
                batch.pairs[(m + k as i64) as usize] += 1.0;
            }
        }
    }
    let mut total = Batch::new(k);
    for b in &batches {
        total.add(b);
    }
    let side: f64 = total.pairs.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v).sum();
    if !(side > 0.0) {
        return Err(Error::InsufficientStatistics("no counts in uncorrelated peaks".into()));
    }
    let per: Vec<f64> = batches.iter().map(|b| b.g2(k)).collect();
    Ok(Estimate { value: total.g2(k), std_error: batch_error(&per) })
}
