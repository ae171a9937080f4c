use super::{by_channel, window, ClickRecord};
use crate::error::{invalid, Error, Result};
use serde::Serialize;

pub const DEFAULT_BIN_WIDTH: u64 = 256;

/// Triple-coincidence histogram over τ₁₂ = t₁ − t₂ (rows) and
/// τ₂₃ = t₃ − t₂ (columns). Bins are left-closed and span
/// `[−half_bins·w, half_bins·w)` on both axes; the line τ₁₂ = τ₂₃ holds the
/// events with t₁ = t₃.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoincidenceMap {
    pub bin_width: u64,
    pub half_bins: usize,
    pub counts: Vec<u64>,
}

impl CoincidenceMap {
    pub fn size(&self) -> usize {
        2 * self.half_bins
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.size() + col]
    }

    /// Left edge (ps) of bin `i` on either axis.
    pub fn edge(&self, i: usize) -> i64 {
        (i as i64 - self.half_bins as i64) * self.bin_width as i64
    }

    /// Centre (ps) of bin `i` on either axis.
    pub fn center(&self, i: usize) -> f64 {
        self.edge(i) as f64 + 0.5 * self.bin_width as f64
    }

    pub fn reach(&self) -> i64 {
        self.half_bins as i64 * self.bin_width as i64
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn index(&self, tau: i64) -> Option<usize> {
        let r = self.reach();
        (-r..r).contains(&tau).then(|| ((tau + r) / self.bin_width as i64) as usize)
    }

    /// CSV matrix: the header row holds the τ₂₃ bin centres, each row starts
    /// with its τ₁₂ bin centre (ps).
    pub fn to_csv(&self) -> String {
        let n = self.size();
        let mut out = String::from("tau12_ps\\tau23_ps");
        for j in 0..n {
            out.push_str(&format!(",{}", self.center(j)));
        }
        out.push('\n');
        for i in 0..n {
            out.push_str(&format!("{}", self.center(i)));
            for j in 0..n {
                out.push_str(&format!(",{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Histograms every (1, 2, 3) click triple with |τ₁₂|, |τ₂₃| inside
/// `max_delay` (rounded up to whole bins).
pub fn coincidence_map(clicks: &[ClickRecord], bin_width: u64, max_delay: u64) -> Result<CoincidenceMap> {
    if bin_width == 0 {
        return Err(invalid("bin_width", "must be positive"));
    }
    let half_bins = max_delay.div_ceil(bin_width) as usize;
    let mut map = CoincidenceMap { bin_width, half_bins, counts: vec![0; 4 * half_bins * half_bins] };
    let n = map.size();
    let reach = map.reach() as u64;
    let [c1, c2, c3] = by_channel(clicks);
    let mut rows = Vec::new();
    for &t2 in &c2 {
        let (lo1, hi1) = window(&c1, t2, reach);
        let (lo3, hi3) = window(&c3, t2, reach);
        if lo1 == hi1 || lo3 == hi3 {
            continue;
        }
        rows.clear();
        rows.extend(c1[lo1..hi1].iter().filter_map(|&t1| map.index(t1 as i64 - t2 as i64)));
        for &t3 in &c3[lo3..hi3] {
            if let Some(col) = map.index(t3 as i64 - t2 as i64) {
                for &row in &rows {
                    map.counts[row * n + col] += 1;
                }
            }
        }
    }
    Ok(map)
}

/// Peak areas on the pulse lattice (m·T, n·T), |m|, |n| ≤ k, normalized by
/// the mean of the uncorrelated peaks (m ≠ 0, n ≠ 0, m ≠ n).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakGrid {
    pub k: usize,
    pub rep_period: u64,
    /// Raw areas, row m + k, column n + k.
    pub areas: Vec<f64>,
    pub uncorrelated_mean: f64,
    pub normalized: Vec<f64>,
}

impl PeakGrid {
    pub fn width(&self) -> usize {
        2 * self.k + 1
    }

    fn slot(&self, m: i64, n: i64) -> usize {
        (m + self.k as i64) as usize * self.width() + (n + self.k as i64) as usize
    }

    pub fn value(&self, m: i64, n: i64) -> f64 {
        self.normalized[self.slot(m, n)]
    }

    pub fn area(&self, m: i64, n: i64) -> f64 {
        self.areas[self.slot(m, n)]
    }

    pub fn g3_zero(&self) -> f64 {
        self.value(0, 0)
    }

    pub fn is_uncorrelated(m: i64, n: i64) -> bool {
        m != 0 && n != 0 && m != n
    }

    pub(crate) fn from_areas(k: usize, rep_period: u64, areas: Vec<f64>) -> Result<Self> {
        let w = 2 * k as i64 + 1;
        let (mut sum, mut count) = (0.0, 0usize);
        for m in -(k as i64)..=k as i64 {
            for n in -(k as i64)..=k as i64 {
                if Self::is_uncorrelated(m, n) {
                    sum += areas[((m + k as i64) * w + n + k as i64) as usize];
                    count += 1;
                }
            }
        }
        let mean = if count > 0 { sum / count as f64 } else { 0.0 };
        if !(mean > 0.0) {
            return Err(Error::InsufficientStatistics("no counts in uncorrelated peaks".into()));
        }
        let normalized = areas.iter().map(|a| a / mean).collect();
        Ok(Self { k, rep_period, areas, uncorrelated_mean: mean, normalized })
    }
}

/// Integrates each lattice peak over a `window × window` square (ps) centred
/// on it. Bins are assigned by their centre.
pub fn integrate_peaks(map: &CoincidenceMap, rep_period: u64, window: u64) -> Result<PeakGrid> {
    if rep_period == 0 || window == 0 || window > rep_period {
        return Err(invalid("window", "must be positive and no longer than the repetition period"));
    }
    let half = window as i64 / 2;
    let t = rep_period as i64;
    if map.reach() < 3 * t {
        return Err(invalid("max_delay", "map must cover at least three periods on each side"));
    }
    let k = (map.reach() - half) / t;
    let w = 2 * k + 1;
    let mut areas = vec![0.0; (w * w) as usize];
    let lattice = |c: f64| -> Option<i64> {
        let m = (c / t as f64).round() as i64;
        (m.abs() <= k && (c - (m * t) as f64).abs() < half as f64).then_some(m)
    };
    let n = map.size();
    let lat: Vec<Option<i64>> = (0..n).map(|i| lattice(map.center(i))).collect();
    for i in 0..n {
        let Some(m) = lat[i] else { continue };
        for j in 0..n {
            if let Some(q) = lat[j] {
                areas[((m + k) * w + q + k) as usize] += map.get(i, j) as f64;
            }
        }
    }
    PeakGrid::from_areas(k as usize, rep_period, areas)
}
