//! Time-tagged detection of the reflected pulses.
//!
//! Photon numbers are drawn per pulse, routed through a cascade of beam
//! splitters onto three detectors and timestamped in integer picoseconds.
//! Coincidence peaks on the pulse lattice are integrated and normalized by
//! the uncorrelated peaks to give ḡ²(0), the ḡ³ peak map and, through the
//! moment inversion, the photon-number populations.

mod analysis;
mod clicks;
mod histogram;
mod io;

pub use analysis::{analyze_clicks, g2_from_clicks, ClickAnalysis, Estimate, PeakConfig};
pub use clicks::{simulate_clicks, ClickRecord, DetectorConfig};
pub use histogram::{coincidence_map, integrate_peaks, CoincidenceMap, PeakGrid, DEFAULT_BIN_WIDTH};
pub use io::{read_clicks, read_clicks_csv, write_clicks, write_clicks_csv, CLICK_MAGIC, CLICK_VERSION};

/// Splits a stream into per-channel sorted timestamp lists (channels 1..=3).
pub(crate) fn by_channel(clicks: &[ClickRecord]) -> [Vec<u64>; 3] {
    let mut out: [Vec<u64>; 3] = Default::default();
    for c in clicks {
        if (1..=3).contains(&c.channel) {
            out[c.channel as usize - 1].push(c.timestamp);
        }
    }
    for v in &mut out {
        v.sort_unstable();
    }
    out
}

/// Indices `[lo, hi)` of the sorted `times` inside `[center − reach, center + reach)`.
pub(crate) fn window(times: &[u64], center: u64, reach: u64) -> (usize, usize) {
    let lo = times.partition_point(|&t| t < center.saturating_sub(reach));
    let hi = times.partition_point(|&t| t < center.saturating_add(reach));
    (lo, hi)
}
