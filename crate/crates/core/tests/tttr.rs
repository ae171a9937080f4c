use proptest::prelude::*;
use qfilter::statistics::{moments, reconstruct_fock_unchecked};
use qfilter::tttr::{
    analyze_clicks, coincidence_map, g2_from_clicks, integrate_peaks, read_clicks, read_clicks_csv, simulate_clicks,
    write_clicks, write_clicks_csv, ClickRecord, DetectorConfig, PeakConfig, DEFAULT_BIN_WIDTH,
};

fn poisson(mean: f64, kmax: usize) -> Vec<f64> {
    let mut p = vec![(-mean).exp()];
    for k in 1..=kmax {
        let prev = p[k - 1];
        p.push(prev * mean / k as f64);
    }
    // the truncated tail is far below rounding, so fold the residue into P(0)
    let rest = 1.0 - p.iter().sum::<f64>();
    p[0] += rest;
    p
}

#[test]
fn click_rate_follows_mean_photon_number() {
    let det = DetectorConfig::default();
    let n = 400_000;
    let clicks = simulate_clicks(&poisson(0.5, 20), &det, n, 3).unwrap();
    let expected = 0.5 * n as f64;
    let sigma = expected.sqrt();
    assert!((clicks.len() as f64 - expected).abs() < 5.0 * sigma, "{}", clicks.len());
}

#[test]
fn single_photons_never_coincide() {
    let clicks = simulate_clicks(&[0.0, 1.0], &DetectorConfig::default(), 100_000, 5).unwrap();
    let map = coincidence_map(&clicks, DEFAULT_BIN_WIDTH, 3 * 12_200 + 2_500).unwrap();
    let peaks = integrate_peaks(&map, 12_200, 5_000).unwrap();
    assert_eq!(peaks.area(0, 0), 0.0);
    assert_eq!(peaks.area(0, 1), 0.0);
    assert_eq!(peaks.area(1, 1), 0.0);
    let g2 = g2_from_clicks(&clicks, (1, 2), 100_000, &PeakConfig::default()).unwrap();
    assert_eq!(g2.value, 0.0);
}

#[test]
fn poisson_stream_is_uncorrelated() {
    let det = DetectorConfig::default();
    let n = 2_000_000;
    let clicks = simulate_clicks(&poisson(1.0, 25), &det, n, 11).unwrap();
    let a = analyze_clicks(&clicks, n, &det, &PeakConfig::default()).unwrap();
    assert!(a.g2.deviation(1.0) < 4.0, "{:?}", a.g2);
    assert!(a.g3.deviation(1.0) < 4.0, "{:?}", a.g3);
    assert!(a.mean_photons.deviation(1.0) < 4.0, "{:?}", a.mean_photons);
    // P(k >= 4) is not negligible at n = 1, so the target is the inversion of
    // the exact moments rather than the Poisson populations themselves
    let reference = reconstruct_fock_unchecked(1.0, 1.0, 1.0).unwrap().p;
    for k in 0..4 {
        assert!(a.fock[k].deviation(reference[k]) < 4.0, "k={k} {:?}", a.fock[k]);
    }
}

fn within(e: &qfilter::tttr::Estimate, target: f64, sigmas: f64) -> bool {
    (e.value - target).abs() <= sigmas * e.std_error + 1e-12
}

#[test]
fn populations_survive_sampling() {
    let mixture = reconstruct_fock_unchecked(0.26, 0.55, 0.18).unwrap().p;
    let dists: [(&str, Vec<f64>); 3] = [("poisson", poisson(0.3, 20)), ("single", vec![0.0, 1.0]), ("mixture", mixture.to_vec())];
    let det = DetectorConfig::default();
    let n = 2_000_000;
    for (name, p) in dists {
        let (mean, g2, g3) = moments(&p);
        let target = reconstruct_fock_unchecked(mean, g2, g3).unwrap().p;
        let clicks = simulate_clicks(&p, &det, n, 21).unwrap();
        let a = analyze_clicks(&clicks, n, &det, &PeakConfig::default()).unwrap();
        assert!(within(&a.g2, g2, 3.0), "{name} g2 {:?} vs {g2}", a.g2);
        assert!(within(&a.g3, g3, 3.0), "{name} g3 {:?} vs {g3}", a.g3);
        for k in 0..4 {
            assert!(within(&a.fock[k], target[k], 3.0), "{name} k={k} {:?} vs {}", a.fock[k], target[k]);
        }
    }
}

#[test]
fn two_detector_g2_recovers_mixture() {
    let p = reconstruct_fock_unchecked(0.26, 0.55, 0.18).unwrap().p;
    let (_, g2, _) = moments(&p);
    let n = 3_000_000;
    let clicks = simulate_clicks(&p, &DetectorConfig::two_detector(), n, 8).unwrap();
    let e = g2_from_clicks(&clicks, (1, 2), n, &PeakConfig::default()).unwrap();
    assert!(within(&e, g2, 3.0), "{e:?} vs {g2}");
    assert!((g2 - 0.55).abs() < 1e-12);
}

#[test]
fn loss_leaves_normalized_correlations() {
    let p = [0.55, 0.3, 0.1, 0.05];
    let (_, g2, _) = moments(&p);
    let n = 2_000_000;
    let lossy = DetectorConfig { efficiency: [0.4, 0.5, 0.6], ..Default::default() };
    let clicks = simulate_clicks(&p, &lossy, n, 2).unwrap();
    let a = analyze_clicks(&clicks, n, &lossy, &PeakConfig::default()).unwrap();
    assert!(a.g2.deviation(g2) < 4.0, "{:?} vs {g2}", a.g2);
}

#[test]
fn map_matches_brute_force() {
    let det = DetectorConfig { emission_time_constant: 600.0, ..Default::default() };
    let clicks = simulate_clicks(&poisson(1.5, 25), &det, 3_000, 9).unwrap();
    let map = coincidence_map(&clicks, 1_000, 4 * 12_200).unwrap();
    let reach = map.reach();
    let by = |c: u8| clicks.iter().filter(|r| r.channel == c).map(|r| r.timestamp as i64).collect::<Vec<_>>();
    let (c1, c2, c3) = (by(1), by(2), by(3));
    let mut counts = vec![0u64; map.size() * map.size()];
    for &t2 in &c2 {
        for &t1 in &c1 {
            for &t3 in &c3 {
                let (a, b) = (t1 - t2, t3 - t2);
                if (-reach..reach).contains(&a) && (-reach..reach).contains(&b) {
                    let i = ((a + reach) / 1_000) as usize;
                    let j = ((b + reach) / 1_000) as usize;
                    counts[i * map.size() + j] += 1;
                }
            }
        }
    }
    assert!(map.total() > 0);
    assert_eq!(map.counts, counts);
}

#[test]
fn dead_time_spaces_clicks() {
    let det = DetectorConfig { dead_time: 30_000, ..Default::default() };
    let clicks = simulate_clicks(&poisson(2.0, 25), &det, 50_000, 4).unwrap();
    for c in 1..=3u8 {
        let t: Vec<u64> = clicks.iter().filter(|r| r.channel == c).map(|r| r.timestamp).collect();
        assert!(t.windows(2).all(|w| w[1] - w[0] >= 30_000));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn binary_and_csv_round_trip(raw in proptest::collection::vec((1u8..=3, 0u64..u64::MAX / 2), 0..200)) {
        let mut clicks: Vec<ClickRecord> = raw.into_iter().map(|(channel, timestamp)| ClickRecord { channel, timestamp }).collect();
        clicks.sort_by_key(|c| (c.timestamp, c.channel));
        let mut bin = Vec::new();
        write_clicks(&mut bin, &clicks).unwrap();
        prop_assert_eq!(read_clicks(&bin[..]).unwrap(), clicks.clone());
        let mut csv = Vec::new();
        write_clicks_csv(&mut csv, &clicks).unwrap();
        prop_assert_eq!(read_clicks_csv(&csv[..]).unwrap(), clicks);
    }

    #[test]
    fn streams_sorted_and_seeded(seed in 0u64..1000, mean in 0.0..3.0f64) {
        let p = poisson(mean, 30);
        let det = DetectorConfig::default();
        let a = simulate_clicks(&p, &det, 70_000, seed).unwrap();
        prop_assert!(a.windows(2).all(|w| (w[0].timestamp, w[0].channel) <= (w[1].timestamp, w[1].channel)));
        prop_assert!(a.iter().all(|c| (1..=3).contains(&c.channel)));
        prop_assert_eq!(a, simulate_clicks(&p, &det, 70_000, seed).unwrap());
    }
}
