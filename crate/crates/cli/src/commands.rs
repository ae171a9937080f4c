use crate::config::{parse_range, Experiment, PhotonSource, RunConfig};
use crate::manifest::Manifest;
use anyhow::{bail, Context, Result};
use qfilter::experiments::{cw_spectrum, fit_cw_spectrum, pulsed_point, pulsed_sweep, FitOptions, PulsedConfig};
use qfilter::statistics::{decompose_output, poisson_reference, reconstruct_fock, AnalysisRecord};
use qfilter::tttr::{
    analyze_clicks, coincidence_map, integrate_peaks, simulate_clicks, write_clicks, write_clicks_csv, ClickRecord,
};
use serde_json::json;
use std::path::Path;

fn emit(manifest: &mut Manifest, dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    manifest.pending(name);
    std::fs::write(dir.join(name), bytes).with_context(|| format!("writing {name}"))?;
    manifest.completed(name);
    Ok(())
}

fn emit_json(manifest: &mut Manifest, dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    emit(manifest, dir, name, (serde_json::to_string_pretty(value)? + "\n").as_bytes())
}

pub fn run(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    match cfg.experiment {
        Experiment::CwSpectrum => cw(cfg, out, manifest),
        Experiment::PulsedSweep => sweep(cfg, out, manifest),
        Experiment::G3Map => g3_map(cfg, out, manifest),
        Experiment::Decompose => decompose(cfg, out, manifest),
        Experiment::Fock => fock(cfg, out, manifest),
        Experiment::Fit => fit(cfg, out, manifest),
        Experiment::Clicks => clicks(cfg, out, manifest),
    }
}

fn cw(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let detunings = parse_range(&cfg.cw.detuning_range)?;
    let mut csv = String::from("power_w,detuning_uev,R\n");
    let mut peaks = Vec::new();
    for &power in &cfg.cw.power {
        let s = cw_spectrum(&cfg.device, power, &detunings, &cfg.cw_config())?;
        for (d, r) in s.detuning.iter().zip(&s.reflectivity) {
            csv.push_str(&format!("{power},{d},{r}\n"));
        }
        let (i, r) = s
            .reflectivity
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
        peaks.push(json!({"power_w": power, "max_reflectivity": r, "at_detuning_uev": s.detuning[i]}));
    }
    emit(manifest, out, "cw_spectrum.csv", csv.as_bytes())?;
    emit_json(manifest, out, "cw_summary.json", &json!({ "spectra": peaks }))
}

fn sweep(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let result = pulsed_sweep(&cfg.device, &cfg.pulsed.n_in, &cfg.pulsed_config())?;
    emit(manifest, out, "sweep.csv", result.to_csv().as_bytes())?;
    let summary = json!({
        "tau": result.tau,
        "summary": result.summary(),
        "points": result.points,
        "failures": result.failures,
    });
    emit_json(manifest, out, "sweep_summary.json", &summary)?;
    if !result.failures.is_empty() {
        bail!("{} sweep point(s) failed", result.failures.len());
    }
    Ok(())
}

fn poisson(mean: f64) -> Vec<f64> {
    let mut p = vec![(-mean).exp()];
    let mut k = 0.0;
    let mut acc = p[0];
    while 1.0 - acc > 1e-15 && p.len() < 10_000 {
        k += 1.0;
        let next = p[p.len() - 1] * mean / k;
        acc += next;
        p.push(next);
    }
    p
}

fn source_distribution(cfg: &RunConfig) -> Result<Vec<f64>> {
    let c = &cfg.clicks;
    Ok(match c.source {
        PhotonSource::Poisson => {
            if !(c.mean >= 0.0) {
                bail!("invalid parameter mean: must be non-negative");
            }
            poisson(c.mean)
        }
        PhotonSource::SinglePhoton => vec![0.0, 1.0],
        PhotonSource::Explicit => c.distribution.clone(),
        PhotonSource::Model => {
            let pc = PulsedConfig { g3_dt: Some(cfg.numerics.g3_dt.unwrap_or(20.0)), ..cfg.pulsed_config() };
            let point = pulsed_point(&cfg.device, c.model_n_in, &pc)?;
            let g2 = point.g2.context("model run produced no g2")?;
            let g3 = point.g3.context("model run produced no g3")?;
            reconstruct_fock(point.n_out, g2, g3)?.p.to_vec()
        }
    })
}

fn simulate(cfg: &RunConfig) -> Result<Vec<ClickRecord>> {
    let dist = source_distribution(cfg)?;
    Ok(simulate_clicks(&dist, &cfg.clicks.detector, cfg.clicks.n_pulses, cfg.seed)?)
}

fn g3_map(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let clicks = simulate(cfg)?;
    let c = &cfg.clicks;
    let reach = c.map_periods * c.detector.rep_period;
    let map = coincidence_map(&clicks, c.bin_width, reach)?;
    emit(manifest, out, "g3_map.csv", map.to_csv().as_bytes())?;
    let peaks = integrate_peaks(&map, c.detector.rep_period, c.peaks.window)?;
    let analysis = analyze_clicks(&clicks, c.n_pulses, &c.detector, &c.peaks)?;
    let summary = json!({
        "g3_zero": peaks.g3_zero(),
        "peaks": peaks,
        "g2": analysis.g2,
        "g3": analysis.g3,
        "mean_photons": analysis.mean_photons,
    });
    emit_json(manifest, out, "g3_peaks.json", &summary)
}

fn analysis_inputs(cfg: &RunConfig) -> Result<(f64, f64)> {
    let a = &cfg.analysis;
    let n = a.n_out.context("analysis.n_out is required")?;
    let g2 = a.g2.context("analysis.g2 is required")?;
    Ok((n, g2))
}

fn decompose(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let (n, g2) = analysis_inputs(cfg)?;
    let d = decompose_output(n, g2)?;
    emit_json(manifest, out, "decomposition.json", &json!(d))
}

fn fock(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let (n, g2) = analysis_inputs(cfg)?;
    let g3 = cfg.analysis.g3.context("analysis.g3 is required")?;
    let record = AnalysisRecord::new(n, g2, g3)?;
    emit_json(manifest, out, "fock.json", &json!(record))?;
    log::info!("poisson reference {:?}", poisson_reference(n));
    Ok(())
}

fn read_spectrum(path: &str) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.chars().any(|c| c.is_ascii_alphabetic())) {
            continue;
        }
        let mut it = line.split(',').map(|v| v.trim().parse::<f64>());
        match (it.next(), it.next()) {
            (Some(Ok(d)), Some(Ok(r))) => rows.push((d, r)),
            _ => bail!("{path}:{}: expected detuning_uev,R", i + 1),
        }
    }
    Ok(rows)
}

fn fit(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let path = cfg.fit.spectrum.as_deref().context("fit.spectrum is required")?;
    let measured = read_spectrum(path)?;
    let mut opts = FitOptions { power: cfg.fit.power, ..FitOptions::default() };
    opts.simplex.max_evals = cfg.fit.max_evals;
    let r = fit_cw_spectrum(&measured, &cfg.device, &cfg.fit.free, &opts)?;
    emit_json(manifest, out, "fit.json", &json!(r))?;
    if !r.converged {
        log::warn!("fit did not converge");
    }
    Ok(())
}

fn clicks(cfg: &RunConfig, out: &Path, manifest: &mut Manifest) -> Result<()> {
    let clicks = simulate(cfg)?;
    let c = &cfg.clicks;
    let mut buf = Vec::new();
    let name = if c.format == "csv" {
        write_clicks_csv(&mut buf, &clicks)?;
        "clicks.csv"
    } else {
        write_clicks(&mut buf, &clicks)?;
        "clicks.bin"
    };
    emit(manifest, out, name, &buf)?;
    let summary = match analyze_clicks(&clicks, c.n_pulses, &c.detector, &c.peaks) {
        Ok(a) => json!({"n_clicks": clicks.len(), "analysis": a}),
        Err(e) => json!({"n_clicks": clicks.len(), "analysis_error": e.to_string()}),
    };
    emit_json(manifest, out, "clicks_summary.json", &summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_is_normalized() {
        for m in [0.0, 0.3, 1.0, 25.0] {
            let p = poisson(m);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{m}");
        }
    }
}
