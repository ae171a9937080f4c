use anyhow::{bail, Context, Result};
use qfilter::dynamics::Tolerances;
use qfilter::experiments::{CwConfig, FitOptions, FitParam, Normalization, PulsedConfig};
use qfilter::quantum::DeviceParams;
use qfilter::tttr::{DetectorConfig, PeakConfig, DEFAULT_BIN_WIDTH};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    CwSpectrum,
    #[default]
    PulsedSweep,
    G3Map,
    Decompose,
    Fock,
    Fit,
    Clicks,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::CwSpectrum => "cw-spectrum",
            Self::PulsedSweep => "pulsed-sweep",
            Self::G3Map => "g3-map",
            Self::Decompose => "decompose",
            Self::Fock => "fock",
            Self::Fit => "fit",
            Self::Clicks => "clicks",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    /// Fixed (n_h, n_v); omitted means converge per point.
    pub truncation: Option<(usize, usize)>,
    pub atol: f64,
    pub rtol: f64,
    /// Output grid step of the two-time integral (ps).
    pub dt: f64,
    /// Grid step for ḡ³(0,0) (ps); omitted skips it.
    pub g3_dt: Option<f64>,
    /// Finite coincidence window for ḡ²(0) (ps).
    pub tau_window: Option<f64>,
}

impl Default for Numerics {
    fn default() -> Self {
        let tol = Tolerances::default();
        Self { truncation: None, atol: tol.atol, rtol: tol.rtol, dt: 10.0, g3_dt: None, tau_window: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulsedSection {
    pub tau: f64,
    pub n_in: Vec<f64>,
    pub laser_detuning: f64,
    pub normalization: Normalization,
}

impl Default for PulsedSection {
    fn default() -> Self {
        let n_in = (0..13).map(|i| 0.01 * 10f64.powf(i as f64 * 3.5 / 12.0)).collect();
        Self { tau: 125.0, n_in, laser_detuning: 0.0, normalization: Normalization::Coupled }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CwSection {
    /// W
    pub power: Vec<f64>,
    /// "LO:HI:STEP" in µeV
    pub detuning_range: String,
    pub truncation: (usize, usize),
}

impl Default for CwSection {
    fn default() -> Self {
        Self { power: vec![14e-12, 1.4e-9], detuning_range: "-200:200:2".into(), truncation: CwConfig::default().truncation }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonSource {
    Poisson,
    SinglePhoton,
    /// P(k) listed in `distribution`
    Explicit,
    /// P(0..3) of the simulated reflected pulse at `model_n_in`
    Model,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClicksSection {
    pub source: PhotonSource,
    /// Mean photon number of the Poisson source.
    pub mean: f64,
    pub distribution: Vec<f64>,
    pub model_n_in: f64,
    pub n_pulses: u64,
    pub detector: DetectorConfig,
    pub peaks: PeakConfig,
    pub bin_width: u64,
    /// Map half range in repetition periods.
    pub map_periods: u64,
    /// "binary" or "csv"
    pub format: String,
}

impl Default for ClicksSection {
    fn default() -> Self {
        Self {
            source: PhotonSource::Poisson,
            mean: 1.0,
            distribution: vec![],
            model_n_in: 0.6,
            n_pulses: 1_000_000,
            detector: DetectorConfig::default(),
            peaks: PeakConfig::default(),
            bin_width: DEFAULT_BIN_WIDTH,
            map_periods: 5,
            format: "binary".into(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub n_out: Option<f64>,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    /// CSV with columns detuning_uev,R
    pub spectrum: Option<String>,
    pub free: Vec<FitParam>,
    pub power: f64,
    pub max_evals: usize,
}

impl Default for FitSection {
    fn default() -> Self {
        let d = FitOptions::default();
        Self {
            spectrum: None,
            free: vec![FitParam::G, FitParam::GammaSp, FitParam::Kappa],
            power: d.power,
            max_evals: d.simplex.max_evals,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub out: String,
    pub device: DeviceParams,
    pub numerics: Numerics,
    pub pulsed: PulsedSection,
    pub cw: CwSection,
    pub clicks: ClicksSection,
    pub analysis: AnalysisSection,
    pub fit: FitSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::default(),
            seed: 1,
            out: "qfilter-out".into(),
            device: DeviceParams::default(),
            numerics: Numerics::default(),
            pulsed: PulsedSection::default(),
            cw: CwSection::default(),
            clicks: ClicksSection::default(),
            analysis: AnalysisSection::default(),
            fit: FitSection::default(),
        }
    }
}

/// Parses a JSON document (starting with `{`) or TOML. Empty text gives the
/// defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let trimmed = text.trim_start();
    let cfg: RunConfig = if trimmed.is_empty() {
        RunConfig::default()
    } else if trimmed.starts_with('{') {
        serde_json::from_str(text).context("invalid JSON configuration")?
    } else {
        toml::from_str(text).context("invalid TOML configuration")?
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

/// "LO:HI:STEP" → inclusive grid.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("detuning_range {s:?} is not LO:HI:STEP"))?;
    let [lo, hi, step] = parts[..] else {
        bail!("detuning_range {s:?} is not LO:HI:STEP");
    };
    if !(step > 0.0) || !(hi >= lo) {
        bail!("detuning_range: need HI >= LO and STEP > 0");
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number {p:?} in list")))
        .collect()
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        let p = &self.pulsed;
        if !(p.tau > 0.0) {
            bail!("invalid parameter tau: must be positive");
        }
        if p.n_in.is_empty() || p.n_in.iter().any(|&n| !(n > 0.0)) || p.n_in.windows(2).any(|w| w[1] < w[0]) {
            bail!("invalid parameter n_in: need a sorted list of positive values");
        }
        if !(self.numerics.dt > 0.0) {
            bail!("invalid parameter dt: must be positive");
        }
        if !(self.numerics.atol > 0.0) || !(self.numerics.rtol > 0.0) {
            bail!("invalid parameter atol/rtol: must be positive");
        }
        parse_range(&self.cw.detuning_range)?;
        if self.cw.power.iter().any(|&w| !(w >= 0.0)) {
            bail!("invalid parameter power: must be non-negative");
        }
        self.clicks.detector.validate()?;
        if !matches!(self.clicks.format.as_str(), "binary" | "csv") {
            bail!("invalid parameter format: expected \"binary\" or \"csv\"");
        }
        if self.clicks.map_periods < 3 {
            bail!("invalid parameter map_periods: need at least 3");
        }
        Ok(())
    }

    pub fn pulsed_config(&self) -> PulsedConfig {
        let mut c = PulsedConfig {
            tau: self.pulsed.tau,
            laser_detuning: self.pulsed.laser_detuning,
            dt: self.numerics.dt,
            truncation: self.numerics.truncation,
            g3_dt: self.numerics.g3_dt,
            normalization: self.pulsed.normalization,
            ..PulsedConfig::default()
        };
        c.integrator.tol = Tolerances { atol: self.numerics.atol, rtol: self.numerics.rtol };
        c.correlation.tau_window = self.numerics.tau_window;
        c
    }

    pub fn cw_config(&self) -> CwConfig {
        CwConfig { truncation: self.cw.truncation, ..CwConfig::default() }
    }
}
