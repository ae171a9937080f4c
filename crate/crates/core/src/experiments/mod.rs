//! End-to-end experiments on the device model: figures of merit, CW
//! reflectivity spectra, pulsed power sweeps and spectrum fitting.

mod cw;
mod fit;
mod merit;
mod pulsed;
mod simplex;

pub use cw::{cw_spectrum, CwConfig, CwSpectrum};
pub use fit::{fit_cw_spectrum, FitOptions, FitParam, FitResult};
pub use merit::{figures_of_merit, photons_per_pulse, FiguresOfMerit};
pub use pulsed::{
    pulsed_point, pulsed_sweep, Normalization, PointFailure, PulsedConfig, SweepPoint, SweepResult, SweepSummary,
    SWEEP_CSV_HEADER,
};
pub use simplex::{nelder_mead, SimplexOptions, SimplexResult};
