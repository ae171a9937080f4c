//! Output-field observables and time-integrated intensity correlations.
//!
//! The detected field is b_out = β(t) + √(η_top κ)·a_H where β is the
//! c-number reflected input. Two- and three-time normally ordered moments are
//! evaluated with the quantum regression theorem: for t₂ ≥ t₁,
//!
//! G²(t₁, t₂) = Tr[ B†B(t₂) · U(t₂, t₁)[ A ρ(t₁) A† ] ],  A = B = β + s·a_H,
//!
//! which contains every mixed moment of the classical amplitude and the cavity
//! operator. In the displaced frame the coherent amplitude α(t) simply joins β.

mod flux;
mod g2;
mod g3;
mod qrt;

pub use flux::{output_flux, steady_reflectivity, OutputFlux};
pub use g2::{g2_pulsed, CorrelationOptions, CorrelationResult};
pub use g3::{g3_zero_pulsed, G3Result};
pub use qrt::{quantum_regression, LinearFunctional};

/// Trapezoid weights for `n` uniformly spaced points of spacing `h`.
pub(crate) fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => {
            let mut w = vec![h; n];
            w[0] = 0.5 * h;
            w[n - 1] = 0.5 * h;
            w
        }
    }
}

/// ∫ over a uniform grid by the trapezoid rule.
pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    trapezoid_weights(values.len(), h)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum()
}
