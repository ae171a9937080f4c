use super::drive::{input_amplitude, rabi_amplitude, DriveSpec};
use super::hamiltonian::{collapse_channels, static_hamiltonian, Detunings};
use super::superop::{CsrMatrix, SuperOpBuilder};
use crate::error::Result;
use crate::quantum::{build_operators, DeviceParams, HilbertSpace, Operator, OperatorSet};
use crate::units::{rate, HBAR};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Frame in which the master equation is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Lab,
    #[default]
    Displaced,
}

/// Radius of a disc around the origin inside the Dormand–Prince stability region.
const STABILITY_RADIUS: f64 = 2.8;

/// Drive-independent superoperators.
#[derive(Debug)]
struct Liouvillian {
    fixed: CsrMatrix,
    /// [D, ·]
    drive_pos: CsrMatrix,
    /// [D†, ·]
    drive_neg: CsrMatrix,
}

/// Compiled master equation for one device, laser detuning, truncation and
/// frame. The drive can be swapped without recompiling.
///
/// The integration state is `vec(ρ)` (column-major) followed by the coherent
/// H-mode amplitude α, which stays zero in the lab frame.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: DeviceParams,
    pub drive: DriveSpec,
    pub detunings: Detunings,
    pub laser_detuning: f64,
    pub ops: Arc<OperatorSet>,
    pub frame: Frame,
    liouvillian: Arc<Liouvillian>,
    kappa: f64,
    g: f64,
    cavity_h: f64,
}

impl Model {
    pub fn new(
        params: DeviceParams,
        drive: DriveSpec,
        laser_detuning: f64,
        space: HilbertSpace,
        frame: Frame,
    ) -> Result<Self> {
        params.validate()?;
        drive.validate()?;
        let ops = build_operators(space, params.theta);
        let detunings = Detunings::new(&params, laser_detuning);
        let d = space.dim();

        let h0 = static_hamiltonian(&params, &ops, &detunings);
        let mut fixed = SuperOpBuilder::new(d);
        fixed.commutator(&h0, C64::new(0.0, -1.0 / HBAR));
        for (r, x) in collapse_channels(&params, &ops) {
            fixed.dissipator(r, x);
        }
        let driven = match frame {
            Frame::Lab => &ops.a_h,
            Frame::Displaced => &ops.sigma_h,
        };
        let mut pos = SuperOpBuilder::new(d);
        pos.commutator(driven, C64::from(1.0));
        let mut neg = SuperOpBuilder::new(d);
        neg.commutator(&driven.adjoint(), C64::from(1.0));

        Ok(Self {
            params,
            drive,
            detunings,
            laser_detuning,
            ops: Arc::new(ops),
            frame,
            liouvillian: Arc::new(Liouvillian {
                fixed: fixed.build(),
                drive_pos: pos.build(),
                drive_neg: neg.build(),
            }),
            kappa: rate(params.kappa),
            g: rate(params.g),
            cavity_h: rate(detunings.cavity_h),
        })
    }

    /// Same compiled system with a different drive.
    pub fn with_drive(&self, drive: DriveSpec) -> Result<Self> {
        drive.validate()?;
        Ok(Self { drive, ..self.clone() })
    }

    pub fn space(&self) -> HilbertSpace {
        self.ops.space
    }

    pub fn dim(&self) -> usize {
        self.ops.dim()
    }

    /// Length of the integration state vector.
    pub fn state_len(&self) -> usize {
        self.dim() * self.dim() + 1
    }

    /// Ω(t) in ps⁻¹.
    pub fn rabi(&self, t: f64) -> f64 {
        rabi_amplitude(&self.drive, &self.params, t)
    }

    /// c(t) multiplying the driven operator: H_d = iħ(c* D − c D†).
    fn coupling(&self, t: f64, alpha: C64) -> C64 {
        match self.frame {
            Frame::Lab => C64::from(self.rabi(t)),
            Frame::Displaced => alpha * self.g,
        }
    }

    /// dα/dt for the coherent H-mode amplitude (zero in the lab frame).
    pub fn alpha_derivative(&self, t: f64, alpha: C64) -> C64 {
        match self.frame {
            Frame::Lab => C64::from(0.0),
            Frame::Displaced => -C64::new(0.5 * self.kappa, self.cavity_h) * alpha - self.rabi(t),
        }
    }

    /// Fixed point of the α equation under a constant drive.
    pub fn steady_alpha(&self) -> C64 {
        match self.frame {
            Frame::Lab => C64::from(0.0),
            Frame::Displaced => -C64::from(self.rabi(0.0)) / C64::new(0.5 * self.kappa, self.cavity_h),
        }
    }

    /// dy/dt for the full integration state.
    pub fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        let n = self.dim() * self.dim();
        let alpha = y[n];
        let c = self.coupling(t, alpha);
        let (x, dx) = (&y[..n], &mut dy[..n]);
        let l = &self.liouvillian;
        l.fixed.mul(x, dx);
        if c != C64::from(0.0) {
            l.drive_pos.mul_add(c.conj(), x, dx);
            l.drive_neg.mul_add(-c, x, dx);
        }
        dy[n] = self.alpha_derivative(t, alpha);
    }

    /// Largest step keeping every Liouvillian mode inside the explicit
    /// integrator's stability region, from a Gershgorin bound.
    pub fn stable_step(&self) -> f64 {
        let (omega_peak, area) = match self.drive {
            DriveSpec::Cw { .. } => (self.rabi(0.0), f64::INFINITY),
            DriveSpec::GaussianPulse { tau, t0, .. } => {
                let peak = self.rabi(t0);
                (peak, peak * tau * (std::f64::consts::PI / (2.0 * std::f64::consts::LN_2)).sqrt())
            }
        };
        let c_max = match self.frame {
            Frame::Lab => omega_peak,
            Frame::Displaced => self.g * area.min(omega_peak * 2.0 / self.kappa),
        };
        let l = &self.liouvillian;
        let bound = l.fixed.max_row_sum() + c_max * (l.drive_pos.max_row_sum() + l.drive_neg.max_row_sum());
        if bound > 0.0 {
            STABILITY_RADIUS / bound
        } else {
            f64::INFINITY
        }
    }

    /// Dense Liouvillian matrix for a fixed drive coupling c.
    pub(crate) fn dense_liouvillian(&self, alpha: C64, t: f64) -> nalgebra::DMatrix<C64> {
        let c = self.coupling(t, alpha);
        let l = &self.liouvillian;
        let mut m = l.fixed.to_dense();
        l.drive_pos.add_to_dense(c.conj(), &mut m);
        l.drive_neg.add_to_dense(-c, &mut m);
        m
    }

    /// √(η_top κ) in ps^(-1/2).
    pub fn output_scale(&self) -> f64 {
        (self.params.eta_top * self.kappa).sqrt()
    }

    /// Incident field reaching the detector directly (c-number part of
    /// b_out before the cavity contribution).
    pub fn reflected_input(&self, t: f64) -> C64 {
        let b = input_amplitude(&self.drive, t);
        let mut amp = self.params.eta_in.sqrt() * b;
        if self.params.uncoupled_background {
            amp += (1.0 - self.params.eta_in).sqrt() * b;
        }
        C64::from(amp)
    }

    /// c-number part of b_out in the integration frame: b_out = β + s·a.
    pub fn classical_output(&self, t: f64, alpha: C64) -> C64 {
        self.reflected_input(t) + alpha * self.output_scale()
    }

    /// Photon flux of the light that reaches the device mode, |√η_in b_in|².
    pub fn coupled_input_flux(&self, t: f64) -> f64 {
        self.params.eta_in * input_amplitude(&self.drive, t).powi(2)
    }

    pub(crate) fn a_h(&self) -> &Operator {
        &self.ops.a_h
    }
}
