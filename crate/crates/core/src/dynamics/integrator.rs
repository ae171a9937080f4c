//! Dormand–Prince 5(4) with FSAL and the 4th-order continuous extension,
//! operating on complex state vectors.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { atol: 1e-10, rtol: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl std::ops::AddAssign for IntegrationStats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.rhs_evals += o.rhs_evals;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub tol: Tolerances,
    /// Upper bound on the step; keeps the solver from stepping over a pulse
    /// that has not yet switched on.
    pub h_max: f64,
    pub max_steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

impl Dopri5 {
    pub fn new(tol: Tolerances, h_max: f64) -> Self {
        Self {
            tol,
            h_max,
            max_steps: 5_000_000,
        }
    }

    fn error_norm(&self, err: &[C64], y0: &[C64], y1: &[C64]) -> f64 {
        let mut acc = 0.0;
        for ((e, a), b) in err.iter().zip(y0).zip(y1) {
            let sc = self.tol.atol + self.tol.rtol * a.norm().max(b.norm());
            acc += (e.norm() / sc).powi(2);
        }
        (acc / err.len() as f64).sqrt()
    }

    /// Integrates from `t0` through every time in `outputs` (non-decreasing,
    /// all ≥ `t0`), calling `on_output(index, t, y)` with interpolated states
    /// and `on_step(t, y)` after each accepted step. Returns the final state.
    pub fn integrate<F, O, S>(
        &self,
        mut f: F,
        t0: f64,
        y0: Vec<C64>,
        outputs: &[f64],
        mut on_output: O,
        mut on_step: S,
    ) -> Result<(Vec<C64>, IntegrationStats)>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        O: FnMut(usize, f64, &[C64]),
        S: FnMut(f64, &[C64]),
    {
        let n = y0.len();
        let zero = C64::from(0.0);
        let mut stats = IntegrationStats::default();
        let mut y = y0;
        let mut t = t0;
        let mut next_out = 0;
        while next_out < outputs.len() && outputs[next_out] <= t0 {
            on_output(next_out, outputs[next_out], &y);
            next_out += 1;
        }
        if next_out == outputs.len() {
            return Ok((y, stats));
        }
        let t_end = *outputs.last().unwrap();

        let mut k1 = vec![zero; n];
        let mut k2 = vec![zero; n];
        let mut k3 = vec![zero; n];
        let mut k4 = vec![zero; n];
        let mut k5 = vec![zero; n];
        let mut k6 = vec![zero; n];
        let mut k7 = vec![zero; n];
        let mut tmp = vec![zero; n];
        let mut y_new = vec![zero; n];
        let mut err = vec![zero; n];
        let mut dense = vec![zero; n];
        let mut interp = vec![zero; n];

        f(t, &y, &mut k1);
        stats.rhs_evals += 1;

        // initial step from the scaled derivative magnitude
        let d0 = self.error_norm(&y, &y, &y);
        let d1 = self.error_norm(&k1, &y, &y);
        let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-3 } else { 0.01 * d0 / d1 };
        h = h.min(self.h_max).min(t_end - t).max(1e-9);

        let mut last_rejected = false;
        let mut steps = 0usize;
        while t < t_end {
            if steps >= self.max_steps {
                return Err(Error::TooManySteps {
                    t,
                    max_steps: self.max_steps,
                });
            }
            steps += 1;
            if h < 1e-10 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t, h });
            }
            let h_step = if t + h > t_end { t_end - t } else { h };

            for i in 0..n {
                tmp[i] = y[i] + k1[i] * (h_step * A21);
            }
            f(t + C2 * h_step, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h_step;
            }
            f(t + C3 * h_step, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h_step;
            }
            f(t + C4 * h_step, &tmp, &mut k4);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h_step;
            }
            f(t + C5 * h_step, &tmp, &mut k5);
            for i in 0..n {
                tmp[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h_step;
            }
            f(t + h_step, &tmp, &mut k6);
            for i in 0..n {
                y_new[i] = y[i] + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h_step;
            }
            f(t + h_step, &y_new, &mut k7);
            stats.rhs_evals += 6;
            for i in 0..n {
                err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h_step;
            }
            let en = self.error_norm(&err, &y, &y_new);

            if en <= 1.0 {
                stats.accepted += 1;
                let t_new = t + h_step;
                // dense output between t and t_new
                if next_out < outputs.len() && outputs[next_out] <= t_new {
                    for i in 0..n {
                        dense[i] = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h_step;
                    }
                    while next_out < outputs.len() && outputs[next_out] <= t_new {
                        let to = outputs[next_out];
                        if to == t_new {
                            on_output(next_out, to, &y_new);
                        } else {
                            let th = (to - t) / h_step;
                            let th1 = 1.0 - th;
                            for i in 0..n {
                                let r2 = y_new[i] - y[i];
                                let r3 = k1[i] * h_step - r2;
                                let r4 = r2 - k7[i] * h_step - r3;
                                interp[i] = y[i] + (r2 + (r3 + (r4 + dense[i] * th1) * th) * th1) * th;
                            }
                            on_output(next_out, to, &interp);
                        }
                        next_out += 1;
                    }
                }
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                t = t_new;
                on_step(t, &y);
                let mut fac = 0.9 * en.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, if last_rejected { 1.0 } else { 10.0 });
                h = (h_step * fac).min(self.h_max);
                last_rejected = false;
            } else {
                stats.rejected += 1;
                let fac = (0.9 * en.powf(-0.2)).max(0.2);
                h = h_step * fac;
                last_rejected = true;
            }
        }
        Ok((y, stats))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_exponential() {
        // y' = (−0.3 + 2i) y
        let lam = C64::new(-0.3, 2.0);
        let solver = Dopri5::new(Tolerances { atol: 1e-12, rtol: 1e-10 }, 1.0);
        let outs: Vec<f64> = (0..=20).map(|i| i as f64 * 0.37).collect();
        let mut worst = 0.0f64;
        let (_, stats) = solver
            .integrate(
                |_, y, dy| dy[0] = lam * y[0],
                0.0,
                vec![C64::from(1.0)],
                &outs,
                |_, t, y| worst = worst.max((y[0] - (lam * t).exp()).norm()),
                |_, _| {},
            )
            .unwrap();
        assert!(worst < 1e-8, "{worst}");
        assert!(stats.accepted > 0);
    }

    #[test]
    fn dense_output_polynomial() {
        // interpolant is exact to 4th order: y' = 4t³ → y = t⁴
        let solver = Dopri5::new(Tolerances { atol: 1e-13, rtol: 1e-13 }, 0.5);
        let outs = [0.1, 0.33, 0.5, 0.77, 1.0];
        let mut worst = 0.0f64;
        solver
            .integrate(
                |t, _, dy| dy[0] = C64::from(4.0 * t * t * t),
                0.0,
                vec![C64::from(0.0)],
                &outs,
                |_, t, y| worst = worst.max((y[0].re - t.powi(4)).abs()),
                |_, _| {},
            )
            .unwrap();
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn output_at_start_reported() {
        let solver = Dopri5::new(Tolerances::default(), 1.0);
        let mut seen = vec![];
        solver
            .integrate(|_, _, dy| dy[0] = C64::from(1.0), 2.0, vec![C64::from(0.0)], &[2.0, 3.0], |i, t, y| seen.push((i, t, y[0].re)), |_, _| {})
            .unwrap();
        assert_eq!(seen.len(), 2);
        assert!((seen[1].2 - 1.0).abs() < 1e-12);
    }
}
