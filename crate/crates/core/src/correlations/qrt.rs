use crate::dynamics::{IntegratorConfig, Model};
use crate::error::Result;
use crate::quantum::{Operator, QuantumState};
use crate::C64;

/// σ ↦ Tr(O σ) on column-major vectorized matrices.
#[derive(Debug, Clone)]
pub struct LinearFunctional {
    terms: Vec<(usize, C64)>,
}

impl LinearFunctional {
    pub fn trace_with(op: &Operator) -> Self {
        let d = op.nrows();
        let mut terms = Vec::new();
        // Tr(Oσ) = Σ_ik O_ik σ_ki
        for i in 0..d {
            for k in 0..d {
                let v = op[(i, k)];
                if v.norm() > 0.0 {
                    terms.push((k + i * d, v));
                }
            }
        }
        Self { terms }
    }

    pub fn eval(&self, y: &[C64]) -> C64 {
        self.terms.iter().map(|&(i, v)| v * y[i]).sum()
    }
}

fn max_abs(m: &Operator) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Propagates the (non-normalized) matrix `sigma0`, given at `t1` together with
/// the frame amplitude `alpha1`, under the model's Liouvillian and calls
/// `observe(index, t, σ(t) as a column-major slice, α(t))` at every time in
/// `times` (all ≥ t1). The matrix is rescaled internally so integrator
/// tolerances act on O(1) entries.
pub(crate) fn propagate<O>(
    model: &Model,
    sigma0: &Operator,
    alpha1: C64,
    t1: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
    mut observe: O,
) -> Result<()>
where
    O: FnMut(usize, f64, &[C64], C64, f64),
{
    let n = model.dim() * model.dim();
    let scale = max_abs(sigma0);
    let zero = vec![C64::from(0.0); n];
    if scale == 0.0 {
        // α still evolves but every correlation vanishes
        for (i, &t) in times.iter().enumerate() {
            observe(i, t, &zero, alpha1, 0.0);
        }
        return Ok(());
    }
    let mut y0: Vec<C64> = sigma0.iter().map(|z| z / scale).collect();
    y0.push(alpha1);
    let h_out = if times.len() > 1 { times[1] - times[0] } else { 1.0 };
    let solver = cfg.solver(h_out, model);
    solver.integrate(
        |t, y, dy| model.rhs(t, y, dy),
        t1,
        y0,
        times,
        |i, t, y| observe(i, t, &y[..n], y[n], scale),
        |_, _| {},
    )?;
    Ok(())
}

/// Tr[ O · U(t, t₁)[ L ρ(t₁) R ] ] for every observable O and time t ≥ t₁.
///
/// With L = a, R = a† and O = a†a this is ⟨a†(t₁) a†(t) a(t) a(t₁)⟩; at t = t₁
/// it reduces to the equal-time moment Tr(R O L ρ).
#[allow(clippy::too_many_arguments)]
pub fn quantum_regression(
    model: &Model,
    rho_t1: &QuantumState,
    alpha_t1: C64,
    t1: f64,
    times: &[f64],
    left: &Operator,
    right: &Operator,
    observables: &[Operator],
    cfg: &IntegratorConfig,
) -> Result<Vec<Vec<C64>>> {
    rho_t1.validate_in(&model.space())?;
    let sigma = left * rho_t1.matrix() * right;
    let functionals: Vec<LinearFunctional> = observables.iter().map(LinearFunctional::trace_with).collect();
    let mut out = vec![Vec::new(); times.len()];
    propagate(model, &sigma, alpha_t1, t1, times, cfg, |i, _, y, _, scale| {
        out[i] = functionals.iter().map(|f| f.eval(y) * scale).collect();
    })?;
    Ok(out)
}
