use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop when the spread of objective values falls below
    /// `ftol·(|f_best| + ftol_abs)`.
    pub ftol: f64,
    pub ftol_abs: f64,
    /// Stop when every vertex lies within `xtol` (relative to the bound
    /// width) of the best vertex.
    pub xtol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_evals: 2000, ftol: 1e-10, ftol_abs: 1e-14, xtol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Bounded Nelder–Mead minimisation. Trial points are clamped to
/// `[lower, upper]`; the initial simplex steps by `step[i]` along each axis,
/// flipping direction at an upper bound.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &SimplexOptions,
) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let clamp = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut start = x0.to_vec();
    clamp(&mut start);
    if n == 0 {
        let v = eval(&start, &mut evals);
        return SimplexResult { x: start, f: v, evals, converged: true };
    }

    let mut simplex = vec![start.clone()];
    for i in 0..n {
        let mut v = start.clone();
        v[i] += if v[i] + step[i] <= upper[i] { step[i] } else { -step[i] };
        clamp(&mut v);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let width: Vec<f64> = (0..n).map(|i| (upper[i] - lower[i]).abs().max(1e-300)).collect();

    let mut converged = false;
    while evals < opts.max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).zip(&width).map(|((a, b), w)| (a - b).abs() / w))
            .fold(0.0, f64::max);
        if spread <= opts.ftol * (values[0].abs() + opts.ftol_abs) || size <= opts.xtol {
            converged = spread.is_finite();
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|i| simplex[..n].iter().map(|v| v[i]).sum::<f64>() / n as f64).collect();
        let towards = |t: f64| {
            let mut v: Vec<f64> = (0..n).map(|i| centroid[i] + t * (simplex[n][i] - centroid[i])).collect();
            clamp(&mut v);
            v
        };

        let xr = towards(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < values[0] {
            let xe = towards(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        // outside contraction if the reflection helped at all, else inside
        let xc = towards(if fr < values[n] { -0.5 } else { 0.5 });
        let fc = eval(&xc, &mut evals);
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        for k in 1..=n {
            let mut v: Vec<f64> = (0..n).map(|i| simplex[0][i] + 0.5 * (simplex[k][i] - simplex[0][i])).collect();
            clamp(&mut v);
            values[k] = eval(&v, &mut evals);
            simplex[k] = v;
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    SimplexResult { x: simplex[best].clone(), f: values[best], evals, converged }
}
