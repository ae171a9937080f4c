use crate::error::{Error, Result};

/// Largest Fock truncation tried before giving up.
pub const TRUNCATION_CAP: usize = 40;

/// Relative change below which a truncation is considered converged.
const REL_TOL: f64 = 1e-3;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()) + 1e-14
}

/// Climbs the (n_h, n_v) ladder from `start` until incrementing either
/// truncation changes the scalar returned by `experiment` by less than 1e-3
/// relative. Each axis is incremented only while it is the one that moves.
pub fn converge_truncation<F>(mut experiment: F, start: (usize, usize)) -> Result<(usize, usize)>
where
    F: FnMut(usize, usize) -> Result<f64>,
{
    let (mut nh, mut nv) = (start.0.max(1), start.1.max(1));
    let mut base = experiment(nh, nv)?;
    loop {
        if nh + 1 > TRUNCATION_CAP || nv + 1 > TRUNCATION_CAP {
            return Err(Error::TruncationCap { cap: TRUNCATION_CAP });
        }
        let up_h = experiment(nh + 1, nv)?;
        let up_v = experiment(nh, nv + 1)?;
        let h_ok = close(base, up_h);
        let v_ok = close(base, up_v);
        match (h_ok, v_ok) {
            (true, true) => return Ok((nh, nv)),
            (false, true) => {
                nh += 1;
                base = up_h;
            }
            (true, false) => {
                nv += 1;
                base = up_v;
            }
            (false, false) => {
                nh += 1;
                nv += 1;
                base = experiment(nh, nv)?;
            }
        }
    }
}
