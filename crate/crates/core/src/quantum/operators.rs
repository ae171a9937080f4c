use super::{dagger, HilbertSpace, Operator, EXCITON_H, EXCITON_V, GROUND};
use crate::error::{invalid, Result};
use crate::C64;
use nalgebra::DMatrix;

/// Bosonic annihilation operator truncated to `n_fock` levels:
/// `a[k, k+1] = √(k+1)`.
pub fn annihilation(n_fock: usize) -> Result<Operator> {
    if n_fock == 0 {
        return Err(invalid("n_fock", "must be at least 1"));
    }
    let mut a = DMatrix::zeros(n_fock, n_fock);
    for k in 0..n_fock - 1 {
        a[(k, k + 1)] = C64::from(((k + 1) as f64).sqrt());
    }
    Ok(a)
}

/// Coefficients of the cavity-axis exciton states in the (|X⟩, |Y⟩) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitonBasis {
    /// |V⟩ = v[0]|X⟩ + v[1]|Y⟩
    pub v: [f64; 2],
    /// |H⟩ = h[0]|X⟩ + h[1]|Y⟩
    pub h: [f64; 2],
}

pub fn exciton_rotation(theta: f64) -> ExcitonBasis {
    let (s, c) = theta.sin_cos();
    ExcitonBasis {
        v: [c, s],
        h: [-s, c],
    }
}

/// Exciton detunings projected on the cavity axes, `(δ_H^QD, δ_V^QD)`.
pub fn qd_detunings(delta_x: f64, delta_y: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    (delta_x * s2 + delta_y * c2, delta_x * c2 + delta_y * s2)
}

/// Every operator of the model embedded in the full space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub space: HilbertSpace,
    /// |G⟩⟨H|
    pub sigma_h: Operator,
    /// |G⟩⟨V|
    pub sigma_v: Operator,
    /// |G⟩⟨X| and |G⟩⟨Y| for the natural QD axes at angle θ.
    pub sigma_x: Operator,
    pub sigma_y: Operator,
    pub a_h: Operator,
    pub a_v: Operator,
    /// |H⟩⟨H| + |V⟩⟨V|
    pub pi_ex: Operator,
    pub identity: Operator,
}

impl OperatorSet {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn n_h(&self) -> Operator {
        dagger(&self.a_h) * &self.a_h
    }

    pub fn n_v(&self) -> Operator {
        dagger(&self.a_v) * &self.a_v
    }
}

fn exciton_op(row: usize, col: usize) -> Operator {
    let mut m = DMatrix::zeros(3, 3);
    m[(row, col)] = C64::from(1.0);
    m
}

/// Embeds the operators on the exciton ⊗ H ⊗ V product.
pub fn build_operators(space: HilbertSpace, theta: f64) -> OperatorSet {
    let nh = space.n_fock_h();
    let nv = space.n_fock_v();
    let id_h = DMatrix::<C64>::identity(nh, nh);
    let id_v = DMatrix::<C64>::identity(nv, nv);
    let id_x = DMatrix::<C64>::identity(3, 3);
    let modes = id_h.kronecker(&id_v);

    let embed_exciton = |m: &Operator| m.kronecker(&modes);
    let sigma_h = embed_exciton(&exciton_op(GROUND, EXCITON_H));
    let sigma_v = embed_exciton(&exciton_op(GROUND, EXCITON_V));
    let pi_ex = embed_exciton(&(exciton_op(EXCITON_H, EXCITON_H) + exciton_op(EXCITON_V, EXCITON_V)));

    // n_fock >= 1 is guaranteed by HilbertSpace
    let a_h = id_x.kronecker(&annihilation(nh).unwrap().kronecker(&id_v));
    let a_v = id_x.kronecker(&id_h.kronecker(&annihilation(nv).unwrap()));

    // |X⟩ = cosθ|V⟩ − sinθ|H⟩, |Y⟩ = sinθ|V⟩ + cosθ|H⟩
    let (s, c) = theta.sin_cos();
    let sigma_x = &sigma_v * C64::from(c) - &sigma_h * C64::from(s);
    let sigma_y = &sigma_v * C64::from(s) + &sigma_h * C64::from(c);

    OperatorSet {
        space,
        sigma_h,
        sigma_v,
        sigma_x,
        sigma_y,
        a_h,
        a_v,
        pi_ex,
        identity: DMatrix::identity(space.dim(), space.dim()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::commutator;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn max_abs(m: &Operator) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn annihilation_examples() {
        assert!(annihilation(0).is_err());
        let a1 = annihilation(1).unwrap();
        assert_eq!(a1.shape(), (1, 1));
        assert_eq!(a1[(0, 0)], C64::from(0.0));
        let a2 = annihilation(2).unwrap();
        assert_eq!(a2[(0, 1)], C64::from(1.0));
        assert_eq!(max_abs(&(a2.clone() - DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0].map(C64::from)))), 0.0);
        let a3 = annihilation(3).unwrap();
        assert_eq!(a3[(0, 1)], C64::from(1.0));
        assert!((a3[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a3.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn rotation_examples() {
        let b = exciton_rotation(0.0);
        assert_eq!(b.v, [1.0, 0.0]);
        assert_eq!(b.h, [0.0, 1.0]);
        let b = exciton_rotation(FRAC_PI_2);
        assert!((b.v[0]).abs() < 1e-16 && (b.v[1] - 1.0).abs() < 1e-16);
        assert!((b.h[0] + 1.0).abs() < 1e-16 && b.h[1].abs() < 1e-16);
        let b = exciton_rotation(15f64.to_radians());
        assert!((b.v[0] - 0.9659).abs() < 5e-5 && (b.v[1] - 0.2588).abs() < 5e-5);
        // orthonormal
        assert!((b.v[0] * b.h[0] + b.v[1] * b.h[1]).abs() < 1e-15);
    }

    #[test]
    fn detuning_examples() {
        let (h, v) = qd_detunings(3.0, 0.0, 0.0);
        assert_eq!((h, v), (0.0, 3.0));
        let (h, v) = qd_detunings(3.0, 1.0, FRAC_PI_4);
        assert!((h - 2.0).abs() < 1e-14 && (v - 2.0).abs() < 1e-14);
        let (h, v) = qd_detunings(3.0, 0.0, 15f64.to_radians());
        assert!((h - 0.201).abs() < 5e-4 && (v - 2.799).abs() < 5e-4);
    }

    #[test]
    fn build_examples() {
        let ops = build_operators(HilbertSpace::new(1, 1).unwrap(), 0.0);
        assert_eq!(ops.dim(), 3);
        assert_eq!(max_abs(&ops.a_h), 0.0);
        assert_eq!(max_abs(&ops.a_v), 0.0);

        let ops = build_operators(HilbertSpace::new(3, 2).unwrap(), 0.0);
        assert_eq!(ops.dim(), 18);
        assert!((ops.pi_ex.trace().re - 12.0).abs() < 1e-14);
        assert_eq!(max_abs(&commutator(&ops.sigma_h, &ops.a_h)), 0.0);
        assert_eq!(max_abs(&commutator(&ops.sigma_v, &ops.a_v)), 0.0);
        assert_eq!(max_abs(&commutator(&ops.a_h, &ops.a_v)), 0.0);
        assert_eq!(max_abs(&commutator(&ops.a_h, &dagger(&ops.a_v))), 0.0);
    }

    #[test]
    fn operator_invariants() {
        let space = HilbertSpace::new(4, 3).unwrap();
        let ops = build_operators(space, 0.3);
        // σ² = 0
        assert_eq!(max_abs(&(&ops.sigma_h * &ops.sigma_h)), 0.0);
        assert_eq!(max_abs(&(&ops.sigma_v * &ops.sigma_v)), 0.0);
        // Π_ex projector, equal to σ_H†σ_H + σ_V†σ_V
        assert_eq!(max_abs(&(&ops.pi_ex * &ops.pi_ex - &ops.pi_ex)), 0.0);
        assert_eq!(max_abs(&(&ops.pi_ex - dagger(&ops.pi_ex))), 0.0);
        let sum = dagger(&ops.sigma_h) * &ops.sigma_h + dagger(&ops.sigma_v) * &ops.sigma_v;
        assert_eq!(max_abs(&(sum - &ops.pi_ex)), 0.0);
        // the X/Y dipoles span the same excited manifold
        let sum_xy = dagger(&ops.sigma_x) * &ops.sigma_x + dagger(&ops.sigma_y) * &ops.sigma_y;
        assert!(max_abs(&(sum_xy - &ops.pi_ex)) < 1e-15);

        // [a, a†] = 1 below the top Fock level
        for (a, top_of) in [(&ops.a_h, 1usize), (&ops.a_v, 2usize)] {
            let c = commutator(a, &dagger(a));
            for i in 0..space.dim() {
                let labels = space.labels(i);
                let level = if top_of == 1 { labels.1 } else { labels.2 };
                let cutoff = if top_of == 1 { space.n_fock_h() } else { space.n_fock_v() };
                for j in 0..space.dim() {
                    let expected = if i == j && level < cutoff - 1 { 1.0 } else if i == j { -((cutoff - 1) as f64) } else { 0.0 };
                    assert!((c[(i, j)] - C64::from(expected)).norm() < 1e-13);
                }
            }
        }
    }
}
