use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::model::{field, in_gamma, qf, Params, State, Variant, GAMMA_SLACK};

/// 5x5 Jacobian in the order `(y1, y2, zS, z1, z2)`.
pub type Jacobian = SMatrix<f64, 5, 5>;

/// Step used for the coordination-variant finite-difference Jacobian.
pub const FD_STEP: f64 = 1e-6;

/// Entries that are identically zero in the standard-variant Jacobian
/// (0-based row, column).
pub const STRUCTURAL_ZEROS: [(usize, usize); 12] = [
    (0, 4),
    (1, 3),
    (2, 3),
    (2, 4),
    (3, 0),
    (3, 1),
    (3, 2),
    (3, 4),
    (4, 0),
    (4, 1),
    (4, 2),
    (4, 3),
];

/// Jacobian at `x`: analytic for the standard variant, central differences
/// for the coordination variant.
pub fn jacobian(p: &Params, x: &State) -> Result<Jacobian> {
    if !in_gamma(x, GAMMA_SLACK) {
        return Err(Error::Domain(format!(
            "state {:?} outside the state space",
            x.to_array()
        )));
    }
    Ok(match p.variant {
        Variant::Standard => analytic_jacobian(p, x),
        Variant::Coordination => fd_jacobian(p, x, FD_STEP),
    })
}

/// Exact entries of the standard-variant Jacobian.
pub fn analytic_jacobian(p: &Params, x: &State) -> Jacobian {
    let State { y1, y2, zs, z1, z2 } = *x;
    let k = 1.0 - p.q;
    let s = 1.0 - y1 - y2;
    let a = qf(zs, p.q);
    let (b1, b2) = (qf(z1, p.q), qf(z2, p.q));
    let hs = 2.0 * (p.r1 * y1 + p.r2 * y2) - p.c_d;
    let w = zs * (1.0 - zs);

    let mut j = Jacobian::zeros();
    j[(0, 0)] = p.beta1 * (s - y1) * a * b1 - p.delta1;
    j[(0, 1)] = -p.beta1 * y1 * a * b1;
    j[(0, 2)] = -k * p.beta1 * y1 * s * b1;
    j[(0, 3)] = -k * p.beta1 * y1 * s * a;

    j[(1, 0)] = -p.beta2 * y2 * a * b2;
    j[(1, 1)] = p.beta2 * (s - y2) * a * b2 - p.delta2;
    j[(1, 2)] = -k * p.beta2 * y2 * s * b2;
    j[(1, 4)] = -k * p.beta2 * y2 * s * a;

    j[(2, 0)] = 2.0 * p.r1 * w;
    j[(2, 1)] = 2.0 * p.r2 * w;
    j[(2, 2)] = (1.0 - 2.0 * zs) * hs;

    j[(3, 3)] = (1.0 - 2.0 * z1) * (p.c1 - p.c_d);
    j[(4, 4)] = (1.0 - 2.0 * z2) * (p.c2 - p.c_d);
    j
}

/// Central-difference Jacobian of the vector field with step `h`.
///
/// The field is polynomial, so evaluating slightly outside the state space
/// is harmless.
pub fn fd_jacobian(p: &Params, x: &State, h: f64) -> Jacobian {
    let base = x.to_array();
    let mut j = Jacobian::zeros();
    for col in 0..5 {
        let mut plus = base;
        let mut minus = base;
        plus[col] += h;
        minus[col] -= h;
        let (fp, fm) = (field(p, &plus), field(p, &minus));
        for row in 0..5 {
            j[(row, col)] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::params;

    #[test]
    fn structural_zeros_hold() {
        let p = params::fig1();
        let j = analytic_jacobian(&p, &State::new(0.2, 0.3, 0.4, 0.45, 0.6));
        for (r, c) in STRUCTURAL_ZEROS {
            assert_eq!(j[(r, c)], 0.0);
        }
        let nonzero = j.iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, 25 - 12);
    }

    #[test]
    fn witness_signs_at_interior() {
        let j = analytic_jacobian(&params::fig2(), &State::new(0.2, 0.3, 0.4, 0.5, 0.6));
        assert!(j[(0, 2)] < 0.0 && j[(2, 0)] > 0.0);
    }

    #[test]
    fn p10_diagonal_closed_form() {
        let p = params::fig2();
        let y1 = 5.0 / 9.0;
        let j = analytic_jacobian(&p, &State::new(y1, 0.0, 0.0, 1.0, 1.0));
        let want = [
            p.delta1 - p.beta1 * p.q,
            p.beta2 * p.delta1 / p.beta1 - p.delta2,
            2.0 * p.r1 * (1.0 - p.delta1 / (p.q * p.beta1)) - p.c_d,
            -(p.c1 - p.c_d),
            -(p.c2 - p.c_d),
        ];
        for i in 0..5 {
            assert!(
                (j[(i, i)] - want[i]).abs() < 1e-15,
                "{i}: {} vs {}",
                j[(i, i)],
                want[i]
            );
        }
        for r in 1..5 {
            for c in 0..r {
                assert_eq!(j[(r, c)], 0.0, "({r},{c})");
            }
        }
    }

    #[test]
    fn analytic_matches_fd() {
        let p = params::fig3();
        let x = State::new(0.15, 0.35, 0.45, 0.55, 0.65);
        let a = analytic_jacobian(&p, &x);
        let n = fd_jacobian(&p, &x, 1e-6);
        assert!((a - n).amax() < 1e-8);
    }

    #[test]
    fn coordination_uses_fd() {
        let p = params::fig8();
        let x = State::new(0.2, 0.3, 0.4, 0.5, 0.6);
        let j = jacobian(&p, &x).unwrap();
        // zS row gains zS(1 - zS) on the diagonal relative to the standard form
        let std = analytic_jacobian(&p, &x);
        let extra = (1.0 - 2.0 * x.zs) * (x.zs - 1.0) + x.zs * (1.0 - x.zs);
        assert!((j[(2, 2)] - std[(2, 2)] - extra).abs() < 1e-8);
        assert!(jacobian(&p, &State::new(0.9, 0.9, 0.0, 0.0, 0.0)).is_err());
    }
}
