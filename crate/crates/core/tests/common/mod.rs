#![allow(dead_code)]

use bivirus::{Params, State, Variant};
use rand::Rng;

/// Random parameters with costs at least `0.05` away from `cD`. About half
/// the draws share one base reproduction number.
pub fn random_generic<R: Rng>(rng: &mut R) -> Params {
    let beta1 = rng.gen_range(0.2..1.5);
    let delta = [rng.gen_range(0.05..0.5), rng.gen_range(0.05..0.5)];
    let beta2 = if rng.gen_bool(0.5) {
        delta[1] * beta1 / delta[0]
    } else {
        rng.gen_range(0.2..1.5)
    };
    let c_d = rng.gen_range(0.1..2.0);
    let mut cost = || {
        if rng.gen_bool(0.75) {
            c_d + rng.gen_range(0.05..1.5)
        } else {
            c_d * rng.gen_range(0.1..0.9)
        }
    };
    let c = [cost(), cost()];
    let r = [rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0)];
    Params::standard([beta1, beta2], delta, r, c, c_d, rng.gen_range(0.1..0.9))
}

pub fn random_any<R: Rng>(rng: &mut R) -> Params {
    let p = random_generic(rng);
    if rng.gen_bool(0.5) {
        p.with_variant(Variant::Coordination)
    } else {
        p
    }
}

/// Central differences of the vector field, written out here so the
/// library's own finite-difference Jacobian is not the reference.
pub fn central_differences(p: &Params, x: &State, h: f64) -> [[f64; 5]; 5] {
    let mut out = [[0.0; 5]; 5];
    let base = x.to_array();
    for col in 0..5 {
        let mut plus = base;
        let mut minus = base;
        plus[col] += h;
        minus[col] -= h;
        let f_plus = field_unchecked(p, &plus);
        let f_minus = field_unchecked(p, &minus);
        for row in 0..5 {
            out[row][col] = (f_plus[row] - f_minus[row]) / (2.0 * h);
        }
    }
    out
}

/// The vector field without the state-space check, from the model
/// definition.
pub fn field_unchecked(p: &Params, x: &[f64; 5]) -> [f64; 5] {
    let [y1, y2, zs, z1, z2] = *x;
    let qz = |z: f64| 1.0 - z * (1.0 - p.q);
    let s = 1.0 - y1 - y2;
    let mut gs = 2.0 * (p.r1 * y1 + p.r2 * y2) - p.c_d;
    if p.variant == Variant::Coordination {
        gs += zs - 1.0;
    }
    [
        y1 * (p.beta1 * s * qz(zs) * qz(z1) - p.delta1),
        y2 * (p.beta2 * s * qz(zs) * qz(z2) - p.delta2),
        zs * (1.0 - zs) * gs,
        z1 * (1.0 - z1) * (p.c1 - p.c_d),
        z2 * (1.0 - z2) * (p.c2 - p.c_d),
    ]
}
