//! Monte-Carlo estimates of basins of attraction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{catalogue, Equilibrium, EquilibriumFamily, FamilyKind, R0Policy};
use crate::error::{Error, Result};
use crate::integrator::{detect_convergence, simulate, DEFAULT_DT};
use crate::model::{qf, Params, State, Virus};

/// Set that a probe counts as reached.
#[derive(Clone, Debug, Serialize)]
pub enum BasinTarget {
    Point(State),
    /// `zS`, `z1`, `z2` fixed and `y1 + y2 = sum`.
    Line {
        zs: f64,
        z: [f64; 2],
        sum: f64,
    },
    Family(EquilibriumFamily),
}

impl From<Equilibrium> for BasinTarget {
    fn from(e: Equilibrium) -> Self {
        BasinTarget::Point(e.point)
    }
}

impl BasinTarget {
    pub fn distance(&self, x: &State) -> f64 {
        match self {
            BasinTarget::Point(t) => x.max_dist(t),
            BasinTarget::Line { zs, z, sum } => (x.zs - zs)
                .abs()
                .max((x.z1 - z[0]).abs())
                .max((x.z2 - z[1]).abs())
                .max((x.y1 + x.y2 - sum).abs()),
            BasinTarget::Family(f) => {
                let outside = (f.y1_lo - x.y1).max(x.y1 - f.y1_hi).max(0.0);
                f.constraint_residual(x).max(outside)
            }
        }
    }

    /// The endemic set without susceptible distancing: `zS = 0`,
    /// `z_i = [c_i > cD]`, infection at the level set by the effective
    /// reproduction numbers. A line when those are equal, otherwise the
    /// dominant virus's point. `None` when neither virus persists.
    pub fn endemic(p: &Params) -> Option<Self> {
        let z = [p.z_star(Virus::One), p.z_star(Virus::Two)];
        let eff = [
            qf(z[0], p.q) * p.r0(Virus::One),
            qf(z[1], p.q) * p.r0(Virus::Two),
        ];
        let top = eff[0].max(eff[1]);
        if top <= 1.0 {
            return None;
        }
        let level = 1.0 - 1.0 / top;
        if (eff[0] - eff[1]).abs() <= crate::equilibria::R0_EPS * top {
            return Some(BasinTarget::Line {
                zs: 0.0,
                z,
                sum: level,
            });
        }
        let (y1, y2) = if eff[0] > eff[1] {
            (level, 0.0)
        } else {
            (0.0, level)
        };
        Some(BasinTarget::Point(State::new(y1, y2, 0.0, z[0], z[1])))
    }

    /// Resolves an equilibrium name, `candidate`, `L0`/`L1`/`LS` or `endemic`.
    pub fn resolve(p: &Params, name: &str) -> Result<Self> {
        if name == "endemic" {
            return BasinTarget::endemic(p).ok_or_else(|| {
                Error::Config("no endemic set: both effective numbers are at most 1".into())
            });
        }
        let cat = catalogue(p);
        let kind = match name {
            "L0" => Some(FamilyKind::L0),
            "L1" => Some(FamilyKind::L1),
            "LS" => Some(FamilyKind::LS),
            _ => None,
        };
        if let Some(kind) = kind {
            let fam = crate::equilibria::coexistence_families_with(p, R0Policy::default());
            return fam
                .into_iter()
                .find(|f| f.kind == kind)
                .map(BasinTarget::Family)
                .ok_or_else(|| Error::Config(format!("family {kind} does not exist")));
        }
        cat.find(name)
            .map(|e| BasinTarget::Point(e.point))
            .ok_or_else(|| Error::Config(format!("unknown target `{name}`")))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BasinOptions {
    pub h: f64,
    pub t_end: f64,
    /// Convergence and distance tolerance.
    pub tol: f64,
}

impl Default for BasinOptions {
    fn default() -> Self {
        BasinOptions {
            h: DEFAULT_DT,
            t_end: 300.0,
            tol: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BasinReport {
    pub n: usize,
    pub seed: u64,
    pub reached: usize,
    pub fraction: f64,
    pub starts: Vec<State>,
    pub reached_each: Vec<bool>,
    pub final_distance: Vec<f64>,
}

fn in_simplex(x: &State) -> bool {
    x.y1 >= 0.0 && x.y2 >= 0.0 && x.y1 + x.y2 <= 1.0
}

/// Attraction domain of the stable DFE: `zS < 1`, and each `z_i` either
/// interior or already at `[c_i > cD]`.
pub fn in_dfe_domain(p: &Params, x: &State) -> bool {
    let z_ok = |z: f64, v: Virus| (z > 0.0 && z < 1.0) || z == p.z_star(v);
    in_simplex(x) && (0.0..1.0).contains(&x.zs) && z_ok(x.z1, Virus::One) && z_ok(x.z2, Virus::Two)
}

/// Attraction domain of `p10`: `y1 > 0`, `zS < 1`, `z1, z2` in `(0, 1]`.
pub fn in_p10_domain(x: &State) -> bool {
    let z_ok = |z: f64| z > 0.0 && z <= 1.0;
    in_simplex(x) && x.y1 > 0.0 && (0.0..1.0).contains(&x.zs) && z_ok(x.z1) && z_ok(x.z2)
}

/// `n` uniform draws from the interior of the state space: `(y1, y2)` by
/// rejection on the open simplex, the `z` coordinates uniform on `(0, 1)`.
pub fn sample_interior<R: Rng>(rng: &mut R, n: usize) -> Vec<State> {
    let open = |rng: &mut R| loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    };
    (0..n)
        .map(|_| {
            let (y1, y2) = loop {
                let (a, b) = (open(rng), open(rng));
                if a + b < 1.0 {
                    break (a, b);
                }
            };
            State::new(y1, y2, open(rng), open(rng), open(rng))
        })
        .collect()
}

/// Fraction of `n` random interior starts that converge onto `target`.
/// Deterministic for a fixed seed.
pub fn basin_probe(
    p: &Params,
    target: &BasinTarget,
    n: usize,
    seed: u64,
    opts: BasinOptions,
) -> Result<BasinReport> {
    p.ensure_valid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = sample_interior(&mut rng, n);
    let record_every = ((opts.t_end / opts.h / 1000.0).round() as usize).max(1);
    let results = starts
        .par_iter()
        .map(|x0| {
            let tr = simulate(p, x0, opts.h, opts.t_end, record_every)?;
            let v = detect_convergence(&tr, opts.tol);
            let d = target.distance(&tr.final_state());
            Ok((v.converged && d <= opts.tol, d))
        })
        .collect::<Result<Vec<_>>>()?;
    let reached = results.iter().filter(|r| r.0).count();
    Ok(BasinReport {
        n,
        seed,
        reached,
        fraction: if n == 0 {
            0.0
        } else {
            reached as f64 / n as f64
        },
        starts,
        reached_each: results.iter().map(|r| r.0).collect(),
        final_distance: results.iter().map(|r| r.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::in_gamma;
    use crate::registry::params;

    #[test]
    fn samples_are_interior_and_seeded() {
        let a = sample_interior(&mut ChaCha8Rng::seed_from_u64(7), 200);
        let b = sample_interior(&mut ChaCha8Rng::seed_from_u64(7), 200);
        assert_eq!(a, b);
        for x in &a {
            assert!(in_gamma(x, 0.0) && x.s() > 0.0 && x.y1 > 0.0 && x.zs < 1.0);
        }
    }

    #[test]
    fn domains_contain_interior() {
        let p = params::fig2();
        for x in sample_interior(&mut ChaCha8Rng::seed_from_u64(1), 100) {
            assert!(in_dfe_domain(&p, &x) && in_p10_domain(&x));
        }
        assert!(in_dfe_domain(&p, &State::new(0.1, 0.1, 0.5, 1.0, 0.3)));
        assert!(!in_dfe_domain(&p, &State::new(0.1, 0.1, 0.5, 0.0, 0.3)));
        assert!(!in_dfe_domain(&p, &State::new(0.1, 0.1, 1.0, 0.5, 0.3)));
        assert!(!in_p10_domain(&State::new(0.0, 0.1, 0.5, 0.5, 0.5)));
        assert!(in_p10_domain(&State::new(0.2, 0.0, 0.0, 1.0, 1.0)));
    }

    #[test]
    fn endemic_targets() {
        match BasinTarget::endemic(&params::fig8()).unwrap() {
            BasinTarget::Line { zs, z, sum } => {
                assert_eq!((zs, z), (0.0, [0.0, 0.0]));
                assert!((sum - 0.875).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        match BasinTarget::endemic(&params::fig2()).unwrap() {
            BasinTarget::Point(x) => {
                assert!(x.max_dist(&State::new(5.0 / 9.0, 0.0, 0.0, 1.0, 1.0)) < 1e-15)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn resolve_names() {
        let p = params::fig5();
        assert!(matches!(
            BasinTarget::resolve(&p, "L0"),
            Ok(BasinTarget::Family(_))
        ));
        assert!(BasinTarget::resolve(&p, "LS").is_err());
        assert!(matches!(
            BasinTarget::resolve(&p, "candidate"),
            Ok(BasinTarget::Point(_))
        ));
        assert!(BasinTarget::resolve(&p, "nowhere").is_err());
    }

    #[test]
    fn small_probe_is_deterministic() {
        let p = params::fig2();
        let t = BasinTarget::resolve(&p, "p10").unwrap();
        let opts = BasinOptions {
            h: 1e-2,
            t_end: 300.0,
            tol: 1e-3,
        };
        let a = basin_probe(&p, &t, 4, 3, opts).unwrap();
        let b = basin_probe(&p, &t, 4, 3, opts).unwrap();
        assert_eq!(a.reached_each, b.reached_each);
        assert_eq!(a.fraction, 1.0);
    }
}
