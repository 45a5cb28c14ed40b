//! Reference parameter sets and initial states.

use crate::equilibria::{candidate_families, FamilyKind, R0Policy};
use crate::integrator::Oscillation;
use crate::model::{Params, State, Variant};

use super::{Expected, OscillationCheck, ScenarioSpec};

/// Step size used for reproductions.
pub const H: f64 = 1e-4;

pub mod params {
    use super::*;

    pub fn fig1() -> Params {
        Params::standard([0.8, 0.7], [0.4, 0.4], [3.0, 3.0], [9.0, 9.0], 1.0, 0.5)
    }

    pub fn fig2() -> Params {
        Params::standard([0.9, 0.6], [0.2, 0.2], [0.2, 0.1], [0.6, 0.6], 0.5, 0.5)
    }

    pub fn fig3() -> Params {
        Params::standard([2.0, 0.3], [0.1, 0.6], [0.6, 0.4], [0.5, 0.5], 0.4, 0.3)
    }

    pub fn fig4() -> Params {
        Params::standard([0.7, 0.1], [0.3, 0.6], [1.0, 1.0], [0.6, 1.5], 0.5, 0.6)
    }

    pub fn fig5() -> Params {
        Params::standard([0.4, 0.4], [0.2, 0.2], [1.0, 2.0], [4.0, 4.0], 2.0, 0.8)
    }

    pub fn fig6() -> Params {
        Params::standard([0.4, 0.4], [0.2, 0.2], [1.0, 2.0], [4.0, 4.0], 0.1, 0.8)
    }

    /// Coordination variant with identical viruses.
    pub fn fig8() -> Params {
        Params::standard([0.8, 0.8], [0.1, 0.1], [1.1, 1.1], [0.2, 0.3], 1.0, 0.1)
            .with_variant(Variant::Coordination)
    }

    /// As [`fig8`] with `beta1 = 0.9`.
    pub fn fig9() -> Params {
        let mut p = fig8();
        p.beta1 = 0.9;
        p
    }

    /// Parameters with a nonempty partial-distancing curve, from [`super::ls_search`].
    pub fn ls() -> Params {
        super::ls_search().0
    }
}

pub mod starts {
    use super::*;

    pub fn fig1() -> State {
        State::new(0.4, 0.6, 0.1, 0.1, 0.2)
    }

    pub fn fig2() -> State {
        State::new(0.1, 0.8, 0.9, 0.2, 0.3)
    }

    pub fn fig3() -> State {
        State::new(0.1, 0.9, 0.5, 0.4, 0.7)
    }

    /// Shares the fig2 start.
    pub fn fig4() -> State {
        fig2()
    }

    /// The four starts shared by the line scenarios (the repeat is kept).
    pub fn lines() -> [State; 4] {
        [
            State::new(0.1, 0.8, 0.9, 0.9, 0.9),
            State::new(0.1, 0.1, 0.5, 0.5, 0.5),
            State::new(0.8, 0.1, 0.5, 0.5, 0.5),
            State::new(0.1, 0.1, 0.5, 0.5, 0.5),
        ]
    }

    pub fn fig8() -> State {
        State::new(0.5, 0.3, 0.6, 0.1, 0.2)
    }

    /// Midpoint of the partial-distancing curve pushed `1e-2` off it.
    pub fn ls() -> State {
        let x = super::ls_search().1;
        let d = 1e-2;
        State::new(x.y1 + d, x.y2 + d, x.zs - d, x.z1 - d, x.z2 - d)
    }
}

/// Grid search for parameters with a partial-distancing curve.
///
/// Rates are fixed at `beta = (0.8, 0.4)`, `delta = (0.2, 0.1)` (so both
/// `R0` equal 4) and `c_i = cD + 1`. Over a grid of `q`, `cD`, `r1 < r2`
/// the winner is the candidate whose curve midpoint lies deepest inside the
/// state space, measured by the smallest of `y1, y2, s, zS, 1 - zS`.
/// Returns the parameters and that midpoint.
pub fn ls_search() -> (Params, State) {
    let qs = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
    let cds = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0];
    let rs = [0.5, 1.0, 1.5, 2.0, 3.0];
    let mut best: Option<(f64, Params, State)> = None;
    for &q in &qs {
        for &c_d in &cds {
            for &r1 in &rs {
                for &r2 in rs.iter().filter(|r| **r > r1) {
                    let p = Params::standard(
                        [0.8, 0.4],
                        [0.2, 0.1],
                        [r1, r2],
                        [c_d + 1.0, c_d + 1.0],
                        c_d,
                        q,
                    );
                    let Some(ls) = candidate_families(&p, R0Policy::default())
                        .into_iter()
                        .find(|f| f.kind == FamilyKind::LS)
                    else {
                        continue;
                    };
                    if !ls.existence[0].holds() {
                        continue;
                    }
                    let x = ls.point_unchecked(0.5 * (ls.y1_lo + ls.y1_hi));
                    let depth = [x.y1, x.y2, x.s(), x.zs, 1.0 - x.zs]
                        .into_iter()
                        .fold(f64::INFINITY, f64::min);
                    if best.as_ref().is_none_or(|b| depth > b.0 + 1e-12) {
                        best = Some((depth, p, x));
                    }
                }
            }
        }
    }
    let (_, p, x) = best.expect("grid contains an admissible point");
    (p, x)
}

pub const IDS: [&str; 9] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
];

fn point(name: &str, quoted: Option<State>, tol: f64) -> Expected {
    Expected::Point {
        equilibrium: name.to_string(),
        quoted,
        tol,
    }
}

/// The registered scenario `id`.
pub fn spec(id: &str) -> Option<ScenarioSpec> {
    let convergent =
        |name: &str, params: Params, starts: Vec<State>, t_end: f64, expected: Expected| {
            ScenarioSpec {
                name: name.to_string(),
                params,
                starts,
                h: H,
                t_end,
                record_every: 1000,
                expected,
            }
        };
    Some(match id {
        "fig1" => convergent(
            id,
            params::fig1(),
            vec![starts::fig1()],
            500.0,
            point("candidate", Some(State::new(0.0, 0.0, 0.0, 1.0, 1.0)), 1e-2),
        ),
        "fig2" => convergent(
            id,
            params::fig2(),
            vec![starts::fig2()],
            300.0,
            point("p10", Some(State::new(5.0 / 9.0, 0.0, 0.0, 1.0, 1.0)), 1e-3),
        ),
        "fig3" => convergent(
            id,
            params::fig3(),
            vec![starts::fig3()],
            300.0,
            point("p11", Some(State::new(4.0 / 9.0, 0.0, 1.0, 1.0, 1.0)), 1e-3),
        ),
        "fig4" => convergent(
            id,
            params::fig4(),
            vec![starts::fig4()],
            300.0,
            point(
                "p1S",
                Some(State::new(0.25, 0.0, 5.0 / 42.0, 1.0, 1.0)),
                1e-3,
            ),
        ),
        "fig5" => convergent(
            id,
            params::fig5(),
            starts::lines().to_vec(),
            300.0,
            Expected::Family {
                family: FamilyKind::L0,
                tol: 1e-3,
            },
        ),
        "fig6" => convergent(
            id,
            params::fig6(),
            starts::lines().to_vec(),
            300.0,
            Expected::Family {
                family: FamilyKind::L1,
                tol: 1e-3,
            },
        ),
        "fig7" => convergent(
            id,
            params::ls(),
            vec![starts::ls()],
            300.0,
            Expected::Family {
                family: FamilyKind::LS,
                tol: 1e-3,
            },
        ),
        "fig8" => ScenarioSpec {
            name: id.to_string(),
            params: params::fig8(),
            starts: vec![starts::fig8()],
            h: H,
            t_end: 2000.0,
            record_every: 1000,
            expected: Expected::LimitCycle {
                checks: vec![OscillationCheck {
                    coordinate: 0,
                    expect: Oscillation::Sustained,
                    min_amplitude: Some(0.05),
                }],
            },
        },
        "fig9" => ScenarioSpec {
            name: id.to_string(),
            params: params::fig9(),
            starts: vec![starts::fig8()],
            h: H,
            t_end: 2000.0,
            record_every: 1000,
            expected: Expected::LimitCycle {
                checks: vec![OscillationCheck {
                    coordinate: 1,
                    expect: Oscillation::Decaying,
                    min_amplitude: None,
                }],
            },
        },
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::coexistence_families;
    use crate::model::in_gamma;

    #[test]
    fn every_id_resolves() {
        for id in IDS {
            let s = spec(id).unwrap();
            assert!(s.starts.iter().all(|x| in_gamma(x, 0.0)), "{id}");
            assert!(s.params.ensure_valid().is_ok());
        }
        assert!(spec("fig10").is_none());
    }

    #[test]
    fn ls_search_is_admissible() {
        let (p, x) = ls_search();
        assert_eq!(
            p.r0(crate::model::Virus::One),
            p.r0(crate::model::Virus::Two)
        );
        assert!(validate_prosocial(&p));
        let ls = coexistence_families(&p)
            .into_iter()
            .find(|f| f.kind == FamilyKind::LS)
            .unwrap();
        assert!(ls.contains(&x, 1e-15));
        assert!(in_gamma(&starts::ls(), 0.0));
    }

    fn validate_prosocial(p: &Params) -> bool {
        crate::model::validate(p).unwrap().prosocial()
    }
}
