//! Stability predicted from closed-form inequalities on the parameters.

use serde::Serialize;

use crate::equilibria::{
    combine, Condition, Distancing, Equilibrium, EquilibriumFamily, EquilibriumKind, FamilyKind,
    Status,
};
use crate::model::{qf, Params, State, Virus, GENERICITY_EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub verdict: Verdict,
    /// Identifier of the rule that was applied.
    #[serde(rename = "citation")]
    pub rule: &'static str,
    /// The inequality (or conjunction) that decided the verdict.
    pub fired: String,
    /// Every evaluated inequality, existence conditions first.
    pub margins: Vec<Condition>,
}

fn inconclusive(
    rule: &'static str,
    reason: impl Into<String>,
    margins: Vec<Condition>,
) -> Prediction {
    Prediction {
        verdict: Verdict::Inconclusive,
        rule,
        fired: reason.into(),
        margins,
    }
}

/// Stable when every `stable` condition holds (and there is one), unstable when any
/// `unstable` condition holds, inconclusive otherwise. `info` entries are
/// only reported.
fn decide(
    rule: &'static str,
    stable: Vec<Condition>,
    unstable: Vec<Condition>,
    info: Vec<Condition>,
) -> Prediction {
    let verdict;
    let fired;
    if !stable.is_empty() && combine(&stable) == Status::Holds {
        verdict = Verdict::Stable;
        fired = stable
            .iter()
            .map(|c| c.name.as_str())
            .collect::<Vec<_>>()
            .join(" and ");
    } else if let Some(c) = unstable.iter().find(|c| c.holds()) {
        verdict = Verdict::Unstable;
        fired = c.name.clone();
    } else {
        verdict = Verdict::Inconclusive;
        fired = "no hypothesis strictly met".to_string();
    }
    let mut margins = stable;
    margins.extend(unstable);
    margins.extend(info);
    Prediction {
        verdict,
        rule,
        fired,
        margins,
    }
}

fn generic(p: &Params) -> bool {
    (p.c1 - p.c_d).abs() > GENERICITY_EPS && (p.c2 - p.c_d).abs() > GENERICITY_EPS
}

/// An equilibrium whose `z_i` differs from `[c_i > cD]` is unstable.
fn partition(p: &Params, x: &State) -> Option<Prediction> {
    for v in Virus::BOTH {
        let z = x.z(v);
        if z != p.z_star(v) {
            let i = v.number();
            let c = if p.c(v) > p.c_d {
                Condition::lt(format!("z{i} = {z} while c{i} > cD"), p.c_d, p.c(v))
            } else {
                Condition::lt(format!("z{i} = {z} while c{i} < cD"), p.c(v), p.c_d)
            };
            return Some(Prediction {
                verdict: Verdict::Unstable,
                rule: "strategy-partition",
                fired: c.name.clone(),
                margins: vec![c],
            });
        }
    }
    None
}

fn effective(p: &Params, x: &State, v: Virus) -> f64 {
    qf(x.zs, p.q) * qf(x.z(v), p.q) * p.r0(v)
}

fn dfe(p: &Params, x: &State) -> Prediction {
    if x.zs == 1.0 {
        let c = Condition::lt("0 < cD (zS = 1 repels)", 0.0, p.c_d);
        return decide("dfe-distancing", vec![], vec![c], vec![]);
    }
    let mut stable = Vec::new();
    let mut unstable = Vec::new();
    for v in Virus::BOTH {
        let i = v.number();
        let r = effective(p, x, v);
        stable.push(Condition::lt(format!("q_z{i} R0_{i} < 1"), r, 1.0));
        unstable.push(Condition::gt(format!("q_z{i} R0_{i} > 1"), r, 1.0));
    }
    decide("dfe-candidate", stable, unstable, vec![])
}

fn unilateral(p: &Params, e: &Equilibrium, v: Virus, distancing: Distancing) -> Prediction {
    let x = &e.point;
    let (i, j) = (v.number(), v.other().number());
    let mut stable = e.existence.clone();
    let mut unstable = Vec::new();
    let mut info = Vec::new();
    match distancing {
        Distancing::None | Distancing::Full => {
            let ri = effective(p, x, v);
            let rj = effective(p, x, v.other());
            let payoff = 2.0 * p.r(v) * x.y(v) - p.c_d;
            stable.push(Condition::gt(format!("R*_{i} > 1"), ri, 1.0));
            stable.push(Condition::gt(format!("R*_{i} > R*_{j}"), ri, rj));
            unstable.push(Condition::lt(format!("R*_{i} < R*_{j}"), ri, rj));
            let rule;
            if distancing == Distancing::None {
                rule = "unilateral-no-distancing";
                stable.push(Condition::lt(format!("2 r{i} y{i}* - cD < 0"), payoff, 0.0));
                unstable.push(Condition::gt(format!("2 r{i} y{i}* - cD > 0"), payoff, 0.0));
                // The bound as usually printed; meaningful only when cD < 2 r_i.
                let raw = 1.0 / (1.0 - p.c_d / (2.0 * p.r(v)));
                info.push(Condition::lt(
                    format!("R*_{i} < (1 - cD/(2 r{i}))^-1"),
                    ri,
                    raw,
                ));
            } else {
                rule = "unilateral-full-distancing";
                stable.push(Condition::gt(format!("2 r{i} y{i}* - cD > 0"), payoff, 0.0));
                unstable.push(Condition::lt(format!("2 r{i} y{i}* - cD < 0"), payoff, 0.0));
            }
            decide(rule, stable, unstable, info)
        }
        Distancing::Partial => {
            let (ri, rj) = (p.r0(v), p.r0(v.other()));
            stable.push(Condition::gt(format!("R0_{i} > R0_{j}"), ri, rj));
            unstable.push(Condition::lt(format!("R0_{i} < R0_{j}"), ri, rj));
            decide("unilateral-partial-distancing", stable, unstable, info)
        }
    }
}

fn line_rule(p: &Params, kind: FamilyKind, existence: &[Condition], sum: f64) -> Prediction {
    let mut stable = existence.to_vec();
    let mut unstable = Vec::new();
    for v in Virus::BOTH {
        let i = v.number();
        let bound = p.c_d / (2.0 * p.r(v));
        match kind {
            FamilyKind::L0 => {
                stable.push(Condition::lt(
                    format!("1 - 1/(q R0) < cD/(2 r{i})"),
                    sum,
                    bound,
                ));
                unstable.push(Condition::gt(
                    format!("1 - 1/(q R0) > cD/(2 r{i})"),
                    sum,
                    bound,
                ));
            }
            _ => {
                stable.push(Condition::gt(
                    format!("1 - 1/(q^2 R0) > cD/(2 r{i})"),
                    sum,
                    bound,
                ));
                unstable.push(Condition::lt(
                    format!("1 - 1/(q^2 R0) < cD/(2 r{i})"),
                    sum,
                    bound,
                ));
            }
        }
    }
    let rule = if kind == FamilyKind::L0 {
        "line-no-distancing"
    } else {
        "line-full-distancing"
    };
    decide(rule, stable, unstable, vec![])
}

fn curve_rule(existence: &[Condition]) -> Prediction {
    decide(
        "curve-partial-distancing",
        existence.to_vec(),
        vec![],
        vec![],
    )
}

/// Prediction for a single point, line points included. On a line the
/// pointwise condition is the sign of `2 r.y - cD` at that point.
pub fn predict_stability(p: &Params, e: &Equilibrium) -> Prediction {
    if e.status() == Status::Fails {
        return inconclusive(
            "nonexistent",
            "existence conditions fail",
            e.existence.clone(),
        );
    }
    if !generic(p) {
        return inconclusive(
            "non-generic-costs",
            "|c_i - cD| within genericity tolerance",
            vec![],
        );
    }
    if let Some(pred) = partition(p, &e.point) {
        return pred;
    }
    match e.kind {
        EquilibriumKind::Dfe => dfe(p, &e.point),
        EquilibriumKind::Unilateral { virus, distancing } => unilateral(p, e, virus, distancing),
        EquilibriumKind::LinePoint { family } => {
            let x = &e.point;
            let h = 2.0 * (p.r1 * x.y1 + p.r2 * x.y2);
            match family {
                FamilyKind::L0 => {
                    let mut stable = e.existence.clone();
                    stable.push(Condition::lt("2 r.y < cD", h, p.c_d));
                    let unstable = vec![Condition::gt("2 r.y > cD", h, p.c_d)];
                    decide("line-no-distancing", stable, unstable, vec![])
                }
                FamilyKind::L1 => {
                    let mut stable = e.existence.clone();
                    stable.push(Condition::gt("2 r.y > cD", h, p.c_d));
                    let unstable = vec![Condition::lt("2 r.y < cD", h, p.c_d)];
                    decide("line-full-distancing", stable, unstable, vec![])
                }
                FamilyKind::LS => curve_rule(&e.existence),
            }
        }
    }
}

/// Prediction for a whole family: stable means every point of its closure
/// is attracting transversally, unstable means some part of it repels.
pub fn predict_family(p: &Params, f: &EquilibriumFamily) -> Prediction {
    if combine(&f.existence) == Status::Fails {
        return inconclusive(
            "nonexistent",
            "existence conditions fail",
            f.existence.clone(),
        );
    }
    if !generic(p) {
        return inconclusive(
            "non-generic-costs",
            "|c_i - cD| within genericity tolerance",
            vec![],
        );
    }
    if let Some(pred) = partition(p, &State::new(0.0, 0.0, 0.0, 1.0, 1.0)) {
        return pred;
    }
    match f.kind {
        FamilyKind::LS => curve_rule(&f.existence),
        kind => line_rule(p, kind, &f.existence, f.line_sum().expect("line family")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{
        coexistence_families, enumerate_dfes, unilateral as unilateral_points,
    };
    use crate::registry::params;

    fn named(p: &Params, v: Virus, name: &str) -> Equilibrium {
        unilateral_points(p, v)
            .into_iter()
            .find(|e| e.name() == name)
            .unwrap()
    }

    #[test]
    fn fig2_p10_stable() {
        let p = params::fig2();
        let pred = predict_stability(&p, &named(&p, Virus::One, "p10"));
        assert_eq!(pred.verdict, Verdict::Stable);
        assert_eq!(pred.rule, "unilateral-no-distancing");
        let r = pred
            .margins
            .iter()
            .find(|c| c.name == "R*_1 > R*_2")
            .unwrap();
        assert!((r.lhs - 2.25).abs() < 1e-14 && (r.rhs - 1.5).abs() < 1e-14);
        // the printed bound is negative for these parameters
        let raw = pred
            .margins
            .iter()
            .find(|c| c.name.starts_with("R*_1 < (1"))
            .unwrap();
        assert!(raw.rhs < 0.0 && raw.fails());
    }

    #[test]
    fn fig2_candidate_unstable() {
        let p = params::fig2();
        let dfes = enumerate_dfes(&p).unwrap();
        let c = dfes.iter().find(|e| e.stability_candidate).unwrap();
        let pred = predict_stability(&p, c);
        assert_eq!(pred.verdict, Verdict::Unstable);
        assert_eq!(pred.fired, "q_z1 R0_1 > 1");
        for e in dfes.iter().filter(|e| !e.stability_candidate) {
            assert_eq!(
                predict_stability(&p, e).verdict,
                Verdict::Unstable,
                "{}",
                e.name()
            );
        }
    }

    #[test]
    fn fig1_candidate_marginal() {
        let p = params::fig1();
        let c = enumerate_dfes(&p)
            .unwrap()
            .into_iter()
            .find(|e| e.stability_candidate)
            .unwrap();
        assert_eq!(predict_stability(&p, &c).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn fig3_fig4_stable() {
        let p = params::fig3();
        assert_eq!(
            predict_stability(&p, &named(&p, Virus::One, "p11")).verdict,
            Verdict::Stable
        );
        assert_eq!(
            predict_stability(&p, &named(&p, Virus::One, "p10")).verdict,
            Verdict::Unstable
        );
        let p = params::fig4();
        assert_eq!(
            predict_stability(&p, &named(&p, Virus::One, "p1S")).verdict,
            Verdict::Stable
        );
    }

    #[test]
    fn fig5_fig6_families() {
        let p = params::fig5();
        let l0 = &coexistence_families(&p)[0];
        let pred = predict_family(&p, l0);
        assert_eq!(pred.verdict, Verdict::Stable, "{pred:?}");
        for e in l0.sample_equilibria(5) {
            assert_eq!(predict_stability(&p, &e).verdict, Verdict::Stable);
        }
        let p = params::fig6();
        let l1 = coexistence_families(&p)
            .into_iter()
            .find(|f| f.kind == FamilyKind::L1)
            .unwrap();
        assert_eq!(predict_family(&p, &l1).verdict, Verdict::Stable);
    }

    #[test]
    fn partition_rule() {
        let mut p = params::fig2();
        p.c2 = 0.1;
        let pred = predict_stability(&p, &named(&p, Virus::One, "p10"));
        assert_eq!(pred.verdict, Verdict::Unstable);
        assert_eq!(pred.rule, "strategy-partition");
    }

    #[test]
    fn nonexistent_is_inconclusive() {
        let p = params::fig2();
        let mut e = named(&p, Virus::One, "p10");
        e.existence[0] = Condition::lt("x", 2.0, 1.0);
        assert_eq!(predict_stability(&p, &e).verdict, Verdict::Inconclusive);
    }
}
