//! Closed-form equilibria with existence certificates.
//!
//! Every existence test is a strict inequality `lhs < rhs` carried as a
//! [`Condition`] with its margin. Margins within [`DEGENERATE_REL`] of zero
//! are reported as degenerate instead of being forced either way.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{field, Params, State, Virus, GENERICITY_EPS};

/// Relative width of the band in which a margin counts as zero.
pub const DEGENERATE_REL: f64 = 1e-12;

/// Default relative tolerance on `|R0_1 - R0_2|` for coexistence.
pub const R0_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Holds,
    Fails,
    Degenerate,
}

/// A strict inequality `lhs < rhs`, evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; positive when the inequality holds.
    pub margin: f64,
    pub status: Status,
}

impl Condition {
    pub fn lt(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        let scale = [lhs, rhs]
            .iter()
            .filter(|v| v.is_finite())
            .fold(1f64, |m, v| m.max(v.abs()));
        let status = if margin.is_nan() || margin.abs() <= DEGENERATE_REL * scale {
            Status::Degenerate
        } else if margin > 0.0 {
            Status::Holds
        } else {
            Status::Fails
        };
        Condition {
            name: name.into(),
            lhs,
            rhs,
            margin,
            status,
        }
    }

    pub fn gt(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let mut c = Condition::lt("", rhs, lhs);
        c.name = name.into();
        c.lhs = lhs;
        c.rhs = rhs;
        c
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }
}

/// Conjunction of conditions: fails if any fails, holds if all hold.
pub fn combine(conditions: &[Condition]) -> Status {
    if conditions.iter().any(Condition::fails) {
        Status::Fails
    } else if conditions.iter().all(Condition::holds) {
        Status::Holds
    } else {
        Status::Degenerate
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Distancing {
    /// `zS = 0`.
    None,
    /// `zS = 1`.
    Full,
    /// `zS` strictly inside `(0, 1)`.
    Partial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyKind {
    L0,
    L1,
    LS,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyKind::L0 => "L0",
            FamilyKind::L1 => "L1",
            FamilyKind::LS => "LS",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum EquilibriumKind {
    Dfe,
    Unilateral {
        virus: Virus,
        distancing: Distancing,
    },
    LinePoint {
        family: FamilyKind,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    pub point: State,
    pub existence: Vec<Condition>,
    /// Set on the single DFE that can be stable.
    pub stability_candidate: bool,
    pub note: Option<String>,
}

impl Equilibrium {
    pub fn status(&self) -> Status {
        combine(&self.existence)
    }

    pub fn exists(&self) -> bool {
        self.status() == Status::Holds
    }

    /// Short identifier: `dfe011`, `p10`, `p2S`, `L0`.
    pub fn name(&self) -> String {
        match self.kind {
            EquilibriumKind::Dfe => format!(
                "dfe{}{}{}",
                self.point.zs as u8, self.point.z1 as u8, self.point.z2 as u8
            ),
            EquilibriumKind::Unilateral { virus, distancing } => {
                let tag = match distancing {
                    Distancing::None => "0",
                    Distancing::Full => "1",
                    Distancing::Partial => "S",
                };
                format!("p{}{}", virus.number(), tag)
            }
            EquilibriumKind::LinePoint { family } => family.to_string(),
        }
    }
}

/// Max-norm of the vector field at `x`.
pub fn residual(p: &Params, x: &State) -> f64 {
    field(p, &x.to_array())
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}

fn check_generic(p: &Params) -> Result<()> {
    for (name, c) in [("c1", p.c1), ("c2", p.c2)] {
        let gap = (c - p.c_d).abs();
        if gap <= GENERICITY_EPS {
            return Err(Error::NonGeneric {
                name,
                gap,
                tol: GENERICITY_EPS,
            });
        }
    }
    Ok(())
}

/// The eight disease-free equilibria `{0}^2 x {0,1}^3`.
pub fn enumerate_dfes(p: &Params) -> Result<Vec<Equilibrium>> {
    check_generic(p)?;
    let candidate = [0.0, p.z_star(Virus::One), p.z_star(Virus::Two)];
    let mut out = Vec::with_capacity(8);
    for bits in 0..8u8 {
        let zs = f64::from((bits >> 2) & 1);
        let z1 = f64::from((bits >> 1) & 1);
        let z2 = f64::from(bits & 1);
        out.push(Equilibrium {
            kind: EquilibriumKind::Dfe,
            point: State::new(0.0, 0.0, zs, z1, z2),
            existence: Vec::new(),
            stability_candidate: [zs, z1, z2] == candidate,
            note: None,
        });
    }
    Ok(out)
}

fn clamp_point(x: State) -> State {
    let a = x.to_array().map(|v| v.clamp(0.0, 1.0));
    State::from_array(a)
}

fn with_virus(v: Virus, yi: f64, zs: f64) -> State {
    match v {
        Virus::One => State::new(yi, 0.0, zs, 1.0, 1.0),
        Virus::Two => State::new(0.0, yi, zs, 1.0, 1.0),
    }
}

fn unilateral_all(p: &Params, v: Virus) -> [Equilibrium; 3] {
    let i = v.number();
    let (beta, delta, r) = (p.beta(v), p.delta(v), p.r(v));
    let q = p.q;
    let r0 = beta / delta;
    let note = (p.c(v) <= p.c_d || p.c(v.other()) <= p.c_d)
        .then(|| "z1 = z2 = 1 is not the stable strategy for these costs".to_string());

    let none = Equilibrium {
        kind: EquilibriumKind::Unilateral {
            virus: v,
            distancing: Distancing::None,
        },
        point: with_virus(v, 1.0 - delta / (q * beta), 0.0),
        existence: vec![Condition::lt(
            format!("delta{i}/(q beta{i}) < 1"),
            delta / (q * beta),
            1.0,
        )],
        stability_candidate: false,
        note: note.clone(),
    };
    let full = Equilibrium {
        kind: EquilibriumKind::Unilateral {
            virus: v,
            distancing: Distancing::Full,
        },
        point: with_virus(v, 1.0 - delta / (q * q * beta), 1.0),
        existence: vec![Condition::lt(
            format!("delta{i}/(q^2 beta{i}) < 1"),
            delta / (q * q * beta),
            1.0,
        )],
        stability_candidate: false,
        note: note.clone(),
    };

    let yi = p.c_d / (2.0 * r);
    let s = 1.0 - yi;
    let zs = 1.0 / (1.0 - q) - delta / (beta * s * q * (1.0 - q));
    let partial = Equilibrium {
        kind: EquilibriumKind::Unilateral {
            virus: v,
            distancing: Distancing::Partial,
        },
        point: with_virus(v, yi, zs),
        existence: vec![
            Condition::lt(format!("cD/(2 r{i}) < 1"), yi, 1.0),
            Condition::lt(format!("1 < q R0_{i} (1 - cD/(2 r{i}))"), 1.0, q * r0 * s),
            Condition::lt(
                format!("q^2 R0_{i} (1 - cD/(2 r{i})) < 1"),
                q * q * r0 * s,
                1.0,
            ),
        ],
        stability_candidate: false,
        note,
    };
    [none, full, partial]
}

/// `p_i0`, `p_i1`, `p_iS` for one virus, omitting those that fail to exist.
///
/// Points with a degenerate existence margin are kept and clamped into the
/// state space.
pub fn unilateral(p: &Params, v: Virus) -> Vec<Equilibrium> {
    unilateral_all(p, v)
        .into_iter()
        .filter(|e| e.status() != Status::Fails)
        .map(|mut e| {
            e.point = clamp_point(e.point);
            e
        })
        .collect()
}

/// How the knife-edge `R0_1 = R0_2` is decided.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum R0Policy {
    /// Equal when `|R0_1 - R0_2| <= eps * max(R0_1, R0_2)`.
    Relative(f64),
    /// Caller asserts equality; `R0 = beta1/delta1`.
    AssumeEqual,
}

impl Default for R0Policy {
    fn default() -> Self {
        R0Policy::Relative(R0_EPS)
    }
}

impl R0Policy {
    pub fn equal(&self, p: &Params) -> bool {
        match *self {
            R0Policy::AssumeEqual => true,
            R0Policy::Relative(eps) => {
                let (a, b) = (p.r0(Virus::One), p.r0(Virus::Two));
                (a - b).abs() <= eps * a.max(b)
            }
        }
    }
}

/// A bound on `y1` with a short label of the constraint it encodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub label: &'static str,
    pub value: f64,
}

/// A one-parameter continuum of coexistence equilibria, `y1` in `(lo, hi)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumFamily {
    pub kind: FamilyKind,
    pub params: Params,
    /// Shared base reproduction number.
    pub r0: f64,
    pub y1_lo: f64,
    pub y1_hi: f64,
    /// The binding lower and upper constraint.
    pub lo_bound: Bound,
    pub hi_bound: Bound,
    pub existence: Vec<Condition>,
}

impl EquilibriumFamily {
    /// `y1 + y2` along a line family; `None` for `LS`.
    pub fn line_sum(&self) -> Option<f64> {
        let q = self.params.q;
        match self.kind {
            FamilyKind::L0 => Some(1.0 - 1.0 / (q * self.r0)),
            FamilyKind::L1 => Some(1.0 - 1.0 / (q * q * self.r0)),
            FamilyKind::LS => None,
        }
    }

    /// The state at parameter `y1`, on the closed range.
    pub fn point_unchecked(&self, y1: f64) -> State {
        let p = &self.params;
        match self.kind {
            FamilyKind::L0 => State::new(y1, self.line_sum().unwrap() - y1, 0.0, 1.0, 1.0),
            FamilyKind::L1 => State::new(y1, self.line_sum().unwrap() - y1, 1.0, 1.0, 1.0),
            FamilyKind::LS => {
                let y2 = p.c_d / (2.0 * p.r2) - p.r1 / p.r2 * y1;
                let s = 1.0 - y1 - y2;
                let q = p.q;
                let zs = 1.0 / (1.0 - q) - 1.0 / (q * (1.0 - q) * self.r0 * s);
                State::new(y1, y2, zs, 1.0, 1.0)
            }
        }
    }

    /// The state at `y1`, which must lie in the open range.
    pub fn point(&self, y1: f64) -> Result<State> {
        if y1.is_nan() || y1 <= self.y1_lo {
            return Err(Error::Range {
                y1,
                bound: self.lo_bound.label,
                limit: self.y1_lo,
            });
        }
        if y1.is_nan() || y1 >= self.y1_hi {
            return Err(Error::Range {
                y1,
                bound: self.hi_bound.label,
                limit: self.y1_hi,
            });
        }
        Ok(self.point_unchecked(y1))
    }

    /// `n` equally spaced interior parameters `lo + (hi - lo) k / (n + 1)`.
    pub fn interior_parameters(&self, n: usize) -> Vec<f64> {
        let w = self.y1_hi - self.y1_lo;
        (1..=n)
            .map(|k| self.y1_lo + w * k as f64 / (n + 1) as f64)
            .collect()
    }

    pub fn samples(&self, n: usize) -> Vec<State> {
        self.interior_parameters(n)
            .into_iter()
            .map(|y1| self.point_unchecked(y1))
            .collect()
    }

    /// Sampled points wrapped as line-point equilibria.
    pub fn sample_equilibria(&self, n: usize) -> Vec<Equilibrium> {
        self.samples(n)
            .into_iter()
            .map(|point| self.wrap(point))
            .collect()
    }

    pub fn wrap(&self, point: State) -> Equilibrium {
        Equilibrium {
            kind: EquilibriumKind::LinePoint { family: self.kind },
            point,
            existence: self.existence.clone(),
            stability_candidate: false,
            note: None,
        }
    }

    /// Max-norm distance from `x` to the family's defining constraints:
    /// the fixed coordinates plus the `y` relation.
    pub fn constraint_residual(&self, x: &State) -> f64 {
        let fixed = (x.z1 - 1.0).abs().max((x.z2 - 1.0).abs());
        match self.kind {
            FamilyKind::L0 => fixed
                .max(x.zs.abs())
                .max((x.y1 + x.y2 - self.line_sum().unwrap()).abs()),
            FamilyKind::L1 => fixed
                .max((x.zs - 1.0).abs())
                .max((x.y1 + x.y2 - self.line_sum().unwrap()).abs()),
            FamilyKind::LS => {
                let on_curve = self.point_unchecked(x.y1);
                fixed
                    .max((x.y2 - on_curve.y2).abs())
                    .max((x.zs - on_curve.zs).abs())
            }
        }
    }

    /// Whether `x` is within `tol` of the family, range included.
    pub fn contains(&self, x: &State, tol: f64) -> bool {
        x.y1 >= self.y1_lo - tol && x.y1 <= self.y1_hi + tol && self.constraint_residual(x) <= tol
    }
}

fn line(p: &Params, r0: f64, kind: FamilyKind) -> EquilibriumFamily {
    let (k, label) = match kind {
        FamilyKind::L0 => (p.q, "y2 > 0 (y1 < 1 - 1/(q R0))"),
        _ => (p.q * p.q, "y2 > 0 (y1 < 1 - 1/(q^2 R0))"),
    };
    let name = if kind == FamilyKind::L0 {
        "1 < q R0"
    } else {
        "1 < q^2 R0"
    };
    EquilibriumFamily {
        kind,
        params: *p,
        r0,
        y1_lo: 0.0,
        y1_hi: 1.0 - 1.0 / (k * r0),
        lo_bound: Bound {
            label: "y1 > 0",
            value: 0.0,
        },
        hi_bound: Bound {
            label,
            value: 1.0 - 1.0 / (k * r0),
        },
        existence: vec![Condition::lt(name, 1.0, k * r0)],
    }
}

/// The `LS` range as the intersection of all linear constraints on `y1`.
///
/// With `l(y1) = 1 - y1 - y2 = a - b y1`, the constraints are `0 < y1 < 1`,
/// `0 < y2 < 1` and `1/(q R0) < l < 1/(q^2 R0)` (that is, `0 < zS < 1`).
fn ls_family(p: &Params, r0: f64) -> EquilibriumFamily {
    let q = p.q;
    let a = 1.0 - p.c_d / (2.0 * p.r2);
    let b = 1.0 - p.r1 / p.r2;
    let l_min = 1.0 / (q * r0);
    let l_max = 1.0 / (q * q * r0);

    let mut lower = vec![
        Bound {
            label: "y1 > 0",
            value: 0.0,
        },
        Bound {
            label: "y2 < 1",
            value: p.r2 / p.r1 * (p.c_d / (2.0 * p.r2) - 1.0),
        },
    ];
    let mut upper = vec![
        Bound {
            label: "y1 < 1",
            value: 1.0,
        },
        Bound {
            label: "y2 > 0",
            value: p.c_d / (2.0 * p.r1),
        },
    ];
    // a - b y1 > l_min and a - b y1 < l_max.
    let zs_pos = (a - l_min) / b;
    let zs_below_one = (a - l_max) / b;
    if b > 0.0 {
        upper.push(Bound {
            label: "zS > 0",
            value: zs_pos,
        });
        lower.push(Bound {
            label: "zS < 1",
            value: zs_below_one,
        });
    } else if b < 0.0 {
        lower.push(Bound {
            label: "zS > 0",
            value: zs_pos,
        });
        upper.push(Bound {
            label: "zS < 1",
            value: zs_below_one,
        });
    } else {
        // l is constant; it either satisfies both or the range is empty.
        let ok = l_min < a && a < l_max;
        upper.push(Bound {
            label: "l_min < l < l_max",
            value: if ok { f64::INFINITY } else { f64::NEG_INFINITY },
        });
    }
    let lo = *lower
        .iter()
        .max_by(|x, y| x.value.total_cmp(&y.value))
        .unwrap();
    let hi = *upper
        .iter()
        .min_by(|x, y| x.value.total_cmp(&y.value))
        .unwrap();
    EquilibriumFamily {
        kind: FamilyKind::LS,
        params: *p,
        r0,
        y1_lo: lo.value,
        y1_hi: hi.value,
        lo_bound: lo,
        hi_bound: hi,
        existence: vec![Condition::lt("B_lo < B_hi", lo.value, hi.value)],
    }
}

/// Every coexistence family, existing or not, under `policy`.
/// Empty when the base reproduction numbers differ.
pub fn candidate_families(p: &Params, policy: R0Policy) -> Vec<EquilibriumFamily> {
    if !policy.equal(p) {
        return Vec::new();
    }
    let r0 = p.r0(Virus::One);
    vec![
        line(p, r0, FamilyKind::L0),
        line(p, r0, FamilyKind::L1),
        ls_family(p, r0),
    ]
}

/// Existing coexistence families under an explicit `R0` policy.
pub fn coexistence_families_with(p: &Params, policy: R0Policy) -> Vec<EquilibriumFamily> {
    candidate_families(p, policy)
        .into_iter()
        .filter(|f| combine(&f.existence) == Status::Holds)
        .collect()
}

/// Existing coexistence families under the default relative `R0` tolerance.
pub fn coexistence_families(p: &Params) -> Vec<EquilibriumFamily> {
    coexistence_families_with(p, R0Policy::default())
}

/// The `LS` point at parameter `y1`.
pub fn ls_point(p: &Params, y1: f64) -> Result<State> {
    let family = candidate_families(p, R0Policy::default())
        .into_iter()
        .find(|f| f.kind == FamilyKind::LS)
        .ok_or_else(|| Error::Domain("LS requires equal base reproduction numbers".into()))?;
    if !family.existence[0].holds() {
        return Err(Error::Domain(format!(
            "LS is empty: y1 range ({}, {})",
            family.y1_lo, family.y1_hi
        )));
    }
    family.point(y1)
}

/// Everything the enumerators produce for `p`: DFEs (when costs are
/// generic), unilateral points of both viruses, and existing families.
#[derive(Clone, Debug, Serialize)]
pub struct Catalogue {
    pub points: Vec<Equilibrium>,
    pub families: Vec<EquilibriumFamily>,
}

impl Catalogue {
    pub fn find(&self, name: &str) -> Option<&Equilibrium> {
        if name == "candidate" {
            return self.points.iter().find(|e| e.stability_candidate);
        }
        self.points.iter().find(|e| e.name() == name)
    }

    pub fn family(&self, kind: FamilyKind) -> Option<&EquilibriumFamily> {
        self.families.iter().find(|f| f.kind == kind)
    }
}

pub fn catalogue(p: &Params) -> Catalogue {
    let mut points = enumerate_dfes(p).unwrap_or_default();
    for v in Virus::BOTH {
        points.extend(unilateral(p, v));
    }
    Catalogue {
        points,
        families: coexistence_families(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::in_gamma;
    use crate::registry::params;

    fn close(a: &State, b: &State, tol: f64) -> bool {
        a.max_dist(b) <= tol
    }

    fn find(list: &[Equilibrium], name: &str) -> Equilibrium {
        list.iter()
            .find(|e| e.name() == name)
            .unwrap_or_else(|| panic!("{name} missing"))
            .clone()
    }

    #[test]
    fn condition_status() {
        assert_eq!(Condition::lt("a", 1.0, 2.0).status, Status::Holds);
        assert_eq!(Condition::lt("a", 2.0, 1.0).status, Status::Fails);
        assert_eq!(
            Condition::lt("a", 1.0, 1.0 + 1e-15).status,
            Status::Degenerate
        );
        let c = Condition::gt("b", 3.0, 2.0);
        assert!(c.holds());
        assert_eq!((c.lhs, c.rhs, c.margin), (3.0, 2.0, 1.0));
    }

    #[test]
    fn eight_dfes_one_candidate() {
        let dfes = enumerate_dfes(&params::fig1()).unwrap();
        assert_eq!(dfes.len(), 8);
        let flagged: Vec<_> = dfes.iter().filter(|e| e.stability_candidate).collect();
        assert_eq!(flagged.len(), 1);
        assert_eq!(flagged[0].point, State::new(0.0, 0.0, 0.0, 1.0, 1.0));
        for e in &dfes {
            assert_eq!((e.point.y1, e.point.y2), (0.0, 0.0));
            assert_eq!(residual(&params::fig1(), &e.point), 0.0);
        }

        let mut p = params::fig1();
        p.c1 = 0.5;
        let dfes = enumerate_dfes(&p).unwrap();
        let c = dfes.iter().find(|e| e.stability_candidate).unwrap();
        assert_eq!(c.point, State::new(0.0, 0.0, 0.0, 0.0, 1.0));
        assert_eq!(c.name(), "dfe001");
    }

    #[test]
    fn dfes_need_generic_costs() {
        let mut p = params::fig1();
        p.c2 = p.c_d;
        assert!(matches!(
            enumerate_dfes(&p),
            Err(Error::NonGeneric { name: "c2", .. })
        ));
    }

    #[test]
    fn fig2_p10() {
        let p = params::fig2();
        let list = unilateral(&p, Virus::One);
        let e = find(&list, "p10");
        assert!(e.exists());
        assert!(close(
            &e.point,
            &State::new(5.0 / 9.0, 0.0, 0.0, 1.0, 1.0),
            1e-15
        ));
        assert!(residual(&p, &e.point) < 1e-12);
        // cD/(2 r1) = 1.25: no partial-distancing point
        assert!(list.iter().all(|e| e.name() != "p1S"));
    }

    #[test]
    fn fig3_p11() {
        let p = params::fig3();
        let e = find(&unilateral(&p, Virus::One), "p11");
        assert!(close(
            &e.point,
            &State::new(4.0 / 9.0, 0.0, 1.0, 1.0, 1.0),
            1e-15
        ));
        assert!(residual(&p, &e.point) < 1e-12);
    }

    #[test]
    fn fig4_p1s() {
        let p = params::fig4();
        let e = find(&unilateral(&p, Virus::One), "p1S");
        assert!(e.exists());
        assert!(close(
            &e.point,
            &State::new(0.25, 0.0, 5.0 / 42.0, 1.0, 1.0),
            1e-15
        ));
        assert!(residual(&p, &e.point) < 1e-12);
    }

    #[test]
    fn fig1_p10_is_degenerate() {
        let p = params::fig1();
        let e = find(&unilateral(&p, Virus::One), "p10");
        assert_eq!(e.status(), Status::Degenerate);
        assert!(in_gamma(&e.point, 0.0));
    }

    #[test]
    fn p11_below_p10() {
        let p = params::fig3();
        let list = unilateral(&p, Virus::One);
        assert!(find(&list, "p11").point.y1 < find(&list, "p10").point.y1);
    }

    #[test]
    fn families_fig5_fig6() {
        let f = coexistence_families(&params::fig5());
        let l0 = f.iter().find(|f| f.kind == FamilyKind::L0).unwrap();
        assert!((l0.line_sum().unwrap() - 0.375).abs() < 1e-15);
        // q R0 = 1.6 and q^2 R0 = 1.28: both lines exist, the curve does not.
        assert!(f.iter().any(|f| f.kind == FamilyKind::L1));
        assert!(f.iter().all(|f| f.kind != FamilyKind::LS));

        let f = coexistence_families(&params::fig6());
        let l1 = f.iter().find(|f| f.kind == FamilyKind::L1).unwrap();
        assert!((l1.line_sum().unwrap() - 0.21875).abs() < 1e-15);
        for x in l1.samples(10) {
            assert!(in_gamma(&x, 0.0));
            assert!(residual(&params::fig6(), &x) < 1e-12);
        }
    }

    #[test]
    fn no_families_for_unequal_r0() {
        assert!(coexistence_families(&params::fig2()).is_empty());
        let kinds: Vec<FamilyKind> =
            coexistence_families_with(&params::fig2(), R0Policy::AssumeEqual)
                .iter()
                .map(|f| f.kind)
                .collect();
        assert_eq!(kinds, [FamilyKind::L0, FamilyKind::L1]);
    }

    #[test]
    fn line_null_direction() {
        let p = params::fig5();
        let l0 = &coexistence_families(&p)[0];
        for x in l0.samples(10) {
            let eps = 1e-3;
            let moved = State::new(x.y1 + eps, x.y2 - eps, x.zs, x.z1, x.z2);
            assert!(residual(&p, &moved) < 1e-12);
        }
    }

    /// Closed-form bounds for `r1 < r2`, written out term by term.
    fn closed_form_bounds(p: &Params, r0: f64) -> (f64, f64) {
        let (q, cd, r1, r2) = (p.q, p.c_d, p.r1, p.r2);
        let den = 1.0 - r1 / r2;
        let lo = [
            0.0,
            r2 / r1 * (cd / (2.0 * r2) - 1.0),
            (1.0 - cd / (2.0 * r2) - 1.0 / (q * q * r0)) / den,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
        let hi = [
            cd / (2.0 * r1),
            (1.0 - cd / (2.0 * r2)) / den,
            (1.0 - cd / (2.0 * r2) - 1.0 / (q * r0)) / den,
            1.0,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    #[test]
    fn ls_range_matches_closed_form() {
        let p = params::ls();
        let fam = candidate_families(&p, R0Policy::default());
        let ls = fam.iter().find(|f| f.kind == FamilyKind::LS).unwrap();
        let (lo, hi) = closed_form_bounds(&p, ls.r0);
        assert!((ls.y1_lo - lo).abs() < 1e-15 && (ls.y1_hi - hi).abs() < 1e-15);
        assert!(ls.existence[0].holds());

        let mid = 0.5 * (ls.y1_lo + ls.y1_hi);
        let x = ls_point(&p, mid).unwrap();
        assert!(residual(&p, &x) < 1e-12);
        assert!((2.0 * (p.r1 * x.y1 + p.r2 * x.y2) - p.c_d).abs() < 1e-15);
        assert!(in_gamma(&x, 0.0));
    }

    #[test]
    fn ls_point_range_errors() {
        let p = params::ls();
        let ls = candidate_families(&p, R0Policy::default())
            .into_iter()
            .find(|f| f.kind == FamilyKind::LS)
            .unwrap();
        match ls_point(&p, ls.y1_lo - 1e-3) {
            Err(Error::Range { bound, .. }) => assert_eq!(bound, ls.lo_bound.label),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ls_point(&p, 0.9), Err(Error::Range { .. })));
        assert!(ls_point(&params::fig2(), 0.1).is_err());
    }

    #[test]
    fn ls_endpoint_hits_boundary() {
        let p = params::ls();
        let ls = candidate_families(&p, R0Policy::default())
            .into_iter()
            .find(|f| f.kind == FamilyKind::LS)
            .unwrap();
        for y1 in [ls.y1_lo, ls.y1_hi] {
            let x = ls.point_unchecked(y1);
            let touches = x
                .to_array()
                .iter()
                .take(3)
                .any(|v| v.abs() < 1e-12 || (v - 1.0).abs() < 1e-12);
            assert!(touches, "{x:?}");
        }
    }

    #[test]
    fn catalogue_lookup() {
        let cat = catalogue(&params::fig2());
        assert!(cat.find("p10").is_some());
        assert_eq!(cat.find("candidate").unwrap().name(), "dfe011");
        assert!(cat.family(FamilyKind::L0).is_none());
    }
}
