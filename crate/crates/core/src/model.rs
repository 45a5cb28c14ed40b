//! Model parameters, the state space and the vector field.
//!
//! The state is `(y1, y2, zS, z1, z2)`: infected masses of the two viruses,
//! and the distancing fractions among susceptibles and among each infected
//! class. The susceptible mass `s = 1 - y1 - y2` is derived, never stored.
//!
//! `z1`/`z2` are kept as ordinary coordinates even when the matching `y_i`
//! is zero. Their equations do not depend on `y`, so the value stays
//! meaningful and is reported as-is at equilibria.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on membership in the state space.
pub const GAMMA_SLACK: f64 = 1e-9;

/// Minimum gap |c_i - cD| for costs to count as generic.
pub const GENERICITY_EPS: f64 = 1e-9;

/// Which susceptible payoff is used.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Standard,
    /// Not distancing gains `(1 - zS)`: distancing is socially reinforced.
    Coordination,
}

/// One of the two competing viruses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Virus {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Virus {
    pub const BOTH: [Virus; 2] = [Virus::One, Virus::Two];

    pub fn index(self) -> usize {
        match self {
            Virus::One => 0,
            Virus::Two => 1,
        }
    }

    pub fn other(self) -> Virus {
        match self {
            Virus::One => Virus::Two,
            Virus::Two => Virus::One,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }
}

/// All model constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub beta1: f64,
    pub beta2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub r1: f64,
    pub r2: f64,
    pub c1: f64,
    pub c2: f64,
    #[serde(rename = "cD")]
    pub c_d: f64,
    pub q: f64,
    #[serde(default)]
    pub variant: Variant,
}

impl Params {
    /// Standard-variant parameters from the vector notation
    /// `beta, delta, r, c, cD, q`.
    pub fn standard(
        beta: [f64; 2],
        delta: [f64; 2],
        r: [f64; 2],
        c: [f64; 2],
        c_d: f64,
        q: f64,
    ) -> Self {
        Params {
            beta1: beta[0],
            beta2: beta[1],
            delta1: delta[0],
            delta2: delta[1],
            r1: r[0],
            r2: r[1],
            c1: c[0],
            c2: c[1],
            c_d,
            q,
            variant: Variant::Standard,
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn beta(&self, v: Virus) -> f64 {
        [self.beta1, self.beta2][v.index()]
    }

    pub fn delta(&self, v: Virus) -> f64 {
        [self.delta1, self.delta2][v.index()]
    }

    pub fn r(&self, v: Virus) -> f64 {
        [self.r1, self.r2][v.index()]
    }

    pub fn c(&self, v: Virus) -> f64 {
        [self.c1, self.c2][v.index()]
    }

    /// Base reproduction number `beta_i / delta_i`.
    pub fn r0(&self, v: Virus) -> f64 {
        self.beta(v) / self.delta(v)
    }

    /// `[c_i > cD]`: the stable value of `z_i`.
    pub fn z_star(&self, v: Virus) -> f64 {
        if self.c(v) > self.c_d {
            1.0
        } else {
            0.0
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Params = serde_json::from_str(text)?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }

    fn named_values(&self) -> [(&'static str, f64); 10] {
        [
            ("beta1", self.beta1),
            ("beta2", self.beta2),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("r1", self.r1),
            ("r2", self.r2),
            ("c1", self.c1),
            ("c2", self.c2),
            ("cD", self.c_d),
            ("q", self.q),
        ]
    }

    /// Rejects parameters that break the hard invariants (positive rates,
    /// risks and distancing cost, `q` inside `(0, 1)`).
    pub fn ensure_valid(&self) -> Result<AssumptionReport> {
        let report = validate(self)?;
        if !report.is_admissible() {
            return Err(Error::InvalidParams(report.failures().join(", ")));
        }
        Ok(report)
    }

    /// Sets a parameter by its JSON name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "beta1" => &mut self.beta1,
            "beta2" => &mut self.beta2,
            "delta1" => &mut self.delta1,
            "delta2" => &mut self.delta2,
            "r1" => &mut self.r1,
            "r2" => &mut self.r2,
            "c1" => &mut self.c1,
            "c2" => &mut self.c2,
            "cD" => &mut self.c_d,
            "q" => &mut self.q,
            other => return Err(Error::Config(format!("unknown parameter `{other}`"))),
        };
        *slot = value;
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.named_values()
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
    }
}

/// A point `(y1, y2, zS, z1, z2)` of the state space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 5]", into = "[f64; 5]")]
pub struct State {
    pub y1: f64,
    pub y2: f64,
    pub zs: f64,
    pub z1: f64,
    pub z2: f64,
}

impl From<[f64; 5]> for State {
    fn from(a: [f64; 5]) -> Self {
        State::from_array(a)
    }
}

impl From<State> for [f64; 5] {
    fn from(x: State) -> Self {
        x.to_array()
    }
}

impl State {
    pub const COORDINATES: [&'static str; 5] = ["y1", "y2", "zS", "z1", "z2"];

    pub const fn new(y1: f64, y2: f64, zs: f64, z1: f64, z2: f64) -> Self {
        State { y1, y2, zs, z1, z2 }
    }

    pub const fn from_array(a: [f64; 5]) -> Self {
        State::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub const fn to_array(self) -> [f64; 5] {
        [self.y1, self.y2, self.zs, self.z1, self.z2]
    }

    /// Susceptible mass.
    pub fn s(&self) -> f64 {
        1.0 - self.y1 - self.y2
    }

    pub fn y(&self, v: Virus) -> f64 {
        [self.y1, self.y2][v.index()]
    }

    pub fn z(&self, v: Virus) -> f64 {
        [self.z1, self.z2][v.index()]
    }

    pub fn max_dist(&self, other: &State) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Parses `a,b,c,d,e`.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let values: std::result::Result<Vec<f64>, _> =
            text.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let values = values.map_err(|e| Error::Config(format!("bad state `{text}`: {e}")))?;
        let a: [f64; 5] = values
            .try_into()
            .map_err(|_| Error::Config(format!("state `{text}` needs 5 coordinates")))?;
        Ok(State::from_array(a))
    }
}

/// `q_z = 1 - z (1 - q)`, the population-averaged contact factor.
pub fn q_factor(z: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!("fraction z = {z} outside [0, 1]")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("factor q = {q} outside (0, 1)")));
    }
    Ok(qf(z, q))
}

#[inline]
pub(crate) fn qf(z: f64, q: f64) -> f64 {
    1.0 - z * (1.0 - q)
}

/// Membership in `Gamma = Delta x [0,1]^3` with slack `tol`.
pub fn in_gamma(x: &State, tol: f64) -> bool {
    let a = x.to_array();
    a.iter()
        .all(|v| v.is_finite() && *v >= -tol && *v <= 1.0 + tol)
        && x.y1 + x.y2 <= 1.0 + tol
}

fn check_gamma(x: &State) -> Result<()> {
    if in_gamma(x, GAMMA_SLACK) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "state {:?} outside the state space",
            x.to_array()
        )))
    }
}

/// The vector field on a raw coordinate array, without domain checks.
#[inline]
pub(crate) fn field(p: &Params, x: &[f64; 5]) -> [f64; 5] {
    let [y1, y2, zs, z1, z2] = *x;
    let s = 1.0 - y1 - y2;
    let qs = qf(zs, p.q);
    let mut hs = 2.0 * (p.r1 * y1 + p.r2 * y2) - p.c_d;
    if p.variant == Variant::Coordination {
        hs += zs - 1.0;
    }
    [
        y1 * (p.beta1 * s * qs * qf(z1, p.q) - p.delta1),
        y2 * (p.beta2 * s * qs * qf(z2, p.q) - p.delta2),
        zs * (1.0 - zs) * hs,
        z1 * (1.0 - z1) * (p.c1 - p.c_d),
        z2 * (1.0 - z2) * (p.c2 - p.c_d),
    ]
}

/// Time derivatives of all five coordinates.
pub fn rhs(p: &Params, x: &State) -> Result<[f64; 5]> {
    check_gamma(x)?;
    Ok(field(p, &x.to_array()))
}

/// Perceived payoffs of each strategy for each subpopulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Payoffs {
    pub susceptible_distance: f64,
    pub susceptible_normal: f64,
    pub infected_distance: [f64; 2],
    pub infected_normal: [f64; 2],
}

impl Payoffs {
    /// Replicator driving term for `zS`.
    pub fn susceptible_gain(&self) -> f64 {
        self.susceptible_distance - self.susceptible_normal
    }

    pub fn infected_gain(&self, v: Virus) -> f64 {
        self.infected_distance[v.index()] - self.infected_normal[v.index()]
    }
}

pub fn payoffs(p: &Params, x: &State) -> Result<Payoffs> {
    check_gamma(x)?;
    let risk = p.r1 * x.y1 + p.r2 * x.y2;
    let mut normal = -risk;
    if p.variant == Variant::Coordination {
        normal += 1.0 - x.zs;
    }
    Ok(Payoffs {
        susceptible_distance: -p.c_d + risk,
        susceptible_normal: normal,
        infected_distance: [-p.c_d, -p.c_d],
        infected_normal: [-p.c1, -p.c2],
    })
}

/// Base and effective reproduction numbers at a state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReproductionNumbers {
    pub r0: [f64; 2],
    pub eff: [f64; 2],
}

pub fn reproduction_numbers(p: &Params, x: &State) -> Result<ReproductionNumbers> {
    check_gamma(x)?;
    let qs = qf(x.zs.clamp(0.0, 1.0), p.q);
    let r0 = [p.r0(Virus::One), p.r0(Virus::Two)];
    let eff = [
        qs * qf(x.z1.clamp(0.0, 1.0), p.q) * r0[0],
        qs * qf(x.z2.clamp(0.0, 1.0), p.q) * r0[1],
    ];
    Ok(ReproductionNumbers { r0, eff })
}

/// Pass/fail of each modelling assumption. Never mutates the parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    /// `beta_i > 0` and `delta_i > 0`.
    pub rates_positive: bool,
    /// `0 < q < 1`.
    pub q_in_open_unit: bool,
    /// `r_i > 0`.
    pub risk_positive: bool,
    /// `0 < r1 < r2`; tracked only.
    pub risk_ordered: bool,
    /// `cD > 0`.
    pub distancing_cost_positive: bool,
    /// `c_i > cD` for each virus.
    pub infected_cost_exceeds_distancing: [bool; 2],
    /// `|c_i - cD| > GENERICITY_EPS` for each virus.
    pub generic_costs: [bool; 2],
}

impl AssumptionReport {
    /// Hard invariants every operation relies on.
    pub fn is_admissible(&self) -> bool {
        self.rates_positive
            && self.q_in_open_unit
            && self.risk_positive
            && self.distancing_cost_positive
    }

    pub fn prosocial(&self) -> bool {
        self.infected_cost_exceeds_distancing.iter().all(|b| *b)
    }

    pub fn generic(&self) -> bool {
        self.generic_costs.iter().all(|b| *b)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.rates_positive {
            out.push("rates must be positive");
        }
        if !self.q_in_open_unit {
            out.push("q must lie in (0, 1)");
        }
        if !self.risk_positive {
            out.push("risk weights must be positive");
        }
        if !self.distancing_cost_positive {
            out.push("cD must be positive");
        }
        out
    }
}

pub fn validate(p: &Params) -> Result<AssumptionReport> {
    for (name, v) in p.named_values() {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    Ok(AssumptionReport {
        rates_positive: p.beta1 > 0.0 && p.beta2 > 0.0 && p.delta1 > 0.0 && p.delta2 > 0.0,
        q_in_open_unit: p.q > 0.0 && p.q < 1.0,
        risk_positive: p.r1 > 0.0 && p.r2 > 0.0,
        risk_ordered: 0.0 < p.r1 && p.r1 < p.r2,
        distancing_cost_positive: p.c_d > 0.0,
        infected_cost_exceeds_distancing: [p.c1 > p.c_d, p.c2 > p.c_d],
        generic_costs: [
            (p.c1 - p.c_d).abs() > GENERICITY_EPS,
            (p.c2 - p.c_d).abs() > GENERICITY_EPS,
        ],
    })
}
