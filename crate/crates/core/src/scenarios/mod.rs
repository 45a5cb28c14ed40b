//! Scenario registry, reproduction runs, sweeps, basin probes and plots.

pub mod basin;
pub mod registry;
pub mod svg;
pub mod sweep;

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

pub use basin::{
    basin_probe, in_dfe_domain, in_p10_domain, sample_interior, BasinOptions, BasinReport,
    BasinTarget,
};
pub use sweep::{sweep, Axis, SweepGrid, SweepSpec};

use crate::equilibria::{catalogue, EquilibriumFamily, FamilyKind};
use crate::error::{Error, Result};
use crate::integrator::{
    detect_convergence, detect_oscillation, simulate, ConvergenceVerdict, Oscillation,
    OscillationVerdict, Trajectory,
};
use crate::model::{Params, State};

/// Largest allowed gap between a quoted target and the enumerated point.
pub const QUOTE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillationCheck {
    /// Index into `(y1, y2, zS, z1, z2)`.
    pub coordinate: usize,
    pub expect: Oscillation,
    /// Lower bound on the last peak-to-peak amplitude.
    pub min_amplitude: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Expected {
    /// Converge within `tol` (max-norm) of an enumerated equilibrium.
    Point {
        equilibrium: String,
        /// A literal value for the target, checked against the enumerator.
        quoted: Option<State>,
        tol: f64,
    },
    /// End within `tol` of an existing family's defining constraints.
    Family {
        family: FamilyKind,
        tol: f64,
    },
    LimitCycle {
        checks: Vec<OscillationCheck>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub params: Params,
    pub starts: Vec<State>,
    pub h: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub expected: Expected,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunOutcome {
    pub start: State,
    pub final_state: State,
    /// Distance to the target, or the last amplitude for limit cycles.
    pub measured: f64,
    pub convergence: ConvergenceVerdict,
    pub oscillations: Vec<OscillationVerdict>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub params: Params,
    pub h: f64,
    pub t_end: f64,
    pub expected: Expected,
    pub target: Option<State>,
    pub family: Option<EquilibriumFamily>,
    pub runs: Vec<RunOutcome>,
    pub pass: bool,
}

pub struct ScenarioRun {
    pub spec: ScenarioSpec,
    pub report: ScenarioReport,
    pub trajectories: Vec<Trajectory>,
}

enum Resolved {
    Point(State, f64),
    Family(EquilibriumFamily, f64),
    Cycle(Vec<OscillationCheck>),
}

fn resolve(spec: &ScenarioSpec) -> Result<Resolved> {
    let cat = catalogue(&spec.params);
    match &spec.expected {
        Expected::Point {
            equilibrium,
            quoted,
            tol,
        } => {
            let e = cat.find(equilibrium).ok_or_else(|| {
                Error::Config(format!(
                    "{}: no equilibrium `{equilibrium}` for these parameters",
                    spec.name
                ))
            })?;
            if let Some(q) = quoted {
                let gap = q.max_dist(&e.point);
                if gap > QUOTE_TOL {
                    return Err(Error::Config(format!(
                        "{}: quoted target differs from `{equilibrium}` by {gap:e}",
                        spec.name
                    )));
                }
            }
            Ok(Resolved::Point(e.point, *tol))
        }
        Expected::Family { family, tol } => {
            let f = cat.family(*family).ok_or_else(|| {
                Error::Config(format!(
                    "{}: family {family} does not exist for these parameters",
                    spec.name
                ))
            })?;
            Ok(Resolved::Family(f.clone(), *tol))
        }
        Expected::LimitCycle { checks } => Ok(Resolved::Cycle(checks.clone())),
    }
}

fn evaluate(tr: &Trajectory, start: State, target: &Resolved) -> RunOutcome {
    let last = tr.final_state();
    let (measured, pass, convergence, oscillations) = match target {
        Resolved::Point(x, tol) => {
            let d = last.max_dist(x);
            (d, d <= *tol, detect_convergence(tr, *tol), Vec::new())
        }
        Resolved::Family(f, tol) => {
            let d = f.constraint_residual(&last);
            (
                d,
                f.contains(&last, *tol),
                detect_convergence(tr, *tol),
                Vec::new(),
            )
        }
        Resolved::Cycle(checks) => {
            let mut pass = true;
            let mut measured = f64::NAN;
            let mut verdicts = Vec::new();
            for c in checks {
                let v = detect_oscillation(tr, c.coordinate);
                let amp = v.peak_amplitudes.last().copied().unwrap_or(0.0);
                pass &= v.classification == c.expect && c.min_amplitude.is_none_or(|m| amp >= m);
                if measured.is_nan() {
                    measured = amp;
                }
                verdicts.push(v);
            }
            (
                measured,
                pass,
                detect_convergence(tr, crate::integrator::DEFAULT_TOL_CONV),
                verdicts,
            )
        }
    };
    RunOutcome {
        start,
        final_state: last,
        measured,
        convergence,
        oscillations,
        pass,
    }
}

/// Simulates every start (in parallel) and evaluates the expectation.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioRun> {
    spec.params.ensure_valid()?;
    if spec.starts.is_empty() {
        return Err(Error::Config(format!("{}: no initial states", spec.name)));
    }
    let target = resolve(spec)?;
    let trajectories = spec
        .starts
        .par_iter()
        .map(|x0| simulate(&spec.params, x0, spec.h, spec.t_end, spec.record_every))
        .collect::<Result<Vec<_>>>()?;
    let runs: Vec<RunOutcome> = trajectories
        .iter()
        .zip(&spec.starts)
        .map(|(tr, x0)| evaluate(tr, *x0, &target))
        .collect();
    let (point, family) = match target {
        Resolved::Point(x, _) => (Some(x), None),
        Resolved::Family(f, _) => (None, Some(f)),
        Resolved::Cycle(_) => (None, None),
    };
    let report = ScenarioReport {
        name: spec.name.clone(),
        params: spec.params,
        h: spec.h,
        t_end: spec.t_end,
        expected: spec.expected.clone(),
        target: point,
        family,
        pass: runs.iter().all(|r| r.pass),
        runs,
    };
    Ok(ScenarioRun {
        spec: spec.clone(),
        report,
        trajectories,
    })
}

impl ScenarioRun {
    /// Writes CSV trajectories, `report.json` and the three plots into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (k, tr) in self.trajectories.iter().enumerate() {
            let name = if k == 0 {
                "trajectory.csv".to_string()
            } else {
                format!("trajectory_{k}.csv")
            };
            tr.save_csv(&dir.join(name))?;
        }
        let json = serde_json::to_string_pretty(&self.report)?;
        std::fs::write(dir.join("report.json"), json + "\n")?;
        let overlay = svg::Overlay::for_params(&self.spec.params);
        std::fs::write(
            dir.join("phase_y.svg"),
            svg::phase_y(&self.trajectories, &overlay),
        )?;
        std::fs::write(
            dir.join("phase_zs.svg"),
            svg::phase_zs(&self.trajectories, &overlay),
        )?;
        std::fs::write(
            dir.join("timeseries.svg"),
            svg::timeseries(&self.trajectories[0], &self.spec.name),
        )?;
        Ok(())
    }
}

/// Runs a registered scenario, optionally overriding the step size, and
/// writes artifacts under `outdir/<id>/` when `outdir` is given.
pub fn reproduce(id: &str, outdir: Option<&Path>, h: Option<f64>) -> Result<ScenarioRun> {
    let mut spec = registry::spec(id).ok_or_else(|| {
        Error::Config(format!(
            "unknown scenario `{id}`; expected one of {}",
            registry::IDS.join(", ")
        ))
    })?;
    if let Some(h) = h {
        // keep the recording interval in time units
        let interval = spec.h * spec.record_every as f64;
        spec.h = h;
        spec.record_every = ((interval / h).round() as usize).max(1);
    }
    let run = run_scenario(&spec)?;
    if let Some(dir) = outdir {
        run.write(&dir.join(id))?;
    }
    Ok(run)
}
