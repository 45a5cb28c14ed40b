//! Fixed-step RK4 integration, trajectory recording and long-run verdicts.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{field, in_gamma, Params, State, GAMMA_SLACK};

/// Violations up to this size are clamped away; larger ones are a blowup.
pub const CLAMP_EPS: f64 = 1e-8;

pub const DEFAULT_DT: f64 = 1e-3;

/// Default residual threshold for [`detect_convergence`].
pub const DEFAULT_TOL_CONV: f64 = 1e-9;

/// Leading fraction of the horizon ignored by [`detect_oscillation`].
pub const TRANSIENT_FRACTION: f64 = 0.25;

/// Last/first amplitude ratio at or above which an oscillation is sustained.
pub const SUSTAINED_RATIO: f64 = 0.5;

/// Required relative growth for a monotone amplitude sequence to be `Growing`.
pub const GROWTH_TOL: f64 = 0.1;

/// Peak-to-peak amplitudes below this are treated as roundoff.
pub const AMPLITUDE_FLOOR: f64 = 1e-9;

/// Time-stamped states plus the parameters that produced them.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub params: Params,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub dt: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> State {
        *self.states.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn coordinate(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|x| x.to_array()[index]).collect()
    }

    /// Writes `t,y1,y2,zS,z1,z2` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"t,y1,y2,zS,z1,z2\n")?;
        for (t, x) in self.times.iter().zip(&self.states) {
            let a = x.to_array();
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t, a[0], a[1], a[2], a[3], a[4]
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

fn axpy(x: &[f64; 5], h: f64, k: &[f64; 5]) -> [f64; 5] {
    let mut out = *x;
    for i in 0..5 {
        out[i] += h * k[i];
    }
    out
}

fn rk4(p: &Params, x: &[f64; 5], h: f64) -> [f64; 5] {
    let k1 = field(p, x);
    let k2 = field(p, &axpy(x, 0.5 * h, &k1));
    let k3 = field(p, &axpy(x, 0.5 * h, &k2));
    let k4 = field(p, &axpy(x, h, &k3));
    let mut out = *x;
    for i in 0..5 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Clamps roundoff-sized excursions back into the state space.
fn settle(mut a: [f64; 5], t: f64) -> Result<[f64; 5]> {
    for (i, v) in a.iter_mut().enumerate() {
        if !v.is_finite() || *v < -CLAMP_EPS || *v > 1.0 + CLAMP_EPS {
            return Err(Error::Blowup {
                t,
                coordinate: State::COORDINATES[i],
                value: *v,
            });
        }
        *v = v.clamp(0.0, 1.0);
    }
    let excess = a[0] + a[1] - 1.0;
    if excess > CLAMP_EPS {
        return Err(Error::Blowup {
            t,
            coordinate: "y1+y2",
            value: a[0] + a[1],
        });
    }
    if excess > 0.0 {
        // Euclidean projection onto y1 + y2 = 1, kept non-negative.
        let (y1, y2) = (a[0] - excess / 2.0, a[1] - excess / 2.0);
        let (y1, y2) = if y1 < 0.0 {
            (0.0, 1.0)
        } else if y2 < 0.0 {
            (1.0, 0.0)
        } else {
            (y1, y2)
        };
        a[0] = y1;
        a[1] = y2;
    }
    Ok(a)
}

fn check_start(x: &State, h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain(format!("step size {h} must be positive")));
    }
    if !in_gamma(x, GAMMA_SLACK) {
        return Err(Error::Domain(format!(
            "state {:?} outside the state space",
            x.to_array()
        )));
    }
    Ok(())
}

/// One classical RK4 step of size `h`.
pub fn step(p: &Params, x: &State, h: f64) -> Result<State> {
    check_start(x, h)?;
    let next = settle(rk4(p, &x.to_array(), h), h)?;
    Ok(State::from_array(next))
}

/// Integrates from `t = 0` to `t_end`, keeping every `record_every`-th state
/// and the final one.
pub fn simulate(
    p: &Params,
    x0: &State,
    h: f64,
    t_end: f64,
    record_every: usize,
) -> Result<Trajectory> {
    check_start(x0, h)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!("horizon {t_end} must be positive")));
    }
    let record_every = record_every.max(1);
    let n_steps = ((t_end / h).round() as usize).max(1);
    let capacity = n_steps / record_every + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);

    let mut x = settle(x0.to_array(), 0.0)?;
    times.push(0.0);
    states.push(State::from_array(x));
    for k in 1..=n_steps {
        let t = k as f64 * h;
        x = settle(rk4(p, &x, h), t)?;
        if k % record_every == 0 || k == n_steps {
            times.push(t);
            states.push(State::from_array(x));
        }
    }
    Ok(Trajectory {
        params: *p,
        times,
        states,
        dt: h,
    })
}

fn residual_of(p: &Params, x: &State) -> f64 {
    field(p, &x.to_array())
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceVerdict {
    pub converged: bool,
    pub limit: Option<State>,
    /// Max-norm of the vector field at the final state.
    pub residual: f64,
    /// Largest max-norm distance from the final state over the last 10%.
    pub late_drift: f64,
    /// Earliest recorded time after which the trajectory stays within
    /// `tol_conv` of the final state.
    pub t_converged: Option<f64>,
}

/// Converged iff the final residual and the late-horizon drift are both
/// below `tol_conv`.
pub fn detect_convergence(tr: &Trajectory, tol_conv: f64) -> ConvergenceVerdict {
    let last = tr.final_state();
    let residual = residual_of(&tr.params, &last);
    let t_end = tr.final_time();
    let late_from = t_end - 0.1 * t_end;
    let late_drift = tr
        .times
        .iter()
        .zip(&tr.states)
        .filter(|(t, _)| **t >= late_from)
        .map(|(_, x)| x.max_dist(&last))
        .fold(0.0, f64::max);
    let converged = residual < tol_conv && late_drift < tol_conv;

    let t_converged = if converged {
        let mut t_in = t_end;
        for (t, x) in tr.times.iter().zip(&tr.states).rev() {
            if x.max_dist(&last) < tol_conv {
                t_in = *t;
            } else {
                break;
            }
        }
        Some(t_in)
    } else {
        None
    };

    ConvergenceVerdict {
        converged,
        limit: converged.then_some(last),
        residual,
        late_drift,
        t_converged,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Oscillation {
    Decaying,
    Sustained,
    Growing,
    None,
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillationVerdict {
    pub classification: Oscillation,
    /// Peak-to-peak amplitude of each cycle between successive maxima.
    pub peak_amplitudes: Vec<f64>,
}

/// Indices of strict local maxima (plateaus count once, at their start).
fn local_extrema(v: &[f64], maxima: bool) -> Vec<usize> {
    let better = |a: f64, b: f64| if maxima { a > b } else { a < b };
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < v.len() {
        if better(v[i], v[i - 1]) {
            let mut j = i;
            while j + 1 < v.len() && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < v.len() && better(v[i], v[j + 1]) {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Classifies oscillations of one coordinate after discarding the transient.
pub fn detect_oscillation(tr: &Trajectory, coordinate: usize) -> OscillationVerdict {
    let none = |peak_amplitudes| OscillationVerdict {
        classification: Oscillation::None,
        peak_amplitudes,
    };
    let start_t = TRANSIENT_FRACTION * tr.final_time();
    let start = tr.times.partition_point(|t| *t < start_t);
    let series: Vec<f64> = tr.states[start..]
        .iter()
        .map(|x| x.to_array()[coordinate])
        .collect();

    let maxima = local_extrema(&series, true);
    if maxima.len() < 4 {
        return none(Vec::new());
    }
    let amplitudes: Vec<f64> = maxima
        .windows(2)
        .map(|w| {
            let lo = series[w[0]..=w[1]]
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            series[w[0]].max(series[w[1]]) - lo
        })
        .collect();

    let first = amplitudes[0];
    let last = *amplitudes.last().expect("at least three cycles");
    if first < AMPLITUDE_FLOOR {
        return none(amplitudes);
    }
    let monotone_up = amplitudes.windows(2).all(|w| w[1] >= w[0]);
    let classification = if monotone_up && last > first * (1.0 + GROWTH_TOL) {
        Oscillation::Growing
    } else if last >= SUSTAINED_RATIO * first {
        Oscillation::Sustained
    } else {
        Oscillation::Decaying
    };
    OscillationVerdict {
        classification,
        peak_amplitudes: amplitudes,
    }
}
