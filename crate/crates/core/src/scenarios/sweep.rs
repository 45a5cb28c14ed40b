//! Predicted-stability maps over one or two parameters.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{candidate_families, enumerate_dfes, unilateral, R0Policy, Status};
use crate::error::{Error, Result};
use crate::model::{Params, Virus};
use crate::stability::{predict_family, predict_stability, Verdict};

use super::svg::PALETTE;

const NAMES: [&str; 10] = [
    "beta1", "beta2", "delta1", "delta2", "r1", "r2", "c1", "c2", "cD", "q",
];

/// Equilibrium classes reported for each cell.
pub const CLASSES: [&str; 10] = [
    "dfe", "p10", "p11", "p1S", "p20", "p21", "p2S", "L0", "L1", "LS",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `name:lo:hi:steps`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("axis `{s}` must look like name:lo:hi:steps"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let lo: f64 = parts[1].parse().map_err(|_| bad())?;
        let hi: f64 = parts[2].parse().map_err(|_| bad())?;
        let steps: usize = parts[3].parse().map_err(|_| bad())?;
        Ok(Axis {
            name: parts[0].to_string(),
            lo,
            hi,
            steps,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub base: Params,
    pub axes: Vec<Axis>,
}

impl SweepSpec {
    pub fn check(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config("a sweep takes one or two axes".into()));
        }
        for a in &self.axes {
            if !NAMES.contains(&a.name.as_str()) {
                return Err(Error::Config(format!(
                    "unknown sweep parameter `{}`",
                    a.name
                )));
            }
            if a.steps == 0 || !a.lo.is_finite() || !a.hi.is_finite() {
                return Err(Error::Config(format!(
                    "axis `{}` needs finite bounds and steps >= 1",
                    a.name
                )));
            }
        }
        if self.axes.len() == 2 && self.axes[0].name == self.axes[1].name {
            return Err(Error::Config("sweep axes must be distinct".into()));
        }
        Ok(())
    }
}

/// One class in one cell: `S` stable, `U` unstable, `I` inconclusive,
/// `-` absent.
#[derive(Clone, Debug, Serialize)]
pub struct SweepCell {
    pub values: Vec<f64>,
    pub valid: bool,
    pub codes: Vec<char>,
}

impl SweepCell {
    /// `+`-joined list of classes predicted stable.
    pub fn label(&self) -> String {
        if !self.valid {
            return "invalid".into();
        }
        let stable: Vec<&str> = CLASSES
            .iter()
            .zip(&self.codes)
            .filter(|(_, c)| **c == 'S')
            .map(|(n, _)| *n)
            .collect();
        if stable.is_empty() {
            "none".into()
        } else {
            stable.join("+")
        }
    }

    pub fn code(&self, class: &str) -> Option<char> {
        CLASSES
            .iter()
            .position(|c| *c == class)
            .map(|i| self.codes[i])
    }
}

fn code(v: Verdict) -> char {
    match v {
        Verdict::Stable => 'S',
        Verdict::Unstable => 'U',
        Verdict::Inconclusive => 'I',
    }
}

/// Existence and predicted stability of every class at `p`.
pub fn classify_cell(p: &Params) -> Vec<char> {
    let mut codes = vec!['-'; CLASSES.len()];
    if let Ok(dfes) = enumerate_dfes(p) {
        if let Some(c) = dfes.iter().find(|e| e.stability_candidate) {
            codes[0] = code(predict_stability(p, c).verdict);
        }
    }
    for v in Virus::BOTH {
        for e in unilateral(p, v) {
            if let Some(i) = CLASSES.iter().position(|c| *c == e.name()) {
                codes[i] = code(predict_stability(p, &e).verdict);
            }
        }
    }
    for f in candidate_families(p, R0Policy::default()) {
        if crate::equilibria::combine(&f.existence) == Status::Fails {
            continue;
        }
        let i = CLASSES
            .iter()
            .position(|c| *c == f.kind.to_string())
            .unwrap();
        codes[i] = code(predict_family(p, &f).verdict);
    }
    codes
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepGrid {
    pub axes: Vec<Axis>,
    /// Row-major over the axes, first axis outermost.
    pub cells: Vec<SweepCell>,
}

pub fn sweep(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.check()?;
    let mut grid: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &spec.axes {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                axis.values().into_iter().map(move |v| {
                    let mut row = prefix.clone();
                    row.push(v);
                    row
                })
            })
            .collect();
    }
    let cells = grid
        .into_par_iter()
        .map(|values| {
            let mut p = spec.base;
            for (a, v) in spec.axes.iter().zip(&values) {
                p.set(&a.name, *v)?;
            }
            let valid = p.ensure_valid().is_ok();
            let codes = if valid {
                classify_cell(&p)
            } else {
                vec!['-'; CLASSES.len()]
            };
            Ok(SweepCell {
                values,
                valid,
                codes,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        axes: spec.axes.clone(),
        cells,
    })
}

impl SweepGrid {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header: Vec<String> = self.axes.iter().map(|a| a.name.clone()).collect();
        header.extend(CLASSES.iter().map(|c| c.to_string()));
        header.push("stable".into());
        writeln!(out, "{}", header.join(","))?;
        for c in &self.cells {
            let mut row: Vec<String> = c.values.iter().map(|v| format!("{v}")).collect();
            row.extend(c.codes.iter().map(|ch| ch.to_string()));
            row.push(c.label());
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Heat map of the stable-class label per cell.
    pub fn heatmap_svg(&self) -> String {
        let nx = self.axes[0].steps;
        let ny = self.axes.get(1).map_or(1, |a| a.steps);
        let mut colors: BTreeMap<String, &str> = BTreeMap::new();
        for c in &self.cells {
            let n = colors.len();
            colors
                .entry(c.label())
                .or_insert(PALETTE[n % PALETTE.len()]);
        }
        let (w, h, m) = (640.0, 480.0, 60.0);
        let (cw, ch) = ((w - 2.0 * m - 120.0) / nx as f64, (h - 2.0 * m) / ny as f64);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
        );
        let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        for (k, c) in self.cells.iter().enumerate() {
            let (ix, iy) = if ny == 1 { (k, 0) } else { (k / ny, k % ny) };
            let x = m + ix as f64 * cw;
            let y = h - m - (iy + 1) as f64 * ch;
            let _ = writeln!(
                s,
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                cw + 0.05,
                ch + 0.05,
                colors[&c.label()]
            );
        }
        let a0 = &self.axes[0];
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{} [{}, {}]</text>",
            m + (w - 2.0 * m - 120.0) / 2.0,
            h - 20.0,
            a0.name,
            a0.lo,
            a0.hi
        );
        if let Some(a1) = self.axes.get(1) {
            let _ = writeln!(
                s,
                "<text x=\"20\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">{} [{}, {}]</text>",
                h / 2.0,
                h / 2.0,
                a1.name,
                a1.lo,
                a1.hi
            );
        }
        for (k, (label, color)) in colors.iter().enumerate() {
            let y = m + 16.0 * k as f64;
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{y}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>",
                w - m - 110.0,
                w - m - 95.0,
                y + 9.0,
                label
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
