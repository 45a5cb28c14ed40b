//! Minimal hand-written SVG line plots.

use std::fmt::Write;

use crate::equilibria::{catalogue, Status};
use crate::integrator::Trajectory;
use crate::model::{Params, State};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const MAX_POINTS: usize = 4000;

pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Analytic equilibria drawn on top of phase plots.
#[derive(Clone, Debug, Default)]
pub struct Overlay {
    pub points: Vec<(String, State)>,
    pub curves: Vec<(String, Vec<State>)>,
}

impl Overlay {
    pub fn for_params(p: &Params) -> Self {
        let cat = catalogue(p);
        let points = cat
            .points
            .iter()
            .filter(|e| e.status() == Status::Holds && (e.point.y1 > 0.0 || e.point.y2 > 0.0))
            .map(|e| (e.name(), e.point))
            .collect();
        let curves = cat
            .families
            .iter()
            .map(|f| {
                let n = 64;
                let pts = (0..=n)
                    .map(|k| f.point_unchecked(f.y1_lo + (f.y1_hi - f.y1_lo) * k as f64 / n as f64))
                    .collect();
                (f.kind.to_string(), pts)
            })
            .collect();
        Overlay { points, curves }
    }
}

pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
    legend: Vec<(String, String)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Plot {
    pub fn new(
        title: &str,
        x_label: &str,
        y_label: &str,
        x_range: (f64, f64),
        y_range: (f64, f64),
    ) -> Self {
        let widen = |(lo, hi): (f64, f64)| {
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_range: widen(x_range),
            y_range: widen(y_range),
            body: String::new(),
            legend: Vec::new(),
        }
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_range.0) / (self.x_range.1 - self.x_range.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT
            - MARGIN
            - (y - self.y_range.0) / (self.y_range.1 - self.y_range.0) * (HEIGHT - 2.0 * MARGIN)
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str, width: f64, dashed: bool) {
        if pts.is_empty() {
            return;
        }
        let stride = pts.len().div_ceil(MAX_POINTS).max(1);
        let mut d = String::new();
        let mut kept: Vec<&(f64, f64)> = pts.iter().step_by(stride).collect();
        if kept.last() != pts.last().as_ref() {
            kept.push(pts.last().unwrap());
        }
        for (x, y) in kept {
            let _ = write!(d, "{:.2},{:.2} ", self.sx(*x), self.sy(*y));
        }
        let dash = if dashed {
            " stroke-dasharray=\"6,4\""
        } else {
            ""
        };
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"{dash}/>",
            d.trim_end()
        );
    }

    pub fn marker(&mut self, x: f64, y: f64, color: &str, label: &str) {
        let (px, py) = (self.sx(x), self.sy(y));
        let _ = writeln!(
            self.body,
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"{color}\"/>\n<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>",
            px + 6.0,
            py - 6.0,
            esc(label)
        );
    }

    pub fn legend(&mut self, label: &str, color: &str) {
        self.legend.push((label.into(), color.into()));
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        );
        let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        let (x0, x1) = (MARGIN, WIDTH - MARGIN);
        let (y0, y1) = (HEIGHT - MARGIN, MARGIN);
        let _ = writeln!(
            s,
            "<rect x=\"{x0}\" y=\"{y1}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            x1 - x0,
            y0 - y1
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = self.x_range.0 + f * (self.x_range.1 - self.x_range.0);
            let yv = self.y_range.0 + f * (self.y_range.1 - self.y_range.0);
            let _ = writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
                self.sx(xv),
                y0 + 16.0,
                tick(xv)
            );
            let _ = writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
                x0 - 6.0,
                self.sy(yv) + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            esc(&self.title)
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            HEIGHT - 12.0,
            esc(&self.x_label)
        );
        let _ = writeln!(
            s,
            "<text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            esc(&self.y_label)
        );
        s.push_str(&self.body);
        for (k, (label, color)) in self.legend.iter().enumerate() {
            let y = MARGIN + 14.0 + 16.0 * k as f64;
            let _ = writeln!(
                s,
                "<rect x=\"{:.0}\" y=\"{:.0}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n<text x=\"{:.0}\" y=\"{:.0}\" font-size=\"11\">{}</text>",
                x1 - 90.0,
                y - 9.0,
                x1 - 75.0,
                y,
                esc(label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn overlay_on(plot: &mut Plot, overlay: &Overlay, project: impl Fn(&State) -> (f64, f64)) {
    for (name, pts) in &overlay.curves {
        let xy: Vec<_> = pts.iter().map(&project).collect();
        plot.polyline(&xy, "black", 2.5, true);
        plot.legend(name, "black");
    }
    for (name, x) in &overlay.points {
        let (a, b) = project(x);
        plot.marker(a, b, "black", name);
    }
}

/// Trajectories projected on the `(y1, y2)` simplex.
pub fn phase_y(trs: &[Trajectory], overlay: &Overlay) -> String {
    let mut plot = Plot::new("infected masses", "y1", "y2", (0.0, 1.0), (0.0, 1.0));
    plot.polyline(&[(0.0, 1.0), (1.0, 0.0)], "#999999", 1.0, true);
    for (k, tr) in trs.iter().enumerate() {
        let xy: Vec<_> = tr.states.iter().map(|x| (x.y1, x.y2)).collect();
        plot.polyline(&xy, PALETTE[k % PALETTE.len()], 1.5, false);
    }
    overlay_on(&mut plot, overlay, |x| (x.y1, x.y2));
    plot.render()
}

/// Trajectories in the `(y1, zS)` plane.
pub fn phase_zs(trs: &[Trajectory], overlay: &Overlay) -> String {
    let mut plot = Plot::new("susceptible distancing", "y1", "zS", (0.0, 1.0), (0.0, 1.0));
    for (k, tr) in trs.iter().enumerate() {
        let xy: Vec<_> = tr.states.iter().map(|x| (x.y1, x.zs)).collect();
        plot.polyline(&xy, PALETTE[k % PALETTE.len()], 1.5, false);
    }
    overlay_on(&mut plot, overlay, |x| (x.y1, x.zs));
    plot.render()
}

/// All five coordinates against time.
pub fn timeseries(tr: &Trajectory, title: &str) -> String {
    let mut plot = Plot::new(title, "t", "state", (0.0, tr.final_time()), (0.0, 1.0));
    for (i, name) in State::COORDINATES.iter().enumerate() {
        let xy: Vec<_> = tr
            .times
            .iter()
            .zip(&tr.states)
            .map(|(t, x)| (*t, x.to_array()[i]))
            .collect();
        plot.polyline(&xy, PALETTE[i], 1.5, false);
        plot.legend(name, PALETTE[i]);
    }
    plot.render()
}
