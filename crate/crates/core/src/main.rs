use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use bivirus::equilibria::{catalogue, Status};
use bivirus::integrator::{
    detect_convergence, detect_oscillation, simulate, DEFAULT_DT, DEFAULT_TOL_CONV,
};
use bivirus::model::validate;
use bivirus::scenarios::{self, basin, svg, Axis, BasinOptions, BasinTarget, SweepSpec};
use bivirus::stability::{self, Agreement};
use bivirus::{Error, Params, State};

#[derive(Parser)]
#[command(
    name = "bivirus",
    version,
    about = "Bi-virus SIS dynamics with replicator social distancing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a parameter file against the model assumptions.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Integrate from one initial state.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Initial state `y1,y2,zS,z1,z2`.
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        #[arg(long, default_value_t = 300.0)]
        t_end: f64,
        /// Steps between recorded rows; defaults to about 0.1 time units.
        #[arg(long)]
        record_every: Option<usize>,
        /// Output directory; without it the CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List closed-form equilibria and families.
    Equilibria {
        #[arg(long)]
        config: PathBuf,
        /// Samples reported per family.
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Spectra and predicted stability.
    Stability {
        #[arg(long)]
        config: PathBuf,
        /// Classify this state instead of the enumerated equilibria.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "all")]
        at: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Search for a signature matrix making the Jacobian Metzler.
    Monotone {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a registered scenario (fig1 to fig9).
    Reproduce {
        id: String,
        #[arg(long, default_value = "out")]
        outdir: PathBuf,
        /// Override the registered step size.
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Map predicted stability over one or two parameters.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `name:lo:hi:steps`; give once or twice.
        #[arg(long, required = true)]
        axis: Vec<String>,
        /// CSV path; the heat map is written next to it with an `.svg` extension.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fraction of random interior starts converging to a target.
    Basin {
        #[arg(long)]
        config: PathBuf,
        /// Equilibrium name (`p10`, `candidate`, `dfe011`, ...), `L0`, `L1`, `LS` or `endemic`.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DT)]
        dt: f64,
        #[arg(long, default_value_t = 300.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
}

type Outcome = bivirus::Result<bool>;

fn load(path: &Path) -> bivirus::Result<Params> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    Params::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn print(v: &impl serde::Serialize) -> bivirus::Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn cmd_validate(config: &Path) -> Outcome {
    let p = load(config)?;
    let report = validate(&p)?;
    print(&json!({ "report": report, "failures": report.failures() }))?;
    Ok(report.is_admissible())
}

fn cmd_simulate(
    config: &Path,
    x0: &str,
    dt: f64,
    t_end: f64,
    record_every: Option<usize>,
    out: Option<&Path>,
) -> Outcome {
    let p = load(config)?;
    p.ensure_valid()?;
    let x0 = State::parse_csv(x0)?;
    let every = record_every.unwrap_or_else(|| ((0.1 / dt).round() as usize).max(1));
    let tr = simulate(&p, &x0, dt, t_end, every)?;
    match out {
        None => tr.write_csv(std::io::stdout().lock())?,
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            tr.save_csv(&dir.join("trajectory.csv"))?;
            let overlay = svg::Overlay::for_params(&p);
            let one = std::slice::from_ref(&tr);
            std::fs::write(dir.join("phase_y.svg"), svg::phase_y(one, &overlay))?;
            std::fs::write(dir.join("phase_zs.svg"), svg::phase_zs(one, &overlay))?;
            std::fs::write(
                dir.join("timeseries.svg"),
                svg::timeseries(&tr, "simulation"),
            )?;
            let osc: Vec<_> = (0..5)
                .map(|i| detect_oscillation(&tr, i).classification)
                .collect();
            print(&json!({
                "final_state": tr.final_state(),
                "convergence": detect_convergence(&tr, DEFAULT_TOL_CONV),
                "oscillation": osc,
            }))?;
        }
    }
    Ok(true)
}

fn cmd_equilibria(config: &Path, samples: usize) -> Outcome {
    let p = load(config)?;
    p.ensure_valid()?;
    let cat = catalogue(&p);
    let mut out: Vec<Value> = Vec::new();
    for e in &cat.points {
        out.push(json!({
            "name": e.name(),
            "kind": e.kind,
            "point": e.point,
            "existence": e.existence,
            "flags": {
                "stability_candidate": e.stability_candidate,
                "status": e.status(),
                "note": e.note,
            },
        }));
    }
    for f in &cat.families {
        out.push(json!({
            "name": f.kind.to_string(),
            "kind": { "Family": f.kind },
            "existence": f.existence,
            "y1_lo": f.y1_lo,
            "y1_hi": f.y1_hi,
            "line_sum": f.line_sum(),
            "samples": f.samples(samples),
            "flags": { "r0": f.r0 },
        }));
    }
    print(&out)?;
    Ok(true)
}

fn cmd_stability(config: &Path, at: Option<&str>, samples: usize) -> Outcome {
    let p = load(config)?;
    p.ensure_valid()?;
    if let Some(at) = at {
        let x = State::parse_csv(at)?;
        let cat = catalogue(&p);
        let matched = cat.points.iter().find(|e| e.point.max_dist(&x) < 1e-9);
        let on_family = cat.families.iter().any(|f| f.contains(&x, 1e-9));
        let s = stability::spectrum(&stability::jacobian(&p, &x)?)?;
        let res = bivirus::equilibria::residual(&p, &x);
        let report = json!({
            "point": x,
            "residual": res,
            "eigenvalues": s.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "spectral_abscissa": stability::spectral_abscissa(&s),
            "numeric_verdict": (res < stability::RESIDUAL_MAX)
                .then(|| stability::numeric_verdict(&s, on_family)),
            "matched": matched.map(|e| e.name()),
            "prediction": matched.map(|e| stability::predict_stability(&p, e)),
        });
        print(&report)?;
        return Ok(true);
    }
    let cat = catalogue(&p);
    let mut points = Vec::new();
    for e in cat.points.iter().filter(|e| e.status() != Status::Fails) {
        points.push(stability::analyze(&p, e)?);
    }
    let mut families = Vec::new();
    for f in &cat.families {
        families.push(stability::analyze_family(&p, f, samples)?);
    }
    let agree = points.iter().all(|r| r.agreement != Agreement::Disagree)
        && families.iter().all(|r| r.agreement != Agreement::Disagree);
    print(&json!({ "points": points, "families": families }))?;
    Ok(agree)
}

fn cmd_monotone(config: &Path, samples: usize, seed: u64) -> Outcome {
    let p = load(config)?;
    p.ensure_valid()?;
    let xs = basin::sample_interior(&mut ChaCha8Rng::seed_from_u64(seed), samples.max(1));
    let report = stability::monotonicity_check(&p, &xs)?;
    print(&report)?;
    Ok(true)
}

fn cmd_reproduce(id: &str, outdir: &Path, dt: Option<f64>) -> Outcome {
    let run = scenarios::reproduce(id, Some(outdir), dt)?;
    for (k, r) in run.report.runs.iter().enumerate() {
        println!(
            "{id} start {k}: {} measured {:.3e} final {:?}",
            if r.pass { "PASS" } else { "FAIL" },
            r.measured,
            r.final_state.to_array()
        );
    }
    println!(
        "{id}: {} -> {}",
        if run.report.pass { "PASS" } else { "FAIL" },
        outdir.join(id).display()
    );
    Ok(run.report.pass)
}

fn cmd_sweep(config: &Path, axes: &[String], out: &Path) -> Outcome {
    let base = load(config)?;
    let axes = axes
        .iter()
        .map(|a| a.parse::<Axis>())
        .collect::<bivirus::Result<Vec<_>>>()?;
    let grid = scenarios::sweep(&SweepSpec { base, axes })?;
    if let Some(parent) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    grid.write_csv(std::io::BufWriter::new(std::fs::File::create(out)?))?;
    std::fs::write(out.with_extension("svg"), grid.heatmap_svg())?;
    println!("{} cells -> {}", grid.cells.len(), out.display());
    Ok(true)
}

fn cmd_basin(config: &Path, target: &str, n: usize, seed: u64, opts: BasinOptions) -> Outcome {
    let p = load(config)?;
    let t = BasinTarget::resolve(&p, target)?;
    let report = scenarios::basin_probe(&p, &t, n, seed, opts)?;
    print(&json!({
        "target": target,
        "n": report.n,
        "seed": report.seed,
        "reached": report.reached,
        "fraction": report.fraction,
    }))?;
    Ok(true)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Blowup { .. } | Error::Numeric | Error::NotEquilibrium(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { config } => cmd_validate(config),
        Command::Simulate {
            config,
            x0,
            dt,
            t_end,
            record_every,
            out,
        } => cmd_simulate(config, x0, *dt, *t_end, *record_every, out.as_deref()),
        Command::Equilibria { config, samples } => cmd_equilibria(config, *samples),
        Command::Stability {
            config,
            at,
            all: _,
            samples,
        } => cmd_stability(config, at.as_deref(), *samples),
        Command::Monotone {
            config,
            samples,
            seed,
        } => cmd_monotone(config, *samples, *seed),
        Command::Reproduce { id, outdir, dt } => cmd_reproduce(id, outdir, *dt),
        Command::Sweep { config, axis, out } => cmd_sweep(config, axis, out),
        Command::Basin {
            config,
            target,
            n,
            seed,
            dt,
            t_end,
            tol,
        } => cmd_basin(
            config,
            target,
            *n,
            *seed,
            BasinOptions {
                h: *dt,
                t_end: *t_end,
                tol: *tol,
            },
        ),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
