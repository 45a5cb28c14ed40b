//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bivirus::equilibria::{catalogue, coexistence_families, residual, FamilyKind, Status};
use bivirus::integrator::simulate;
use bivirus::model::in_gamma;
use bivirus::registry::params;
use bivirus::scenarios::{
    self, basin_probe, in_dfe_domain, in_p10_domain, BasinOptions, BasinTarget,
};
use bivirus::stability::{
    self, analytic_jacobian, cross_check_all, monotonicity_check, predict_family,
    predict_stability, Agreement, MonotoneVerdict, Verdict, EIG_EPS,
};
use bivirus::{State, Virus};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: bivirus::Error) -> String {
    e.to_string()
}

fn c1_enumeration() -> Outcome {
    let cases = [
        (
            params::fig2(),
            "p10",
            State::new(5.0 / 9.0, 0.0, 0.0, 1.0, 1.0),
        ),
        (
            params::fig3(),
            "p11",
            State::new(4.0 / 9.0, 0.0, 1.0, 1.0, 1.0),
        ),
        (
            params::fig4(),
            "p1S",
            State::new(0.25, 0.0, 5.0 / 42.0, 1.0, 1.0),
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for (p, name, quoted) in cases {
        let cat = catalogue(&p);
        let e = cat.find(name).ok_or(format!("{name} not enumerated"))?;
        if e.status() != Status::Holds {
            return Err(format!("{name} existence is {:?}", e.status()));
        }
        worst = worst.max(e.point.max_dist(&quoted));
        worst_res = worst_res.max(residual(&p, &e.point));
    }
    ensure(
        worst < 1e-12 && worst_res < 1e-12,
        format!("max gap to quoted {worst:.1e}, max residual {worst_res:.1e}"),
    )
}

fn c2_golden() -> Outcome {
    let targets = [
        ("fig2", State::new(5.0 / 9.0, 0.0, 0.0, 1.0, 1.0)),
        ("fig3", State::new(4.0 / 9.0, 0.0, 1.0, 1.0, 1.0)),
        ("fig4", State::new(0.25, 0.0, 5.0 / 42.0, 1.0, 1.0)),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (id, target) in targets {
        let run = scenarios::reproduce(id, None, None).map_err(err)?;
        let spec = &run.spec;
        if spec.h != 1e-4 || spec.t_end != 300.0 {
            return Err(format!(
                "{id} registered with h {} t_end {}",
                spec.h, spec.t_end
            ));
        }
        let d = run.trajectories[0].final_state().max_dist(&target);
        ok &= d < 1e-3 && run.report.pass;
        parts.push(format!("{id} {d:.1e}"));
    }
    ensure(ok, parts.join(", "))
}

fn c3_marginal_dfe() -> Outcome {
    let run = scenarios::reproduce("fig1", None, None).map_err(err)?;
    if run.spec.t_end != 500.0 {
        return Err(format!("t_end {}", run.spec.t_end));
    }
    let d = run.trajectories[0]
        .final_state()
        .max_dist(&State::new(0.0, 0.0, 0.0, 1.0, 1.0));
    ensure(d < 1e-2, format!("distance {d:.2e} at t = 500"))
}

fn c4_lines() -> Outcome {
    // 1 - 1/(q R0) with q R0 = 1.6, and 1 - 1/(q^2 R0) with q^2 R0 = 1.28
    let l0: f64 = 1.0 - 1.0 / (0.8 * 2.0);
    let l1: f64 = 1.0 - 1.0 / (0.64 * 2.0);
    if (l0 - 0.375).abs() > 1e-15 || (l1 - 0.21875).abs() > 1e-15 {
        return Err(format!("line sums {l0} {l1}"));
    }
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (id, sum, zs) in [("fig5", l0, 0.0), ("fig6", l1, 1.0)] {
        let run = scenarios::reproduce(id, None, None).map_err(err)?;
        if run.trajectories.len() != 4 {
            return Err(format!("{id} has {} starts", run.trajectories.len()));
        }
        for tr in &run.trajectories {
            let x = tr.final_state();
            let d = (x.y1 + x.y2 - sum).abs().max((x.zs - zs).abs());
            worst = worst.max(d);
            ok &= d < 1e-3;
        }
    }
    ensure(ok, format!("8 runs, worst sum/zS gap {worst:.1e}"))
}

fn c5_line_spectra() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (p, shown) in [
        (params::fig5(), FamilyKind::L0),
        (params::fig6(), FamilyKind::L1),
    ] {
        for f in coexistence_families(&p) {
            let mut center = true;
            for x in f.samples(10) {
                let j = analytic_jacobian(&p, &x);
                // both eigen routes must show the structure
                let schur = stability::eigenvalues(&j).map_err(err)?;
                let routes = [Some(schur), stability::structured_eigenvalues(&j)];
                for s in routes.iter().flatten() {
                    let zero = s.iter().filter(|z| z.norm() < EIG_EPS).count();
                    let neg = s.iter().filter(|z| z.re < -EIG_EPS).count();
                    center &= zero == 1 && neg == 4;
                }
            }
            let predicted = predict_family(&p, &f).verdict;
            if f.kind == shown {
                ok &= center && predicted == Verdict::Stable;
                notes.push(format!("{} center line at 10 samples: {center}", f.kind));
            } else {
                // the other line also exists for these values; it must repel
                let repels = !center && predicted == Verdict::Unstable;
                ok &= repels;
                notes.push(format!("{} (also exists) repelling: {repels}", f.kind));
            }
        }
    }
    ensure(ok, notes.join("; "))
}

fn c6_limit_cycle() -> Outcome {
    let a = scenarios::reproduce("fig8", None, None).map_err(err)?;
    let b = scenarios::reproduce("fig9", None, None).map_err(err)?;
    let amp = a.report.runs[0].measured;
    let va = &a.report.runs[0].oscillations[0];
    let vb = &b.report.runs[0].oscillations[0];
    ensure(
        a.report.pass && b.report.pass && amp >= 0.05,
        format!(
            "fig8 y1 {:?} amplitude {amp:.3}; beta1 = 0.9 y2 {:?}",
            va.classification, vb.classification
        ),
    )
}

fn c7_monotone() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut ok = true;
    for _ in 0..20 {
        let p = common::random_generic(&mut rng);
        let xs = scenarios::sample_interior(&mut rng, 100);
        let r = monotonicity_check(&p, &xs).map_err(err)?;
        ok &= r.signatures_tested == 32
            && r.working_signatures.is_empty()
            && r.witness_13_everywhere
            && r.verdict == MonotoneVerdict::NotMonotone;
    }
    ensure(
        ok,
        "20 parameter sets x 100 points: 0/32 signatures, (1,3) witness each time".into(),
    )
}

fn c8_jacobian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for x in scenarios::sample_interior(&mut rng, 100) {
        let p = common::random_generic(&mut rng);
        let a = analytic_jacobian(&p, &x);
        let f = common::central_differences(&p, &x, 1e-6);
        let (mut diff, mut norm) = (0.0f64, 0.0f64);
        for r in 0..5 {
            for c in 0..5 {
                diff += (a[(r, c)] - f[r][c]).powi(2);
                norm += a[(r, c)].powi(2);
            }
        }
        worst = worst.max((diff / norm).sqrt());
    }
    ensure(
        worst < 1e-6,
        format!("max relative Frobenius error {worst:.1e}"),
    )
}

fn random_draws() -> Vec<bivirus::Params> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    (0..100).map(|_| common::random_generic(&mut rng)).collect()
}

fn c9_agreement(draws: &[bivirus::Params]) -> Outcome {
    let (mut agree, mut skipped, mut disagree) = (0, 0, Vec::new());
    for (k, p) in draws.iter().enumerate() {
        for rec in cross_check_all(p, 10).map_err(err)? {
            match rec.agreement {
                Agreement::Agree => agree += 1,
                Agreement::NotComparable => skipped += 1,
                Agreement::Disagree => disagree.push(format!("draw {k} {}", rec.name)),
            }
        }
    }
    ensure(
        disagree.is_empty(),
        format!("{agree} agree, {skipped} not comparable, disagreements {disagree:?}"),
    )
}

fn c10_exclusivity(draws: &[bivirus::Params]) -> Outcome {
    let mut checked = 0;
    for p in draws {
        let cat = catalogue(p);
        let stable = |name: &str| {
            cat.find(name)
                .filter(|e| e.status() == Status::Holds)
                .is_some_and(|e| predict_stability(p, e).verdict == Verdict::Stable)
        };
        for v in Virus::BOTH {
            let i = v.number();
            if stable(&format!("p{i}0")) && stable(&format!("p{i}1")) {
                return Err(format!("p{i}0 and p{i}1 both stable at {p:?}"));
            }
        }
        let fam_stable = |k: FamilyKind| {
            cat.family(k)
                .is_some_and(|f| predict_family(p, f).verdict == Verdict::Stable)
        };
        if fam_stable(FamilyKind::L0) && fam_stable(FamilyKind::L1) {
            return Err(format!("L0 and L1 both stable at {p:?}"));
        }
        checked += 1;
    }
    ensure(true, format!("{checked} draws, no conflicting pairs"))
}

fn c11_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut states = 0usize;
    for _ in 0..10 {
        let p = common::random_any(&mut rng);
        for x0 in scenarios::sample_interior(&mut rng, 10) {
            let tr = simulate(&p, &x0, 1e-2, 100.0, 1).map_err(err)?;
            if let Some(x) = tr.states.iter().find(|x| !in_gamma(x, 1e-9)) {
                return Err(format!("left the state space at {x:?}"));
            }
            states += tr.states.len();
        }
    }
    ensure(true, format!("100 starts, {states} recorded states inside"))
}

fn c12_basins() -> Outcome {
    let n = 50;
    let p2 = params::fig2();
    let t2 = BasinTarget::resolve(&p2, "p10").map_err(err)?;
    let b2 = basin_probe(&p2, &t2, n, 12, BasinOptions::default()).map_err(err)?;
    let p1 = params::fig1();
    let t1 = BasinTarget::resolve(&p1, "candidate").map_err(err)?;
    let relaxed = BasinOptions {
        t_end: 500.0,
        tol: 1e-2,
        ..BasinOptions::default()
    };
    let b1 = basin_probe(&p1, &t1, n, 12, relaxed).map_err(err)?;
    let p8 = params::fig8();
    let t8 = BasinTarget::resolve(&p8, "endemic").map_err(err)?;
    let b8 = basin_probe(&p8, &t8, n, 12, BasinOptions::default()).map_err(err)?;
    let domains =
        b2.starts.iter().all(in_p10_domain) && b1.starts.iter().all(|x| in_dfe_domain(&p1, x));
    ensure(
        domains
            && b2.fraction == 1.0
            && b1.fraction == 1.0
            && b8.fraction > 0.0
            && b8.fraction < 1.0,
        format!(
            "fig2->p10 {:.2}, fig1->DFE {:.2} (tol 1e-2, t 500), fig8->endemic {:.2}",
            b2.fraction, b1.fraction, b8.fraction
        ),
    )
}

fn main() -> ExitCode {
    let draws = random_draws();
    let criteria: Vec<Criterion> = vec![
        ("equilibrium enumeration", Box::new(c1_enumeration)),
        ("golden trajectories", Box::new(c2_golden)),
        ("marginal DFE", Box::new(c3_marginal_dfe)),
        ("lines", Box::new(c4_lines)),
        ("line spectra", Box::new(c5_line_spectra)),
        ("limit cycle", Box::new(c6_limit_cycle)),
        ("non-monotonicity", Box::new(c7_monotone)),
        ("jacobian correctness", Box::new(c8_jacobian)),
        (
            "prediction/numeric agreement",
            Box::new(|| c9_agreement(&draws)),
        ),
        ("exclusivity", Box::new(|| c10_exclusivity(&draws))),
        ("positive invariance", Box::new(c11_invariance)),
        ("basin probing", Box::new(c12_basins)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
