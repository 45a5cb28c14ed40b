//! Linearization, spectra, predicted versus numeric stability, and the
//! monotonicity test.

pub mod eigen;
pub mod jacobian;
pub mod monotone;
pub mod predict;

use serde::Serialize;

pub use eigen::{eigenvalues, spectral_abscissa, spectrum, structured_eigenvalues, Spectrum};
pub use jacobian::{analytic_jacobian, fd_jacobian, jacobian, Jacobian, STRUCTURAL_ZEROS};
pub use monotone::{monotonicity_check, MonotoneVerdict, MonotonicityReport};
pub use predict::{predict_family, predict_stability, Prediction, Verdict};

use crate::equilibria::{
    catalogue, residual, Equilibrium, EquilibriumFamily, EquilibriumKind, FamilyKind, Status,
};
use crate::error::{Error, Result};
use crate::model::{Params, State};

/// Dead-zone around zero for eigenvalue real parts.
pub const EIG_EPS: f64 = 1e-8;

/// Tolerance on negative off-diagonal entries in the Metzler test.
pub const METZLER_EPS: f64 = 1e-12;

/// Largest residual accepted as an equilibrium by [`classify`].
pub const RESIDUAL_MAX: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NumericVerdict {
    ExpStable,
    Unstable,
    /// One eigenvalue in the dead-zone, tangent to a family, the rest negative.
    CenterLine,
    Degenerate,
}

/// Verdict from a spectrum; `CenterLine` is only possible on a family.
pub fn numeric_verdict(s: &Spectrum, on_family: bool) -> NumericVerdict {
    if s.iter().any(|z| z.re > EIG_EPS) {
        return NumericVerdict::Unstable;
    }
    if s.iter().all(|z| z.re < -EIG_EPS) {
        return NumericVerdict::ExpStable;
    }
    let near_zero = s.iter().filter(|z| z.norm() < EIG_EPS).count();
    let negative = s.iter().filter(|z| z.re < -EIG_EPS).count();
    if on_family && near_zero == 1 && negative == 4 {
        NumericVerdict::CenterLine
    } else {
        NumericVerdict::Degenerate
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericReport {
    pub point: State,
    /// `(re, im)` pairs, decreasing real part.
    pub eigenvalues: Vec<[f64; 2]>,
    pub spectral_abscissa: f64,
    pub verdict: NumericVerdict,
}

fn numeric_at(p: &Params, x: &State, on_family: bool) -> Result<NumericReport> {
    let res = residual(p, x);
    if res.is_nan() || res >= RESIDUAL_MAX {
        return Err(Error::NotEquilibrium(res));
    }
    let s = spectrum(&jacobian(p, x)?)?;
    Ok(NumericReport {
        point: *x,
        eigenvalues: s.iter().map(|z| [z.re, z.im]).collect(),
        spectral_abscissa: spectral_abscissa(&s),
        verdict: numeric_verdict(&s, on_family),
    })
}

/// Numeric classification of an equilibrium from its Jacobian spectrum.
pub fn classify(p: &Params, e: &Equilibrium) -> Result<NumericReport> {
    let on_family = matches!(e.kind, EquilibriumKind::LinePoint { .. });
    numeric_at(p, &e.point, on_family)
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub name: String,
    pub point: State,
    pub eigenvalues: Vec<[f64; 2]>,
    pub spectral_abscissa: f64,
    pub numeric_verdict: NumericVerdict,
    pub prediction: Prediction,
    pub agreement: Agreement,
}

pub fn analyze(p: &Params, e: &Equilibrium) -> Result<StabilityReport> {
    let n = classify(p, e)?;
    let prediction = predict_stability(p, e);
    let agreement = compare(prediction.verdict, n.verdict, e.kind);
    Ok(StabilityReport {
        name: e.name(),
        point: e.point,
        eigenvalues: n.eigenvalues,
        spectral_abscissa: n.spectral_abscissa,
        numeric_verdict: n.verdict,
        prediction,
        agreement,
    })
}

/// Parameters at which a family is sampled for classification: `n` interior
/// points, plus both closure endpoints for the straight lines. Along a line
/// the transverse eigenvalue is linear in `y1`, so its extremes sit at the
/// endpoints.
pub fn family_sample_parameters(f: &EquilibriumFamily, n: usize) -> Vec<f64> {
    let mut ys = f.interior_parameters(n);
    if f.kind != FamilyKind::LS {
        ys.insert(0, f.y1_lo);
        ys.push(f.y1_hi);
    }
    ys
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub family: FamilyKind,
    pub y1_lo: f64,
    pub y1_hi: f64,
    pub samples: Vec<NumericReport>,
    /// `Unstable` if any sample is, `CenterLine` if all are, else `Degenerate`.
    pub numeric_verdict: NumericVerdict,
    pub prediction: Prediction,
    pub agreement: Agreement,
}

pub fn classify_family(p: &Params, f: &EquilibriumFamily, n: usize) -> Result<Vec<NumericReport>> {
    family_sample_parameters(f, n)
        .into_iter()
        .map(|y1| numeric_at(p, &f.point_unchecked(y1), true))
        .collect()
}

pub fn aggregate(samples: &[NumericReport]) -> NumericVerdict {
    if samples
        .iter()
        .any(|s| s.verdict == NumericVerdict::Unstable)
    {
        NumericVerdict::Unstable
    } else if !samples.is_empty()
        && samples
            .iter()
            .all(|s| s.verdict == NumericVerdict::CenterLine)
    {
        NumericVerdict::CenterLine
    } else {
        NumericVerdict::Degenerate
    }
}

pub fn analyze_family(p: &Params, f: &EquilibriumFamily, n: usize) -> Result<FamilyReport> {
    let samples = classify_family(p, f, n)?;
    let numeric = aggregate(&samples);
    let prediction = predict_family(p, f);
    let agreement = compare(
        prediction.verdict,
        numeric,
        EquilibriumKind::LinePoint { family: f.kind },
    );
    Ok(FamilyReport {
        family: f.kind,
        y1_lo: f.y1_lo,
        y1_hi: f.y1_hi,
        samples,
        numeric_verdict: numeric,
        prediction,
        agreement,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Agreement {
    Agree,
    Disagree,
    NotComparable,
}

/// Compares definite outcomes only. Isolated points pair `Stable` with
/// `ExpStable`; family points pair it with `CenterLine`.
pub fn compare(pred: Verdict, num: NumericVerdict, kind: EquilibriumKind) -> Agreement {
    let family = matches!(kind, EquilibriumKind::LinePoint { .. });
    let numeric_stable = match (num, family) {
        (NumericVerdict::Unstable, _) => Some(false),
        (NumericVerdict::ExpStable, false) | (NumericVerdict::CenterLine, true) => Some(true),
        _ => None,
    };
    let predicted_stable = match pred {
        Verdict::Stable => Some(true),
        Verdict::Unstable => Some(false),
        Verdict::Inconclusive => None,
    };
    match (predicted_stable, numeric_stable) {
        (Some(a), Some(b)) if a == b => Agreement::Agree,
        (Some(_), Some(_)) => Agreement::Disagree,
        _ => Agreement::NotComparable,
    }
}

pub fn cross_check(p: &Params, e: &Equilibrium) -> Result<Agreement> {
    Ok(analyze(p, e)?.agreement)
}

pub fn cross_check_family(p: &Params, f: &EquilibriumFamily, n: usize) -> Result<Agreement> {
    Ok(analyze_family(p, f, n)?.agreement)
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckRecord {
    pub name: String,
    pub prediction: Verdict,
    pub numeric: NumericVerdict,
    pub agreement: Agreement,
}

/// Cross-checks every enumerated equilibrium and existing family of `p`.
/// Points whose existence margin is degenerate are skipped.
pub fn cross_check_all(p: &Params, family_samples: usize) -> Result<Vec<CrossCheckRecord>> {
    let cat = catalogue(p);
    let mut out = Vec::new();
    for e in cat.points.iter().filter(|e| e.status() == Status::Holds) {
        let r = analyze(p, e)?;
        out.push(CrossCheckRecord {
            name: r.name,
            prediction: r.prediction.verdict,
            numeric: r.numeric_verdict,
            agreement: r.agreement,
        });
    }
    for f in &cat.families {
        let r = analyze_family(p, f, family_samples)?;
        out.push(CrossCheckRecord {
            name: f.kind.to_string(),
            prediction: r.prediction.verdict,
            numeric: r.numeric_verdict,
            agreement: r.agreement,
        });
    }
    Ok(out)
}
