use nalgebra::DMatrix;
use serde::Serialize;

use super::jacobian::jacobian;
use super::METZLER_EPS;
use crate::error::Result;
use crate::model::{Params, State};

/// All `2^n` sign vectors, as `+1`/`-1` entries.
pub fn signatures(n: usize) -> Vec<Vec<i8>> {
    (0..1usize << n)
        .map(|bits| {
            (0..n)
                .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
                .collect()
        })
        .collect()
}

/// Whether `P m P` is Metzler for `P = diag(signs)`, up to `-eps`.
pub fn is_metzler_under(m: &DMatrix<f64>, signs: &[i8], eps: f64) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || f64::from(signs[i] * signs[j]) * m[(i, j)] >= -eps))
}

/// Sign vectors that make every matrix Metzler.
pub fn working_signatures(mats: &[DMatrix<f64>], eps: f64) -> Vec<Vec<i8>> {
    let Some(first) = mats.first() else {
        return Vec::new();
    };
    signatures(first.nrows())
        .into_iter()
        .filter(|s| mats.iter().all(|m| is_metzler_under(m, s, eps)))
        .collect()
}

/// Ordered pairs `(i, j)`, 1-based, with `m_ij < 0 < m_ji`. Any such pair
/// rules out every signature at once.
pub fn witness_pairs(m: &DMatrix<f64>, eps: f64) -> Vec<(usize, usize)> {
    let n = m.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && m[(i, j)] < -eps && m[(j, i)] > eps {
                out.push((i + 1, j + 1));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MonotoneVerdict {
    /// No signature makes every sampled Jacobian Metzler.
    NotMonotone,
    /// Some signature works at every sample, interior ones included.
    ConsistentWithMonotone,
    /// Some signature works, but no interior sample was checked.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub samples: usize,
    pub interior_samples: usize,
    pub signatures_tested: usize,
    pub working_signatures: Vec<Vec<i8>>,
    /// Witness pairs present at every sample.
    pub common_witnesses: Vec<(usize, usize)>,
    /// Whether `J13 < 0 < J31` held at every sample.
    pub witness_13_everywhere: bool,
    pub verdict: MonotoneVerdict,
}

fn interior(x: &State) -> bool {
    x.to_array().iter().all(|v| *v > 0.0 && *v < 1.0) && x.s() > 0.0
}

/// Searches all 32 signature matrices for one making the Jacobian Metzler
/// at every sample.
pub fn monotonicity_check(p: &Params, samples: &[State]) -> Result<MonotonicityReport> {
    let mats = samples
        .iter()
        .map(|x| jacobian(p, x).map(|j| DMatrix::from_column_slice(5, 5, j.as_slice())))
        .collect::<Result<Vec<_>>>()?;
    let working = working_signatures(&mats, METZLER_EPS);

    let mut common: Option<Vec<(usize, usize)>> = None;
    for m in &mats {
        let w = witness_pairs(m, METZLER_EPS);
        common = Some(match common {
            None => w,
            Some(prev) => prev.into_iter().filter(|pair| w.contains(pair)).collect(),
        });
    }
    let common = common.unwrap_or_default();
    let interior_samples = samples.iter().filter(|x| interior(x)).count();
    let verdict = if working.is_empty() {
        MonotoneVerdict::NotMonotone
    } else if interior_samples > 0 {
        MonotoneVerdict::ConsistentWithMonotone
    } else {
        MonotoneVerdict::Inconclusive
    };
    Ok(MonotonicityReport {
        samples: samples.len(),
        interior_samples,
        signatures_tested: 32,
        witness_13_everywhere: !mats.is_empty() && common.contains(&(1, 3)),
        working_signatures: working,
        common_witnesses: common,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::params;

    #[test]
    fn signature_count() {
        let s = signatures(5);
        assert_eq!(s.len(), 32);
        assert_eq!(s[0], vec![1; 5]);
    }

    #[test]
    fn interior_point_is_not_monotone() {
        let r =
            monotonicity_check(&params::fig2(), &[State::new(0.2, 0.3, 0.4, 0.5, 0.6)]).unwrap();
        assert_eq!(r.verdict, MonotoneVerdict::NotMonotone);
        assert!(r.working_signatures.is_empty());
        assert!(r.witness_13_everywhere);
    }

    #[test]
    fn dfe_alone_is_inconclusive() {
        let r =
            monotonicity_check(&params::fig2(), &[State::new(0.0, 0.0, 0.0, 1.0, 1.0)]).unwrap();
        assert_eq!(r.verdict, MonotoneVerdict::Inconclusive);
        assert_eq!(r.working_signatures.len(), 32);
    }

    #[test]
    fn competitive_two_by_two_block() {
        // competitive pair: both off-diagonals negative
        let m = DMatrix::from_row_slice(2, 2, &[-1.0, -0.5, -0.25, -2.0]);
        let w = working_signatures(&[m], METZLER_EPS);
        assert!(w.contains(&vec![1, -1]) && w.contains(&vec![-1, 1]));
        assert_eq!(w.len(), 2);
    }
}
