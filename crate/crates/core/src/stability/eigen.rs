use nalgebra::{Complex, Matrix3};

use super::jacobian::Jacobian;
use crate::error::{Error, Result};

pub type Spectrum = [Complex<f64>; 5];

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

fn sort_spectrum(mut v: Vec<Complex<f64>>) -> Spectrum {
    v.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    v.try_into().expect("five eigenvalues")
}

/// Forces complex eigenvalues into exact conjugate pairs.
fn pair_conjugates(v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
    let (mut upper, mut lower): (Vec<Complex<f64>>, Vec<Complex<f64>>) =
        v.iter().copied().partition(|z| z.im > 0.0);
    lower.retain(|z| z.im < 0.0);
    let mut out: Vec<Complex<f64>> = v.iter().filter(|z| z.im == 0.0).copied().collect();
    if upper.len() != lower.len() {
        return v;
    }
    upper.sort_by(|a, b| a.re.total_cmp(&b.re));
    lower.sort_by(|a, b| a.re.total_cmp(&b.re));
    for (u, l) in upper.iter().zip(&lower) {
        let re = 0.5 * (u.re + l.re);
        let im = 0.5 * (u.im - l.im);
        out.push(Complex::new(re, im));
        out.push(Complex::new(re, -im));
    }
    out
}

/// All eigenvalues through a real Schur decomposition, sorted by
/// decreasing real part.
pub fn eigenvalues(m: &Jacobian) -> Result<Spectrum> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric);
    }
    let schur = m
        .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(Error::Numeric)?;
    let ev = schur.complex_eigenvalues();
    Ok(sort_spectrum(pair_conjugates(ev.iter().copied().collect())))
}

/// Roots of the 2x2 block `[[a, b], [c, d]]`.
fn eig2(a: f64, b: f64, c: f64, d: f64) -> [Complex<f64>; 2] {
    if b == 0.0 || c == 0.0 {
        return [Complex::new(a, 0.0), Complex::new(d, 0.0)];
    }
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let disc = half * half + b * c;
    if disc >= 0.0 {
        let root = disc.sqrt();
        // Larger-magnitude root first, the other via the determinant.
        let big = if mean >= 0.0 {
            mean + root
        } else {
            mean - root
        };
        let small = if big != 0.0 {
            (a * d - b * c) / big
        } else {
            mean - root
        };
        [Complex::new(big, 0.0), Complex::new(small, 0.0)]
    } else {
        let im = (-disc).sqrt();
        [Complex::new(mean, im), Complex::new(mean, -im)]
    }
}

/// Eigenvalues of a 3x3 block that decouples into a scalar and a 2x2 part.
fn eig3_reducible(a: &Matrix3<f64>) -> Option<[Complex<f64>; 3]> {
    for k in 0..3 {
        let others: Vec<usize> = (0..3).filter(|i| *i != k).collect();
        let row_free = others.iter().all(|&i| a[(k, i)] == 0.0);
        let col_free = others.iter().all(|&i| a[(i, k)] == 0.0);
        if row_free || col_free {
            let (i, j) = (others[0], others[1]);
            let [l1, l2] = eig2(a[(i, i)], a[(i, j)], a[(j, i)], a[(j, j)]);
            return Some([Complex::new(a[(k, k)], 0.0), l1, l2]);
        }
    }
    None
}

/// Closed-form eigenvalues when the matrix has the block structure found
/// at the enumerated equilibria: the `z1`, `z2` rows are diagonal and the
/// leading 3x3 block splits into a scalar and a 2x2 factor. `None` when the
/// structure is absent.
pub fn structured_eigenvalues(m: &Jacobian) -> Option<Spectrum> {
    for r in 3..5 {
        if (0..5).any(|c| c != r && m[(r, c)] != 0.0) {
            return None;
        }
    }
    let block: Matrix3<f64> = m.fixed_view::<3, 3>(0, 0).into_owned();
    let [a, b, c] = eig3_reducible(&block)?;
    Some(sort_spectrum(vec![
        a,
        b,
        c,
        Complex::new(m[(3, 3)], 0.0),
        Complex::new(m[(4, 4)], 0.0),
    ]))
}

/// Structured path when available, Schur otherwise.
pub fn spectrum(m: &Jacobian) -> Result<Spectrum> {
    match structured_eigenvalues(m) {
        Some(s) => Ok(s),
        None => eigenvalues(m),
    }
}

/// Largest real part.
pub fn spectral_abscissa(s: &Spectrum) -> f64 {
    s.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}
