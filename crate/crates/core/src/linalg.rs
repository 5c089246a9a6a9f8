//! Thin helpers over `faer` for the dense complex algebra used throughout the crate.

use faer::linalg::solvers::Solve;
use faer::{c64, Col, Mat, Scale};

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type CMat = Mat<c64>;
/// Dense complex column vector.
pub type CVec = Col<c64>;

#[inline]
pub fn real(x: f64) -> c64 {
    c64::new(x, 0.0)
}

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn scaled(a: &CMat, s: c64) -> CMat {
    a * Scale(s)
}

/// Promote a real matrix to complex.
pub fn complexify(a: &Mat<f64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| real(a[(i, j)]))
}

pub fn col_from_slice(values: &[c64]) -> CVec {
    Col::from_fn(values.len(), |i| values[i])
}

pub fn col_to_vec(v: &CVec) -> Vec<c64> {
    (0..v.nrows()).map(|i| v[i]).collect()
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values()
        .map_err(|e| Error::Decomposition(format!("SVD did not converge: {e:?}")))
}

/// Spectral norm (largest singular value).
pub fn norm2(a: &CMat) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Maximum absolute row sum.
pub fn norm_inf(a: &CMat) -> f64 {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn norm_fro(a: &CMat) -> f64 {
    a.norm_l2()
}

pub fn vec_norm2(v: &CVec) -> f64 {
    v.norm_l2()
}

pub fn vec_norm_inf(v: &CVec) -> f64 {
    (0..v.nrows()).map(|i| v[i].norm()).fold(0.0, f64::max)
}

/// Number of singular values above `rel_tol * sigma_1`.
pub fn numerical_rank(a: &CMat, rel_tol: f64) -> Result<usize> {
    let sv = singular_values(a)?;
    let Some(&top) = sv.first() else {
        return Ok(0);
    };
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > rel_tol * top).count())
}

/// Inverse through a partial-pivoting LU factorization.
///
/// The factorization itself never fails, so singularity is detected from the
/// result: non-finite entries or a residual `‖A X − I‖_F` that is not small.
pub fn inverse(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Dimension(format!(
            "cannot invert a {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let id = identity(n);
    let x = a.partial_piv_lu().solve(&id);
    let finite = (0..n).all(|j| (0..n).all(|i| x[(i, j)].re.is_finite() && x[(i, j)].im.is_finite()));
    if !finite {
        return Err(Error::SingularMatrix(format!("{n}x{n} matrix has no inverse")));
    }
    let residual = norm_fro(&(a * &x - &id));
    if residual > 1e-6 * (n as f64).sqrt() {
        return Err(Error::SingularMatrix(format!(
            "{n}x{n} matrix is numerically singular (inverse residual {residual:.3e})"
        )));
    }
    Ok(x)
}

/// `a^power` by binary exponentiation; `a^0` is the identity.
pub fn matrix_power(a: &CMat, power: usize) -> CMat {
    let mut result: Option<CMat> = None;
    let mut base = a.clone();
    let mut p = power;
    while p > 0 {
        if p & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => &r * &base,
            });
        }
        p >>= 1;
        if p > 0 {
            base = &base * &base;
        }
    }
    result.unwrap_or_else(|| identity(a.nrows()))
}

/// Eigenvalues and right eigenvectors (as columns) of a general square matrix.
pub fn eigen(a: &CMat) -> Result<(Vec<c64>, CMat)> {
    if a.nrows() == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let evd = a
        .eigen()
        .map_err(|e| Error::Decomposition(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..s.nrows()).map(|i| s[i]).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn eigenvalues(a: &CMat) -> Result<Vec<c64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.eigenvalues()
        .map_err(|e| Error::Decomposition(format!("eigenvalue computation failed: {e:?}")))
}

/// Sort a spectrum by decreasing modulus, breaking ties by decreasing real
/// part and then decreasing imaginary part.
///
/// Keys are quantized relative to the largest modulus so that values that
/// differ only by round-off compare as ties.
pub fn sort_spectrum(values: &mut [c64]) {
    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let quantize = |x: f64| -> i64 { (x / scale * 1e11).round() as i64 };
    values.sort_by_cached_key(|z| {
        (
            std::cmp::Reverse(quantize(z.norm())),
            std::cmp::Reverse(quantize(z.re)),
            std::cmp::Reverse(quantize(z.im)),
        )
    });
}

/// Relative Frobenius distance `‖a − b‖_F / max(‖b‖_F, tiny)`.
pub fn rel_fro_distance(a: &CMat, b: &CMat) -> f64 {
    let denom = norm_fro(b).max(f64::MIN_POSITIVE);
    norm_fro(&(a - b)) / denom
}

pub(crate) fn check_square(a: &CMat, what: &str) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}
