//! Thin wrappers around the LAPACK-backed dense routines used throughout the
//! crate. All matrices at play are tiny (tens of rows/columns), so requesting
//! full SVDs per subset is entirely affordable.

use ndarray::{Array1, Array2, Axis};
use ndarray_linalg::{LeastSquaresSvd, Norm, SVD};
use num_complex::Complex64;

pub(crate) type CMat = Array2<Complex64>;
pub(crate) type CVec = Array1<Complex64>;

/// Singular values of `m` in descending order. Empty matrices yield an empty
/// vector instead of hitting LAPACK.
pub(crate) fn singular_values(m: &CMat) -> Array1<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Array1::zeros(0);
    }
    let (_, s, _) = m.svd(false, false).expect("SVD failed to converge");
    s
}

/// Number of singular values exceeding `tol * sigma_max`. The zero matrix has
/// rank 0 by convention.
pub(crate) fn rank_from_singular_values(s: &[f64], tol: f64) -> usize {
    match s.first() {
        None | Some(&0.0) => 0,
        Some(&smax) => s.iter().take_while(|&&x| x > tol * smax).count(),
    }
}

/// Smallest effective singular value of `m` together with a unit vector from
/// the corresponding right singular direction (a numerical null vector when
/// the value is ~0). A matrix with more columns than rows always has an exact
/// null vector, reported with singular value 0.
pub(crate) fn smallest_singular_pair(m: &CMat) -> (f64, CVec) {
    let (_, s, vt) = m.svd(false, true).expect("SVD failed to converge");
    let vt = vt.expect("right singular vectors requested");
    // Rows of V^H beyond min(nrows, ncols) span the exact null space.
    let sigma = if m.ncols() > m.nrows() {
        0.0
    } else {
        s[s.len() - 1]
    };
    let v = vt.row(vt.nrows() - 1).mapv(|z| z.conj());
    (sigma, v)
}

/// Minimum-norm least-squares solution of `m c = y` and the relative residual
/// `|y - m c| / |y|`. The caller guarantees `|y| > 0`.
pub(crate) fn least_squares(m: &CMat, y: &CVec) -> (CVec, f64) {
    let sol = m
        .least_squares(y)
        .expect("least-squares solve failed")
        .solution;
    let residual = (y - &m.dot(&sol)).norm_l2() / y.norm_l2();
    (sol, residual)
}

/// Columns of `m` selected by `cols`, in the given order.
pub(crate) fn select_columns(m: &CMat, cols: &[usize]) -> CMat {
    m.select(Axis(1), cols)
}

/// Binomial coefficient, `None` on u64 overflow.
pub(crate) fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u64)?;
        acc /= (i + 1) as u64;
    }
    Some(acc)
}
