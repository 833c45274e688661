//! Small dense linear-algebra helpers: row reduction, rank and square solves.
//!
//! Matrices handled here are tiny (feature vocabularies, 2x2 systems), so
//! plain Gaussian elimination with partial pivoting is enough.

use ndarray::{Array1, Array2, ArrayView2, Axis};

/// Default pivot tolerance for rank decisions.
pub const PIVOT_TOL: f64 = 1e-9;

/// Reduced row-echelon form. Returns the reduced matrix and the pivot
/// columns. Entries with magnitude below `tol` are treated as zero.
pub fn rref(m: ArrayView2<'_, f64>, tol: f64) -> (Array2<f64>, Vec<usize>) {
    let mut a = m.to_owned();
    let (rows, cols) = a.dim();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, best_val) =
            (r..rows)
                .map(|i| (i, a[[i, c]].abs()))
                .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            continue;
        }
        if best != r {
            for j in 0..cols {
                a.swap([r, j], [best, j]);
            }
        }
        let p = a[[r, c]];
        for j in 0..cols {
            a[[r, j]] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = a[[i, c]];
                if f != 0.0 {
                    for j in 0..cols {
                        a[[i, j]] -= f * a[[r, j]];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: ArrayView2<'_, f64>, tol: f64) -> usize {
    rref(m, tol).1.len()
}

/// Stack row vectors into a matrix. All rows must share a length.
pub fn stack_rows(rows: &[Vec<f64>]) -> Array2<f64> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut out = Array2::zeros((rows.len(), cols));
    for (i, r) in rows.iter().enumerate() {
        for (j, &x) in r.iter().enumerate() {
            out[[i, j]] = x;
        }
    }
    out
}

/// Solve the square system `a x = b`. Returns `None` when `a` is singular
/// under `tol`.
pub fn solve(a: ArrayView2<'_, f64>, b: &Array1<f64>, tol: f64) -> Option<Array1<f64>> {
    let n = a.nrows();
    debug_assert_eq!(a.ncols(), n);
    let mut aug = Array2::zeros((n, n + 1));
    aug.slice_mut(ndarray::s![.., ..n]).assign(&a);
    aug.column_mut(n).assign(b);
    let (red, pivots) = rref(aug.view(), tol);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(red.column(n).to_owned())
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(a: ArrayView2<'_, f64>, tol: f64) -> Option<Array2<f64>> {
    let n = a.nrows();
    let mut aug = Array2::zeros((n, 2 * n));
    aug.slice_mut(ndarray::s![.., ..n]).assign(&a);
    for i in 0..n {
        aug[[i, n + i]] = 1.0;
    }
    let (red, pivots) = rref(aug.view(), tol);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.slice(ndarray::s![.., n..]).to_owned())
}

/// Coordinates of the rows of `x` in the row space of `basis` (rows of the
/// basis linearly independent). Returns the coordinate matrix `t` with
/// `x ≈ t · basis` together with the max-abs residual.
pub fn project_rows(
    x: ArrayView2<'_, f64>,
    basis: ArrayView2<'_, f64>,
    gram_inv: ArrayView2<'_, f64>,
) -> (Array2<f64>, f64) {
    let t = x.dot(&basis.t()).dot(&gram_inv);
    let resid = &x - &t.dot(&basis);
    let max = resid.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (t, max)
}

pub fn max_abs_diff(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Gram matrix `b · bᵀ`.
pub fn gram(b: ArrayView2<'_, f64>) -> Array2<f64> {
    b.dot(&b.t())
}

pub fn row_is_zero(m: ArrayView2<'_, f64>, row: usize, tol: f64) -> bool {
    m.index_axis(Axis(0), row).iter().all(|v| v.abs() <= tol)
}
