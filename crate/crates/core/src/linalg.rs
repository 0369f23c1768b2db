//! Dense float helpers over nalgebra (LU, SVD, pseudo-inverse).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solves `a x = b` by LU with partial pivoting.
pub(crate) fn solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let lu = a.clone().lu();
    let x = lu
        .solve(b)
        .ok_or_else(|| Error::Singular(format!("{}x{} system", a.nrows(), a.ncols())))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("non-finite solution".into()));
    }
    Ok(x)
}

pub(crate) fn inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("{}x{} matrix", a.nrows(), a.ncols())))
}

/// Singular values (descending) and matching right singular vectors as
/// columns.
fn svd_sorted(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = a.shape();
    // pad to square so V is complete
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = order.iter().map(|&k| svd.singular_values[k]).collect();
    let v = DMatrix::from_fn(cols, order.len(), |r, c| v_t[(order[c], r)]);
    (values, v)
}

/// Number of singular values above `rel_tol * sigma_max`.
pub(crate) fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let (values, _) = svd_sorted(a);
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Minimal-norm least-squares solution of `a x = b`.
pub(crate) fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let b = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    Ok(min_norm_solve_many(a, &b)?.column(0).into_owned())
}

/// Column-wise minimal-norm least-squares solutions of `a X = b`.
pub(crate) fn min_norm_solve_many(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = a.clone().svd(true, true);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = top * 1e-12 * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps).map_err(|e| Error::Singular(e.to_string()))
}

/// Minimal-norm solution of an underdetermined `a x = b` with full row rank,
/// from a QR factorization of `aᵀ`: `x = Q R^{-T} b`. Also returns the ratio
/// of extreme diagonal entries of `R`, a lower bound on the condition number
/// (infinite when `R` is numerically singular and the SVD is used instead).
pub(crate) fn min_norm_solve_wide(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    if a.nrows() > a.ncols() || a.nrows() == 0 {
        return Ok((min_norm_solve(a, b)?, f64::INFINITY));
    }
    let qr = a.transpose().qr();
    let r = qr.r();
    let top = r.diagonal().amax();
    let low = r.diagonal().iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    if top == 0.0 || low <= 1e-12 * top * a.nrows() as f64 {
        return Ok((min_norm_solve(a, b)?, f64::INFINITY));
    }
    let y = r
        .transpose()
        .solve_lower_triangular(b)
        .ok_or_else(|| Error::Singular("triangular factor".into()))?;
    Ok((qr.q() * y, top / low))
}

/// `x` minus its orthogonal projection onto the column span of `k`.
pub(crate) fn project_out(k: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    if k.ncols() == 0 {
        return x.clone();
    }
    let q = k.clone().qr().q();
    x - &q * (q.transpose() * x)
}

pub(crate) fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}
