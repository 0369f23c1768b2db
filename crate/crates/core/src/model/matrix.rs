use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::IndexSet;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Float,
    ExactRational,
}

/// Dense square matrix with entrywise nonnegative values.
///
/// Entry `(i, j)` is the weight of the edge `j -> i` of the support graph,
/// so `(T x)_i = sum_j T[i][j] x_j` moves mass from `j` to `i`. On the exact
/// backend the rational entries are authoritative and the `f64` values are
/// their nearest floats.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegativeMatrix {
    n: usize,
    values: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl NonnegativeMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_row_major(n, vec![0.0; n * n])
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            values.extend(row);
        }
        Self::from_row_major(n, values)
    }

    pub fn from_row_major(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("matrix dimension must be at least 1".into()));
        }
        if values.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                cols: values.len() / n,
            });
        }
        for (k, &v) in values.iter().enumerate() {
            let (row, col) = (k / n, k % n);
            if !v.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry {
                    row,
                    col,
                    value: v.to_string(),
                });
            }
        }
        // normalize -0.0
        let values = values.into_iter().map(|v| v + 0.0).collect();
        Ok(NonnegativeMatrix {
            n,
            values,
            exact: None,
        })
    }

    pub fn from_rational_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Self::from_rational_row_major(n, data)
    }

    pub fn from_rational_row_major(n: usize, data: Vec<BigRational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("matrix dimension must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                cols: data.len() / n,
            });
        }
        let mut values = Vec::with_capacity(n * n);
        for (k, q) in data.iter().enumerate() {
            if q.is_negative() {
                return Err(Error::NegativeEntry {
                    row: k / n,
                    col: k % n,
                    value: q.to_string(),
                });
            }
            values.push(rational_to_f64(q));
        }
        Ok(NonnegativeMatrix {
            n,
            values,
            exact: Some(data),
        })
    }

    /// Integer entries, exact backend.
    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rational_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn backend(&self) -> Backend {
        if self.exact.is_some() {
            Backend::ExactRational
        } else {
            Backend::Float
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn exact_get(&self, i: usize, j: usize) -> Option<&BigRational> {
        self.exact.as_ref().map(|d| &d[i * self.n + j])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn exact_values(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Whether `(i, j)` is a positive entry: literal nonzero on the exact
    /// backend, `> threshold` on floats.
    pub fn is_positive(&self, i: usize, j: usize, threshold: f64) -> bool {
        match &self.exact {
            Some(d) => !d[i * self.n + j].is_zero(),
            None => self.get(i, j) > threshold,
        }
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Absolute threshold for a relative support threshold (`rel * max_entry`).
    pub fn absolute_threshold(&self, rel: f64) -> f64 {
        rel * self.max_entry()
    }

    /// Zeroes float entries at or below `rel * max_entry`. Exact matrices are
    /// returned unchanged.
    pub fn with_support_threshold(&self, rel: f64) -> Self {
        if self.is_exact() {
            return self.clone();
        }
        let cut = self.absolute_threshold(rel);
        let values = self
            .values
            .iter()
            .map(|&v| if v > cut { v } else { 0.0 })
            .collect();
        NonnegativeMatrix {
            n: self.n,
            values,
            exact: None,
        }
    }

    /// Exact backend view of a float matrix: every `f64` is converted exactly.
    pub fn to_exact(&self) -> Self {
        if self.is_exact() {
            return self.clone();
        }
        let data = self
            .values
            .iter()
            .map(|&v| BigRational::from_float(v).expect("entries are finite"))
            .collect();
        Self::from_rational_row_major(self.n, data).expect("already validated")
    }

    pub fn to_float(&self) -> Self {
        NonnegativeMatrix {
            n: self.n,
            values: self.values.clone(),
            exact: None,
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let values = (0..n * n).map(|k| self.values[(k % n) * n + k / n]).collect();
        let exact = self
            .exact
            .as_ref()
            .map(|d| (0..n * n).map(|k| d[(k % n) * n + k / n].clone()).collect());
        NonnegativeMatrix { n, values, exact }
    }

    /// `T_A = M_A T M_A`: rows and columns outside `set` are zeroed.
    pub fn restrict(&self, set: &IndexSet) -> Self {
        let n = self.n;
        let keep = |k: usize| set.contains(k / n) && set.contains(k % n);
        let values = (0..n * n)
            .map(|k| if keep(k) { self.values[k] } else { 0.0 })
            .collect();
        let exact = self.exact.as_ref().map(|d| {
            (0..n * n)
                .map(|k| if keep(k) { d[k].clone() } else { BigRational::zero() })
                .collect()
        });
        NonnegativeMatrix { n, values, exact }
    }

    /// Matrix product; exact when both factors are exact.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        assert_eq!(n, other.n);
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            let mut out = vec![BigRational::zero(); n * n];
            for i in 0..n {
                for k in 0..n {
                    let aik = &a[i * n + k];
                    if aik.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let bkj = &b[k * n + j];
                        if !bkj.is_zero() {
                            out[i * n + j] += aik * bkj;
                        }
                    }
                }
            }
            return Self::from_rational_row_major(n, out).expect("product of nonnegative");
        }
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.values[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += aik * other.values[k * n + j];
                }
            }
        }
        NonnegativeMatrix {
            n,
            values: out,
            exact: None,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(k >= 1, "power must be at least 1");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.values)
    }

    /// Dense float block on the given (sorted) indices.
    pub fn block(&self, indices: &[usize]) -> DMatrix<f64> {
        let m = indices.len();
        DMatrix::from_fn(m, m, |r, c| self.get(indices[r], indices[c]))
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Operator inf-norm (max row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // to_f64 can fail on huge numerators/denominators; fall back to a
        // scaled division.
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(900);
        let num = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let den = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        num / den
    })
}

#[cfg(test)]
pub(crate) fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(num_bigint::BigInt::from(num), num_bigint::BigInt::from(den))
}
