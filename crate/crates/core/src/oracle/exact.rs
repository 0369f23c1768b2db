//! Exact rational linear algebra: fraction-free rank, algebraic
//! multiplicities and ascents at rational points.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::NonnegativeMatrix;

/// Dense rational matrix (row-major).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Self {
        assert_eq!(data.len(), rows * cols);
        RationalMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![BigRational::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&v| BigRational::from_integer(v.into())))
            .collect();
        Self::new(r, c, data)
    }

    /// Exact entries of an exact-backend matrix.
    pub fn from_matrix(m: &NonnegativeMatrix) -> Result<Self> {
        let data = m.exact_values().ok_or(Error::ExactRequired)?;
        Ok(Self::new(m.dim(), m.dim(), data.to_vec()))
    }

    /// Principal block on `indices`.
    pub fn block(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                data.push(self.get(i, j).clone());
            }
        }
        Self::new(k, k, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// `self - λ I` (square only).
    pub fn shift(&self, lambda: &BigRational) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            out.data[i * self.cols + i] -= lambda;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * &x[j])
                    .fold(BigRational::zero(), |acc, v| acc + v)
            })
            .collect()
    }
}

/// Rank by fraction-free (Bareiss) elimination.
///
/// Each row is first scaled to integers by the lcm of its denominators, which
/// leaves the rank unchanged; every later division is exact.
pub fn exact_rank(m: &RationalMatrix) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let lcm = (0..cols).fold(BigInt::one(), |l, j| l.lcm(m.get(i, j).denom()));
            (0..cols)
                .map(|j| {
                    let q = m.get(i, j);
                    q.numer() * (&lcm / q.denom())
                })
                .collect()
        })
        .collect();

    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (head, tail) = a.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = pivot_row[col].clone();
        for row in tail.iter_mut() {
            let factor = row[col].clone();
            for j in col + 1..cols {
                let v = &row[j] * &pivot - &factor * &pivot_row[j];
                debug_assert!((&v % &prev).is_zero(), "Bareiss division not exact");
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Ranks of `N^k` for `k = 0, 1, ..` until two consecutive ranks agree,
/// where `N = M - λI`. The last entry is the stable rank.
fn power_ranks(m: &RationalMatrix, lambda: &BigRational) -> Vec<usize> {
    let n = m.rows;
    let shifted = m.shift(lambda);
    let mut ranks = vec![n];
    let mut power = RationalMatrix::identity(n);
    loop {
        power = power.mul(&shifted);
        let r = exact_rank(&power);
        let last = *ranks.last().expect("nonempty");
        ranks.push(r);
        if r == last || r == 0 {
            return ranks;
        }
    }
}

/// Algebraic multiplicity `dim ker (M - λI)^n`.
pub fn exact_multiplicity(m: &RationalMatrix, lambda: &BigRational) -> usize {
    assert_eq!(m.rows, m.cols, "multiplicity needs a square matrix");
    if m.rows == 0 {
        return 0;
    }
    let stable = *power_ranks(m, lambda).last().expect("nonempty");
    m.rows - stable
}

/// Least `k` with `rank (M - λI)^k = rank (M - λI)^(k+1)`.
pub fn exact_ascent(m: &RationalMatrix, lambda: &BigRational) -> usize {
    let ranks = power_ranks(m, lambda);
    ranks
        .windows(2)
        .position(|w| w[0] == w[1])
        .unwrap_or(ranks.len() - 1)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions).
pub fn rational_approximation(x: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let ai = a as u128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > max_den as u128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let q = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if neg { -q } else { q })
}
