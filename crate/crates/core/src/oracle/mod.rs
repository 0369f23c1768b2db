//! Independent ground truth: subset enumeration, exact rational ranks and
//! boolean matrix powers.

mod enumerate;
mod exact;

pub use enumerate::{enumerate_families, maximal, minimal, EnumeratedFamilies, ENUMERATION_LIMIT};
pub use exact::{
    exact_ascent, exact_multiplicity, exact_rank, rational_approximation, RationalMatrix,
};

use crate::model::IndexSet;
use crate::sets::SupportGraph;

/// Boolean matrix stored by columns: `cols[j]` is the set of rows `i` with
/// `B[i][j] = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolMatrix {
    cols: Vec<IndexSet>,
}

impl BoolMatrix {
    pub fn from_graph(g: &SupportGraph) -> Self {
        let n = g.dim();
        BoolMatrix {
            cols: (0..n)
                .map(|j| IndexSet::from_indices(n, g.successors(j).iter().copied()))
                .collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        BoolMatrix {
            cols: (0..n).map(|j| IndexSet::singleton(n, j)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    pub fn or(&self, other: &Self) -> Self {
        BoolMatrix {
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.union(b)).collect(),
        }
    }

    /// Boolean product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim();
        BoolMatrix {
            cols: other
                .cols
                .iter()
                .map(|col| {
                    let mut out = IndexSet::empty(n);
                    for k in col.iter() {
                        out.union_with(&self.cols[k]);
                    }
                    out
                })
                .collect(),
        }
    }

    pub fn pow(&self, mut k: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Support of `B · 1_A`.
    pub fn apply(&self, a: &IndexSet) -> IndexSet {
        let mut out = IndexSet::empty(self.dim());
        for j in a.iter() {
            out.union_with(&self.cols[j]);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(IndexSet::is_empty)
    }
}

/// Support of `(I ∨ T)^(n-1) 1_A` over the boolean semiring. Equals the future
/// of `A`.
pub fn boolean_reachability(g: &SupportGraph, a: &IndexSet) -> IndexSet {
    let n = g.dim();
    let step = BoolMatrix::identity(n).or(&BoolMatrix::from_graph(g));
    step.pow(n.saturating_sub(1)).apply(a)
}

/// Least `k <= n` with boolean `T^k = 0`, if the support graph is nilpotent.
pub fn nilpotency_index(g: &SupportGraph) -> Option<usize> {
    let n = g.dim();
    let t = BoolMatrix::from_graph(g);
    let mut power = BoolMatrix::identity(n);
    for k in 1..=n {
        power = power.mul(&t);
        if power.is_zero() {
            return Some(k);
        }
    }
    None
}
