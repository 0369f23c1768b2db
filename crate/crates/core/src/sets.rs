//! Set-level calculus on the support graph: image, future, past, invariance,
//! co-invariance, convexity, irreducibility and restriction.
//!
//! Edge `j -> i` is present iff `T[i][j]` is positive, so the image `T(A)`
//! collects the successors of `A`, the future `F(A)` is forward reachability
//! from `A` (including `A`), and the past `P(A)` is backward reachability.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::{IndexSet, NonnegativeMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportGraph {
    n: usize,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl SupportGraph {
    /// Support graph of `m`. On the float backend entries `<= rel_threshold *
    /// max_entry` are treated as zero; exact entries use literal `!= 0`.
    pub fn from_matrix(m: &NonnegativeMatrix, rel_threshold: f64) -> Self {
        let n = m.dim();
        let cut = m.absolute_threshold(rel_threshold);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if m.is_positive(i, j, cut) {
                    edges.push((j, i));
                }
            }
        }
        Self::from_edges(n, edges)
    }

    /// Builds a graph from `(from, to)` pairs. Duplicates are ignored.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Self {
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (from, to) in edges {
            assert!(from < n && to < n, "edge ({from}, {to}) out of range for n = {n}");
            succ[from].push(to);
            pred[to].push(from);
        }
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        SupportGraph { n, succ, pred }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn successors(&self, j: usize) -> &[usize] {
        &self.succ[j]
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.pred[i]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(j, s)| s.iter().map(move |&i| (j, i)))
    }

    pub fn empty_set(&self) -> IndexSet {
        IndexSet::empty(self.n)
    }

    pub fn full_set(&self) -> IndexSet {
        IndexSet::full(self.n)
    }

    /// Graph of the adjoint operator (all edges reversed).
    pub fn transpose(&self) -> Self {
        SupportGraph {
            n: self.n,
            succ: self.pred.clone(),
            pred: self.succ.clone(),
        }
    }

    /// `T(A) = { i : exists j in A with edge j -> i }`.
    pub fn image(&self, a: &IndexSet) -> IndexSet {
        self.check(a);
        let mut out = self.empty_set();
        for j in a.iter() {
            for &i in &self.succ[j] {
                out.insert(i);
            }
        }
        out
    }

    /// Image under the adjoint: the direct predecessors of `A`.
    pub fn preimage(&self, a: &IndexSet) -> IndexSet {
        self.check(a);
        let mut out = self.empty_set();
        for i in a.iter() {
            for &j in &self.pred[i] {
                out.insert(j);
            }
        }
        out
    }

    fn reach(&self, a: &IndexSet, forward: bool) -> IndexSet {
        self.check(a);
        let mut seen = a.clone();
        let mut queue: VecDeque<usize> = a.iter().collect();
        while let Some(v) = queue.pop_front() {
            let next = if forward { &self.succ[v] } else { &self.pred[v] };
            for &w in next {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Minimal invariant superset of `A`.
    pub fn future(&self, a: &IndexSet) -> IndexSet {
        self.reach(a, true)
    }

    /// Minimal co-invariant superset of `A`.
    pub fn past(&self, a: &IndexSet) -> IndexSet {
        self.reach(a, false)
    }

    /// `F*(A) = F(A) \ A`.
    pub fn future_star(&self, a: &IndexSet) -> IndexSet {
        self.future(a).difference(a)
    }

    /// `P*(A) = P(A) \ A`.
    pub fn past_star(&self, a: &IndexSet) -> IndexSet {
        self.past(a).difference(a)
    }

    pub fn is_invariant(&self, a: &IndexSet) -> bool {
        self.image(a).is_subset(a)
    }

    pub fn is_coinvariant(&self, a: &IndexSet) -> bool {
        self.preimage(a).is_subset(a)
    }

    /// `A = F(A) ∩ P(A)`.
    pub fn is_convex(&self, a: &IndexSet) -> bool {
        &self.future(a).intersection(&self.past(a)) == a
    }

    /// Nonempty and strongly connected as an induced subgraph (singletons
    /// qualify with or without a self-loop).
    pub fn is_irreducible(&self, a: &IndexSet) -> bool {
        self.check(a);
        let Some(root) = a.first() else {
            return false;
        };
        let within = |forward: bool| {
            let mut seen = IndexSet::singleton(self.n, root);
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                let next = if forward { &self.succ[v] } else { &self.pred[v] };
                for &w in next {
                    if a.contains(w) && seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            seen == *a
        };
        within(true) && within(false)
    }

    /// Support graph of `T_{Ω'} = M_{Ω'} T M_{Ω'}`: edges touching the
    /// complement of `omega` are dropped. The dimension is unchanged.
    pub fn restrict(&self, omega: &IndexSet) -> Result<Self> {
        self.check(omega);
        if omega.is_empty() {
            return Err(Error::Precondition("restriction to an empty set".into()));
        }
        Ok(Self::from_edges(
            self.n,
            self.edges()
                .filter(|&(j, i)| omega.contains(j) && omega.contains(i)),
        ))
    }

    /// Support graph of `T^k` (walks of length exactly `k`); `k >= 1`.
    pub fn power(&self, k: usize) -> Self {
        assert!(k >= 1, "power must be at least 1");
        let mut edges = Vec::new();
        for j in 0..self.n {
            let mut layer = IndexSet::singleton(self.n, j);
            for _ in 0..k {
                layer = self.image(&layer);
                if layer.is_empty() {
                    break;
                }
            }
            edges.extend(layer.iter().map(|i| (j, i)));
        }
        Self::from_edges(self.n, edges)
    }

    /// `image` applied `k` times (`k = 0` is the identity).
    pub fn image_pow(&self, a: &IndexSet, k: usize) -> IndexSet {
        (0..k).fold(a.clone(), |acc, _| self.image(&acc))
    }

    fn check(&self, a: &IndexSet) {
        assert_eq!(
            a.universe(),
            self.n,
            "index set universe {} does not match graph dimension {}",
            a.universe(),
            self.n
        );
    }
}
