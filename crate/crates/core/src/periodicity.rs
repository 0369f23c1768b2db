//! Cyclic splitting of atoms under matrix powers, at the support level.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::atoms::{atoms, AtomPartition};
use crate::error::{Error, Result};
use crate::model::IndexSet;
use crate::sets::SupportGraph;

/// BFS levels from the smallest member of `atom`, following edges inside it.
fn levels(g: &SupportGraph, atom: &IndexSet) -> Result<Vec<Option<usize>>> {
    let start = atom
        .first()
        .ok_or_else(|| Error::Precondition("empty atom".into()))?;
    let mut level = vec![None; g.dim()];
    level[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let next = level[u].expect("queued") + 1;
        for &v in g.successors(u) {
            if atom.contains(v) && level[v].is_none() {
                level[v] = Some(next);
                queue.push_back(v);
            }
        }
    }
    if atom.iter().any(|i| level[i].is_none()) {
        return Err(Error::Precondition(format!("{atom} is not strongly connected")));
    }
    Ok(level)
}

/// Gcd of closed-walk lengths inside an atom.
pub fn period(g: &SupportGraph, atom: &IndexSet) -> Result<usize> {
    let level = levels(g, atom)?;
    let mut p = 0usize;
    for u in atom.iter() {
        let lu = level[u].expect("reached") as i64;
        for &v in g.successors(u) {
            if atom.contains(v) {
                let lv = level[v].expect("reached") as i64;
                p = p.gcd(&((lu + 1 - lv).unsigned_abs() as usize));
            }
        }
    }
    if p == 0 {
        return Err(Error::Precondition(format!("atom {atom} has no internal edge")));
    }
    Ok(p)
}

/// The `d = gcd(period, n)` atoms of `T^n` inside a `T`-atom `B`, listed as
/// `A_k = T^k(A_0) ∩ B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicDecomposition {
    pub base_atom: IndexSet,
    pub power: usize,
    pub period: usize,
    pub d: usize,
    pub classes: Vec<IndexSet>,
}

pub fn cyclic_classes(g: &SupportGraph, atom: &IndexSet, n: usize) -> Result<CyclicDecomposition> {
    if n == 0 {
        return Err(Error::Precondition("power must be at least 1".into()));
    }
    let p = period(g, atom)?;
    let d = p.gcd(&n);
    let level = levels(g, atom)?;
    let a0 = IndexSet::from_indices(
        g.dim(),
        atom.iter().filter(|&i| level[i].expect("reached") % d == 0),
    );
    let mut classes = Vec::with_capacity(d);
    let mut cur = a0;
    for _ in 0..d {
        let next = g.image(&cur).intersection(atom);
        classes.push(cur);
        cur = next;
    }
    let decomposition = CyclicDecomposition {
        base_atom: atom.clone(),
        power: n,
        period: p,
        d,
        classes,
    };
    decomposition.verify(g)?;
    Ok(decomposition)
}

impl CyclicDecomposition {
    /// Partition of the base atom, cyclic action of `T`, `d | n`, and each
    /// class an atom of `T^n`.
    pub fn verify(&self, g: &SupportGraph) -> Result<()> {
        let fail = |detail: String| Err(Error::invariant("cyclic splitting of atoms under powers", detail));
        if self.power % self.d != 0 {
            return fail(format!("d = {} does not divide n = {}", self.d, self.power));
        }
        let mut union = IndexSet::empty(g.dim());
        for (k, c) in self.classes.iter().enumerate() {
            if c.is_empty() || union.intersects(c) {
                return fail(format!("class {k} = {c} is empty or overlaps"));
            }
            union.union_with(c);
            let next = &self.classes[(k + 1) % self.d];
            if g.image(c).intersection(&self.base_atom) != *next {
                return fail(format!("T(A_{k}) ∩ B differs from the next class"));
            }
        }
        if union != self.base_atom {
            return fail(format!("classes cover {union}, atom is {}", self.base_atom));
        }
        let power_atoms = atoms(&g.power(self.power));
        for c in &self.classes {
            if !power_atoms.atoms().contains(c) {
                return fail(format!("class {c} is not an atom of the power"));
            }
        }
        Ok(())
    }
}

/// `n_A`: least `m` with `⋃_{j<m} T^j(A) = Ω`, for irreducible nonzero `T`.
pub fn n_a(g: &SupportGraph, a: &IndexSet) -> Result<usize> {
    if g.edge_count() == 0 || !g.is_irreducible(&g.full_set()) {
        return Err(Error::Precondition("T must be irreducible and nonzero".into()));
    }
    if a.is_empty() {
        return Err(Error::Precondition("A must be nonempty".into()));
    }
    let mut reached = a.clone();
    let mut frontier = a.clone();
    for m in 1..=g.dim() {
        if reached.is_full() {
            return Ok(m);
        }
        frontier = g.image(&frontier);
        reached.union_with(&frontier);
    }
    Err(Error::invariant(
        "orbit of a set under an irreducible operator covers the space",
        format!("{a} reaches only {reached}"),
    ))
}

/// Atoms of the support of `T^n`, each checked to lie inside a `T`-atom.
pub fn power_matrix_atoms(g: &SupportGraph, n: usize) -> Result<AtomPartition> {
    if n == 0 {
        return Err(Error::Precondition("power must be at least 1".into()));
    }
    let base = atoms(g);
    let powered = atoms(&g.power(n));
    for a in powered.atoms() {
        let host = base.atom(base.atom_of(a.first().expect("atoms are nonempty")));
        if !a.is_subset(host) {
            return Err(Error::invariant(
                "atoms of a power refine the atoms",
                format!("{a} is not inside a single atom"),
            ));
        }
    }
    Ok(powered)
}
