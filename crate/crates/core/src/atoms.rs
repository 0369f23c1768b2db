//! Atoms (strongly connected components of the support graph) and the order
//! on atoms: `B ⪯ A` iff `B ⊆ F(A)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::IndexSet;
use crate::oracle::{self, ENUMERATION_LIMIT};
use crate::sets::SupportGraph;

/// Partition of the index set into atoms, listed in topological order
/// (upstream atoms first, ties broken by smallest member).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomPartition {
    n: usize,
    atoms: Vec<IndexSet>,
    atom_of: Vec<usize>,
}

impl AtomPartition {
    pub fn atoms(&self) -> &[IndexSet] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, a: usize) -> &IndexSet {
        &self.atoms[a]
    }

    pub fn atom_of(&self, node: usize) -> usize {
        self.atom_of[node]
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Union of atoms in `ids`.
    pub fn union_of<I: IntoIterator<Item = usize>>(&self, ids: I) -> IndexSet {
        let mut out = IndexSet::empty(self.n);
        for a in ids {
            out.union_with(&self.atoms[a]);
        }
        out
    }

    /// Atoms contained in `set`.
    pub fn atoms_in(&self, set: &IndexSet) -> Vec<usize> {
        (0..self.atoms.len())
            .filter(|&a| self.atoms[a].is_subset(set))
            .collect()
    }

    /// Admissible sets are exactly the unions of atoms.
    pub fn is_admissible(&self, set: &IndexSet) -> bool {
        set.iter().all(|i| self.atoms[self.atom_of[i]].is_subset(set))
    }

    /// Sorted member lists, in atom order.
    pub fn member_lists(&self) -> Vec<Vec<usize>> {
        self.atoms.iter().map(IndexSet::to_vec).collect()
    }
}

/// Strongly connected components by iterative Tarjan, in the order Tarjan
/// emits them (reverse topological).
pub fn tarjan_scc(g: &SupportGraph) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = g.dim();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    // (node, next successor position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succ = g.successors(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}

/// Atoms of the operator whose support graph is `g`.
pub fn atoms(g: &SupportGraph) -> AtomPartition {
    let n = g.dim();
    let comps = tarjan_scc(g);
    let k = comps.len();
    let mut comp_of = vec![0; n];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = c;
        }
    }
    // Kahn on the condensation, smallest member first among ready atoms.
    let mut indeg = vec![0usize; k];
    let mut dag: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (j, i) in g.edges() {
        let (a, b) = (comp_of[j], comp_of[i]);
        if a != b {
            dag[a].push(b);
        }
    }
    for list in dag.iter_mut() {
        list.sort_unstable();
        list.dedup();
        for &b in list.iter() {
            indeg[b] += 1;
        }
    }
    let mut ready = std::collections::BinaryHeap::new();
    for c in 0..k {
        if indeg[c] == 0 {
            ready.push(std::cmp::Reverse((comps[c][0], c)));
        }
    }
    let mut order = Vec::with_capacity(k);
    while let Some(std::cmp::Reverse((_, c))) = ready.pop() {
        order.push(c);
        for &b in &dag[c] {
            indeg[b] -= 1;
            if indeg[b] == 0 {
                ready.push(std::cmp::Reverse((comps[b][0], b)));
            }
        }
    }
    debug_assert_eq!(order.len(), k);

    let mut atom_of = vec![0; n];
    let atoms = order
        .iter()
        .enumerate()
        .map(|(a, &c)| {
            for &v in &comps[c] {
                atom_of[v] = a;
            }
            IndexSet::from_indices(n, comps[c].iter().copied())
        })
        .collect();
    AtomPartition { n, atoms, atom_of }
}

/// The order `⪯` on atoms with its cover relation.
///
/// Atom ids follow the partition's topological order, so `B ≺ A` implies
/// `A < B` as integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomPoset {
    partition: AtomPartition,
    succ: Vec<Vec<usize>>,
    /// `down[a]`: atoms `b` with `b ⪯ a` (over atom ids).
    down: Vec<IndexSet>,
    covers: Vec<Vec<usize>>,
}

impl AtomPoset {
    pub fn new(g: &SupportGraph, partition: AtomPartition) -> Self {
        let k = partition.len();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (j, i) in g.edges() {
            let (a, b) = (partition.atom_of(j), partition.atom_of(i));
            if a != b {
                succ[a].push(b);
            }
        }
        for list in succ.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        let mut down = vec![IndexSet::empty(k); k];
        for a in (0..k).rev() {
            let mut d = IndexSet::singleton(k, a);
            for &b in &succ[a] {
                debug_assert!(b > a, "atom order is not topological");
                d.union_with(&down[b]);
            }
            down[a] = d;
        }
        // Transitive reduction: b is covered by a unless reachable through
        // another direct successor.
        let covers = (0..k)
            .map(|a| {
                let mut via = IndexSet::empty(k);
                for &c in &succ[a] {
                    let mut strict = down[c].clone();
                    strict.remove(c);
                    via.union_with(&strict);
                }
                succ[a].iter().copied().filter(|&b| !via.contains(b)).collect()
            })
            .collect();
        AtomPoset {
            partition,
            succ,
            down,
            covers,
        }
    }

    pub fn partition(&self) -> &AtomPartition {
        &self.partition
    }

    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }

    /// `b ⪯ a`.
    pub fn leq(&self, b: usize, a: usize) -> bool {
        self.down[a].contains(b)
    }

    /// `b ≺ a`.
    pub fn lt(&self, b: usize, a: usize) -> bool {
        a != b && self.leq(b, a)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Atoms `⪯ a`, as atom ids.
    pub fn down_set(&self, a: usize) -> &IndexSet {
        &self.down[a]
    }

    /// Atoms strictly below `a`.
    pub fn strictly_below(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.down[a].iter().filter(move |&b| b != a)
    }

    /// Atoms strictly above `a`.
    pub fn strictly_above(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&c| self.lt(a, c))
    }

    /// Direct condensation successors (not reduced).
    pub fn successors(&self, a: usize) -> &[usize] {
        &self.succ[a]
    }

    /// Atoms covered by `a`.
    pub fn covers(&self, a: usize) -> &[usize] {
        &self.covers[a]
    }

    /// `(upper, lower)` cover pairs, sorted.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|a| self.covers[a].iter().map(move |&b| (a, b)))
            .collect()
    }

    pub fn is_antichain(&self, ids: &[usize]) -> bool {
        ids.iter().enumerate().all(|(k, &a)| {
            ids[k + 1..]
                .iter()
                .all(|&b| a != b && !self.comparable(a, b))
        })
    }

    /// Heights of every atom of `subset` within `subset`: one plus the
    /// longest chain `A = A_0 ≻ A_1 ≻ .. ≻ A_k` inside `subset`.
    pub fn heights(&self, subset: &[usize]) -> Vec<usize> {
        let mut ids: Vec<usize> = subset.to_vec();
        ids.sort_unstable();
        ids.dedup();
        // largest id first = most downstream first
        let mut h = vec![0usize; self.len()];
        for &a in ids.iter().rev() {
            h[a] = 1 + ids
                .iter()
                .filter(|&&b| self.lt(b, a))
                .map(|&b| h[b])
                .max()
                .unwrap_or(0);
        }
        subset.iter().map(|&a| h[a]).collect()
    }

    pub fn height(&self, subset: &[usize], a: usize) -> Result<usize> {
        let pos = subset
            .iter()
            .position(|&x| x == a)
            .ok_or_else(|| Error::Precondition(format!("atom {a} is not in the subset")))?;
        Ok(self.heights(subset)[pos])
    }

    /// Length (number of `≺` steps) of the longest chain inside `subset`.
    pub fn longest_chain(&self, subset: &[usize]) -> usize {
        self.heights(subset).into_iter().max().unwrap_or(1).saturating_sub(1)
    }

    /// Cover pairs `(upper, lower)` of the order restricted to `subset`.
    pub fn restricted_covers(&self, subset: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &a in subset {
            for &b in subset {
                if self.lt(b, a)
                    && !subset
                        .iter()
                        .any(|&c| self.lt(b, c) && self.lt(c, a))
                {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Checks the four equivalent forms of `B ⪯ A` for distinct atoms:
    /// `A ⊆ F(B)`, `A ⊆ F*(B)`, `B ⊆ P(A)`, `B ⊆ P*(A)` (here with the
    /// roles of the order stated as `A ⪯ B`).
    pub fn check_order_characterizations(&self, g: &SupportGraph) -> Result<()> {
        let p = &self.partition;
        for a in 0..self.len() {
            for b in 0..self.len() {
                if a == b {
                    continue;
                }
                let (aa, bb) = (p.atom(a), p.atom(b));
                let forms = [
                    aa.is_subset(&g.future(bb)),
                    aa.is_subset(&g.future_star(bb)),
                    bb.is_subset(&g.past(aa)),
                    bb.is_subset(&g.past_star(aa)),
                    self.leq(a, b),
                ];
                if forms.iter().any(|&f| f != forms[0]) {
                    return Err(Error::invariant(
                        "equivalent definitions of the atom order",
                        format!("atoms {a}, {b}: {forms:?}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The families compared by [`verify_atom_characterizations`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomCharacterizations {
    pub strongly_connected: Vec<IndexSet>,
    pub minimal_admissible: Vec<IndexSet>,
    pub minimal_convex: Vec<IndexSet>,
    pub admissible_irreducible: Vec<IndexSet>,
    pub maximal_irreducible: Vec<IndexSet>,
    pub agree: bool,
}

/// Computes the atoms four ways (plus the defining one) by exhaustive subset
/// enumeration and reports whether the families coincide. `n <= 16`.
pub fn verify_atom_characterizations(g: &SupportGraph) -> Result<AtomCharacterizations> {
    if g.dim() > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            n: g.dim(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let fam = oracle::enumerate_families(g)?;
    let nonempty = |v: &[IndexSet]| -> Vec<IndexSet> {
        v.iter().filter(|s| !s.is_empty()).cloned().collect()
    };
    let sorted = |mut v: Vec<IndexSet>| {
        v.sort();
        v
    };
    let strongly_connected = sorted(atoms(g).atoms().to_vec());
    let minimal_admissible = sorted(oracle::minimal(&nonempty(&fam.admissible)));
    let minimal_convex = sorted(oracle::minimal(&nonempty(&fam.convex)));
    let admissible_irreducible = sorted(
        fam.irreducible
            .iter()
            .filter(|s| fam.admissible.binary_search(s).is_ok())
            .cloned()
            .collect(),
    );
    let maximal_irreducible = sorted(oracle::maximal(&fam.irreducible));
    let agree = [
        &minimal_admissible,
        &minimal_convex,
        &admissible_irreducible,
        &maximal_irreducible,
    ]
    .iter()
    .all(|f| **f == strongly_connected);
    Ok(AtomCharacterizations {
        strongly_connected,
        minimal_admissible,
        minimal_convex,
        admissible_irreducible,
        maximal_irreducible,
        agree,
    })
}
