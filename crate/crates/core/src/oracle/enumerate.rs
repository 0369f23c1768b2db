//! Exhaustive classification of all `2^n` subsets from the definitions.
//!
//! Only the one-step image is shared with the rest of the crate (as bit
//! masks); futures and pasts are fixpoints of the image map, irreducibility
//! is checked against every proper subset, and admissibility comes from the
//! σ-field generated by the enumerated invariant sets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::IndexSet;
use crate::sets::SupportGraph;

pub const ENUMERATION_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumeratedFamilies {
    pub n: usize,
    pub invariant: Vec<IndexSet>,
    pub coinvariant: Vec<IndexSet>,
    pub convex: Vec<IndexSet>,
    pub admissible: Vec<IndexSet>,
    pub irreducible: Vec<IndexSet>,
}

pub(crate) struct MaskGraph {
    n: usize,
    succ: Vec<u32>,
    pred: Vec<u32>,
}

impl MaskGraph {
    pub(crate) fn new(g: &SupportGraph) -> Result<Self> {
        let n = g.dim();
        if n > ENUMERATION_LIMIT {
            return Err(Error::TooLarge {
                n,
                limit: ENUMERATION_LIMIT,
            });
        }
        let mut succ = vec![0u32; n];
        let mut pred = vec![0u32; n];
        for (j, i) in g.edges() {
            succ[j] |= 1 << i;
            pred[i] |= 1 << j;
        }
        Ok(MaskGraph { n, succ, pred })
    }

    fn spread(table: &[u32], mut mask: u32) -> u32 {
        let mut out = 0;
        while mask != 0 {
            let j = mask.trailing_zeros() as usize;
            out |= table[j];
            mask &= mask - 1;
        }
        out
    }

    pub(crate) fn image(&self, mask: u32) -> u32 {
        Self::spread(&self.succ, mask)
    }

    pub(crate) fn preimage(&self, mask: u32) -> u32 {
        Self::spread(&self.pred, mask)
    }

    /// Smallest fixpoint of `X -> X ∪ T(X)` above `mask`.
    pub(crate) fn future(&self, mask: u32) -> u32 {
        let mut cur = mask;
        loop {
            let next = cur | self.image(cur);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    pub(crate) fn past(&self, mask: u32) -> u32 {
        let mut cur = mask;
        loop {
            let next = cur | self.preimage(cur);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Only `∅` and `A` are invariant for `T_A`, and `A ≠ ∅`.
    pub(crate) fn irreducible(&self, a: u32) -> bool {
        if a == 0 {
            return false;
        }
        // proper nonempty submasks
        let mut b = (a - 1) & a;
        while b != 0 {
            if self.image(b) & a & !b == 0 {
                return false;
            }
            b = (b - 1) & a;
        }
        true
    }

    fn universe(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }
}

fn to_set(n: usize, mask: u32) -> IndexSet {
    IndexSet::from_mask(n, mask as u64)
}

/// Classifies every subset. Families are returned sorted.
pub fn enumerate_families(g: &SupportGraph) -> Result<EnumeratedFamilies> {
    let mg = MaskGraph::new(g)?;
    let n = mg.n;
    let full = mg.universe();
    let mut invariant = Vec::new();
    let mut coinvariant = Vec::new();
    let mut convex = Vec::new();
    let mut irreducible = Vec::new();
    for a in 0..=full {
        if mg.image(a) & !a == 0 {
            invariant.push(a);
        }
        if mg.preimage(a) & !a == 0 {
            coinvariant.push(a);
        }
        if mg.future(a) & mg.past(a) == a {
            convex.push(a);
        }
        if mg.irreducible(a) {
            irreducible.push(a);
        }
        if a == full {
            break;
        }
    }

    // Atoms of the σ-field generated by the invariant sets: points with the
    // same membership pattern across all invariant sets.
    let mut signature: Vec<Vec<u64>> = vec![vec![0; invariant.len().div_ceil(64)]; n];
    for (k, &inv) in invariant.iter().enumerate() {
        for (x, sig) in signature.iter_mut().enumerate() {
            if inv >> x & 1 == 1 {
                sig[k / 64] |= 1 << (k % 64);
            }
        }
    }
    let mut classes: Vec<u32> = Vec::new();
    let mut assigned = 0u32;
    for x in 0..n {
        if assigned >> x & 1 == 1 {
            continue;
        }
        let class = (x..n)
            .filter(|&y| signature[y] == signature[x])
            .fold(0u32, |m, y| m | 1 << y);
        assigned |= class;
        classes.push(class);
    }
    let admissible: Vec<u32> = (0u32..(1u32 << classes.len()))
        .map(|pick| {
            classes
                .iter()
                .enumerate()
                .filter(|(k, _)| pick >> k & 1 == 1)
                .fold(0u32, |m, (_, &c)| m | c)
        })
        .collect();

    let finish = |v: Vec<u32>| {
        let mut out: Vec<IndexSet> = v.into_iter().map(|m| to_set(n, m)).collect();
        out.sort();
        out
    };
    Ok(EnumeratedFamilies {
        n,
        invariant: finish(invariant),
        coinvariant: finish(coinvariant),
        convex: finish(convex),
        admissible: finish(admissible),
        irreducible: finish(irreducible),
    })
}

fn membership(family: &[IndexSet]) -> Option<(usize, Vec<bool>)> {
    let n = family.first()?.universe();
    if n > ENUMERATION_LIMIT {
        return None;
    }
    let mut member = vec![false; 1 << n];
    for a in family {
        member[a.to_mask() as usize] = true;
    }
    Some((n, member))
}

/// Members of `family` with no other member strictly inside them.
pub fn minimal(family: &[IndexSet]) -> Vec<IndexSet> {
    let Some((_, member)) = membership(family) else {
        return family
            .iter()
            .filter(|a| !family.iter().any(|b| b != *a && b.is_subset(a)))
            .cloned()
            .collect();
    };
    family
        .iter()
        .filter(|a| {
            let a = a.to_mask() as usize;
            if a == 0 {
                return true;
            }
            let mut b = (a - 1) & a;
            loop {
                if member[b] {
                    return false;
                }
                if b == 0 {
                    return true;
                }
                b = (b - 1) & a;
            }
        })
        .cloned()
        .collect()
}

/// Members of `family` strictly inside no other member.
pub fn maximal(family: &[IndexSet]) -> Vec<IndexSet> {
    let Some((n, member)) = membership(family) else {
        return family
            .iter()
            .filter(|a| !family.iter().any(|b| b != *a && a.is_subset(b)))
            .cloned()
            .collect();
    };
    let full = (1usize << n) - 1;
    family
        .iter()
        .filter(|a| {
            let a = a.to_mask() as usize;
            let rest = full & !a;
            let mut s = rest;
            while s != 0 {
                if member[a | s] {
                    return false;
                }
                s = (s - 1) & rest;
            }
            true
        })
        .cloned()
        .collect()
}
