//! Seeded instance generators and independent reference computations shared
//! by the integration targets.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nonneg_atoms::oracle::{boolean_reachability, BoolMatrix};
use nonneg_atoms::{IndexSet, NonnegativeMatrix, SupportGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Random support pattern with weights in `[0.5, 2)`.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, density: f64) -> NonnegativeMatrix {
    let values = (0..n * n)
        .map(|_| if rng.gen_bool(density) { rng.gen_range(0.5..2.0) } else { 0.0 })
        .collect();
    NonnegativeMatrix::from_row_major(n, values).unwrap()
}

/// Random matrix with a random size and density, biased towards several
/// atoms.
pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize) -> NonnegativeMatrix {
    let n = rng.gen_range(1..=max_n);
    let density = rng.gen_range(0.05..0.45);
    random_matrix(rng, n, density)
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> IndexSet {
    let p = rng.gen_range(0.1..0.7);
    IndexSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(p)))
}

/// Block lower-triangular rational matrix with planted block radii.
///
/// Each block of size at least two is irreducible with constant row sums
/// equal to its rate; singletons carry a self-loop of that rate, or none
/// when the rate is zero. Blocks are listed upstream first and node labels
/// are shuffled.
#[derive(Clone, Debug)]
pub struct Planted {
    pub matrix: NonnegativeMatrix,
    pub blocks: Vec<Vec<usize>>,
    pub rates: Vec<BigRational>,
}

impl Planted {
    pub fn distinct_rates(&self) -> Vec<BigRational> {
        let mut r: Vec<BigRational> = self.rates.iter().filter(|r| !r.is_zero()).cloned().collect();
        r.sort();
        r.dedup();
        r
    }

    pub fn max_rate(&self) -> BigRational {
        self.rates.iter().cloned().max().unwrap_or_else(BigRational::zero)
    }

    pub fn block_set(&self, b: usize) -> IndexSet {
        IndexSet::from_indices(self.matrix.dim(), self.blocks[b].iter().copied())
    }
}

pub fn planted(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    cross_density: f64,
    mut rate: impl FnMut(&mut ChaCha8Rng, usize) -> BigRational,
) -> Planted {
    let n = rng.gen_range(1..=max_n);
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < n {
        let size = rng.gen_range(1..=3).min(n - start);
        blocks.push(labels[start..start + size].to_vec());
        start += size;
    }
    let rates: Vec<BigRational> = blocks.iter().map(|b| rate(rng, b.len())).collect();
    let mut t = vec![BigRational::zero(); n * n];
    for (block, r) in blocks.iter().zip(&rates) {
        let k = block.len();
        if k == 1 {
            t[block[0] * n + block[0]] = r.clone();
            continue;
        }
        let mut weights = vec![vec![0i64; k]; k];
        for (c, row) in weights.iter_mut().enumerate() {
            // cycle c-1 -> c keeps the block strongly connected
            row[(c + k - 1) % k] = rng.gen_range(1..=4);
            for w in row.iter_mut() {
                if *w == 0 && rng.gen_bool(0.3) {
                    *w = rng.gen_range(1..=4);
                }
            }
        }
        for (c, row) in weights.iter().enumerate() {
            let sum: i64 = row.iter().sum();
            for (d, &w) in row.iter().enumerate() {
                if w > 0 {
                    t[block[c] * n + block[d]] = r * q(w, sum);
                }
            }
        }
    }
    for b in 0..blocks.len() {
        for c in b + 1..blocks.len() {
            for &j in &blocks[b] {
                for &i in &blocks[c] {
                    if rng.gen_bool(cross_density) {
                        t[i * n + j] = q(rng.gen_range(1..=3), 1);
                    }
                }
            }
        }
    }
    let matrix = NonnegativeMatrix::from_rational_row_major(n, t).unwrap();
    Planted { matrix, blocks, rates }
}

/// Radii drawn from a small palette so that ties across blocks are common.
pub fn schwartz_instance(rng: &mut ChaCha8Rng) -> Planted {
    let palette = [q(0, 1), q(1, 1), q(2, 1), q(1, 2), q(3, 2), q(3, 1)];
    planted(rng, 10, 0.35, |rng, size| {
        let r = palette.choose(rng).unwrap().clone();
        if size > 1 && r.is_zero() {
            q(1, 1)
        } else {
            r
        }
    })
}

/// Critical chains: about half of the blocks sit at the top radius and the
/// rest are separated from it by a factor of at least two.
pub fn critical_instance(rng: &mut ChaCha8Rng) -> Planted {
    let rho = [q(1, 1), q(2, 1), q(3, 2)].choose(rng).unwrap().clone();
    let mut p = planted(rng, 12, 0.45, |rng, size| match rng.gen_range(0..6) {
        0..=2 => rho.clone(),
        3 => &rho * q(1, 2),
        4 => &rho * q(1, 3),
        _ if size == 1 => q(0, 1),
        _ => &rho * q(1, 4),
    });
    if !p.rates.iter().any(|r| *r == rho) {
        // force one critical block by rescaling the first one
        let b = &p.blocks[0];
        let n = p.matrix.dim();
        let mut t: Vec<BigRational> = p.matrix.exact_values().unwrap().to_vec();
        if p.rates[0].is_zero() {
            t[b[0] * n + b[0]] = rho.clone();
        } else {
            let scale = &rho / &p.rates[0];
            for &i in b {
                for &j in b {
                    t[i * n + j] = &t[i * n + j] * &scale;
                }
            }
        }
        p.rates[0] = rho.clone();
        p.matrix = NonnegativeMatrix::from_rational_row_major(n, t).unwrap();
    }
    p
}

/// Converts an `f64` to the rational with the same value.
pub fn exact_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

pub fn one() -> BigRational {
    BigRational::one()
}

/// `F(A)` as the support of `(I + T)^{n-1} 𝟙_A`, with boolean arithmetic.
pub fn reach(g: &SupportGraph, a: &IndexSet) -> IndexSet {
    boolean_reachability(g, a)
}

pub fn reach_back(g: &SupportGraph, a: &IndexSet) -> IndexSet {
    boolean_reachability(&g.transpose(), a)
}

/// Strongly connected classes from mutual boolean reachability.
pub fn reference_atoms(g: &SupportGraph) -> Vec<IndexSet> {
    let n = g.dim();
    let mut out: Vec<IndexSet> = Vec::new();
    let mut seen = IndexSet::empty(n);
    for i in 0..n {
        if seen.contains(i) {
            continue;
        }
        let s = IndexSet::singleton(n, i);
        let class = reach(g, &s).intersection(&reach_back(g, &s));
        seen.union_with(&class);
        out.push(class);
    }
    out.sort();
    out
}

/// A strongly connected class carries a cycle.
pub fn has_cycle(g: &SupportGraph, class: &IndexSet) -> bool {
    class.len() > 1 || class.iter().any(|i| g.has_edge(i, i))
}

/// Boolean `n`-th power of the support as a graph.
pub fn bool_power(g: &SupportGraph, k: usize) -> SupportGraph {
    let n = g.dim();
    let p = BoolMatrix::from_graph(g).pow(k);
    let mut edges = Vec::new();
    for j in 0..n {
        for i in p.apply(&IndexSet::singleton(n, j)).iter() {
            edges.push((j, i));
        }
    }
    SupportGraph::from_edges(n, edges)
}

/// Heights inside `subset` (a list of classes) under `B ⪯ A iff B ⊆ F(A)`.
pub fn chain_heights(g: &SupportGraph, classes: &[IndexSet]) -> Vec<usize> {
    let k = classes.len();
    let below: Vec<Vec<bool>> = (0..k)
        .map(|a| {
            let f = reach(g, &classes[a]);
            (0..k).map(|b| b != a && classes[b].is_subset(&f)).collect()
        })
        .collect();
    let mut h = vec![0usize; k];
    // longest chains by repeated relaxation; k is small
    for _ in 0..k {
        for a in 0..k {
            let best = (0..k).filter(|&b| below[a][b]).map(|b| h[b]).max().unwrap_or(0);
            h[a] = best + 1;
        }
    }
    h
}
