//! Spectral radii, Perron vectors, distinguished atoms and the cone of
//! nonnegative eigenvectors.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::atoms::tarjan_scc;
use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{IndexSet, NonnegativeMatrix};
use crate::operator::Operator;
use crate::oracle::{exact_multiplicity, rational_approximation, RationalMatrix};
use crate::sets::SupportGraph;

/// Numeric tolerances. `atol` is relative to `ρ(T)` and `pos_tol` to the
/// sup-norm of the vector being tested.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub pos_tol: f64,
    pub max_iters: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-10,
            atol: 1e-9,
            pos_tol: 1e-12,
            max_iters: 100_000,
        }
    }
}

/// Outcome of comparing two radii under the tie policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusOrder {
    Less,
    Tie,
    Greater,
}

impl Tolerances {
    /// Absolute tie tolerance for a matrix with spectral radius `rho_t`.
    pub fn abs_atol(&self, rho_t: f64) -> f64 {
        self.atol * rho_t
    }

    pub fn compare(&self, a: f64, b: f64, rho_t: f64) -> RadiusOrder {
        let d = a - b;
        if d.abs() <= self.abs_atol(rho_t) {
            RadiusOrder::Tie
        } else if d < 0.0 {
            RadiusOrder::Less
        } else {
            RadiusOrder::Greater
        }
    }

    /// Differences in `(atol/10, 10·atol]` are decided but fragile.
    pub fn is_borderline(&self, a: f64, b: f64, rho_t: f64) -> bool {
        let atol = self.abs_atol(rho_t);
        let d = (a - b).abs();
        atol > 0.0 && d > atol / 10.0 && d <= 10.0 * atol
    }
}

fn collatz_bracket(a: &DMatrix<f64>, x: &DVector<f64>) -> (f64, f64) {
    let y = a * x;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (yi, xi) in y.iter().zip(x.iter()) {
        let r = yi / xi;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    (lo, hi)
}

fn normalize_l1(x: &mut DVector<f64>) {
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        *x /= s;
    }
}

/// Spectral radius and positive Perron vector (`‖v‖₁ = 1`) of an irreducible
/// nonzero block.
///
/// The radius is bracketed by the Collatz–Wielandt bounds `min (Ax)_i/x_i ≤
/// ρ ≤ max (Ax)_i/x_i`. Power steps on `A + I` start the vector, a positive
/// inverse iteration with the upper bound as shift (which keeps iterates
/// positive) closes the bracket, and plain shifted power iteration is the
/// fallback.
pub(crate) fn irreducible_block_perron(
    block: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<(f64, DVector<f64>)> {
    let m = block.nrows();
    if m == 1 {
        return Ok((block[(0, 0)], DVector::from_element(1, 1.0)));
    }
    let shifted = block + DMatrix::<f64>::identity(m, m);
    let mut x = DVector::from_element(m, 1.0 / m as f64);
    let mut iters = 0;

    let step_power = |x: &mut DVector<f64>| {
        let mut y = &shifted * &*x;
        normalize_l1(&mut y);
        *x = y;
    };

    for _ in 0..200.min(tol.max_iters) {
        step_power(&mut x);
        iters += 1;
        let (lo, hi) = collatz_bracket(block, &x);
        if hi - lo <= 1e-3 * hi {
            break;
        }
    }

    let mut best = x.clone();
    let (lo, hi) = collatz_bracket(block, &best);
    let mut best_gap = hi - lo;
    let floor = 8.0 * f64::EPSILON * hi * m as f64;
    for _ in 0..64 {
        let (lo, hi) = collatz_bracket(block, &x);
        let gap = hi - lo;
        if gap.is_finite() && gap < best_gap {
            best_gap = gap;
            best = x.clone();
        }
        if gap <= floor {
            break;
        }
        let system = DMatrix::<f64>::identity(m, m) * hi - block;
        let Ok(y) = linalg::solve(&system, &x) else { break };
        let mut y = y.map(f64::abs);
        if y.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            break;
        }
        normalize_l1(&mut y);
        x = y;
        iters += 1;
    }

    let (mut lo, mut hi) = collatz_bracket(block, &best);
    x = best;
    while !(hi - lo <= tol.rtol * hi) && iters < tol.max_iters {
        step_power(&mut x);
        iters += 1;
        (lo, hi) = collatz_bracket(block, &x);
    }
    let gap = hi - lo;
    if !(gap <= tol.rtol * hi) {
        return Err(Error::NonConvergence {
            iters,
            estimate: 0.5 * (lo + hi),
            gap,
        });
    }
    normalize_l1(&mut x);
    Ok((0.5 * (lo + hi), x))
}

fn has_internal_edge(g: &SupportGraph, members: &[usize]) -> bool {
    members.len() > 1 || g.has_edge(members[0], members[0])
}

/// `ρ(T_Ω')`: the largest radius over the strongly connected pieces of the
/// restriction, computed from scratch. Zero when the restriction has no
/// cycle.
pub fn radius_of_set(
    matrix: &NonnegativeMatrix,
    graph: &SupportGraph,
    set: &IndexSet,
    tol: &Tolerances,
) -> Result<f64> {
    if set.is_empty() {
        return Ok(0.0);
    }
    let restricted = graph.restrict(set)?;
    let mut rho = 0.0f64;
    for comp in tarjan_scc(&restricted) {
        if !set.contains(comp[0]) || !has_internal_edge(&restricted, &comp) {
            continue;
        }
        let mut comp = comp;
        comp.sort_unstable();
        let (r, _) = irreducible_block_perron(&matrix.block(&comp), tol)?;
        rho = rho.max(r);
    }
    Ok(rho)
}

/// `ρ(T)` of a whole matrix.
pub fn spectral_radius(matrix: &NonnegativeMatrix, tol: &Tolerances) -> Result<f64> {
    let graph = SupportGraph::from_matrix(matrix, 0.0);
    radius_of_set(matrix, &graph, &graph.full_set(), tol)
}

/// Perron vector of the block `T_A` of an atom, embedded in the full space.
fn embedded_perron(
    matrix: &NonnegativeMatrix,
    atom: &IndexSet,
    tol: &Tolerances,
) -> Result<(f64, Vec<f64>)> {
    let members = atom.to_vec();
    let (rho, v) = irreducible_block_perron(&matrix.block(&members), tol)?;
    let mut full = vec![0.0; matrix.dim()];
    for (k, &i) in members.iter().enumerate() {
        full[i] = v[k];
    }
    Ok((rho, full))
}

/// Spectral data of one atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomSpectrum {
    pub rho: f64,
    pub nonzero: bool,
    /// Right Perron vector `v_A` (zero off `A`, `‖v_A‖₁ = 1`).
    pub perron: Option<Vec<f64>>,
    /// Perron vector of the transposed block.
    pub left_perron: Option<Vec<f64>>,
    pub distinguished: bool,
    /// Distinguished for the adjoint: every atom strictly above has smaller
    /// radius.
    pub left_distinguished: bool,
    pub critical: bool,
    pub borderline: bool,
}

/// A distinguished eigenvalue with its antichain of atoms and the
/// nonnegative eigenvectors `w_A` spanning the cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishedEigenvalue {
    pub lambda: f64,
    pub atoms: Vec<usize>,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub rho_t: f64,
    pub tolerances: Tolerances,
    pub atoms: Vec<AtomSpectrum>,
    /// Sorted by decreasing eigenvalue.
    pub distinguished: Vec<DistinguishedEigenvalue>,
    /// Some radius comparison fell in the borderline band.
    pub ambiguous: bool,
}

impl SpectralProfile {
    pub fn compute(op: &Operator, tol: &Tolerances) -> Result<Self> {
        let matrix = op.matrix();
        let graph = op.graph();
        let poset = op.poset();
        let count = op.atom_count();
        let transposed = matrix.transpose();

        let mut atoms = Vec::with_capacity(count);
        for a in 0..count {
            let set = op.atom(a);
            let nonzero = has_internal_edge(graph, &set.to_vec());
            if nonzero {
                let (rho, v) = embedded_perron(matrix, set, tol)?;
                let (_, u) = embedded_perron(&transposed, set, tol)?;
                atoms.push(AtomSpectrum {
                    rho,
                    nonzero,
                    perron: Some(v),
                    left_perron: Some(u),
                    distinguished: false,
                    left_distinguished: false,
                    critical: false,
                    borderline: false,
                });
            } else {
                atoms.push(AtomSpectrum {
                    rho: 0.0,
                    nonzero,
                    perron: None,
                    left_perron: None,
                    distinguished: false,
                    left_distinguished: false,
                    critical: false,
                    borderline: false,
                });
            }
        }
        let rho_t = atoms.iter().map(|s| s.rho).fold(0.0, f64::max);

        for a in 0..count {
            let rho_a = atoms[a].rho;
            let mut border = tol.is_borderline(rho_a, rho_t, rho_t);
            let mut below_ok = true;
            for b in poset.strictly_below(a) {
                border |= tol.is_borderline(atoms[b].rho, rho_a, rho_t);
                below_ok &= tol.compare(atoms[b].rho, rho_a, rho_t) == RadiusOrder::Less;
            }
            let mut above_ok = true;
            for b in poset.strictly_above(a) {
                border |= tol.is_borderline(atoms[b].rho, rho_a, rho_t);
                above_ok &= tol.compare(atoms[b].rho, rho_a, rho_t) == RadiusOrder::Less;
            }
            let nz = atoms[a].nonzero;
            let spec = &mut atoms[a];
            spec.distinguished = nz && below_ok;
            spec.left_distinguished = nz && above_ok;
            spec.critical = nz && tol.compare(rho_a, rho_t, rho_t) == RadiusOrder::Tie;
            spec.borderline = border;
        }

        // second route: ρ(F*(A)) < ρ(A)
        for a in 0..count {
            if !atoms[a].nonzero {
                continue;
            }
            let fstar = graph.future_star(op.atom(a));
            let rho_f = radius_of_set(matrix, graph, &fstar, tol)?;
            let via_future = tol.compare(rho_f, atoms[a].rho, rho_t) == RadiusOrder::Less;
            if via_future != atoms[a].distinguished {
                if tol.is_borderline(rho_f, atoms[a].rho, rho_t) || atoms[a].borderline {
                    atoms[a].borderline = true;
                } else {
                    return Err(Error::invariant(
                        "distinguished atoms: downset radii vs radius of the strict future",
                        format!(
                            "atom {a}: rho(A) = {}, rho(F*(A)) = {rho_f}, downset route says {}",
                            atoms[a].rho, atoms[a].distinguished
                        ),
                    ));
                }
            }
        }

        let mut dist: Vec<usize> = (0..count).filter(|&a| atoms[a].distinguished).collect();
        dist.sort_by(|&a, &b| atoms[b].rho.total_cmp(&atoms[a].rho).then(a.cmp(&b)));
        let mut groups: Vec<DistinguishedEigenvalue> = Vec::new();
        for a in dist {
            let rho = atoms[a].rho;
            match groups.last_mut() {
                Some(g) if tol.compare(rho, g.lambda, rho_t) == RadiusOrder::Tie => {
                    g.atoms.push(a)
                }
                _ => groups.push(DistinguishedEigenvalue {
                    lambda: rho,
                    atoms: vec![a],
                    vectors: Vec::new(),
                }),
            }
        }
        for g in &mut groups {
            g.atoms.sort_unstable();
            for &a in &g.atoms {
                let spec = &atoms[a];
                let w = distinguished_eigenfunction(
                    matrix,
                    graph,
                    op.atom(a),
                    spec.rho,
                    spec.perron.as_deref().expect("nonzero atom"),
                    tol,
                )?;
                g.vectors.push(w);
            }
        }

        let ambiguous = atoms.iter().any(|s| s.borderline);
        Ok(SpectralProfile {
            rho_t,
            tolerances: *tol,
            atoms,
            distinguished: groups,
            ambiguous,
        })
    }

    pub fn nonzero_atoms(&self) -> Vec<usize> {
        (0..self.atoms.len()).filter(|&a| self.atoms[a].nonzero).collect()
    }

    pub fn distinguished_atoms(&self) -> Vec<usize> {
        (0..self.atoms.len()).filter(|&a| self.atoms[a].distinguished).collect()
    }

    pub fn critical_atoms(&self) -> Vec<usize> {
        (0..self.atoms.len()).filter(|&a| self.atoms[a].critical).collect()
    }

    pub fn perron_vector(&self, a: usize) -> Result<&[f64]> {
        self.atoms[a]
            .perron
            .as_deref()
            .ok_or(Error::ZeroAtom { atom: a })
    }

    /// The group whose eigenvalue ties with `lambda`.
    pub fn eigenvalue_group(&self, lambda: f64) -> Option<&DistinguishedEigenvalue> {
        if !(lambda > 0.0) {
            return None;
        }
        let t = &self.tolerances;
        let slack = t.abs_atol(self.rho_t).max(t.rtol * lambda);
        self.distinguished
            .iter()
            .find(|g| (g.lambda - lambda).abs() <= slack)
    }

    /// Nonnegative eigenfunction `w_A` of a distinguished atom.
    pub fn eigenfunction_w(&self, a: usize) -> Result<&[f64]> {
        for g in &self.distinguished {
            if let Some(k) = g.atoms.iter().position(|&x| x == a) {
                return Ok(&g.vectors[k]);
            }
        }
        Err(Error::Precondition(format!("atom {a} is not distinguished")))
    }
}

/// `w_A = v_A + f` where `(ρ(A) I − T_B) f = 𝟙_B T v_A` on `B = F*(A)`.
///
/// Works for either orientation: pass the transposed matrix and graph to get
/// the left eigenvector.
pub(crate) fn distinguished_eigenfunction(
    matrix: &NonnegativeMatrix,
    graph: &SupportGraph,
    atom: &IndexSet,
    rho: f64,
    perron: &[f64],
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let future = graph.future(atom);
    let rest = future.difference(atom);
    let mut w = perron.to_vec();
    if !rest.is_empty() {
        let idx = rest.to_vec();
        let system = DMatrix::<f64>::identity(idx.len(), idx.len()) * rho - matrix.block(&idx);
        let rhs = DVector::from_iterator(
            idx.len(),
            idx.iter()
                .map(|&i| atom.iter().map(|j| matrix.get(i, j) * perron[j]).sum::<f64>()),
        );
        let f = linalg::solve(&system, &rhs)?;
        for (k, &i) in idx.iter().enumerate() {
            w[i] = f[k];
        }
    }
    let sup = linalg::norm_inf(&w);
    let cut = tol.pos_tol * sup;
    if let Some(i) = future.iter().find(|&i| !(w[i] > cut)) {
        return Err(Error::invariant(
            "support of a distinguished eigenvector is the future of its atom",
            format!("entry {i} = {} is not positive", w[i]),
        ));
    }
    let tw = matrix.matvec(&w);
    let resid = tw
        .iter()
        .zip(&w)
        .map(|(a, b)| (a - rho * b).abs())
        .fold(0.0, f64::max);
    if resid > tol.rtol * (matrix.norm_inf() + rho) * sup {
        return Err(Error::invariant(
            "distinguished atom carries a nonnegative eigenvector",
            format!("residual {resid:e} at rho = {rho}"),
        ));
    }
    Ok(w)
}

/// Basis `{w_A}` of the cone of nonnegative eigenvectors at `lambda`; empty
/// when `lambda` is not a distinguished eigenvalue.
pub fn nonneg_eigencone(profile: &SpectralProfile, lambda: f64) -> Vec<(usize, Vec<f64>)> {
    profile
        .eigenvalue_group(lambda)
        .map(|g| g.atoms.iter().copied().zip(g.vectors.iter().cloned()).collect())
        .unwrap_or_default()
}

/// Coefficients `c_A ≥ 0` with `v = Σ c_A w_A` over the distinguished atoms
/// at `lambda`.
pub fn decompose_nonneg_eigenvector(
    op: &Operator,
    profile: &SpectralProfile,
    v: &[f64],
    lambda: f64,
) -> Result<Vec<(usize, f64)>> {
    let tol = &profile.tolerances;
    let n = op.dim();
    if v.len() != n {
        return Err(Error::Input(format!("vector length {} != {n}", v.len())));
    }
    let sup = linalg::norm_inf(v);
    if sup == 0.0 || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("vector must be finite and nonzero".into()));
    }
    if v.iter().any(|&x| x < -tol.pos_tol * sup) {
        return Err(Error::Input("vector has negative entries".into()));
    }
    let tv = op.matrix().matvec(v);
    let resid = tv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).abs())
        .fold(0.0, f64::max);
    if resid > tol.rtol * (op.matrix().norm_inf() + lambda) * sup {
        return Err(Error::Input(format!(
            "not an eigenvector at {lambda}: residual {resid:e}"
        )));
    }
    let cone = nonneg_eigencone(profile, lambda);
    if cone.is_empty() {
        return Err(Error::invariant(
            "nonnegative eigenvalues are distinguished",
            format!("{lambda} has a nonnegative eigenvector but no distinguished atom"),
        ));
    }

    let mut coeffs = Vec::with_capacity(cone.len());
    let mut recon = vec![0.0; n];
    for (a, w) in &cone {
        let c: f64 = op.atom(*a).iter().map(|i| v[i]).sum();
        let c = if c.abs() <= tol.pos_tol * sup { 0.0 } else { c };
        if c < 0.0 {
            return Err(Error::invariant(
                "nonnegative eigenvectors lie in the cone of the w_A",
                format!("coefficient {c} on atom {a}"),
            ));
        }
        for (r, wi) in recon.iter_mut().zip(w) {
            *r += c * wi;
        }
        coeffs.push((*a, c));
    }
    let err = recon
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if err > 1e-8 * sup {
        return Err(Error::invariant(
            "nonnegative eigenvectors lie in the cone of the w_A",
            format!("reconstruction error {err:e}"),
        ));
    }
    let support_cut = tol.pos_tol * sup;
    for &(a, c) in &coeffs {
        let inside = op.atom(a).iter().all(|i| v[i] > support_cut);
        if inside != (c > 0.0) {
            return Err(Error::invariant(
                "c_A > 0 iff A lies in the support",
                format!("atom {a}: c = {c}, inside support = {inside}"),
            ));
        }
    }
    Ok(coeffs)
}

/// Both sides of `mult(λ, T) = Σ_A mult(λ, A)`, exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchwartzMultiplicity {
    pub total: usize,
    pub per_atom: Vec<usize>,
    pub sum: usize,
}

pub fn schwartz_multiplicity(op: &Operator, lambda: &BigRational) -> Result<SchwartzMultiplicity> {
    if lambda.is_zero() {
        return Err(Error::Precondition("lambda must be nonzero".into()));
    }
    let m = RationalMatrix::from_matrix(op.matrix())?;
    let total = exact_multiplicity(&m, lambda);
    let per_atom: Vec<usize> = op
        .partition()
        .atoms()
        .iter()
        .map(|a| exact_multiplicity(&m.block(&a.to_vec()), lambda))
        .collect();
    let sum = per_atom.iter().sum();
    if total != sum {
        return Err(Error::invariant(
            "multiplicity splits over atoms",
            format!("mult(T) = {total}, sum over atoms = {sum}"),
        ));
    }
    Ok(SchwartzMultiplicity {
        total,
        per_atom,
        sum,
    })
}

/// `ρ(T)` as an exact rational, when the exact backend admits one with
/// denominator at most `10^6`.
pub fn rational_radius(op: &Operator, profile: &SpectralProfile) -> Option<BigRational> {
    if !op.matrix().is_exact() || !(profile.rho_t > 0.0) {
        return None;
    }
    let q = rational_approximation(profile.rho_t, 1_000_000)?;
    let m = RationalMatrix::from_matrix(op.matrix()).ok()?;
    (exact_multiplicity(&m, &q) > 0).then_some(q)
}

/// Number of critical atoms, which equals `mult(ρ(T), T)`. Cross-checked
/// exactly when `ρ(T)` is rational on the exact backend.
pub fn multiplicity_at_radius(op: &Operator, profile: &SpectralProfile) -> Result<usize> {
    if !(profile.rho_t > 0.0) {
        return Err(Error::Precondition("spectral radius is zero".into()));
    }
    let count = profile.critical_atoms().len();
    if let Some(q) = rational_radius(op, profile) {
        let m = RationalMatrix::from_matrix(op.matrix())?;
        let exact = exact_multiplicity(&m, &q);
        if exact != count && !profile.ambiguous {
            return Err(Error::invariant(
                "multiplicity at the radius counts critical atoms",
                format!("exact multiplicity {exact}, critical atoms {count}"),
            ));
        }
    }
    Ok(count)
}

/// Truth values of the three equivalent monatomicity conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonatomicityEvidence {
    pub nonzero_atoms: usize,
    pub right_distinguished: usize,
    pub left_distinguished: usize,
    pub mult_at_radius: usize,
    pub supports_intersect: Option<bool>,
    pub single_nonzero_atom: bool,
    pub unique_and_simple: bool,
    pub unique_and_overlapping: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonatomicityVerdict {
    pub is_monatomic: bool,
    pub nonzero_atom: Option<IndexSet>,
    /// The right nonnegative eigenvector when it is unique.
    pub right_u: Option<Vec<f64>>,
    /// The left nonnegative eigenvector when it is unique.
    pub left_v: Option<Vec<f64>>,
    pub evidence: MonatomicityEvidence,
}

pub fn classify_monatomic(op: &Operator, profile: &SpectralProfile) -> Result<MonatomicityVerdict> {
    if !(profile.rho_t > 0.0) {
        return Err(Error::Precondition("spectral radius is zero".into()));
    }
    let tol = &profile.tolerances;
    let nonzero = profile.nonzero_atoms();
    let right: Vec<usize> = profile.distinguished_atoms();
    let left: Vec<usize> = (0..profile.atoms.len())
        .filter(|&a| profile.atoms[a].left_distinguished)
        .collect();
    let mult = profile.critical_atoms().len();

    let right_u = match right.as_slice() {
        [a] => Some(profile.eigenfunction_w(*a)?.to_vec()),
        _ => None,
    };
    let left_v = match left.as_slice() {
        [a] => {
            let spec = &profile.atoms[*a];
            Some(distinguished_eigenfunction(
                &op.matrix().transpose(),
                &op.graph().transpose(),
                op.atom(*a),
                spec.rho,
                spec.left_perron.as_deref().expect("nonzero atom"),
                tol,
            )?)
        }
        _ => None,
    };
    let support = |x: &[f64]| {
        let cut = tol.pos_tol * linalg::norm_inf(x);
        IndexSet::from_indices(x.len(), (0..x.len()).filter(|&i| x[i] > cut))
    };
    let overlap = match (&right_u, &left_v) {
        (Some(u), Some(v)) => Some(support(u).intersection(&support(v))),
        _ => None,
    };
    let unique = right.len() == 1 && left.len() == 1;
    let evidence = MonatomicityEvidence {
        nonzero_atoms: nonzero.len(),
        right_distinguished: right.len(),
        left_distinguished: left.len(),
        mult_at_radius: mult,
        supports_intersect: overlap.as_ref().map(|s| !s.is_empty()),
        single_nonzero_atom: nonzero.len() == 1,
        unique_and_simple: unique && mult == 1,
        unique_and_overlapping: unique && overlap.as_ref().is_some_and(|s| !s.is_empty()),
    };
    let verdicts = [
        evidence.single_nonzero_atom,
        evidence.unique_and_simple,
        evidence.unique_and_overlapping,
    ];
    if verdicts.iter().any(|&v| v != verdicts[0]) && !profile.ambiguous {
        return Err(Error::invariant(
            "characterization of monatomic operators",
            format!("conditions disagree: {verdicts:?}"),
        ));
    }
    let is_monatomic = evidence.single_nonzero_atom;
    let nonzero_atom = is_monatomic.then(|| op.atom(nonzero[0]).clone());
    if let (Some(atom), Some(s)) = (&nonzero_atom, &overlap) {
        if atom != s {
            return Err(Error::invariant(
                "characterization of monatomic operators",
                format!("supp(u) ∩ supp(v) = {s}, nonzero atom = {atom}"),
            ));
        }
    }
    Ok(MonatomicityVerdict {
        is_monatomic,
        nonzero_atom,
        right_u,
        left_v,
        evidence,
    })
}

/// `(λI − T)^{-1}` for `λ > ρ(T)`; entrywise nonnegative.
pub fn resolvent(op: &Operator, profile: &SpectralProfile, lambda: f64) -> Result<NonnegativeMatrix> {
    let margin = profile.tolerances.abs_atol(profile.rho_t).max(profile.tolerances.rtol * lambda.abs());
    if !(lambda > profile.rho_t + margin) {
        return Err(Error::Precondition(format!(
            "lambda = {lambda} must exceed the spectral radius {}",
            profile.rho_t
        )));
    }
    let n = op.dim();
    let system = DMatrix::<f64>::identity(n, n) * lambda - op.matrix().to_dmatrix();
    let inv = linalg::inverse(&system)?;
    let top = inv.iter().copied().fold(0.0, f64::max);
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = inv[(i, j)];
            if x < -1e-12 * top {
                return Err(Error::invariant(
                    "resolvent above the radius is positive",
                    format!("entry ({i}, {j}) = {x:e}"),
                ));
            }
            values.push(x.max(0.0));
        }
    }
    NonnegativeMatrix::from_row_major(n, values)
}
