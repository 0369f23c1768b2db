//! Critical atoms, their heights, the ascent at `ρ(T)` and an adapted basis
//! of the generalized eigenspace.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::Operator;
use crate::oracle::{exact_ascent, RationalMatrix};
use crate::spectral::{rational_radius, SpectralProfile};

/// `|M_AA − ρ|` and `|M_AB|` (for `B ⋠ A`) must stay below this times `ρ`.
pub const BASIS_ZERO_TOL: f64 = 1e-9;
/// Cover entries must reach this times `ρ`.
pub const BASIS_COVER_MIN: f64 = 1e-6;
/// `(T − ρI)^k w` counts as zero below this fraction of `|T − ρI|^k |w|`.
pub const INDEX_TOL: f64 = 1e-8;
/// Relative residual allowed in the basis solves and in `T w_A = Σ M w_B`.
pub const BASIS_RESID_TOL: f64 = 1e-9;
/// Above this value of `ε · condition · ascent` a failed basis check is
/// reported as uncertified rather than as an error.
pub const PRECISION_LIMIT: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalStructure {
    pub rho_t: f64,
    /// Atom ids, increasing.
    pub critical_atoms: Vec<usize>,
    /// `(upper, lower)` covers of the order restricted to the critical atoms.
    pub covers: Vec<(usize, usize)>,
    /// Aligned with `critical_atoms`.
    pub heights: Vec<usize>,
    pub ascent: usize,
    /// `w_A`, aligned with `critical_atoms`.
    pub basis: Vec<Vec<f64>>,
    /// Row `A`, column `B`: `T w_A = Σ_B M[A][B] w_B`.
    pub basis_matrix: Vec<Vec<f64>>,
    /// Measured index of each `w_A`; `None` when the basis is not certified.
    pub indices: Option<Vec<usize>>,
    pub borderline: bool,
    /// Largest condition estimate met while solving for the basis.
    pub basis_condition: f64,
    /// False when a basis check failed under a borderline tie or where
    /// `ε · condition · ascent` exceeds [`PRECISION_LIMIT`].
    pub basis_certified: bool,
}

impl CriticalStructure {
    pub fn compute(op: &Operator, profile: &SpectralProfile) -> Result<Self> {
        let rho = profile.rho_t;
        if !(rho > 0.0) {
            return Err(Error::Precondition("spectral radius is zero".into()));
        }
        let poset = op.poset();
        let critical = profile.critical_atoms();
        let covers = poset.restricted_covers(&critical);
        let heights = poset.heights(&critical);
        let ascent = heights.iter().copied().max().unwrap_or(0);
        let borderline = critical.iter().any(|&a| profile.atoms[a].borderline);

        let fit = generalized_basis(op, profile, &critical, &heights)?;
        let (m, resid) = structured_basis_matrix(op, profile, &critical, &fit.vectors)?;
        let indices = indices_from_basis_matrix(&m, rho);
        let failure = if fit.residual > BASIS_RESID_TOL {
            Some(Error::invariant(
                "generalized eigenvector with prescribed block",
                format!("relative constraint residual {:e}", fit.residual),
            ))
        } else if resid > BASIS_RESID_TOL {
            Some(Error::invariant(
                "T w_A lies in the span of w_B for B below A",
                format!("relative residual {resid:e}"),
            ))
        } else if let Err(e) = check_basis_matrix(op, &critical, &m, rho) {
            Some(e)
        } else if indices != heights {
            Some(Error::invariant(
                "index of w_A equals its height",
                format!("indices {indices:?}, heights {heights:?}"),
            ))
        } else {
            None
        };
        let limited = f64::EPSILON * fit.condition * ascent as f64 > PRECISION_LIMIT;
        let basis_certified = match failure {
            None => true,
            Some(_) if borderline || limited => false,
            Some(e) => return Err(e),
        };
        let basis = fit.vectors;
        let k = critical.len();
        Ok(CriticalStructure {
            rho_t: rho,
            critical_atoms: critical,
            covers,
            heights,
            ascent,
            basis,
            basis_matrix: (0..k).map(|r| (0..k).map(|c| m[(r, c)]).collect()).collect(),
            indices: basis_certified.then_some(indices),
            borderline,
            basis_condition: fit.condition,
            basis_certified,
        })
    }

    pub fn height_of(&self, atom: usize) -> Option<usize> {
        let pos = self.critical_atoms.iter().position(|&a| a == atom)?;
        Some(self.heights[pos])
    }
}

/// Vectors `w_A` with `supp(w_A) ⊆ F(A)`, `𝟙_A w_A = v_A` and
/// `(T_{F(A)} − ρI)^{c_A} w_A = 0`, one per critical atom.
///
/// Height-one atoms are distinguished and reuse their eigenvector. Otherwise,
/// with `B = F*(A)` and `K_B = span{w_C : C ≺ A critical}` (the generalized
/// kernel of `T_B`), `w_A = v_A + f` where `(T_B − ρI) f ≡ −𝟙_B T v_A`
/// modulo `K_B`; `f` is taken orthogonal to `K_B`, which is the
/// minimal-norm member of the kernel of `(T_{F(A)} − ρI)^{c_A}` matching
/// `v_A` on `A`. Atoms are processed downstream first.
pub fn generalized_basis(
    op: &Operator,
    profile: &SpectralProfile,
    critical: &[usize],
    heights: &[usize],
) -> Result<BasisFit> {
    let rho = profile.rho_t;
    let n = op.dim();
    let t = op.matrix().to_dmatrix();
    let mut out: Vec<Vec<f64>> = vec![Vec::new(); critical.len()];
    let (mut condition, mut residual) = (1.0f64, 0.0f64);
    // ids are topological, so larger ids are never above smaller ones
    for pos in (0..critical.len()).rev() {
        let (a, h) = (critical[pos], heights[pos]);
        if h == 1 {
            let w = profile.eigenfunction_w(a).map_err(|_| {
                Error::invariant(
                    "height-one critical atoms are distinguished",
                    format!("atom {a} is not distinguished"),
                )
            })?;
            out[pos] = w.to_vec();
            continue;
        }
        let atom = op.atom(a);
        let below = op.graph().future_star(atom).to_vec();
        let lower: Vec<usize> = (pos + 1..critical.len())
            .filter(|&p| op.poset().lt(critical[p], a))
            .collect();
        let perron = profile.perron_vector(a)?;
        let nb = below.len();
        let m = lower.len();
        // [T_B − ρI | W] (f, β) = −𝟙_B T v_A
        let mut system = DMatrix::<f64>::zeros(nb, nb + m);
        for (r, &i) in below.iter().enumerate() {
            for (c, &j) in below.iter().enumerate() {
                system[(r, c)] = t[(i, j)] - if i == j { rho } else { 0.0 };
            }
            for (c, &p) in lower.iter().enumerate() {
                system[(r, nb + c)] = out[p][i];
            }
        }
        let rhs = DVector::from_iterator(
            nb,
            below
                .iter()
                .map(|&i| -atom.iter().map(|j| t[(i, j)] * perron[j]).sum::<f64>()),
        );
        let (sol, cond) = linalg::min_norm_solve_wide(&system, &rhs)?;
        let miss = (&system * &sol - &rhs).amax();
        let row_norm = system.row_iter().map(|r| r.abs().sum()).fold(0.0, f64::max);
        let scale = row_norm * sol.amax() + rhs.amax();
        condition = condition.max(cond);
        residual = residual.max(if scale > 0.0 { miss / scale } else { miss });
        let k = DMatrix::from_fn(nb, m, |r, c| out[lower[c]][below[r]]);
        let f = linalg::project_out(&k, &sol.rows(0, nb).into_owned());
        let mut w = vec![0.0; n];
        for i in atom.iter() {
            w[i] = perron[i];
        }
        for (r, &i) in below.iter().enumerate() {
            w[i] = f[r];
        }
        out[pos] = w;
    }
    Ok(BasisFit {
        vectors: out,
        condition,
        residual,
    })
}

/// Output of [`generalized_basis`].
#[derive(Clone, Debug)]
pub struct BasisFit {
    /// `w_A`, aligned with the critical atoms.
    pub vectors: Vec<Vec<f64>>,
    /// Largest condition estimate over the solves; infinite after a rank
    /// deficient fallback.
    pub condition: f64,
    /// Largest backward residual of the solves, relative to
    /// `‖[T_B − ρI | W]‖ ‖x‖ + ‖b‖`.
    pub residual: f64,
}

/// Least-squares `M` with `T w_A = Σ_B M[A][B] w_B`; fails when the family is
/// not linearly independent or not `T`-stable.
pub fn basis_matrix(op: &Operator, basis: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = op.dim();
    let k = basis.len();
    if k == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let w = DMatrix::from_fn(n, k, |i, c| basis[c][i]);
    if linalg::numerical_rank(&w, 1e-10) != k {
        return Err(Error::invariant(
            "basis of the generalized eigenspace is independent",
            format!("rank below {k}"),
        ));
    }
    let tw = op.matrix().to_dmatrix() * &w;
    let mt = linalg::min_norm_solve_many(&w, &tw)?;
    let resid = (&w * &mt - &tw).amax();
    if resid > 1e-8 * tw.amax().max(w.amax()) {
        return Err(Error::invariant(
            "span of the basis is T-stable",
            format!("residual {resid:e}"),
        ));
    }
    Ok(mt.transpose())
}

/// `M` with `T w_A = Σ_B M[A][B] w_B`, read off atom by atom down the
/// down-set of `A` (topological order) with the left Perron vector of each
/// `B`. Also returns the largest residual of the identity relative to
/// `‖T‖ ‖w_A‖ + Σ |M[A][B]| ‖w_B‖`. Unlike
/// [`basis_matrix`] this never inverts the basis, whose conditioning degrades
/// along long critical chains.
pub fn structured_basis_matrix(
    op: &Operator,
    profile: &SpectralProfile,
    critical: &[usize],
    basis: &[Vec<f64>],
) -> Result<(DMatrix<f64>, f64)> {
    let k = critical.len();
    let mut worst = 0.0f64;
    let poset = op.poset();
    let norm_t = op.matrix().norm_inf();
    let mut m = DMatrix::<f64>::zeros(k, k);
    for (p, &a) in critical.iter().enumerate() {
        let w = &basis[p];
        let mut r = op.matrix().matvec(w);
        let mut scale = norm_t * linalg::norm_inf(w);
        for (q, &b) in critical.iter().enumerate().filter(|&(_, &b)| poset.leq(b, a)) {
            let left = profile.atoms[b]
                .left_perron
                .as_deref()
                .ok_or(Error::ZeroAtom { atom: b })?;
            let atom = op.atom(b);
            let num: f64 = atom.iter().map(|i| left[i] * r[i]).sum();
            let den: f64 = atom.iter().map(|i| left[i] * basis[q][i]).sum();
            let c = num / den;
            m[(p, q)] = c;
            for (x, y) in r.iter_mut().zip(&basis[q]) {
                *x -= c * y;
            }
            scale += c.abs() * linalg::norm_inf(&basis[q]);
        }
        let resid = linalg::norm_inf(&r);
        let rel = if scale > 0.0 { resid / scale } else { resid };
        // NaN must not pass as certified
        worst = if rel.is_nan() { f64::INFINITY } else { worst.max(rel) };
    }
    Ok((m, worst))
}

/// Index of each `w_A` from `N = M − ρI`: one plus the longest path from `A`
/// through entries of `N` above [`BASIS_ZERO_TOL`]. Longest paths run along
/// covers, whose entries are positive, so no cancellation can shorten them.
pub fn indices_from_basis_matrix(m: &DMatrix<f64>, rho: f64) -> Vec<usize> {
    let k = m.nrows();
    let zero = BASIS_ZERO_TOL * rho;
    let mut longest = vec![0usize; k];
    // the off-order entries vanish and rows are topological: later rows are lower
    for p in (0..k).rev() {
        longest[p] = (p + 1..k)
            .filter(|&q| m[(p, q)].abs() > zero)
            .map(|q| longest[q] + 1)
            .max()
            .unwrap_or(0);
    }
    longest.iter().map(|l| l + 1).collect()
}

/// Asserts `M_AA = ρ`, `M_AB = 0` for `B ⋠ A`, and `M_AB > 0` when `A`
/// covers `B` among the critical atoms.
pub fn check_basis_matrix(op: &Operator, critical: &[usize], m: &DMatrix<f64>, rho: f64) -> Result<()> {
    let poset = op.poset();
    let covers = poset.restricted_covers(critical);
    let zero = BASIS_ZERO_TOL * rho;
    for (r, &a) in critical.iter().enumerate() {
        for (c, &b) in critical.iter().enumerate() {
            let x = m[(r, c)];
            let fail = if a == b {
                ((x - rho).abs() > zero).then(|| format!("M[{a}][{a}] = {x}, rho = {rho}"))
            } else if !poset.leq(b, a) {
                (x.abs() > zero).then(|| format!("M[{a}][{b}] = {x:e} but {b} is not below {a}"))
            } else if covers.binary_search(&(a, b)).is_ok() {
                (x < BASIS_COVER_MIN * rho).then(|| format!("M[{a}][{b}] = {x:e} on a cover"))
            } else {
                None
            };
            if let Some(detail) = fail {
                return Err(Error::invariant("triangular structure of the basis matrix", detail));
            }
        }
    }
    Ok(())
}

/// Least `k` with `(T − ρI)^k w` negligible against `|T − ρI|^k |w|`, the
/// scale of the rounding in the same product.
pub fn vector_index(op: &Operator, rho: f64, w: &[f64]) -> usize {
    let n = op.dim();
    let shifted = op.matrix().to_dmatrix() - DMatrix::<f64>::identity(n, n) * rho;
    let magnitude = shifted.abs();
    let mut x = DVector::from_column_slice(w);
    let mut scale = x.abs();
    if x.amax() == 0.0 {
        return 0;
    }
    for k in 1..=n + 1 {
        x = &shifted * x;
        scale = &magnitude * scale;
        let s = scale.amax();
        if x.amax() <= INDEX_TOL * s || s == 0.0 {
            return k;
        }
        // common rescaling keeps the ratio and avoids underflow
        x /= s;
        scale /= s;
    }
    n + 1
}

/// Least `k` with `rank (T − ρI)^k = rank (T − ρI)^(k+1)`, by exact ranks.
/// `None` when `ρ(T)` is not a recoverable rational.
pub fn ascent_exact(op: &Operator, profile: &SpectralProfile) -> Result<Option<usize>> {
    let m = RationalMatrix::from_matrix(op.matrix())?;
    Ok(rational_radius(op, profile).map(|q| exact_ascent(&m, &q)))
}

/// The same stabilization index from SVD ranks of float powers.
pub fn ascent_numerical(op: &Operator, rho: f64) -> usize {
    let n = op.dim();
    let mut shifted = op.matrix().to_dmatrix() - DMatrix::<f64>::identity(n, n) * rho;
    let norm = shifted.norm();
    if norm > 0.0 {
        shifted /= norm;
    }
    let rank_of = |p: &DMatrix<f64>| {
        p.singular_values()
            .iter()
            .filter(|&&s| s > 1e-9 * (n as f64))
            .count()
    };
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut prev = n;
    for k in 0..=n {
        power = &power * &shifted;
        let r = rank_of(&power);
        if r == prev {
            return k;
        }
        prev = r;
    }
    n
}
