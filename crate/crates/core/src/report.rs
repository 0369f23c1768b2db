//! Full analysis pipeline, the versioned JSON report and DOT export.

use std::fmt::{self, Write as _};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::atoms::verify_atom_characterizations;
use crate::critical::{ascent_exact, CriticalStructure};
use crate::error::{Error, Result};
use crate::model::market::{format_rational, parse_rational};
use crate::model::matrix::rational_to_f64;
use crate::model::{Backend, IndexSet, NonnegativeMatrix};
use crate::operator::Operator;
use crate::oracle::{boolean_reachability, enumerate_families, ENUMERATION_LIMIT};
use crate::periodicity::{cyclic_classes, power_matrix_atoms};
use crate::spectral::{
    classify_monatomic, multiplicity_at_radius, rational_radius, schwartz_multiplicity,
    SpectralProfile, Tolerances,
};

pub const SCHEMA_VERSION: u32 = 1;

/// A float scalar. Reads either a JSON number or a decimal / `p/q` string,
/// which is how exact-backend reports carry scalars.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // JSON has no infinities; they travel as strings
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct NumVisitor;
        impl Visitor<'_> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a numeric string")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
                if let Ok(x) = v.parse::<f64>() {
                    return Ok(Num(x));
                }
                parse_rational(v)
                    .map(|q| Num(rational_to_f64(&q)))
                    .ok_or_else(|| E::custom(format!("not a number: {v}")))
            }
        }
        d.deserialize_any(NumVisitor)
    }
}

fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

/// Where the matrix came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputDescriptor {
    Example { name: String },
    MatrixMarket { path: String },
    Kernel { kernel: String, grid: usize },
    Inline,
}

/// Analysis settings.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisOptions {
    pub tolerances: Tolerances,
    pub support_threshold: f64,
    pub power: Option<usize>,
    pub oracle: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            tolerances: Tolerances::default(),
            support_threshold: crate::operator::DEFAULT_SUPPORT_THRESHOLD,
            power: None,
            oracle: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceReport {
    pub rtol: Num,
    pub atol: Num,
    pub pos_tol: Num,
    pub support_threshold: Num,
    pub max_iters: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomReport {
    pub id: usize,
    pub members: Vec<usize>,
    pub rho: Num,
    pub nonzero: bool,
    pub distinguished: bool,
    pub left_distinguished: bool,
    pub critical: bool,
    pub borderline: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueReport {
    pub lambda: Num,
    pub atoms: Vec<usize>,
    pub vectors: Vec<Vec<Num>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonatomicityReport {
    pub monatomic: bool,
    pub nonzero_atom: Option<Vec<usize>>,
    pub right_u: Option<Vec<Num>>,
    pub left_v: Option<Vec<Num>>,
    pub nonzero_atoms: usize,
    pub right_distinguished: usize,
    pub left_distinguished: usize,
    pub supports_intersect: Option<bool>,
    pub condition_single_nonzero_atom: bool,
    pub condition_unique_and_simple: bool,
    pub condition_unique_and_overlapping: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub critical_atoms: Vec<usize>,
    pub covers: Vec<(usize, usize)>,
    pub heights: Vec<usize>,
    pub ascent: usize,
    pub ascent_exact: Option<usize>,
    /// Absent when the basis is not certified.
    pub indices: Option<Vec<usize>>,
    pub basis_certified: bool,
    pub basis_condition: Num,
    pub basis: Vec<Vec<Num>>,
    pub basis_matrix: Vec<Vec<Num>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicReport {
    pub atom: usize,
    pub period: usize,
    pub d: usize,
    pub classes: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub power: usize,
    pub power_atoms: Vec<Vec<usize>>,
    pub atoms: Vec<CyclicReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchwartzReport {
    pub lambda: String,
    pub total: usize,
    pub per_atom: Vec<usize>,
}

/// Cross-checks against brute force; every flag is `true` in a successful
/// report (a disagreement aborts the analysis instead).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub invariant_sets_agree: bool,
    pub set_predicates_agree: bool,
    pub atom_characterizations_agree: bool,
    pub reachability_agrees: bool,
    pub invariant_set_count: usize,
    pub convex_set_count: usize,
    pub admissible_set_count: usize,
    pub irreducible_set_count: usize,
    pub schwartz_at_radius: Option<SchwartzReport>,
    pub ascent_matches_exact: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub schema: u32,
    pub input: InputDescriptor,
    pub backend: Backend,
    pub n: usize,
    pub tolerances: ToleranceReport,
    pub atoms: Vec<AtomReport>,
    /// `(upper, lower)` atom ids.
    pub covers: Vec<(usize, usize)>,
    /// All invariant sets when there are at most 16 atoms.
    pub invariant_sets: Option<Vec<Vec<usize>>>,
    pub rho_t: Num,
    pub rho_t_exact: Option<String>,
    pub ambiguous: bool,
    pub distinguished_eigenvalues: Vec<EigenvalueReport>,
    pub mult_at_radius: Option<usize>,
    pub monatomicity: Option<MonatomicityReport>,
    pub critical: Option<CriticalReport>,
    pub periodicity: Option<PeriodicityReport>,
    pub oracle: Option<OracleReport>,
}

/// Invariant sets are the unions of down-closed families of atoms.
fn invariant_sets(op: &Operator) -> Option<Vec<Vec<usize>>> {
    let k = op.atom_count();
    if k > ENUMERATION_LIMIT {
        return None;
    }
    let poset = op.poset();
    let down: Vec<u32> = (0..k)
        .map(|a| poset.down_set(a).iter().fold(0u32, |m, b| m | 1 << b))
        .collect();
    let mut out: Vec<Vec<usize>> = (0u32..1 << k)
        .filter(|&mask| (0..k).all(|a| mask >> a & 1 == 0 || down[a] & !mask == 0))
        .map(|mask| {
            op.partition()
                .union_of((0..k).filter(|a| mask >> a & 1 == 1))
                .to_vec()
        })
        .collect();
    out.sort();
    Some(out)
}

fn run_oracle(
    op: &Operator,
    profile: &SpectralProfile,
    critical: Option<&CriticalReport>,
    invariant: &Option<Vec<Vec<usize>>>,
) -> Result<OracleReport> {
    let n = op.dim();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let g = op.graph();
    let fam = enumerate_families(g)?;
    let mut enumerated: Vec<Vec<usize>> = fam.invariant.iter().map(IndexSet::to_vec).collect();
    enumerated.sort();
    let invariant_sets_agree = invariant.as_ref().is_none_or(|s| *s == enumerated);

    let mut set_predicates_agree = true;
    for mask in 0u64..1 << n {
        let a = IndexSet::from_mask(n, mask);
        let member = |f: &[IndexSet]| f.binary_search(&a).is_ok();
        set_predicates_agree &= g.is_invariant(&a) == member(&fam.invariant)
            && g.is_coinvariant(&a) == member(&fam.coinvariant)
            && g.is_convex(&a) == member(&fam.convex)
            && g.is_irreducible(&a) == member(&fam.irreducible)
            && op.is_admissible(&a) == member(&fam.admissible);
    }
    let chars = verify_atom_characterizations(g)?;
    let reachability_agrees = (0..n).all(|i| {
        let s = IndexSet::singleton(n, i);
        boolean_reachability(g, &s) == g.future(&s)
    });

    let mut schwartz_at_radius = None;
    let mut ascent_matches_exact = None;
    if op.matrix().is_exact() {
        if let Some(q) = rational_radius(op, profile) {
            let s = schwartz_multiplicity(op, &q)?;
            schwartz_at_radius = Some(SchwartzReport {
                lambda: format_rational(&q),
                total: s.total,
                per_atom: s.per_atom,
            });
        }
        if let Some(c) = critical {
            ascent_matches_exact = c.ascent_exact.map(|e| e == c.ascent);
        }
    }

    let report = OracleReport {
        invariant_sets_agree,
        set_predicates_agree,
        atom_characterizations_agree: chars.agree,
        reachability_agrees,
        invariant_set_count: fam.invariant.len(),
        convex_set_count: fam.convex.len(),
        admissible_set_count: fam.admissible.len(),
        irreducible_set_count: fam.irreducible.len(),
        schwartz_at_radius,
        ascent_matches_exact,
    };
    let checks = [
        ("invariant sets are down-closed unions of atoms", report.invariant_sets_agree),
        ("set predicates match their definitions", report.set_predicates_agree),
        ("equivalent characterizations of atoms", report.atom_characterizations_agree),
        ("future equals boolean reachability", report.reachability_agrees),
        ("ascent equals the maximal critical height", report.ascent_matches_exact != Some(false)),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(Error::invariant(name, "oracle disagreement"));
    }
    Ok(report)
}

/// Runs every analysis stage on `matrix`.
pub fn analyze(
    matrix: NonnegativeMatrix,
    input: InputDescriptor,
    opts: &AnalysisOptions,
) -> Result<StructureReport> {
    let tol = &opts.tolerances;
    let op = Operator::with_threshold(matrix, opts.support_threshold);
    op.poset().check_order_characterizations(op.graph())?;
    let profile = SpectralProfile::compute(&op, tol)?;

    let atoms = (0..op.atom_count())
        .map(|a| {
            let s = &profile.atoms[a];
            AtomReport {
                id: a,
                members: op.atom(a).to_vec(),
                rho: Num(s.rho),
                nonzero: s.nonzero,
                distinguished: s.distinguished,
                left_distinguished: s.left_distinguished,
                critical: s.critical,
                borderline: s.borderline,
            }
        })
        .collect();
    let distinguished_eigenvalues = profile
        .distinguished
        .iter()
        .map(|g| EigenvalueReport {
            lambda: Num(g.lambda),
            atoms: g.atoms.clone(),
            vectors: g.vectors.iter().map(|v| nums(v)).collect(),
        })
        .collect();

    let positive = profile.rho_t > 0.0;
    let (mult_at_radius, monatomicity, critical) = if positive {
        let mult = multiplicity_at_radius(&op, &profile)?;
        let v = classify_monatomic(&op, &profile)?;
        let mono = MonatomicityReport {
            monatomic: v.is_monatomic,
            nonzero_atom: v.nonzero_atom.as_ref().map(IndexSet::to_vec),
            right_u: v.right_u.as_deref().map(nums),
            left_v: v.left_v.as_deref().map(nums),
            nonzero_atoms: v.evidence.nonzero_atoms,
            right_distinguished: v.evidence.right_distinguished,
            left_distinguished: v.evidence.left_distinguished,
            supports_intersect: v.evidence.supports_intersect,
            condition_single_nonzero_atom: v.evidence.single_nonzero_atom,
            condition_unique_and_simple: v.evidence.unique_and_simple,
            condition_unique_and_overlapping: v.evidence.unique_and_overlapping,
        };
        let c = CriticalStructure::compute(&op, &profile)?;
        let exact = if op.matrix().is_exact() {
            ascent_exact(&op, &profile)?
        } else {
            None
        };
        let crit = CriticalReport {
            critical_atoms: c.critical_atoms,
            covers: c.covers,
            heights: c.heights,
            ascent: c.ascent,
            ascent_exact: exact,
            indices: c.indices,
            basis_certified: c.basis_certified,
            basis_condition: Num(c.basis_condition),
            basis: c.basis.iter().map(|v| nums(v)).collect(),
            basis_matrix: c.basis_matrix.iter().map(|v| nums(v)).collect(),
        };
        (Some(mult), Some(mono), Some(crit))
    } else {
        (None, None, None)
    };

    let periodicity = match opts.power {
        None => None,
        Some(p) => {
            let g = op.graph();
            let power_atoms = power_matrix_atoms(g, p)?.member_lists();
            let mut per_atom = Vec::new();
            for a in 0..op.atom_count() {
                if !profile.atoms[a].nonzero {
                    continue;
                }
                let d = cyclic_classes(g, op.atom(a), p)?;
                per_atom.push(CyclicReport {
                    atom: a,
                    period: d.period,
                    d: d.d,
                    classes: d.classes.iter().map(IndexSet::to_vec).collect(),
                });
            }
            Some(PeriodicityReport {
                power: p,
                power_atoms,
                atoms: per_atom,
            })
        }
    };

    let invariant = invariant_sets(&op);
    let oracle = if opts.oracle {
        Some(run_oracle(&op, &profile, critical.as_ref(), &invariant)?)
    } else {
        None
    };

    Ok(StructureReport {
        schema: SCHEMA_VERSION,
        input,
        backend: op.matrix().backend(),
        n: op.dim(),
        tolerances: ToleranceReport {
            rtol: Num(tol.rtol),
            atol: Num(tol.atol),
            pos_tol: Num(tol.pos_tol),
            support_threshold: Num(opts.support_threshold),
            max_iters: tol.max_iters,
        },
        atoms,
        covers: op.poset().cover_pairs(),
        invariant_sets: invariant,
        rho_t: Num(profile.rho_t),
        rho_t_exact: rational_radius(&op, &profile).map(|q| format_rational(&q)),
        ambiguous: profile.ambiguous,
        distinguished_eigenvalues,
        mult_at_radius,
        monatomicity,
        critical,
        periodicity,
        oracle,
    })
}

fn stringify_floats(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().expect("f64 number");
            *v = Value::String(format!("{x}"));
        }
        Value::Array(items) => items.iter_mut().for_each(stringify_floats),
        Value::Object(map) => map.values_mut().for_each(stringify_floats),
        _ => {}
    }
}

impl StructureReport {
    /// Canonical JSON value: sorted keys; on the exact backend every float
    /// scalar becomes a decimal string.
    pub fn to_value(&self) -> Result<Value> {
        let mut v = serde_json::to_value(self)?;
        if self.backend == Backend::ExactRational {
            stringify_floats(&mut v);
        }
        Ok(v)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.to_value()?)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        if report.schema != SCHEMA_VERSION {
            return Err(Error::Input(format!("unsupported report schema {}", report.schema)));
        }
        Ok(report)
    }

    /// Graphviz rendering of the atom order: one node per atom labeled with
    /// its radius, an arrow from each atom to the atoms it covers,
    /// distinguished atoms outlined thick and critical atoms filled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph atoms {\n  rankdir=TB;\n  node [shape=ellipse];\n");
        for a in &self.atoms {
            let members = a.members.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            let _ = write!(out, "  a{} [label=\"{}\\n{{{}}}\"", a.id, short(a.rho.0), members);
            if a.distinguished {
                out.push_str(", penwidth=3");
            }
            if a.critical {
                out.push_str(", style=filled, fillcolor=\"#f4a3a3\"");
            }
            out.push_str("];\n");
        }
        for (upper, lower) in &self.covers {
            let _ = writeln!(out, "  a{upper} -> a{lower};");
        }
        out.push_str("}\n");
        out
    }
}

/// Radius label with at most six significant digits.
fn short(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*}", (5 - x.abs().log10().floor() as i32).max(0) as usize, x);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
