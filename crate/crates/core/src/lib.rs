//! Atomic and spectral structure of nonnegative matrices.
//!
//! Given a nonnegative matrix (or a grid discretization of a nonnegative
//! kernel on `[0,1]^2`) this crate computes its atoms, the order on atoms,
//! futures and pasts, convex/invariant/admissible sets, per-atom spectral
//! radii and Perron vectors, distinguished atoms with the cone of nonnegative
//! eigenvectors, monatomicity, critical atoms, the ascent at the spectral
//! radius with an adapted basis of the generalized eigenspace, and the cyclic
//! splitting of atoms under matrix powers. Brute-force oracles in [`oracle`]
//! recompute the structural facts independently at small sizes.

pub mod atoms;
pub mod critical;
pub mod error;
mod linalg;
pub mod model;
mod operator;
pub mod oracle;
pub mod periodicity;
pub mod report;
pub mod sets;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{IndexSet, NonnegativeMatrix};
pub use operator::{Operator, DEFAULT_SUPPORT_THRESHOLD};
pub use sets::SupportGraph;
pub use spectral::{SpectralProfile, Tolerances};
