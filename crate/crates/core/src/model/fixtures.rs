//! Built-in worked examples. All fixtures use the exact backend.
//!
//! Positive entries that the source only constrains to be `> 0` are set to 1;
//! every structural output depends on the support alone.

use super::kernel::{discretize_kernel_exact, Kernel, KernelSpec};
use super::NonnegativeMatrix;
use crate::error::{Error, Result};

/// Default grid for the kernel fixtures when a name carries no `-<m>` suffix.
pub const DEFAULT_GRID: usize = 4;

pub const EXAMPLE_NAMES: &[&str] = &[
    "fig-m-graph-6",
    "two-cycle",
    "graph-supp",
    "fig-dist",
    "volterra-m",
    "kernel-k1-m",
    "kernel-k3-m",
];

/// Looks up a fixture. Kernel fixtures take their grid from a numeric
/// suffix (`volterra-8`, `kernel-k3-4`); the literal `-m` suffix means
/// [`DEFAULT_GRID`].
pub fn builtin_example(name: &str) -> Result<NonnegativeMatrix> {
    for (prefix, kernel) in [
        ("volterra-", Kernel::Volterra),
        ("kernel-k1-", Kernel::K1),
        ("kernel-k3-", Kernel::K3),
    ] {
        if let Some(rest) = name.strip_prefix(prefix) {
            let m = match rest {
                "m" => DEFAULT_GRID,
                s => s
                    .parse::<usize>()
                    .ok()
                    .filter(|&m| m >= 1)
                    .ok_or_else(|| Error::UnknownExample(name.to_string()))?,
            };
            return discretize_kernel_exact(&KernelSpec::new(kernel, m));
        }
    }
    match name {
        "fig-m-graph-6" => NonnegativeMatrix::from_integer_rows(&[
            vec![0, 1, 0, 0, 0, 0],
            vec![1, 0, 1, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0, 0],
            vec![0, 0, 0, 1, 1, 0],
        ]),
        "two-cycle" => NonnegativeMatrix::from_integer_rows(&[vec![0, 1], vec![1, 0]]),
        "graph-supp" => NonnegativeMatrix::from_integer_rows(&[vec![1, 0], vec![1, 1]]),
        // Six singleton atoms with radii 1,3,2,1,1,1 and covers
        // 0->1, 1->2, 1->3, 2->4, 3->5 (edge j->i is entry (i, j)).
        "fig-dist" => NonnegativeMatrix::from_integer_rows(&[
            vec![1, 0, 0, 0, 0, 0],
            vec![1, 3, 0, 0, 0, 0],
            vec![0, 1, 2, 0, 0, 0],
            vec![0, 1, 0, 1, 0, 0],
            vec![0, 0, 1, 0, 1, 0],
            vec![0, 0, 0, 1, 0, 1],
        ]),
        _ => Err(Error::UnknownExample(name.to_string())),
    }
}
