//! Matrix and kernel data model, file formats and built-in fixtures.

pub mod fixtures;
mod index_set;
pub mod kernel;
pub mod market;
pub(crate) mod matrix;

pub use fixtures::builtin_example;
pub use index_set::IndexSet;
pub use kernel::{discretize_kernel, discretize_kernel_exact, Kernel, KernelSpec};
pub use market::{load_matrix_market, load_matrix_market_exact, write_matrix_market};
pub use matrix::{Backend, NonnegativeMatrix};
