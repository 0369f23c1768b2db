//! Kernels on `[0,1]^2` and their midpoint-rule discretization.
//!
//! `T[i][j] = k(x_i, x_j) / m` with `x_i = (i + 1/2) / m`. The support of the
//! discretized matrix is exactly the sampled support of `k`. Indicator
//! kernels therefore never sample their boundary lines except where a line
//! passes through midpoints, and the discretized Volterra operator has
//! `ρ = 1/m` although the continuum operator is quasi-nilpotent.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::NonnegativeMatrix;
use crate::error::{Error, Result};

pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Kernel {
    /// `1{x >= y}`
    Volterra,
    /// `1{x <= 1/2 <= y <= x + 1/2} + 1{x >= 1/2} 1{y <= x - 1/2}`
    K1,
    /// `1{x <= 1/2 <= y} + 1{y <= 1/2 <= x}`
    K3,
    Zero,
    Custom { name: String, f: KernelFn },
}

impl Kernel {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "volterra" => Ok(Kernel::Volterra),
            "k1" => Ok(Kernel::K1),
            "k3" => Ok(Kernel::K3),
            "zero" => Ok(Kernel::Zero),
            other => Err(Error::Input(format!(
                "unknown kernel `{other}` (expected volterra, k1, k3 or zero)"
            ))),
        }
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Kernel::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Kernel::Volterra => "volterra",
            Kernel::K1 => "k1",
            Kernel::K3 => "k3",
            Kernel::Zero => "zero",
            Kernel::Custom { name, .. } => name,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            Kernel::Volterra => ind(x >= y),
            Kernel::K1 => {
                ind(x <= 0.5 && 0.5 <= y && y <= x + 0.5) + ind(x >= 0.5) * ind(y <= x - 0.5)
            }
            Kernel::K3 => ind(x <= 0.5 && 0.5 <= y) + ind(y <= 0.5 && 0.5 <= x),
            Kernel::Zero => 0.0,
            Kernel::Custom { f, .. } => f(x, y),
        }
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kernel({})", self.name())
    }
}

#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub kernel: Kernel,
    pub grid: usize,
}

/// JSON form: `{"kernel": "volterra" | "k1" | "k3", "grid": m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpecJson {
    pub kernel: String,
    pub grid: usize,
}

impl KernelSpec {
    pub fn new(kernel: Kernel, grid: usize) -> Self {
        KernelSpec { kernel, grid }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: KernelSpecJson = serde_json::from_str(text)?;
        Ok(KernelSpec::new(Kernel::by_name(&raw.kernel)?, raw.grid))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&KernelSpecJson {
            kernel: self.kernel.name().to_string(),
            grid: self.grid,
        })?)
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.grid as f64
    }

    fn sample(&self) -> Result<Vec<f64>> {
        let m = self.grid;
        if m == 0 {
            return Err(Error::Input("grid size must be at least 1".into()));
        }
        let mut out = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let (x, y) = (self.midpoint(i), self.midpoint(j));
                let value = self.kernel.eval(x, y);
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::KernelValue {
                        name: self.kernel.name().to_string(),
                        x,
                        y,
                        value,
                    });
                }
                out.push(value);
            }
        }
        Ok(out)
    }
}

/// Midpoint discretization on the float backend.
pub fn discretize_kernel(spec: &KernelSpec) -> Result<NonnegativeMatrix> {
    let w = 1.0 / spec.grid.max(1) as f64;
    let values = spec.sample()?.into_iter().map(|k| k * w).collect();
    NonnegativeMatrix::from_row_major(spec.grid, values)
}

/// Midpoint discretization with exact entries `k(x_i, x_j) / m`, where each
/// sampled `f64` kernel value is taken exactly.
pub fn discretize_kernel_exact(spec: &KernelSpec) -> Result<NonnegativeMatrix> {
    let m = BigRational::from_integer((spec.grid as i64).into());
    let data = spec
        .sample()?
        .into_iter()
        .map(|k| BigRational::from_float(k).expect("finite") / &m)
        .collect();
    NonnegativeMatrix::from_rational_row_major(spec.grid, data)
}
