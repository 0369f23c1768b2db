//! Browser bindings: analyze a built-in example, a pasted Matrix Market
//! matrix or a discretized kernel. Every call returns JSON holding the dense
//! matrix (for the heatmap) and the full structure report.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use nonneg_atoms::model::{builtin_example, discretize_kernel, load_matrix_market, Kernel, KernelSpec};
use nonneg_atoms::report::{analyze, AnalysisOptions, InputDescriptor};
use nonneg_atoms::NonnegativeMatrix;

/// Largest dimension accepted from the page.
pub const MAX_DIM: usize = 256;

fn options(power: u32) -> AnalysisOptions {
    AnalysisOptions {
        power: (power > 0).then_some(power as usize),
        ..AnalysisOptions::default()
    }
}

fn render(matrix: NonnegativeMatrix, input: InputDescriptor, power: u32) -> Result<String, String> {
    let n = matrix.dim();
    if n > MAX_DIM {
        return Err(format!("dimension {n} exceeds the demo limit {MAX_DIM}"));
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| matrix.row(i).to_vec()).collect();
    let report = analyze(matrix, input, &options(power)).map_err(|e| e.to_string())?;
    let dot = report.to_dot();
    let report: Value = report.to_value().map_err(|e| e.to_string())?;
    Ok(json!({ "matrix": rows, "report": report, "dot": dot }).to_string())
}

pub fn example_json(name: &str, power: u32) -> Result<String, String> {
    let m = builtin_example(name).map_err(|e| e.to_string())?.to_float();
    render(m, InputDescriptor::Example { name: name.into() }, power)
}

pub fn matrix_market_json(text: &str, power: u32) -> Result<String, String> {
    let m = load_matrix_market(text).map_err(|e| e.to_string())?;
    render(m, InputDescriptor::Inline, power)
}

pub fn kernel_json(kernel: &str, grid: usize, power: u32) -> Result<String, String> {
    let k = Kernel::by_name(kernel).map_err(|e| e.to_string())?;
    let spec = KernelSpec::new(k, grid);
    let m = discretize_kernel(&spec).map_err(|e| e.to_string())?;
    render(
        m,
        InputDescriptor::Kernel {
            kernel: kernel.into(),
            grid,
        },
        power,
    )
}

/// Analyzes a built-in example. `power = 0` skips the cyclic splitting.
#[wasm_bindgen(js_name = analyzeExample)]
pub fn analyze_example(name: &str, power: u32) -> Result<String, JsError> {
    example_json(name, power).map_err(|e| JsError::new(&e))
}

/// Analyzes a Matrix Market document.
#[wasm_bindgen(js_name = analyzeMatrixMarket)]
pub fn analyze_matrix_market(text: &str, power: u32) -> Result<String, JsError> {
    matrix_market_json(text, power).map_err(|e| JsError::new(&e))
}

/// Discretizes a kernel on an `m`-cell midpoint grid and analyzes it.
#[wasm_bindgen(js_name = analyzeKernel)]
pub fn analyze_kernel(kernel: &str, grid: usize, power: u32) -> Result<String, JsError> {
    kernel_json(kernel, grid, power).map_err(|e| JsError::new(&e))
}
