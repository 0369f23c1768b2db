use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};

use nonneg_atoms::model::{
    builtin_example, discretize_kernel, discretize_kernel_exact, load_matrix_market,
    load_matrix_market_exact, Kernel, KernelSpec,
};
use nonneg_atoms::report::{analyze, AnalysisOptions, InputDescriptor};
use nonneg_atoms::{Error, NonnegativeMatrix, Result, Tolerances};

/// Atoms, spectral radii, distinguished atoms, ascent and cyclic structure
/// of a nonnegative matrix.
///
/// Exit codes: 0 success, 1 input error, 2 invariant violation.
#[derive(Parser, Debug)]
#[command(name = "nonneg-atoms", version)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "example", "kernel"])))]
struct Args {
    /// Matrix Market file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Built-in example: fig-m-graph-6, two-cycle, graph-supp, fig-dist,
    /// volterra-<m>, kernel-k1-<m>, kernel-k3-<m>.
    #[arg(long)]
    example: Option<String>,
    /// Kernel name (volterra, k1, k3, zero) or a JSON kernel spec file.
    #[arg(long)]
    kernel: Option<String>,
    /// Grid size for --kernel.
    #[arg(long)]
    grid: Option<usize>,
    /// Report destination; `-` for stdout. Defaults to stdout when --dot is absent.
    #[arg(long)]
    report: Option<String>,
    /// Write the atom order as Graphviz DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Split atoms under the n-th matrix power.
    #[arg(long, value_name = "N")]
    power: Option<usize>,
    /// Exact rational backend.
    #[arg(long)]
    exact: bool,
    /// Brute-force cross-checks (n <= 16).
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 1e-10)]
    rtol: f64,
    /// Radius ties, relative to the spectral radius.
    #[arg(long, default_value_t = 1e-9)]
    atol: f64,
    /// Float entries at or below this fraction of the largest entry are zero.
    #[arg(long, default_value_t = 1e-12)]
    support_threshold: f64,
}

fn load(args: &Args) -> Result<(NonnegativeMatrix, InputDescriptor)> {
    if let Some(path) = &args.input {
        let text = fs::read_to_string(path)?;
        let m = if args.exact {
            load_matrix_market_exact(&text)?
        } else {
            load_matrix_market(&text)?
        };
        let path = path.display().to_string();
        return Ok((m, InputDescriptor::MatrixMarket { path }));
    }
    if let Some(name) = &args.example {
        let m = builtin_example(name)?;
        let m = if args.exact { m } else { m.to_float() };
        return Ok((m, InputDescriptor::Example { name: name.clone() }));
    }
    let kernel = args.kernel.as_deref().expect("clap requires a source");
    let mut spec = if kernel.ends_with(".json") {
        KernelSpec::from_json(&fs::read_to_string(kernel)?)?
    } else {
        let grid = args
            .grid
            .ok_or_else(|| Error::Input("--kernel needs --grid <m>".into()))?;
        KernelSpec::new(Kernel::by_name(kernel)?, grid)
    };
    if let Some(g) = args.grid {
        spec.grid = g;
    }
    let m = if args.exact {
        discretize_kernel_exact(&spec)?
    } else {
        discretize_kernel(&spec)?
    };
    let desc = InputDescriptor::Kernel {
        kernel: spec.kernel.name().to_string(),
        grid: spec.grid,
    };
    Ok((m, desc))
}

fn run(args: &Args) -> Result<()> {
    for (flag, v) in [
        ("--rtol", args.rtol),
        ("--atol", args.atol),
        ("--support-threshold", args.support_threshold),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Input(format!("{flag} must be a nonnegative number")));
        }
    }
    if args.power == Some(0) {
        return Err(Error::Input("--power must be at least 1".into()));
    }
    let (matrix, input) = load(args)?;
    let opts = AnalysisOptions {
        tolerances: Tolerances {
            rtol: args.rtol,
            atol: args.atol,
            ..Tolerances::default()
        },
        support_threshold: args.support_threshold,
        power: args.power,
        oracle: args.oracle,
    };
    let report = analyze(matrix, input, &opts)?;
    if let Some(path) = &args.dot {
        fs::write(path, report.to_dot())?;
    }
    match args.report.as_deref() {
        Some("-") => print!("{}", report.to_json()?),
        Some(path) => fs::write(path, report.to_json()?)?,
        None if args.dot.is_none() => print!("{}", report.to_json()?),
        None => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invariant_violation() { 2 } else { 1 })
        }
    }
}
