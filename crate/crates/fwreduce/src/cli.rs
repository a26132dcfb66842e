//! Command-line front end.
//!
//! Subcommands: `reduce` (run a problem file and print the transformed
//! Hamiltonian), `verify` (compare against a named reference, exit 0 iff the
//! diff is empty), `numcheck` (order-scaling certification), `references`
//! (dump the reference expressions as JSON).
//!
//! Exit codes: 0 success, 1 verification/certification failure, 2 usage or
//! parse error, 3 internal (divergence, evaluation) error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::engine::{self, ReductionConfig, ReductionTrace};
use crate::expr::Expression;
use crate::oracle::{self, MatrixAssignment};
use crate::problem::{parse_problem, ProblemFile};
use crate::references::{diff_report, reference_expression, ReferenceId};
use crate::render::{render, Format};
use crate::table::SymbolTable;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser)]
#[command(
    name = "fwreduce",
    about = "Symbolic 1/c reduction of two-fermion Hamiltonians with numeric certification",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ReduceOpts {
    /// Problem file.
    file: PathBuf,
    /// Override the generator sequence, e.g. `oe,eo,oo`.
    #[arg(long)]
    sequence: Option<String>,
    /// Override the truncation order, e.g. -4.
    #[arg(long)]
    trunc: Option<i32>,
    /// Apply the even-even cleanup transformation.
    #[arg(long)]
    cleanup: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the reduction described by a problem file.
    Reduce {
        #[command(flatten)]
        opts: ReduceOpts,
        /// Output format.
        #[arg(long, default_value = "text")]
        emit: String,
        /// Write the result here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the full reduction trace (JSON) for numeric replay.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Reduce and compare against a named reference expression.
    Verify {
        #[command(flatten)]
        opts: ReduceOpts,
        /// Reference id: eq4, eq6, eq7, eq8 or eq9.
        #[arg(long)]
        against: String,
    },
    /// Numeric unitary-equivalence certification by order scaling.
    Numcheck {
        /// Problem file.
        file: PathBuf,
        /// RNG seed for the matrix draw.
        #[arg(long)]
        seed: Option<u64>,
        /// Auxiliary dimension per tensor factor.
        #[arg(long = "aux-dim")]
        aux_dim: Option<usize>,
        /// Comma-separated sweep values, e.g. `8,16,32,64,128`.
        #[arg(long)]
        c: Option<String>,
    },
    /// Dump the built-in reference expressions.
    References {
        /// Output format (json only).
        #[arg(long, default_value = "json")]
        emit: String,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: msg.into(),
    }
}

fn internal(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: msg.into(),
    }
}

fn load_problem(path: &Path) -> Result<ProblemFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn apply_overrides(problem: &mut ProblemFile, opts: &ReduceOpts) -> Result<(), Failure> {
    if let Some(seq) = &opts.sequence {
        problem.config.sequence = seq
            .split(',')
            .map(|s| crate::engine::SectorKind::from_str(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(usage)?;
    }
    if let Some(t) = opts.trunc {
        problem.config.trunc_order = t;
    }
    if opts.cleanup {
        problem.config.cleanup = true;
    }
    Ok(())
}

fn run_reduction(problem: &ProblemFile) -> Result<ReductionTrace, Failure> {
    let r = if problem.one_body {
        engine::one_body_reduce(&problem.hamiltonian, problem.config.trunc_order)
    } else {
        engine::reduce(&problem.hamiltonian, &problem.config)
    };
    r.map_err(|e| internal(format!("reduction failed: {e}")))
}

fn emit_expression(expr: &Expression, emit: &str) -> Result<String, Failure> {
    let format = match emit {
        "text" => Format::Text,
        "latex" => Format::Latex,
        "json" => Format::Json,
        other => return Err(usage(format!("unknown emit format `{other}`"))),
    };
    Ok(render(expr, format))
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn cmd_reduce(
    opts: &ReduceOpts,
    emit: &str,
    out: &Option<PathBuf>,
    trace_out: &Option<PathBuf>,
) -> Result<i32, Failure> {
    let mut problem = load_problem(&opts.file)?;
    apply_overrides(&mut problem, opts)?;
    let trace = run_reduction(&problem)?;
    let rendered = emit_expression(&trace.transformed, emit)?;
    write_or_print(out, &rendered)?;
    if let Some(p) = trace_out {
        std::fs::write(p, trace.to_json())
            .map_err(|e| internal(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(opts: &ReduceOpts, against: &str) -> Result<i32, Failure> {
    let id = ReferenceId::from_str(against).map_err(usage)?;
    let mut problem = load_problem(&opts.file)?;
    apply_overrides(&mut problem, opts)?;
    let trace = run_reduction(&problem)?;
    let table = &problem.table;
    let (candidate, reference) = match id {
        ReferenceId::Eq4 | ReferenceId::Eq6 | ReferenceId::Eq7 => {
            let reference =
                reference_expression(id, table).map_err(|e| usage(e.to_string()))?;
            (trace.transformed.clone(), reference)
        }
        ReferenceId::Eq8 => {
            // Candidate: the surplus of this run over the canonical
            // fourth-order form.
            let base = reference_expression(ReferenceId::Eq6, table)
                .map_err(|e| usage(e.to_string()))?;
            let reference =
                reference_expression(ReferenceId::Eq8, table).map_err(|e| usage(e.to_string()))?;
            (&trace.transformed - &base, reference)
        }
        ReferenceId::Eq9 => {
            let s_ee = engine::cleanup_generator(&trace)
                .map_err(|e| internal(format!("cleanup generator: {e}")))?;
            let reference =
                reference_expression(ReferenceId::Eq9, table).map_err(|e| usage(e.to_string()))?;
            (s_ee.truncate(problem.config.trunc_order), reference)
        }
        other => {
            return Err(usage(format!(
                "`verify` supports eq4, eq6, eq7, eq8, eq9; `{}` is only available via `references`",
                other
            )))
        }
    };
    let report = diff_report(&candidate, &reference);
    print!("{report}");
    if report.is_empty() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_VERIFY_FAILED)
    }
}

#[derive(Serialize)]
struct NumcheckReport<'a> {
    config: &'a ReductionConfig,
    one_body: bool,
    m1: f64,
    m2: f64,
    aux_dim: usize,
    seed: u64,
    c_values: &'a [f64],
    residuals: Vec<f64>,
    relative_residuals: Vec<f64>,
    slope: f64,
    threshold: f64,
    pass: bool,
}

fn cmd_numcheck(
    file: &Path,
    seed: Option<u64>,
    aux_dim: Option<usize>,
    c: &Option<String>,
) -> Result<i32, Failure> {
    let mut problem = load_problem(file)?;
    if let Some(s) = seed {
        problem.numeric.seed = s;
    }
    if let Some(a) = aux_dim {
        problem.numeric.aux_dim = a;
    }
    if let Some(list) = c {
        problem.numeric.c_values = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("bad c value `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
    }
    let trace = run_reduction(&problem)?;
    let num = &problem.numeric;
    let base = MatrixAssignment::random(
        &problem.table,
        num.m1,
        num.m2,
        num.c_values[0],
        num.aux_dim,
        num.seed,
    )
    .map_err(|e| internal(e.to_string()))?;
    let report = oracle::order_scaling_slope(&problem.hamiltonian, &trace, &base, &num.c_values)
        .map_err(|e| internal(e.to_string()))?;
    // The kept terms are exact through the truncation order, so the
    // remainder must decay at least half an order faster.
    let threshold = problem.config.trunc_order as f64 - 0.5;
    let pass = report.slope <= threshold;
    let json = NumcheckReport {
        config: &problem.config,
        one_body: problem.one_body,
        m1: num.m1,
        m2: num.m2,
        aux_dim: num.aux_dim,
        seed: num.seed,
        c_values: &num.c_values,
        residuals: report.points.iter().map(|p| p.absolute).collect(),
        relative_residuals: report.points.iter().map(|p| p.relative).collect(),
        slope: report.slope,
        threshold,
        pass,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&json).expect("report serializes")
    );
    for p in &report.points {
        eprintln!(
            "c = {:8.1}  residual = {:.3e}  (relative {:.3e}){}",
            p.c,
            p.absolute,
            p.relative,
            if p.saturated { "  [saturated]" } else { "" }
        );
    }
    eprintln!(
        "slope {:.3} over {} points; threshold {:.1}: {}",
        report.slope,
        report.fitted_points,
        threshold,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// Tables used for the golden dump of each reference id.
pub fn reference_table(id: ReferenceId) -> std::sync::Arc<SymbolTable> {
    match id {
        ReferenceId::Eq7 => SymbolTable::one_body(),
        ReferenceId::Eq3Oe | ReferenceId::Eq3Eo | ReferenceId::Eq3Oo | ReferenceId::Eq4 => {
            SymbolTable::two_body(false)
        }
        _ => SymbolTable::two_body(true),
    }
}

pub fn references_json() -> String {
    let mut map = BTreeMap::new();
    for id in ReferenceId::ALL {
        let table = reference_table(id);
        let expr = reference_expression(id, &table).expect("builtin reference builds");
        map.insert(id.name(), expr.to_wire());
    }
    serde_json::to_string_pretty(&map).expect("references serialize")
}

fn cmd_references(emit: &str, out: &Option<PathBuf>) -> Result<i32, Failure> {
    if emit != "json" {
        return Err(usage(format!("references only supports --emit json, got `{emit}`")));
    }
    write_or_print(out, &references_json())?;
    Ok(EXIT_OK)
}

/// Entry point used by the binary; returns the process exit code.
pub fn run_from_env() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version through the error value.
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.cmd {
        Cmd::Reduce {
            opts,
            emit,
            out,
            trace_out,
        } => cmd_reduce(opts, emit, out, trace_out),
        Cmd::Verify { opts, against } => cmd_verify(opts, against),
        Cmd::Numcheck {
            file,
            seed,
            aux_dim,
            c,
        } => cmd_numcheck(file, *seed, *aux_dim, c),
        Cmd::References { emit, out } => cmd_references(emit, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
