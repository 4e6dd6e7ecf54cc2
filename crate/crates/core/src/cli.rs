//! Batch command-line frontend.
//!
//! JSON in, JSON out: every subcommand reads and writes instance/report
//! documents and prints a short human summary to stdout. Exit codes are
//! fixed for CI use: 0 all audits pass, 1 audit failure, 2 schema/input
//! error, 3 out-of-regime input (ε > 1, norm violation, collapsed gap).
//!
//! The only environment knob is `ACHAM_OUTPUT_PRECISION`: when set to a
//! digit count, floats in written JSON files are rounded to that many
//! significant digits (default: full shortest-roundtrip precision).

use crate::apps::{
    certify_gibbs_reduction, commuting_evolution, reduce_promise, simulation_split, PromiseInstance,
};
use crate::error::{Error, Result};
use crate::generators::{generate, realized_epsilon, GeneratorSpec};
use crate::linalg::{matrix_exponential, operator_norm, I_C};
use crate::model::InstanceDoc;
use crate::rounding::{round, COMMUTE_TOL};
use crate::verify::{audit_bounds, verify_commuting};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "acham", version, about = "Round almost-commuting 2-local qubit Hamiltonians to commuting form, with audited error bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance document from a named family.
    Generate(GenerateArgs),
    /// Round an instance to commuting form, writing the output instance and
    /// the audit report.
    Round(RoundArgs),
    /// Re-derive and check every bound for an (input, rounded) pair.
    Verify(VerifyArgs),
    /// Reduce an almost-commuting promise instance to a commuting one.
    Reduce(ReduceArgs),
    /// Certify the Gibbs-sampling reduction at inverse temperature beta.
    Gibbs(GibbsArgs),
    /// Split H into a commuting part and a remainder for fast simulation.
    Split(SplitArgs),
    /// Factorize the time evolution of a commuting instance and check it
    /// against the dense exponential.
    Evolve(EvolveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    TfimChain,
    TfimGrid,
    TriangleFigure,
    TrianglePaper,
    RandomNearCommuting,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Qubit count (tfim-chain, random-near-commuting).
    #[arg(long)]
    pub n: Option<u32>,
    /// Field strength h (tfim families).
    #[arg(long)]
    pub h: Option<f64>,
    /// Grid rows (tfim-grid).
    #[arg(long)]
    pub rows: Option<u32>,
    /// Grid columns (tfim-grid).
    #[arg(long)]
    pub cols: Option<u32>,
    /// Term count (random-near-commuting).
    #[arg(long)]
    pub m: Option<usize>,
    /// Commutator budget (random-near-commuting).
    #[arg(long)]
    pub eps_target: Option<f64>,
    /// PRNG seed (random-near-commuting); ChaCha8, platform-independent.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RoundArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Where to write the acham-report-v1 JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Promised epsilon, or "auto" to use the realized commutator profile.
    #[arg(long, default_value = "auto")]
    pub eps: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub input: PathBuf,
    pub rounded: PathBuf,
    /// Rounding report to cross-check against the re-derived numbers.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Residual-commutator tolerance for the commuting check.
    #[arg(long, default_value_t = COMMUTE_TOL)]
    pub tol: f64,
    /// Where to write the acham-verify-v1 JSON (stdout summary otherwise).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// YES threshold; defaults to the instance document's "a".
    #[arg(long)]
    pub a: Option<f64>,
    /// NO threshold; defaults to the instance document's "b".
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, default_value = "auto")]
    pub eps: String,
}

#[derive(Debug, Args)]
pub struct GibbsArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Simulation time for the cost line.
    #[arg(long)]
    pub t: Option<f64>,
    /// Block-encoding cost parameter for the cost line.
    #[arg(long = "t-block")]
    pub t_block: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct EvolveDoc {
    format: String,
    t: f64,
    n: u32,
    terms: usize,
    /// ||∏ exp(i h_i t) − exp(iHt)||.
    factorization_error: f64,
    /// ||U†U − I||_max of the factorized unitary.
    unitarity_error: f64,
    passed: bool,
}

/// Run a parsed invocation, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Round(args) => cmd_round(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Reduce(args) => cmd_reduce(args),
        Command::Gibbs(args) => cmd_gibbs(args),
        Command::Split(args) => cmd_split(args),
        Command::Evolve(args) => cmd_evolve(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn parse_eps(s: &str) -> Result<Option<f64>> {
    if s == "auto" {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::Schema(format!("--eps expects a number or \"auto\", got {s:?}")))
}

fn cmd_generate(args: GenerateArgs) -> Result<i32> {
    let need = |v: Option<u32>, what: &str| v.ok_or_else(|| Error::Schema(format!("--{what} is required for this family")));
    let spec = match args.family {
        Family::TfimChain => GeneratorSpec::TfimChain { n: need(args.n, "n")?, h: args.h.unwrap_or(0.0) },
        Family::TfimGrid => GeneratorSpec::TfimGrid {
            rows: need(args.rows, "rows")?,
            cols: need(args.cols, "cols")?,
            h: args.h.unwrap_or(0.0),
        },
        Family::TriangleFigure => GeneratorSpec::TriangleFigure,
        Family::TrianglePaper => GeneratorSpec::TrianglePaper,
        Family::RandomNearCommuting => GeneratorSpec::RandomNearCommuting {
            n: need(args.n, "n")?,
            m: args.m.ok_or_else(|| Error::Schema("--m is required for this family".into()))?,
            eps_target: args.eps_target.ok_or_else(|| Error::Schema("--eps-target is required for this family".into()))?,
            seed: args.seed,
        },
    };
    let h = generate(&spec)?;
    let eps = realized_epsilon(&h)?;
    write_json(&args.out, &h.to_doc())?;
    println!(
        "generated {:?}: n = {}, m = {}, realized eps = {eps:.6e} -> {}",
        args.family,
        h.n(),
        h.term_count(),
        args.out.display()
    );
    Ok(0)
}

fn cmd_round(args: RoundArgs) -> Result<i32> {
    let (_, h) = crate::model::read_instance(&args.input)?;
    let eps = parse_eps(&args.eps)?;
    let (rounded, report) = round(&h, eps)?;
    write_json(&args.output, &rounded.to_doc())?;
    if let Some(path) = &args.report {
        write_json(path, &report)?;
    }
    let audit = audit_bounds(&h, &rounded, Some(&report))?;
    let ok = report.bounds_satisfied && audit.passed;
    println!(
        "rounded m = {} terms at eps = {:.6e}: max residual {:.3e}, max per-term distance {:.6e} [{}]",
        h.term_count(),
        report.eps,
        report.max_residual_commutator,
        report
            .per_term
            .iter()
            .map(|p| p.distance_to_input)
            .fold(0.0f64, f64::max),
        if ok { "pass" } else { "FAIL" }
    );
    for f in &audit.failures {
        eprintln!("audit: {f}");
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let (_, h) = crate::model::read_instance(&args.input)?;
    let (_, hhat) = crate::model::read_rounded_instance(&args.rounded)?;
    let report = match &args.report {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Some(serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?)
        }
        None => None,
    };
    let mut verdict = audit_bounds(&h, &hhat, report.as_ref())?;
    if args.tol != COMMUTE_TOL {
        let (ok, residual) = verify_commuting(&hhat, args.tol)?;
        verdict.commuting = ok;
        if !ok {
            verdict
                .failures
                .push(format!("commuting at --tol {:.3e}: residual {residual:.3e}", args.tol));
            verdict.passed = false;
        }
    }
    if let Some(path) = &args.out {
        write_json(path, &verdict)?;
    }
    println!(
        "verify: commuting = {}, global distance = {:.6e}{}, energy shift bound = {:.6e} [{}]",
        verdict.commuting,
        verdict.global_distance,
        if verdict.global_distance_exact { " (dense)" } else { " (summed bound)" },
        verdict.energy_shift_bound,
        if verdict.passed { "pass" } else { "FAIL" }
    );
    for f in &verdict.failures {
        eprintln!("audit: {f}");
    }
    Ok(if verdict.passed { 0 } else { 1 })
}

fn cmd_reduce(args: ReduceArgs) -> Result<i32> {
    let (doc, h) = crate::model::read_instance(&args.input)?;
    let a = args.a.or(doc.a).ok_or_else(|| Error::Schema("no YES threshold: pass --a or put \"a\" in the document".into()))?;
    let b = args.b.or(doc.b).ok_or_else(|| Error::Schema("no NO threshold: pass --b or put \"b\" in the document".into()))?;
    let eps = match parse_eps(&args.eps)? {
        Some(e) => e,
        None => realized_epsilon(&h)?,
    };
    let inst = PromiseInstance::new(h, a, b)?;
    let (reduced, _report) = reduce_promise(&inst, eps)?;
    write_json(&args.output, &reduced.to_doc())?;
    println!(
        "reduced at eps = {eps:.6e}: a' = {:.9}, b' = {:.9}, relative gap {:.6e}",
        reduced.a,
        reduced.b,
        reduced.relative_gap()
    );
    Ok(0)
}

fn cmd_gibbs(args: GibbsArgs) -> Result<i32> {
    let (_, h) = crate::model::read_instance(&args.input)?;
    let cert = certify_gibbs_reduction(&h, args.beta, args.delta)?;
    if let Some(path) = &args.out {
        write_json(path, &cert)?;
    }
    match cert.measured_trace_distance {
        Some(td) => println!(
            "gibbs: distance {:.6e}, continuity bound {:.6e}, measured trace distance {td:.6e}, regime_ok = {}",
            cert.rounding_distance, cert.continuity_bound, cert.regime_ok
        ),
        None => println!(
            "gibbs: distance {:.6e}, continuity bound {:.6e}, regime_ok = {}",
            cert.rounding_distance, cert.continuity_bound, cert.regime_ok
        ),
    }
    Ok(0)
}

fn cmd_split(args: SplitArgs) -> Result<i32> {
    let (_, h) = crate::model::read_instance(&args.input)?;
    let split = simulation_split(&h)?;
    let cost = match (args.t, args.t_block) {
        (Some(t), Some(tb)) => Some((t, tb)),
        (None, None) => None,
        _ => return Err(Error::Schema("--t and --t-block must be given together".into())),
    };
    write_json(&args.output, &split.to_doc(cost))?;
    println!(
        "split: alpha_A = {:.6e}, alpha_B = {:.6e}{}",
        split.alpha_a,
        split.alpha_b,
        if split.alpha_b_exact { " (dense)" } else { " (bound)" }
    );
    Ok(0)
}

fn cmd_evolve(args: EvolveArgs) -> Result<i32> {
    let (_, h) = crate::model::read_rounded_instance(&args.input)?;
    let u = commuting_evolution(&h, args.t)?;
    let dim = u.rows();
    let dense = matrix_exponential(&h.dense_matrix()?, I_C * args.t)?;
    let factorization_error = operator_norm(&u.sub(&dense))?;
    let unitarity_error = u.dagger().mul(&u).sub(&crate::linalg::ComplexMatrix::identity(dim)).max_abs();
    let passed = factorization_error <= 1e-8 && unitarity_error <= 1e-9;
    let doc = EvolveDoc {
        format: "acham-evolve-v1".into(),
        t: args.t,
        n: h.n(),
        terms: h.term_count(),
        factorization_error,
        unitarity_error,
        passed,
    };
    if let Some(path) = &args.out {
        write_json(path, &doc)?;
    }
    println!(
        "evolve t = {}: factorization error {factorization_error:.3e}, unitarity {unitarity_error:.3e} [{}]",
        args.t,
        if passed { "pass" } else { "FAIL" }
    );
    Ok(if passed { 0 } else { 1 })
}

/// Write a JSON document, honoring the ACHAM_OUTPUT_PRECISION override.
fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    if let Ok(spec) = std::env::var("ACHAM_OUTPUT_PRECISION") {
        let digits: usize = spec
            .parse()
            .map_err(|_| Error::Schema(format!("ACHAM_OUTPUT_PRECISION must be a digit count, got {spec:?}")))?;
        round_floats(&mut v, digits.clamp(1, 17));
    }
    let mut text = serde_json::to_string(&v)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn round_floats(v: &mut serde_json::Value, digits: usize) {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    let rounded: f64 = format!("{:.*e}", digits - 1, f).parse().unwrap_or(f);
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *v = serde_json::Value::Number(num);
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(|x| round_floats(x, digits)),
        serde_json::Value::Object(map) => map.values_mut().for_each(|x| round_floats(x, digits)),
        _ => {}
    }
}

/// Read a raw instance document without ingesting it.
pub fn read_doc(path: &Path) -> Result<InstanceDoc> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))
}
