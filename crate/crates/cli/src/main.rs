use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclefrac::decomposer::SystemChoice;
use cyclefrac::hypergraph::{gen_complete, gen_lowerbound_example, gen_random_min_codegree};
use cyclefrac::transitions::{certify_and_resample, default_base_length, CERTIFY_ATTEMPTS};
use cyclefrac::{
    average_decompositions, example_structure_check, lp_oracle, rational, verify, DecompositionReport, Error,
    Hypergraph, LabeledExample, OracleOutcome, PipelineConfig, Rational, TransitionSystem, WeightFunction,
};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "cyclefrac", version, about = "Fractional tight-cycle decompositions of k-uniform hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Sample an r-regular transition system and certify its connectivity.
    Certify(CertifyArgs),
    /// Run the adjustment pipeline and emit the weights with a report.
    Decompose(DecomposeArgs),
    /// Check a weight file against an instance.
    Verify(VerifyArgs),
    /// Decide feasibility with the exact LP.
    Oracle(OracleArgs),
    /// Structural report for the lower-bound construction.
    Example(ExampleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Complete,
    Random,
    Example,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "complete")]
    model: Model,
    /// Minimum codegree target for `--model random`.
    #[arg(long)]
    delta: Option<usize>,
    /// Density of the H₀,₂ part for `--model example`.
    #[arg(long, default_value_t = 0.15)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    zeta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    r: usize,
    /// Certification length; defaults to the smallest length at which r^(ℓ−1) ≥ 8·e(H).
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    ell: usize,
    /// Regularity of the sampled transition systems; the full system is used when absent.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long = "m-cap", default_value_t = 3)]
    m_cap: usize,
    #[arg(long, default_value = "1/2", value_parser = parse_rational)]
    mu: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Weight file, either bare or the output of `decompose`.
    #[arg(long)]
    weights: PathBuf,
    #[arg(long, default_value = "1/2", value_parser = parse_rational)]
    mu: Rational,
    /// Regularity used for the weight envelope.
    #[arg(long)]
    r: Option<usize>,
    /// Transition system, either bare or the output of `certify`; restricts the
    /// envelope to compatible cycles.
    #[arg(long)]
    system: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    ell: usize,
    /// Time budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    budget: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExampleArgs {
    /// Labeled instance from `gen --model example`; generated from the flags below when absent.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 12)]
    n: u32,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    ell: usize,
    #[arg(long, default_value_t = 0.15)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    zeta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

/// Failure carried to `main`: exit code plus a one-line JSON body.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 1, kind: "input", message: message.into() }
    }

    fn refusal(message: impl Into<String>) -> Self {
        Failure { code: 2, kind: "refusal", message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::input(e.to_string())
        } else {
            Failure::refusal(e.to_string())
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn parse_rational(text: &str) -> Result<Rational, String> {
    let normalized = match text.split_once('.') {
        Some((whole, frac)) if !text.contains('/') => {
            let digits = format!("{whole}{frac}");
            format!("{digits}/1{}", "0".repeat(frac.len()))
        }
        _ => text.to_string(),
    };
    rational::parse(&normalized).ok_or_else(|| format!("{text:?} is not a rational number"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<Hypergraph, Failure> {
    Ok(Hypergraph::from_json(&read(path)?)?)
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => match writeln!(io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::input(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn emit_json<T: Serialize>(output: &Output, value: &T) -> Result<(), Failure> {
    if output.format == Format::Csv {
        return Err(Failure::input("csv output is available for decompose only"));
    }
    emit(output, &serde_json::to_string(value).expect("output serializes"))
}

fn csv_cell<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn runs_csv(report: &DecompositionReport) -> String {
    let mut out = String::from("seed,zeta,alpha_compat,min_weight,exact_cover,length_condition,adjustment_condition");
    for run in &report.runs {
        out.push('\n');
        out.push_str(
            &[
                csv_cell(run.seed),
                csv_cell(run.zeta),
                csv_cell(run.alpha_compat),
                csv_cell(run.min_weight.as_ref().map(rational::to_string)),
                run.exact_cover.to_string(),
                csv_cell(run.length_condition),
                csv_cell(run.adjustment_condition),
            ]
            .join(","),
        );
    }
    out
}

fn cmd_gen(a: &GenArgs) -> CmdResult {
    let text = match a.model {
        Model::Complete => gen_complete(a.n, a.k)?.to_json(),
        Model::Random => {
            let delta = a.delta.ok_or_else(|| Failure::input("--model random needs --delta"))?;
            gen_random_min_codegree(a.n, a.k, delta, a.seed)?.to_json()
        }
        Model::Example => gen_lowerbound_example(a.n, a.k, a.eps, a.zeta, a.seed)?.to_json(),
    };
    if a.output.format == Format::Csv {
        return Err(Failure::input("csv output is available for decompose only"));
    }
    emit(&a.output, &text)?;
    Ok(0)
}

fn cmd_certify(a: &CertifyArgs) -> CmdResult {
    let h = read_instance(&a.input)?;
    if a.r == 0 || !a.r.is_multiple_of(2) {
        return Err(Failure::input(format!("r = {} must be even and positive", a.r)));
    }
    let base = a.ell.unwrap_or_else(|| default_base_length(&h, a.r));
    let (t, report) = certify_and_resample(&h, a.r, base, a.seed, CERTIFY_ATTEMPTS)?;
    emit_json(&a.output, &json!({ "certification": report, "system": t.to_file(&h) }))?;
    Ok(0)
}

fn cmd_decompose(a: &DecomposeArgs) -> CmdResult {
    let h = read_instance(&a.input)?;
    let mut cfg = match a.r {
        Some(r) => PipelineConfig::new(a.ell, r, a.m_cap, a.seed),
        None => PipelineConfig::full(a.ell, a.m_cap, a.seed),
    };
    cfg.runs = a.runs;
    cfg.mu = a.mu.clone();
    if cfg.system == SystemChoice::Full && a.runs > 1 {
        return Err(Failure::input("repeated runs need a sampled system (--r)"));
    }
    let (w, report) = average_decompositions(&h, &cfg)?;
    match a.output.format {
        Format::Csv => emit(&a.output, &runs_csv(&report))?,
        Format::Json => emit_json(
            &a.output,
            &json!({ "config": cfg, "weights": w.to_json_value(), "report": report }),
        )?,
    }
    Ok(if report.is_exact_cover { 0 } else { 2 })
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let h = read_instance(&a.input)?;
    let value: Value =
        serde_json::from_str(&read(&a.weights)?).map_err(|e| Failure::input(format!("weights JSON: {e}")))?;
    let weights = value.get("weights").unwrap_or(&value);
    let w = WeightFunction::from_json_value(&h, weights)?;
    let system = match &a.system {
        Some(path) => {
            let value: Value =
                serde_json::from_str(&read(path)?).map_err(|e| Failure::input(format!("system JSON: {e}")))?;
            let file = value.get("system").unwrap_or(&value);
            Some(TransitionSystem::from_json(&h, &file.to_string())?)
        }
        None => None,
    };
    let r = a.r.or_else(|| system.as_ref().and_then(|t| t.regularity()));
    let report = verify(&h, &w, w.ell(), &a.mu, r, system.as_ref())?;
    emit_json(&a.output, &report)?;
    Ok(if report.is_exact_cover { 0 } else { 2 })
}

fn cmd_oracle(a: &OracleArgs) -> CmdResult {
    let h = read_instance(&a.input)?;
    if !a.budget.is_finite() || a.budget < 0.0 {
        return Err(Failure::input(format!("budget {} must be a nonnegative number of seconds", a.budget)));
    }
    let outcome = lp_oracle(&h, a.ell, Duration::from_secs_f64(a.budget))?;
    emit_json(&a.output, &outcome.to_json_value(&h))?;
    Ok(if matches!(outcome, OracleOutcome::Feasible(_)) { 0 } else { 2 })
}

fn cmd_example(a: &ExampleArgs) -> CmdResult {
    let le = match &a.input {
        Some(path) => LabeledExample::from_json(&read(path)?)?,
        None => gen_lowerbound_example(a.n, a.k, a.eps, a.zeta, a.seed)?,
    };
    let report = example_structure_check(&le, a.ell)?;
    emit_json(&a.output, &report)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let message = text
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ")
                .trim_start_matches("error: ")
                .to_string();
            eprintln!("{}", json!({ "error": "input", "message": message }));
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Example(a) => cmd_example(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
