//! Command-line front end. [`run`] does all the work and returns the exit
//! code with the text to print, so the binary stays a one-liner and the
//! whole surface is testable in-process.
//!
//! Every successful command prints one JSON report with the keys
//! `schema_version`, `command`, `config`, `result`, `seed` and `timing_ms`.
//! Exit codes: 0 success, 1 a gated check failed, 2 bad usage or input.

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{classify, raw_classify, stratified_t_samples, ComposedPhi, EClass, PhiSpec, PlaneMap, ToleranceConfig};
use crate::corpus::run_corpus;
use crate::expr::{parse_expr, Var};
use crate::measure::{SampledFn, Space};
use crate::norms::{compute_norm, MorreyConfig, NormKind, NormSpec, YoungComposition};
use crate::verify::{
    check_chain, check_closure, check_inclusion, check_non_reversal, suite_tolerances, ClosureOp, InclusionMode,
    SuiteReport,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_NODES: usize = 257;
pub const DEFAULT_T_SAMPLES: usize = 33;

#[derive(Debug, Parser)]
#[command(name = "eorlicz", version, about = "Classify E-Orlicz functions, compute their norms, run property suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify φE = Φ∘E into the four E-classes
    Classify(ClassifyArgs),
    /// Compute a norm of a sampled function
    Norm(NormArgs),
    /// Run seeded property suites
    Verify(VerifyArgs),
    /// Check the built-in worked examples
    Corpus,
}

#[derive(Debug, Args)]
struct Composition {
    /// Φ(t, u)
    #[arg(long, allow_hyphen_values = true)]
    phi: String,
    /// First coordinate of E(t, u)
    #[arg(long = "map-t", default_value = "t", allow_hyphen_values = true)]
    map_t: String,
    /// Second coordinate of E(t, u)
    #[arg(long = "map-u", default_value = "u", allow_hyphen_values = true)]
    map_u: String,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    comp: Composition,
    /// Domain Ω as `a,b`
    #[arg(long, allow_hyphen_values = true)]
    omega: String,
    #[arg(long = "t-samples", default_value_t = DEFAULT_T_SAMPLES)]
    t_samples: usize,
    /// Also classify Φ itself (E = identity)
    #[arg(long)]
    raw: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Luxemburg,
    Weak,
    Sobolev,
    Morrey,
    Lorentz,
}

impl From<KindArg> for NormKind {
    fn from(k: KindArg) -> NormKind {
        match k {
            KindArg::Luxemburg => NormKind::Luxemburg,
            KindArg::Weak => NormKind::Weak,
            KindArg::Sobolev => NormKind::Sobolev,
            KindArg::Morrey => NormKind::Morrey,
            KindArg::Lorentz => NormKind::Lorentz,
        }
    }
}

#[derive(Debug, Args)]
struct NormArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[command(flatten)]
    comp: Composition,
    /// f as an expression in t, sampled on the grid
    #[arg(long = "f-expr", conflicts_with = "f_csv", required_unless_present = "f_csv", allow_hyphen_values = true)]
    f_expr: Option<String>,
    /// f as `t,value` rows
    #[arg(long = "f-csv")]
    f_csv: Option<String>,
    /// Domain Ω as `a,b`; defaults to the CSV's range with --f-csv
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<String>,
    #[arg(long, default_value_t = DEFAULT_NODES)]
    nodes: usize,
    /// Sobolev derivative order
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Morrey ball weight φ(r)
    #[arg(long = "phi-weight")]
    phi_weight: Option<String>,
    /// Lorentz weight ω(s)
    #[arg(long)]
    weight: Option<String>,
    /// Weak variant of the family
    #[arg(long)]
    weak: bool,
    /// Morrey ball centers, comma separated
    #[arg(long, allow_hyphen_values = true)]
    centers: Option<String>,
    /// Morrey ball radii, comma separated
    #[arg(long)]
    radii: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Closure,
    Chain,
    Inclusion,
    All,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: usize,
}

/// What the binary prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Serialize)]
struct Report {
    schema_version: u32,
    command: Vec<String>,
    config: Value,
    result: Value,
    seed: Option<u64>,
    timing_ms: f64,
}

/// An input problem, reported with the module it came from.
struct Failure {
    module: &'static str,
    message: String,
}

fn fail(module: &'static str, e: impl ToString) -> Failure {
    Failure {
        module,
        message: e.to_string(),
    }
}

/// Runs one command. `argv[0]` is the program name.
pub fn run<I, S>(argv: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Classify(a) => run_classify(a),
        Command::Norm(a) => run_norm(a),
        Command::Verify(a) => Ok(run_verify(a)),
        Command::Corpus => Ok(run_corpus_command()),
    };
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok((code, config, result, seed)) => {
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: argv,
                config,
                result,
                seed,
                timing_ms,
            };
            Output {
                code,
                stdout: serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                stderr: String::new(),
            }
        }
        Err(f) => Output {
            code: 2,
            stdout: String::new(),
            stderr: format!("error in {}: {}\n", f.module, f.message),
        },
    }
}

type Outcome = Result<(i32, Value, Value, Option<u64>), Failure>;

fn parse_omega(text: &str) -> Result<(f64, f64), Failure> {
    let v = parse_list(text).map_err(|e| fail("cli", format!("--omega: {e}")))?;
    match v[..] {
        [a, b] if a < b => Ok((a, b)),
        _ => Err(fail("cli", format!("--omega: expected `a,b` with a < b, got `{text}`"))),
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", s.trim())))
        .collect()
}

fn composition(c: &Composition) -> Result<ComposedPhi, Failure> {
    let phi = PhiSpec::parse(&c.phi).map_err(|e| fail("expr", format!("--phi: {e}")))?;
    let map = PlaneMap::parse(&c.map_t, &c.map_u).map_err(|e| fail("expr", format!("--map-t/--map-u: {e}")))?;
    Ok(ComposedPhi::new(phi, map))
}

fn run_classify(a: &ClassifyArgs) -> Outcome {
    let omega = parse_omega(&a.omega)?;
    if a.t_samples == 0 {
        return Err(fail("cli", "--t-samples must be positive"));
    }
    let c = composition(&a.comp)?;
    let tols = ToleranceConfig::default().with_t_samples(a.t_samples);
    let ts = stratified_t_samples(omega.0, omega.1, a.t_samples);
    let report = classify(&c, &ts, &tols).map_err(|e| fail("classify", e))?;
    let mut result = json!({
        "composed": c.expr().to_string(),
        "report": report,
    });
    if a.raw {
        let raw = raw_classify(c.phi(), &ts, &tols).map_err(|e| fail("classify", e))?;
        result["raw"] = json!(raw);
    }
    let config = json!({ "omega": [omega.0, omega.1], "t_samples": a.t_samples, "tolerances": tols });
    Ok((0, config, result, None))
}

fn run_norm(a: &NormArgs) -> Outcome {
    let omega = a.omega.as_deref().map(parse_omega).transpose()?;
    let f = match (&a.f_expr, &a.f_csv) {
        (Some(text), _) => {
            let omega = omega.ok_or_else(|| fail("cli", "--omega is required with --f-expr"))?;
            let space = Space::interval(omega.0, omega.1, a.nodes).map_err(|e| fail("measure", e))?;
            let expr = parse_expr(text, &[Var::T]).map_err(|e| fail("expr", format!("--f-expr: {e}")))?;
            SampledFn::from_expr(space, &expr).map_err(|e| fail("measure", e))?
        }
        (None, Some(path)) => {
            let f = SampledFn::from_csv_path(path).map_err(|e| fail("measure", format!("{path}: {e}")))?;
            if let Some((a0, b0)) = omega {
                let (a1, b1) = f.space().bounds();
                if (a0 - a1).abs() > 1e-9 * (b1 - a1) || (b0 - b1).abs() > 1e-9 * (b1 - a1) {
                    return Err(fail("cli", format!("--omega {a0},{b0} does not match the CSV range {a1},{b1}")));
                }
            }
            f
        }
        (None, None) => return Err(fail("cli", "one of --f-expr or --f-csv is required")),
    };
    let (lo, hi) = f.space().bounds();
    let c = composition(&a.comp)?;
    let tols = ToleranceConfig::default();
    let ts = stratified_t_samples(lo, hi, DEFAULT_T_SAMPLES);
    let young = YoungComposition::checked(c, &ts, &tols).map_err(|e| fail("norms", e))?;

    let mut spec = NormSpec::new(a.kind.into()).weak(a.weak);
    spec.sobolev.k = a.k;
    if let Some(w) = &a.weight {
        spec.lorentz.omega = parse_expr(w, &[Var::S]).map_err(|e| fail("expr", format!("--weight: {e}")))?;
    }
    if spec.kind == NormKind::Morrey {
        let mut cfg = MorreyConfig::default_for(f.space());
        if let Some(w) = &a.phi_weight {
            cfg.phi_weight = parse_expr(w, &[Var::R]).map_err(|e| fail("expr", format!("--phi-weight: {e}")))?;
        }
        if let Some(cs) = &a.centers {
            cfg.centers = parse_list(cs).map_err(|e| fail("cli", format!("--centers: {e}")))?;
        }
        if let Some(rs) = &a.radii {
            cfg.radii = parse_list(rs).map_err(|e| fail("cli", format!("--radii: {e}")))?;
        }
        spec.morrey = Some(cfg);
    }
    let result = compute_norm(&f, &young, &spec).map_err(|e| fail("norms", e))?;
    let config = json!({
        "omega": [lo, hi],
        "nodes": f.space().len(),
        "t_samples": DEFAULT_T_SAMPLES,
        "t_probes": YoungComposition::DEFAULT_T_PROBES,
        "norm": spec,
        "tolerances": tols,
    });
    Ok((0, config, json!(result), None))
}

fn suite_value(r: &SuiteReport) -> Value {
    json!(r)
}

fn run_verify(a: &VerifyArgs) -> (i32, Value, Value, Option<u64>) {
    let tols = suite_tolerances();
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    let wants = |s: SuiteArg| a.suite == s || a.suite == SuiteArg::All;
    if wants(SuiteArg::Closure) {
        for class in EClass::ALL {
            for op in ClosureOp::ALL {
                match check_closure(class, op, a.seed, a.cases, &tols) {
                    Ok(r) => reports.push(r),
                    Err(e) => errors.push(json!({ "suite": format!("closure.{class}.{}", op.name()), "error": e.to_string() })),
                }
            }
        }
    }
    if wants(SuiteArg::Chain) {
        match check_chain(a.seed, a.cases, &tols) {
            Ok(r) => reports.push(r),
            Err(e) => errors.push(json!({ "suite": "chain", "error": e.to_string() })),
        }
        match check_non_reversal(&ToleranceConfig::default()) {
            Ok(r) => reports.push(r),
            Err(e) => errors.push(json!({ "suite": "chain.non_reversal", "error": e.to_string() })),
        }
    }
    if wants(SuiteArg::Inclusion) {
        for mode in InclusionMode::ALL {
            for weak_cross in [false, true] {
                match check_inclusion(mode, weak_cross, a.seed, a.cases, &tols) {
                    Ok(r) => reports.push(r),
                    Err(e) => errors.push(json!({ "suite": format!("inclusion.{}", mode.name()), "error": e.to_string() })),
                }
            }
        }
    }
    let passed = errors.is_empty() && reports.iter().all(SuiteReport::all_passed);
    let summary: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "suite": r.suite, "run": r.cases_run, "passed": r.cases_passed, "skipped": r.skipped }))
        .collect();
    let result = json!({
        "all_passed": passed,
        "summary": summary,
        "suites": reports.iter().map(suite_value).collect::<Vec<_>>(),
        "errors": errors,
    });
    let config = json!({ "suite": format!("{:?}", a.suite).to_lowercase(), "cases": a.cases, "tolerances": tols });
    (i32::from(!passed), config, result, Some(a.seed))
}

fn run_corpus_command() -> (i32, Value, Value, Option<u64>) {
    let tols = ToleranceConfig::default();
    let report = run_corpus(&tols);
    let code = i32::from(!report.all_passed());
    (code, json!({ "tolerances": tols }), suite_value(&report), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn json_of(out: &Output) -> Value {
        serde_json::from_str(&out.stdout).unwrap()
    }

    #[test]
    fn classify_reports_the_n_verdict() {
        let out = run(["eorlicz", "classify", "--phi", "t*u^2", "--map-t", "abs(t)", "--map-u", "u", "--omega", "-2,2"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v = json_of(&out);
        assert_eq!(v["result"]["report"]["verdicts"]["e_n"], true);
        assert_eq!(v["config"]["t_samples"], 33);
        for key in ["schema_version", "command", "config", "result", "seed", "timing_ms"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn norm_of_the_exponential_example() {
        let out = run([
            "eorlicz", "norm", "--kind", "luxemburg", "--phi", "exp(t+u)-1", "--map-t", "u", "--map-u", "u", "--f-expr",
            "1", "--omega", "0,1",
        ]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v = json_of(&out);
        let value = v["result"]["value"].as_f64().unwrap();
        assert!((value - 2.0 / 2f64.ln()).abs() < 1e-6);
        assert_eq!(v["config"]["nodes"], 257);
    }

    #[test]
    fn usage_and_input_errors_exit_2() {
        assert_eq!(run(["eorlicz", "classify", "--phi", "u^2"]).code, 2);
        let out = run(["eorlicz", "classify", "--phi", "u^^2", "--omega", "0,1"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("expr"), "{}", out.stderr);
        let out = run(["eorlicz", "norm", "--kind", "weak", "--phi", "-u", "--f-expr", "1", "--omega", "0,1"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("norms"), "{}", out.stderr);
        assert_eq!(run(["eorlicz", "classify", "--phi", "u", "--omega", "1,0"]).code, 2);
    }

    #[test]
    fn reports_are_deterministic() {
        let args = ["eorlicz", "verify", "--suite", "chain", "--seed", "3", "--cases", "5"];
        let (a, b) = (json_of(&run(args)), json_of(&run(args)));
        assert_eq!(a["result"], b["result"]);
        assert_eq!(a["seed"], 3);
    }
}
