//! `ncpot` command-line front end.
//!
//! Every verb prints one JSON report (or a short text summary with
//! `--format text`). Exit codes: 0 on a passing verdict, 1 on a failing one,
//! 2 on usage or input errors.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncpot::demilinear::ExactnessReport;
use ncpot::domain::FreeDomain;
use ncpot::potential::{
    build_potential, path_independence_test, validate_potential, PotentialConfig, QuadratureConfig,
    SmoothPath,
};
use ncpot::report::Report;
use ncpot::{DemiPoly, DemilinearMap, Error, FreeMap, MatrixTuple, NcPoly, SeedStream};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "ncpot", version, about = "Free derivatives, free-curls and potentials of matrix maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Formal nc derivative of a polynomial in x1..xg.
    Derive(ExprArgs),
    /// Numerical free-curl test of a demilinear polynomial.
    Curl(ExprArgs),
    /// Symbolic exactness test of a demilinear polynomial.
    Exact(ExprArgs),
    /// Symbolic antiderivative of a demilinear polynomial.
    Antiderive(ExprArgs),
    /// Numerical potential reconstruction of a demilinear polynomial.
    Reconstruct(ExprArgs),
    /// Checks that a polynomial map respects direct sums and similarities.
    VerifyFree(ExprArgs),
    /// Integrates a demilinear polynomial along a segment and a Bézier arc.
    PathTest(ExprArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct ExprArgs {
    /// Expression; demilinear verbs use h1..hg inline, slots are separated by ';'.
    pub expr: String,
    /// Number of variables.
    #[arg(long)]
    pub g: usize,
    /// Number of output slots.
    #[arg(long, default_value_t = 1)]
    pub h: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub levels: Vec<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Haar sample count.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Random probes per level.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long = "quad-tol", default_value_t = 1e-10)]
    pub quad_tol: f64,
    /// Domain spec, inline JSON or a file path.
    #[arg(long)]
    pub domain: Option<String>,
    /// Tuple JSON (inline or file) at which to evaluate the reconstruction,
    /// or the start point for `path-test`.
    #[arg(long)]
    pub at: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// What a run produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    /// A computation that ended early with a diagnostic report.
    Aborted(Report),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = std::result::Result<Report, Failure>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    execute(cli.command)
}

pub fn execute(command: Command) -> Outcome {
    let start = Instant::now();
    let (verb, args) = match &command {
        Command::Derive(a) => ("derive", a),
        Command::Curl(a) => ("curl", a),
        Command::Exact(a) => ("exact", a),
        Command::Antiderive(a) => ("antiderive", a),
        Command::Reconstruct(a) => ("reconstruct", a),
        Command::VerifyFree(a) => ("verify-free", a),
        Command::PathTest(a) => ("path-test", a),
    };
    let result = match verb {
        "derive" => derive(args),
        "curl" => curl(args),
        "exact" => exact(args, false),
        "antiderive" => exact(args, true),
        "reconstruct" => reconstruct(args),
        "verify-free" => verify_free(args),
        _ => path_test(args),
    };
    let report = match result {
        Ok(r) | Err(Failure::Aborted(r)) => r,
        Err(Failure::Usage(msg)) => {
            return Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: {msg}\n"),
            }
        }
    };
    let report = with_common_parameters(report, verb, args).timed(start);
    let code = if report.verdict.passed() { 0 } else { 1 };
    let text = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.to_json()).expect("report is JSON");
            s.push('\n');
            s
        }
        Format::Text => render_text(&report),
    };
    match &args.out {
        Some(path) => match fs::write(path, &text) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
            Err(e) => Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome { code, stdout: text, stderr: String::new() },
    }
}

fn with_common_parameters(r: Report, verb: &str, a: &ExprArgs) -> Report {
    let r = r
        .parameter("expression", &a.expr)
        .parameter("g", a.g)
        .parameter("h", a.h);
    match verb {
        "derive" | "exact" | "antiderive" => r,
        _ => r
            .parameter("levels", &a.levels)
            .parameter("trials", a.trials)
            .parameter("tol", a.tol)
            .seed(a.seed),
    }
}

fn render_text(r: &Report) -> String {
    let mut out = format!("{}: {:?}\n", r.operation, r.verdict).to_lowercase();
    for key in ["derivative", "potential", "witness"] {
        if let Some(v) = r.details.get(key).filter(|v| !v.is_null()) {
            match v {
                Value::String(s) => out.push_str(&format!("{key}: {s}\n")),
                other => out.push_str(&format!("{key}: {other}\n")),
            }
        }
    }
    for (k, v) in &r.residuals {
        out.push_str(&format!("{k}: {v:e}\n"));
    }
    out
}

fn read_json_arg(text: &str) -> std::result::Result<String, Failure> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        Ok(text.to_string())
    } else {
        fs::read_to_string(text).map_err(|e| Failure::Usage(format!("cannot read {text}: {e}")))
    }
}

fn domain_of(a: &ExprArgs) -> std::result::Result<FreeDomain, Failure> {
    match &a.domain {
        None => Ok(FreeDomain::full(a.g)),
        Some(d) => Ok(FreeDomain::parse_spec(&read_json_arg(d)?, a.g)?),
    }
}

fn tuple_arg(text: &str) -> std::result::Result<MatrixTuple, Failure> {
    serde_json::from_str(&read_json_arg(text)?)
        .map_err(|e| Failure::Usage(format!("tuple JSON: {e}")))
}

fn check_g(a: &ExprArgs) -> std::result::Result<(), Failure> {
    if a.g == 0 || a.h == 0 {
        return Err(Failure::Usage("--g and --h must be positive".into()));
    }
    Ok(())
}

fn demi(a: &ExprArgs) -> std::result::Result<DemiPoly, Failure> {
    check_g(a)?;
    Ok(DemiPoly::parse(&a.expr, a.g, a.h)?)
}

fn derive(a: &ExprArgs) -> Run {
    check_g(a)?;
    let f = NcPoly::parse(&a.expr, a.g, a.h)?;
    let d = f.formal_derivative();
    Ok(Report::new("derive")
        .verdict(true)
        .details(json!({ "polynomial": f.to_string(), "derivative": d.to_string() })))
}

fn witness_json(r: &ExactnessReport) -> Value {
    r.witness
        .as_ref()
        .map(|w| serde_json::to_value(w).expect("witness is JSON"))
        .unwrap_or(Value::Null)
}

fn exact(a: &ExprArgs, antiderive: bool) -> Run {
    let t = demi(a)?;
    let r = t.antiderivative();
    let op = if antiderive { "antiderive" } else { "exact" };
    Ok(Report::new(op).verdict(r.exact).details(json!({
        "input": t.to_string(),
        "exact": r.exact,
        "potential": r.potential.as_ref().map(|p| p.to_string()),
        "witness": witness_json(&r),
    })))
}

fn curl(a: &ExprArgs) -> Run {
    let t = demi(a)?;
    let domain = domain_of(a)?;
    let map = DemilinearMap::from_poly(t.clone());
    let mut rng = SeedStream::new(a.seed).labeled("curl").rng();
    let r = map.curl_free_test(&domain, &a.levels, a.trials, &mut rng, a.tol)?;
    Ok(Report::new("curl")
        .residual("maxResidual", r.max_residual)
        .residual("maxAbsResidual", r.max_abs_residual)
        .verdict(r.curl_free)
        .details(json!({
            "input": t.to_string(),
            "symbolicExact": t.is_exact(),
            "domain": domain.describe(),
            "report": r,
        })))
}

fn config_of(a: &ExprArgs) -> std::result::Result<PotentialConfig, Failure> {
    let config = PotentialConfig {
        quadrature: QuadratureConfig::default().with_abs_tol(a.quad_tol),
        samples: a.samples,
        seed: a.seed,
        ..PotentialConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn reconstruct(a: &ExprArgs) -> Run {
    let t = demi(a)?;
    let domain = domain_of(a)?;
    let config = config_of(a)?;
    let map = DemilinearMap::from_poly(t.clone());
    let base = Report::new("reconstruct")
        .parameter("samples", a.samples)
        .parameter("quadTol", a.quad_tol);
    let fhat = match build_potential(&map, &domain, &a.levels, config) {
        Ok(f) => Arc::new(f),
        Err(e @ Error::ConstantExtraction { .. }) => {
            return Err(Failure::Aborted(base.verdict(false).details(json!({
                "input": t.to_string(),
                "error": e.to_string(),
            }))))
        }
        Err(e) => return Err(e.into()),
    };
    let value = match &a.at {
        Some(p) => Some(fhat.eval(&tuple_arg(p)?)?),
        None => None,
    };
    let mut rng = SeedStream::new(a.seed).labeled("validate").rng();
    let v = validate_potential(&fhat, &map, a.trials, &mut rng, a.tol)?;
    Ok(base
        .residual("derivative", v.derivative_residual)
        .residual("directSum", v.direct_sum_residual)
        .residual("similarity", v.similarity_residual)
        .verdict(v.verdict)
        .details(json!({
            "input": t.to_string(),
            "domain": domain.describe(),
            "config": config,
            "constants": fhat.constants(),
            "validation": v,
            "value": value,
        })))
}

fn verify_free(a: &ExprArgs) -> Run {
    check_g(a)?;
    let f = NcPoly::parse(&a.expr, a.g, a.h)?;
    let domain = domain_of(a)?;
    let mut rng = SeedStream::new(a.seed).labeled("verify-free").rng();
    let trials = a.trials * a.levels.len().max(1);
    let r = FreeMap::from_poly(f.clone()).verify_free(&domain, &a.levels, trials, &mut rng, a.tol)?;
    Ok(Report::new("verify-free")
        .residual("directSum", r.direct_sum_residual)
        .residual("similarity", r.similarity_residual)
        .verdict(r.verdict)
        .details(json!({ "polynomial": f.to_string(), "domain": domain.describe(), "report": r })))
}

fn path_test(a: &ExprArgs) -> Run {
    let t = demi(a)?;
    let domain = domain_of(a)?;
    let levels = domain.tested_levels(&a.levels)?;
    let mut rng = SeedStream::new(a.seed).labeled("path-test").rng();
    let from = match &a.at {
        Some(p) => tuple_arg(p)?,
        None => domain.sample_point(levels[0], &mut rng)?,
    };
    let n = from.level();
    domain.check(&from)?;
    let to = domain.sample_point(n, &mut rng)?;
    let mid = &from.scale(0.5.into()) + &to.scale(0.5.into());
    let control = &mid + &domain.sample_point(n, &mut rng)?.scale(0.25.into());
    for p in [&to, &control] {
        domain.check(p)?;
    }
    let q = QuadratureConfig::default().with_abs_tol(a.quad_tol);
    let map = DemilinearMap::from_poly(t.clone());
    let segment = SmoothPath::segment(from.clone(), to.clone())?;
    let arc = SmoothPath::bezier(from.clone(), control, to.clone())?;
    let r = path_independence_test(&map, &segment, &arc, &q, a.tol)?;
    Ok(Report::new("path-test")
        .parameter("quadTol", a.quad_tol)
        .residual("pathDifference", r.residual)
        .verdict(r.verdict)
        .details(json!({
            "input": t.to_string(),
            "level": n,
            "from": from,
            "to": to,
            "paths": ["segment", "bezier"],
        })))
}
