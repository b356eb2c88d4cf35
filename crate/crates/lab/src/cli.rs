//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use chowla_core::arith::{is_prime_trial, SieveTable};
use chowla_core::characters::{
    char_sum_poly, crt_char_sum, weil_bound_check, LinearFactorPoly, RealCharacter,
};
use chowla_core::diophantine::{minimal_positive_particular, solve_system, DiophantineSystem};
use chowla_core::experiments::{
    moment_tail_experiment, validate_shifts, ArithFunction, DerivedParams, ExperimentConfig,
    Scale,
};
use chowla_core::sieve::{flst_estimate, s_exact, SetSpec, SieveProblem};

use crate::error::{LabError, LabResult};
use crate::manifest::{manifest_path, RunManifest};
use crate::output::{float_value, int_value, Format, Table};
use crate::{parallel, selftest};

/// Constant used when judging the fundamental-lemma error term.
pub const SIEVE_CONSTANT: f64 = 10.0;

/// Comma-separated flag value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct List<T>(pub Vec<T>);

fn parse_list<T>(text: &str) -> Result<List<T>, String>
where
    T: FromStr,
    T::Err: Display,
{
    if text.trim().is_empty() {
        return Ok(List(Vec::new()));
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|e| format!("invalid list item {s:?}: {e}"))
        })
        .collect::<Result<_, _>>()
        .map(List)
}

#[derive(Debug, Parser)]
#[command(
    name = "chowla-lab",
    version,
    about = "Numerical experiments on Liouville correlations, character sums and sieves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shifted correlation sum of λ, μ or λ_r over n ≤ x
    Correlate(CorrelateArgs),
    /// Real character sum of a product of linear forms against its bound
    Charsum(CharsumArgs),
    /// Solve a_i b_i = a_0 b_0 + h_i through the Smith normal form
    SnfSolve(SnfArgs),
    /// Exact sifted count of [1, x] against the fundamental-lemma estimate
    SieveCount(SieveArgs),
    /// Threshold count of short weighted λ sums with moment majorants
    Moment(MomentArgs),
    /// Correlation sums over a grid of x values
    Scan(ScanArgs),
    /// Reduced-scale invariant suite
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
struct OutputArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default depends on the subcommand)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1024))]
    threads: u64,
    /// Largest integer the factor table may cover (overrides CHOWLA_LAB_TABLE_LIMIT)
    #[arg(long = "table-limit")]
    table_limit: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ScaleArgs {
    /// Smoothness cutoff r
    #[arg(long, conflicts_with = "eta_proxy")]
    r: Option<u64>,
    /// Stand-in for η; r = round(x^(1/α)) with α = sqrt(log log η)·(log η)^(1/12)
    #[arg(long = "eta-proxy")]
    eta_proxy: Option<f64>,
    /// Report this level of distribution instead of the derived one
    #[arg(long)]
    u: Option<f64>,
    /// Report this smoothness exponent instead of the derived one
    #[arg(long = "A")]
    #[serde(rename = "A")]
    a: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FunctionKind {
    Liouville,
    LambdaR,
    Mobius,
}

#[derive(Debug, Clone, Args, Serialize)]
struct CorrelateArgs {
    #[arg(long)]
    x: u64,
    /// Distinct non-negative shifts, comma separated
    #[arg(long, value_parser = parse_list::<i64>, allow_hyphen_values = true)]
    shifts: List<i64>,
    #[arg(long, value_enum, default_value = "liouville")]
    function: FunctionKind,
    /// Fundamental discriminant of the character used by λ_r
    #[arg(long, default_value_t = -4, allow_hyphen_values = true)]
    discriminant: i64,
    #[command(flatten)]
    #[serde(flatten)]
    scale: ScaleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct CharsumArgs {
    /// Odd prime modulus (quadratic character)
    #[arg(long, conflicts_with = "discriminant")]
    p: Option<u64>,
    /// Fundamental discriminant of the character
    #[arg(long, allow_hyphen_values = true)]
    discriminant: Option<i64>,
    /// Linear factors `b:a` of ∏(a·n + b), comma separated
    #[arg(long, conflicts_with = "shifts", allow_hyphen_values = true)]
    poly: Option<String>,
    /// Shifts h of ∏(n + h); the default 0,1 gives n(n+1)
    #[arg(long, value_parser = parse_list::<i64>, allow_hyphen_values = true)]
    shifts: Option<List<i64>>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SnfArgs {
    /// Positive coefficients a_0, ..., a_k
    #[arg(long, value_parser = parse_list::<i64>)]
    a: List<i64>,
    /// Distinct shifts h_1, ..., h_k
    #[arg(long, value_parser = parse_list::<i64>, allow_hyphen_values = true)]
    h: List<i64>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SieveArgs {
    #[arg(long, default_value_t = 1_000_000)]
    x: u64,
    /// Sift by the primes up to y
    #[arg(long, default_value_t = 20)]
    y: u64,
    /// Sieve levels u, comma separated
    #[arg(long, value_parser = parse_list::<f64>, default_value = "1,2,3")]
    u: List<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct MomentArgs {
    #[arg(long)]
    x: u64,
    /// Window length
    #[arg(long, default_value_t = 20)]
    m: u64,
    /// Threshold is eps·m
    #[arg(long, default_value_t = 0.6)]
    eps: f64,
    /// Moment order (even); defaults to the nearest even integer to eps²m/(4e)
    #[arg(long)]
    k: Option<u32>,
    /// Weights c_1, ..., c_m with |c_i| ≤ 1; all ones by default
    #[arg(long, value_parser = parse_list::<f64>, allow_hyphen_values = true)]
    coeffs: Option<List<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ScanArgs {
    /// Ascending grid of x values, comma separated
    #[arg(long = "x", value_parser = parse_list::<u64>)]
    grid: List<u64>,
    #[arg(long, value_parser = parse_list::<i64>, allow_hyphen_values = true)]
    shifts: List<i64>,
    #[arg(long, value_enum, default_value = "liouville")]
    function: FunctionKind,
    #[arg(long, default_value_t = -4, allow_hyphen_values = true)]
    discriminant: i64,
    #[command(flatten)]
    #[serde(flatten)]
    scale: ScaleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SelftestArgs {
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

/// Result of one subcommand before it is written out.
struct Emission {
    subcommand: &'static str,
    table: Table,
    default_format: Format,
    parameters: Value,
    /// Set when the run completed but a check inside it failed.
    failure: Option<String>,
}

/// Runs the tool on `argv` (program name first) with the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`], writing to the given streams. Returns the exit status.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error ({}): {e}", e.kind());
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> LabResult<()> {
    let start = Instant::now();
    let (emission, output) = match cli.command {
        Command::Correlate(a) => (correlate(&a)?, a.output),
        Command::Charsum(a) => (charsum(&a)?, a.output),
        Command::SnfSolve(a) => (snf_solve(&a)?, a.output),
        Command::SieveCount(a) => (sieve_count(&a)?, a.output),
        Command::Moment(a) => (moment(&a)?, a.output),
        Command::Scan(a) => (scan(&a)?, a.output),
        Command::Selftest(a) => (run_selftest(&a)?, a.output),
    };
    emit(emission, &output, start, out, err)
}

fn emit(
    em: Emission,
    output: &OutputArgs,
    start: Instant,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> LabResult<()> {
    let format = output.format.unwrap_or(em.default_format);
    let body = em.table.render(format)?;
    let manifest = RunManifest {
        subcommand: em.subcommand.to_string(),
        parameters: em.parameters,
        version: env!("CARGO_PKG_VERSION").to_string(),
        format: format.name().to_string(),
        output: output.out.clone(),
        rows: em.table.rows().len(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        digest: em.table.digest(format)?,
    };
    match &output.out {
        Some(path) => {
            std::fs::write(path, &body)?;
            manifest.write(&manifest_path(path))?;
        }
        None => {
            out.write_all(&body)?;
            writeln!(err, "manifest: {}", serde_json::to_string(&manifest)?)?;
        }
    }
    match em.failure {
        Some(msg) => Err(LabError::Failed(msg)),
        None => Ok(()),
    }
}

fn parameters<T: Serialize>(args: &T, extra: Value) -> LabResult<Value> {
    let mut v = serde_json::to_value(args)?;
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    Ok(v)
}

fn threads(output: &OutputArgs) -> usize {
    output.threads as usize
}

fn check_shifts(shifts: &[i64]) -> LabResult<()> {
    validate_shifts(shifts)?;
    if shifts.iter().any(|&h| h < 0) {
        return Err(LabError::Usage("shifts must be non-negative".into()));
    }
    Ok(())
}

fn scale_of(args: &ScaleArgs) -> Option<Scale> {
    match (args.r, args.eta_proxy) {
        (Some(r), _) => Some(Scale::Direct(r)),
        (None, Some(eta)) => Some(Scale::EtaProxy(eta)),
        (None, None) => None,
    }
}

fn derive_params(
    x: u64,
    shifts: &[i64],
    discriminant: i64,
    scale: &ScaleArgs,
) -> LabResult<Option<DerivedParams>> {
    match scale_of(scale) {
        Some(s) => Ok(Some(
            *ExperimentConfig::new(x, shifts.to_vec(), discriminant, s)?.params(),
        )),
        None => Ok(None),
    }
}

fn function_for(
    kind: FunctionKind,
    chi: &RealCharacter,
    params: Option<&DerivedParams>,
) -> LabResult<ArithFunction> {
    Ok(match kind {
        FunctionKind::Liouville => ArithFunction::Liouville,
        FunctionKind::Mobius => ArithFunction::Mobius,
        FunctionKind::LambdaR => {
            let r = params.map(|p| p.r).ok_or_else(|| {
                LabError::Usage("--function lambda-r needs --r or --eta-proxy".into())
            })?;
            ArithFunction::LambdaR {
                chi: chi.clone(),
                r,
            }
        }
    })
}

const CORRELATION_COLUMNS: &[&str] = &[
    "experiment",
    "x",
    "shifts",
    "q",
    "r",
    "u",
    "A_x",
    "raw_sum",
    "value",
    "reference_bound",
    "elapsed_ms",
];

fn correlation_row(
    report: &chowla_core::experiments::CorrelationReport,
    q: u64,
    params: Option<&DerivedParams>,
    scale: &ScaleArgs,
) -> Vec<Value> {
    let opt = |v: Option<f64>| v.map_or(Value::Null, float_value);
    vec![
        json!(report.function),
        json!(report.x),
        json!(report.shifts),
        json!(q),
        params.map_or(Value::Null, |p| json!(p.r)),
        opt(scale.u.or(params.map(|p| p.u))),
        opt(scale.a.or(params.map(|p| p.a_x))),
        json!(report.raw_sum),
        float_value(report.value),
        opt(params.map(|p| p.reference_bound)),
        float_value(report.elapsed.as_secs_f64() * 1e3),
    ]
}

fn table_for(x: u64, shifts: &[i64], output: &OutputArgs) -> LabResult<SieveTable> {
    let top = shifts.iter().copied().max().unwrap_or(0).max(0) as u64;
    let needed = x.checked_add(top).ok_or_else(|| LabError::Usage("x + max shift overflows".into()))?;
    parallel::build_table(needed, parallel::table_capacity(output.table_limit)?)
}

fn correlate(args: &CorrelateArgs) -> LabResult<Emission> {
    let shifts = &args.shifts.0;
    check_shifts(shifts)?;
    if args.x == 0 {
        return Err(LabError::Usage("--x must be positive".into()));
    }
    let chi = RealCharacter::from_discriminant(args.discriminant)?.tabulated();
    let params = derive_params(args.x, shifts, args.discriminant, &args.scale)?;
    let f = function_for(args.function, &chi, params.as_ref())?;
    let table = table_for(args.x, shifts, &args.output)?;
    let report = parallel::correlate(&table, &f, args.x, shifts, threads(&args.output))?;
    let mut t = Table::new(CORRELATION_COLUMNS);
    t.push(correlation_row(&report, chi.modulus(), params.as_ref(), &args.scale));
    Ok(Emission {
        subcommand: "correlate",
        table: t,
        default_format: Format::Csv,
        parameters: parameters(args, derived_json(params.as_ref()))?,
        failure: None,
    })
}

fn derived_json(params: Option<&DerivedParams>) -> Value {
    match params {
        Some(p) => json!({ "derived": {
            "alpha": float_value(p.alpha),
            "r": p.r,
            "u": float_value(p.u),
            "A_x": float_value(p.a_x),
            "window": p.window.map(|(lo, hi)| vec![float_value(lo), float_value(hi)]),
            "in_window": p.in_window,
        }}),
        None => json!({}),
    }
}

fn scan(args: &ScanArgs) -> LabResult<Emission> {
    let shifts = &args.shifts.0;
    check_shifts(shifts)?;
    let grid = &args.grid.0;
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Usage("--x grid must be strictly ascending".into()));
    }
    if grid.first() == Some(&0) {
        return Err(LabError::Usage("--x grid values must be positive".into()));
    }
    let chi = RealCharacter::from_discriminant(args.discriminant)?.tabulated();
    let mut columns = CORRELATION_COLUMNS.to_vec();
    columns.push("status");
    let mut t = Table::new(&columns);
    if let Some(&top) = grid.last() {
        let table = table_for(top, shifts, &args.output)?;
        for &x in grid {
            let cell = derive_params(x, shifts, args.discriminant, &args.scale).and_then(|params| {
                let f = function_for(args.function, &chi, params.as_ref())?;
                let report = parallel::correlate(&table, &f, x, shifts, threads(&args.output))?;
                Ok((report, params))
            });
            match cell {
                Ok((report, params)) => {
                    let mut row = correlation_row(&report, chi.modulus(), params.as_ref(), &args.scale);
                    row.push(json!("ok"));
                    t.push(row);
                }
                Err(e) => {
                    let mut row = vec![Value::Null; CORRELATION_COLUMNS.len()];
                    row[0] = json!(ArithFunctionName(args.function).name());
                    row[1] = json!(x);
                    row[2] = json!(shifts);
                    row[3] = json!(chi.modulus());
                    row.push(json!(format!("error ({}): {e}", e.kind())));
                    t.push(row);
                }
            }
        }
    }
    Ok(Emission {
        subcommand: "scan",
        table: t,
        default_format: Format::Csv,
        parameters: parameters(args, json!({}))?,
        failure: None,
    })
}

struct ArithFunctionName(FunctionKind);

impl ArithFunctionName {
    fn name(&self) -> &'static str {
        match self.0 {
            FunctionKind::Liouville => "liouville",
            FunctionKind::Mobius => "mobius",
            FunctionKind::LambdaR => "lambda_r",
        }
    }
}

fn parse_poly(text: &str) -> LabResult<Vec<(i64, i64)>> {
    text.split(',')
        .map(|item| {
            let (b, a) = item
                .split_once(':')
                .ok_or_else(|| LabError::Usage(format!("--poly item {item:?} is not of the form b:a")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<i64>()
                    .map_err(|e| LabError::Usage(format!("--poly item {item:?}: {e}")))
            };
            Ok((parse(b)?, parse(a)?))
        })
        .collect()
}

fn charsum(args: &CharsumArgs) -> LabResult<Emission> {
    let chi = match (args.p, args.discriminant) {
        (Some(p), _) => RealCharacter::legendre(p)?,
        (None, Some(d)) => RealCharacter::from_discriminant(d)?,
        (None, None) => return Err(LabError::Usage("--p or --discriminant is required".into())),
    };
    let capacity = parallel::table_capacity(args.output.table_limit)?;
    if chi.modulus() > capacity {
        return Err(LabError::Core(chowla_core::Error::Capacity(format!(
            "modulus {} exceeds the limit {capacity}",
            chi.modulus()
        ))));
    }
    let f = match (&args.poly, &args.shifts) {
        (Some(text), _) => LinearFactorPoly::new(parse_poly(text)?)?,
        (None, Some(List(h))) => LinearFactorPoly::from_shifts(h)?,
        (None, None) => LinearFactorPoly::from_shifts(&[0, 1])?,
    };
    let q = chi.modulus();
    let (sum, bound, holds) = if q > 2 && is_prime_trial(q) {
        match weil_bound_check(&chi, &f) {
            Ok(r) => (r.sum, Some(r.bound), Some(r.holds)),
            // Squares and vanishing polynomials carry no bound.
            Err(chowla_core::Error::Precondition(_)) => (char_sum_poly(&chi, &f), None, None),
            Err(e) => return Err(e.into()),
        }
    } else {
        let r = crt_char_sum(&chi, &f)?;
        if !r.agree() {
            return Err(LabError::Failed(format!(
                "direct sum {} differs from factored sum {}",
                r.direct, r.factored
            )));
        }
        (r.direct, Some(r.bound), Some(r.within_bound()))
    };
    let mut t = Table::new(&["q", "poly", "sum", "bound", "holds"]);
    t.push(vec![
        json!(q),
        json!(f.to_string()),
        json!(sum),
        bound.map_or(Value::Null, float_value),
        json!(holds),
    ]);
    let failure = (holds == Some(false)).then(|| format!("|{sum}| exceeds the bound"));
    Ok(Emission {
        subcommand: "charsum",
        table: t,
        default_format: Format::Csv,
        parameters: parameters(args, json!({ "q": q }))?,
        failure,
    })
}

fn snf_solve(args: &SnfArgs) -> LabResult<Emission> {
    let sys = DiophantineSystem::new(args.a.0.clone(), args.h.0.clone())?;
    let outcome = solve_system(&sys)?;
    let ints = |v: &[i128]| Value::Array(v.iter().map(|&x| int_value(x)).collect());
    let (particular, step) = match &outcome.family {
        Some(fam) => {
            let min = minimal_positive_particular(fam)?;
            (ints(&min.particular), ints(&min.step))
        }
        None => (Value::Null, Value::Null),
    };
    let t = Table::single(
        &["solvable", "particular", "step", "lcm", "necessary_condition"],
        vec![
            json!(outcome.is_solvable()),
            particular,
            step,
            int_value(outcome.lcm as i128),
            json!(outcome.necessary_condition),
        ],
    );
    Ok(Emission {
        subcommand: "snf-solve",
        table: t,
        default_format: Format::Json,
        parameters: parameters(args, json!({ "diagonal": outcome.snf.diagonal().iter().map(|&d| int_value(d)).collect::<Vec<_>>() }))?,
        failure: None,
    })
}

fn sieve_count(args: &SieveArgs) -> LabResult<Emission> {
    if args.x == 0 {
        return Err(LabError::Usage("--x must be positive".into()));
    }
    let capacity = parallel::table_capacity(args.output.table_limit)?;
    if args.x > capacity {
        return Err(LabError::Core(chowla_core::Error::Capacity(format!(
            "interval length {} exceeds the limit {capacity}",
            args.x
        ))));
    }
    let primes: Vec<u64> = (2..=args.y).filter(|&p| is_prime_trial(p)).collect();
    let problem = SieveProblem::with_constant_nu(
        args.x as f64,
        primes,
        1,
        SetSpec::interval(1, args.x as i64),
    )?;
    let s = s_exact(&problem)?;
    if !s.agree() {
        return Err(LabError::Failed(format!(
            "scan {} differs from inclusion-exclusion {}",
            s.scan, s.inclusion_exclusion
        )));
    }
    let mut t = Table::new(&["problem-id", "u", "main", "s_exact", "remainder_budget", "holds"]);
    let id = format!("interval-1-{}-y{}", args.x, args.y);
    let mut failures = Vec::new();
    for &u in &args.u.0 {
        let est = flst_estimate(&problem, u)?;
        let holds = est.holds(s.scan as f64, SIEVE_CONSTANT);
        if !holds {
            failures.push(format!("u = {u}"));
        }
        t.push(vec![
            json!(id),
            float_value(u),
            float_value(est.main),
            json!(s.scan),
            float_value(est.remainder_budget),
            json!(holds),
        ]);
    }
    let failure = (!failures.is_empty())
        .then(|| format!("error term exceeded at {}", failures.join(", ")));
    Ok(Emission {
        subcommand: "sieve-count",
        table: t,
        default_format: Format::Csv,
        parameters: parameters(args, json!({ "constant": SIEVE_CONSTANT }))?,
        failure,
    })
}

fn moment(args: &MomentArgs) -> LabResult<Emission> {
    let start = Instant::now();
    let coeffs = match &args.coeffs {
        Some(List(c)) => c.clone(),
        None => vec![1.0; args.m as usize],
    };
    let table = table_for(args.x, &[args.m as i64], &args.output)?;
    let r = moment_tail_experiment(&table, args.x, args.m, args.k, args.eps, &coeffs)?;
    let holds = r.chain_holds();
    let opt = |v: Option<f64>| v.map_or(Value::Null, float_value);
    let mut t = Table::new(&[
        "experiment",
        "x",
        "m",
        "k",
        "eps",
        "count",
        "fraction",
        "moment",
        "tuple_sum",
        "chebyshev",
        "analytic",
        "holds",
        "elapsed_ms",
    ]);
    t.push(vec![
        json!("moment"),
        json!(r.x),
        json!(r.m),
        json!(r.k),
        float_value(r.eps),
        json!(r.count),
        float_value(r.fraction),
        float_value(r.moment),
        opt(r.tuple_sum),
        opt(r.chebyshev),
        float_value(r.analytic),
        json!(holds),
        float_value(start.elapsed().as_secs_f64() * 1e3),
    ]);
    let failure = (holds == Some(false)).then(|| "moment chain violated".to_string());
    Ok(Emission {
        subcommand: "moment",
        table: t,
        default_format: Format::Csv,
        parameters: parameters(args, json!({ "k_used": r.k, "threshold": float_value(r.threshold) }))?,
        failure,
    })
}

fn run_selftest(args: &SelftestArgs) -> LabResult<Emission> {
    let capacity = parallel::table_capacity(args.output.table_limit)?;
    let table = parallel::build_table(selftest::TABLE_SIZE, capacity)?;
    let outcomes = selftest::run_checks(&table, threads(&args.output));
    let mut t = Table::new(&["check", "status", "detail", "elapsed_ms"]);
    let mut failed = Vec::new();
    for o in &outcomes {
        if !o.passed {
            failed.push(o.name);
        }
        t.push(vec![
            json!(o.name),
            json!(if o.passed { "PASS" } else { "FAIL" }),
            json!(o.detail),
            float_value(o.elapsed.as_secs_f64() * 1e3),
        ]);
    }
    let failure = (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", ")));
    Ok(Emission {
        subcommand: "selftest",
        table: t,
        default_format: Format::Csv,
        parameters: parameters(args, json!({}))?,
        failure,
    })
}
