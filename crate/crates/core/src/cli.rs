//! The `kstab` command line.
//!
//! Exit codes: 0 success, 2 input parse or validation error, 3 weight vector
//! or variable index error, 4 certification budget exceeded, 5 direction not
//! invariant (`futaki`), 10 a direction with negative energy was found
//! (`search`, `certify`). Clap usage errors exit with 2.
//!
//! With `--json`, output is a single object
//! `{"schema_version", "command", "input_digest", "payload", "warnings"}` in
//! which every exact number is a string such as `"-16/3"`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_traits::Signed;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::envelope::{Envelope, Line};
use crate::polynomial::{parse_polynomial, parse_support_json, validate_support, Support};
use crate::rational::{format_tuple, parse_rational_list, to_f64, Rational};
use crate::search::{certify_min, constraint_subset_count, search_min, SearchConfig, SearchError, DEFAULT_BOX_LIMIT};
use crate::stability::{
    phi_lines, report, variable_envelope, InvariantInfo, StabilityError, StabilityReport, WeightVector,
};

pub const SCHEMA_VERSION: &str = "1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LAMBDA: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_NOT_INVARIANT: i32 = 5;
pub const EXIT_VIOLATION: i32 = 10;

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

#[derive(Debug, Parser)]
#[command(name = "kstab", version, about = "Exact K-energy slope evaluation for projective hypersurfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy, limit, penalties and diagnostics for one weight vector.
    Eval(EvalArgs),
    /// Dump the line family and envelope of one variable.
    Envelope(EnvelopeArgs),
    /// Validate a support and report the Fano condition.
    Check(InputArgs),
    /// Search weight space for directions with negative energy.
    Search(SearchArgs),
    /// Exact minimum of the energy over the unit box.
    Certify(CertifyArgs),
    /// Futaki invariant of a weight vector preserving the polynomial.
    Futaki(EvalArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input file: `.json` support or `.poly` text; `-` reads text from stdin.
    #[arg(short = 'f', long = "file")]
    file: PathBuf,
    /// Emit machine-readable JSON.
    #[arg(long)]
    json: bool,
    /// Add decimal approximations next to exact values.
    #[arg(long)]
    float: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated rational weights summing to zero, e.g. `3,-1,-1,-1`.
    #[arg(short = 'l', long, allow_hyphen_values = true)]
    lambda: String,
}

#[derive(Debug, Args)]
struct EnvelopeArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// Variable index k in 0..=n.
    #[arg(long)]
    var: usize,
    /// Also write the segments as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct JobsArgs {
    /// Worker threads for candidate evaluation.
    #[arg(long, env = "KSTAB_JOBS")]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = SearchConfig::default().height)]
    height: u32,
    #[arg(long, default_value_t = SearchConfig::default().samples)]
    samples: usize,
    #[arg(long, default_value_t = SearchConfig::default().seed)]
    seed: u64,
    /// Improving pattern moves per step size; 0 disables refinement.
    #[arg(long, default_value_t = SearchConfig::default().refine_rounds)]
    refine: usize,
    #[arg(long, default_value_t = SearchConfig::default().denominator_cap)]
    denominator_cap: u64,
    /// Include the sequence of improving iterates.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    jobs: JobsArgs,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_BOX_LIMIT)]
    box_limit: u128,
    #[command(flatten)]
    jobs: JobsArgs,
}

/// A failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<StabilityError> for Failure {
    fn from(e: StabilityError) -> Self {
        let code = match e {
            StabilityError::NotInvariant { .. } => EXIT_NOT_INVARIANT,
            StabilityError::Internal(_) => 1,
            _ => EXIT_LAMBDA,
        };
        Failure::new(code, e)
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Stability(s) => s.into(),
            SearchError::CombinatorialBudgetExceeded { .. } => Failure::new(EXIT_BUDGET, e),
        }
    }
}

struct Loaded {
    support: Support,
    digest: String,
    warnings: Vec<String>,
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("reading stdin: {e}")))?;
        return Ok(buf);
    }
    fs::read(path).map_err(|e| Failure::new(EXIT_INPUT, format!("reading {}: {e}", path.display())))
}

fn load(args: &InputArgs) -> Result<Loaded, Failure> {
    let bytes = read_input(&args.file)?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let is_json = args
        .file
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let support = if is_json {
        parse_support_json(&bytes)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("input is not UTF-8: {e}")))?;
        parse_polynomial(text)
    }
    .map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let report = validate_support(&support).map_err(|e| Failure::new(EXIT_INPUT, e))?;
    Ok(Loaded {
        support,
        digest,
        warnings: report.warnings,
    })
}

fn parse_lambda(text: &str, support: &Support) -> Result<WeightVector, Failure> {
    let entries = parse_rational_list(text).map_err(|e| Failure::new(EXIT_LAMBDA, e))?;
    if entries.len() != support.n() + 1 {
        return Err(StabilityError::DimensionMismatch {
            expected: support.n() + 1,
            found: entries.len(),
        }
        .into());
    }
    Ok(WeightVector::new(entries)?)
}

#[derive(Serialize)]
struct OutputEnvelope<'a, P: Serialize> {
    schema_version: &'a str,
    command: &'a str,
    input_digest: &'a str,
    payload: P,
    warnings: &'a [String],
}

struct Output<'a> {
    out: &'a mut dyn Write,
    json: bool,
    command: &'static str,
}

impl Output<'_> {
    fn emit<P: Serialize>(&mut self, loaded: &Loaded, payload: P, text: impl FnOnce() -> String) -> io::Result<()> {
        if self.json {
            let env = OutputEnvelope {
                schema_version: SCHEMA_VERSION,
                command: self.command,
                input_digest: &loaded.digest,
                payload,
                warnings: &loaded.warnings,
            };
            let s = serde_json::to_string_pretty(&env).map_err(io::Error::other)?;
            writeln!(self.out, "{s}")
        } else {
            write!(self.out, "{}", text())?;
            for w in &loaded.warnings {
                writeln!(self.out, "warning: {w}")?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ConcurrencyJson {
    variable: usize,
    monomials: [usize; 3],
    at: Option<String>,
}

#[derive(Serialize)]
struct FloatBlock {
    energy: f64,
    limit: f64,
    energy_reverse: f64,
    limit_reverse: f64,
}

#[derive(Serialize)]
struct EvalPayload {
    lambda: Vec<String>,
    weights: Vec<String>,
    lambda_max: String,
    delta: String,
    delta_i: Vec<String>,
    order: Vec<usize>,
    penalties: Vec<String>,
    energy: String,
    limit: String,
    energy_reverse: String,
    limit_reverse: String,
    mainc_inequality_holds: bool,
    generic: bool,
    delta_ties: Vec<[usize; 2]>,
    concurrent_triples: Vec<ConcurrencyJson>,
    invariant: Option<InvariantInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    float: Option<FloatBlock>,
}

impl EvalPayload {
    fn new(r: &StabilityReport, float: bool) -> Self {
        EvalPayload {
            lambda: strings(r.lambda.entries()),
            weights: strings(&r.weight_data.w),
            lambda_max: r.weight_data.lambda_max.to_string(),
            delta: r.weight_data.delta.to_string(),
            delta_i: strings(&r.weight_data.delta_i),
            order: r.weight_data.order.clone(),
            penalties: strings(&r.penalties),
            energy: r.energy.to_string(),
            limit: r.limit.to_string(),
            energy_reverse: r.energy_reverse.to_string(),
            limit_reverse: r.limit_reverse.to_string(),
            mainc_inequality_holds: r.mainc_inequality_holds,
            generic: r.genericity.is_generic(),
            delta_ties: r.genericity.delta_ties.iter().map(|&(i, j)| [i, j]).collect(),
            concurrent_triples: r
                .genericity
                .concurrent
                .iter()
                .map(|(k, t)| ConcurrencyJson {
                    variable: *k,
                    monomials: t.lines,
                    at: t.at.as_ref().map(|x| x.to_string()),
                })
                .collect(),
            invariant: r.invariant.clone(),
            float: float.then(|| FloatBlock {
                energy: to_f64(&r.energy),
                limit: to_f64(&r.limit),
                energy_reverse: to_f64(&r.energy_reverse),
                limit_reverse: to_f64(&r.limit_reverse),
            }),
        }
    }
}

fn with_float(exact: &Rational, float: bool) -> String {
    if float {
        format!("{exact} (~{})", to_f64(exact))
    } else {
        exact.to_string()
    }
}

fn eval_text(support: &Support, r: &StabilityReport, float: bool) -> String {
    let mut s = String::new();
    let genericity = if r.genericity.is_generic() {
        "yes".to_string()
    } else {
        format!(
            "no ({} delta ties, {} concurrent triples)",
            r.genericity.delta_ties.len(),
            r.genericity.concurrent.len()
        )
    };
    let invariant = match &r.invariant {
        Some(info) => format!("kappa = {}, futaki = {}", info.kappa, info.futaki),
        None => "no".to_string(),
    };
    s += &format!("support: {support}\n");
    s += &format!("lambda: {}\n", format_tuple(r.lambda.entries()));
    s += &format!("weights: {}\n", format_tuple(&r.weight_data.w));
    s += &format!("lambda_max: {}\n", r.weight_data.lambda_max);
    s += &format!("penalties: {}\n", format_tuple(&r.penalties));
    s += &format!("energy: {}\n", with_float(&r.energy, float));
    s += &format!("limit: {}\n", with_float(&r.limit, float));
    s += &format!("energy_reverse: {}\n", with_float(&r.energy_reverse, float));
    s += &format!("limit_reverse: {}\n", with_float(&r.limit_reverse, float));
    s += &format!(
        "inequality E(lambda) >= 0: {}\n",
        if r.mainc_inequality_holds { "holds" } else { "violated" }
    );
    s += &format!("generic: {genericity}\n");
    s += &format!("invariant: {invariant}\n");
    s
}

fn cmd_eval(args: &EvalArgs, out: &mut Output) -> Result<i32, Failure> {
    let mut loaded = load(&args.input)?;
    let lambda = parse_lambda(&args.lambda, &loaded.support)?;
    let r = report(&loaded.support, &lambda)?;
    if !r.genericity.is_generic() {
        loaded
            .warnings
            .push("lambda is not generic; the value is the direct envelope evaluation".into());
    }
    let float = args.input.float;
    let text = || eval_text(&loaded.support, &r, float);
    out.emit(&loaded, EvalPayload::new(&r, float), text)
        .map_err(|e| Failure::new(1, e))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct LineJson {
    intercept: String,
    slope: String,
}

#[derive(Serialize)]
struct SegmentJson {
    start: String,
    end: String,
    slope: String,
    value_at_start: String,
    contribution: String,
}

#[derive(Serialize)]
struct EnvelopePayload {
    variable: usize,
    lambda: Vec<String>,
    lines: Vec<LineJson>,
    breakpoints: Vec<String>,
    segments: Vec<SegmentJson>,
    penalty: String,
}

fn segment_rows(env: &Envelope) -> Vec<SegmentJson> {
    env.segments
        .iter()
        .map(|s| SegmentJson {
            start: s.start.to_string(),
            end: s.end.as_ref().map_or_else(|| "inf".to_string(), |e| e.to_string()),
            slope: s.slope.to_string(),
            value_at_start: s.value_at_start.to_string(),
            contribution: s
                .contribution()
                .expect("validated supports have a flat tail")
                .to_string(),
        })
        .collect()
}

fn cmd_envelope(args: &EnvelopeArgs, out: &mut Output) -> Result<i32, Failure> {
    let loaded = load(&args.eval.input)?;
    let lambda = parse_lambda(&args.eval.lambda, &loaded.support)?;
    let lines: Vec<Line> = phi_lines(&loaded.support, &lambda, args.var)?;
    let env = variable_envelope(&loaded.support, &lambda, args.var)?;
    let rows = segment_rows(&env);
    let penalty: Rational = env.segments.iter().filter_map(|s| s.contribution()).sum();

    if let Some(path) = &args.csv {
        let mut csv = String::from("segment_start,segment_end,slope,contribution\n");
        for r in &rows {
            csv += &format!("{},{},{},{}\n", r.start, r.end, r.slope, r.contribution);
        }
        fs::write(path, csv).map_err(|e| Failure::new(1, format!("writing {}: {e}", path.display())))?;
    }

    let payload = EnvelopePayload {
        variable: args.var,
        lambda: strings(lambda.entries()),
        lines: lines
            .iter()
            .map(|l| LineJson {
                intercept: l.intercept.to_string(),
                slope: l.slope.to_string(),
            })
            .collect(),
        breakpoints: strings(&env.breakpoints()),
        segments: rows,
        penalty: penalty.to_string(),
    };
    let text = || {
        let mut s = format!("variable: Z{}\nlines (intercept, slope):", args.var);
        for l in &payload.lines {
            s += &format!(" ({}, {})", l.intercept, l.slope);
        }
        s += "\nstart\tend\tslope\tcontribution\n";
        for r in &payload.segments {
            s += &format!("{}\t{}\t{}\t{}\n", r.start, r.end, r.slope, r.contribution);
        }
        s += &format!("penalty: {}\n", payload.penalty);
        s
    };
    out.emit(&loaded, &payload, text).map_err(|e| Failure::new(1, e))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CheckPayload {
    valid: bool,
    canonical: String,
    n: usize,
    d: u32,
    monomials: usize,
    fano: bool,
    zero_exponent_witnesses: Vec<usize>,
}

fn cmd_check(args: &InputArgs, out: &mut Output) -> Result<i32, Failure> {
    let loaded = load(args)?;
    let r = validate_support(&loaded.support).map_err(|e| Failure::new(EXIT_INPUT, e))?;
    let payload = CheckPayload {
        valid: true,
        canonical: loaded.support.to_string(),
        n: r.n,
        d: r.d,
        monomials: r.monomials,
        fano: r.fano,
        zero_exponent_witnesses: r.zero_exponent_witnesses.clone(),
    };
    let text = || {
        let mut s = format!(
            "valid: yes\nsupport: {}\nn = {}, d = {}, {} monomials\nfano (d <= n): {}\n",
            payload.canonical,
            r.n,
            r.d,
            r.monomials,
            if r.fano { "yes" } else { "no" }
        );
        for (k, j) in r.zero_exponent_witnesses.iter().enumerate() {
            s += &format!("Z{k} absent from monomial {j}\n");
        }
        s
    };
    out.emit(&loaded, &payload, text).map_err(|e| Failure::new(1, e))?;
    Ok(EXIT_OK)
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::new(1, e))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Serialize)]
struct TraceEntry {
    lambda: Vec<String>,
    score: String,
}

#[derive(Serialize)]
struct SearchPayload {
    height: u32,
    samples: usize,
    seed: u64,
    refine_rounds: usize,
    denominator_cap: u64,
    best_lambda: Vec<String>,
    best_score: String,
    evaluations: usize,
    violated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_score_float: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<TraceEntry>>,
}

fn cmd_search(args: &SearchArgs, out: &mut Output) -> Result<i32, Failure> {
    let loaded = load(&args.input)?;
    let cfg = SearchConfig {
        height: args.height,
        samples: args.samples,
        seed: args.seed,
        refine_rounds: args.refine,
        denominator_cap: args.denominator_cap,
    };
    let result = with_jobs(args.jobs.jobs, || search_min(&loaded.support, &cfg))??;
    let payload = SearchPayload {
        height: cfg.height,
        samples: cfg.samples,
        seed: cfg.seed,
        refine_rounds: cfg.refine_rounds,
        denominator_cap: cfg.denominator_cap,
        best_lambda: strings(result.best_lambda.entries()),
        best_score: result.best_score.to_string(),
        evaluations: result.evaluations,
        violated: result.violated,
        best_score_float: args.input.float.then(|| to_f64(&result.best_score)),
        trace: args.trace.then(|| {
            result
                .trace
                .iter()
                .map(|(l, s)| TraceEntry {
                    lambda: strings(l.entries()),
                    score: s.to_string(),
                })
                .collect()
        }),
    };
    let text = || {
        let mut s = format!(
            "best score: {}\nwitness: {}\nevaluations: {}\nviolating direction found: {}\n",
            with_float(&result.best_score, args.input.float),
            format_tuple(result.best_lambda.entries()),
            result.evaluations,
            if result.violated { "yes" } else { "no" }
        );
        if args.trace {
            for (l, sc) in &result.trace {
                s += &format!("trace: {} -> {sc}\n", format_tuple(l.entries()));
            }
        }
        s
    };
    out.emit(&loaded, &payload, text).map_err(|e| Failure::new(1, e))?;
    Ok(if result.violated { EXIT_VIOLATION } else { EXIT_OK })
}

#[derive(Serialize)]
struct CertifyPayload {
    minimum: String,
    witness: Vec<String>,
    walls_used: Vec<String>,
    vertex_count: usize,
    wall_count: usize,
    subset_count: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    minimum_float: Option<f64>,
}

fn cmd_certify(args: &CertifyArgs, out: &mut Output, err: &mut dyn Write) -> Result<i32, Failure> {
    let loaded = load(&args.input)?;
    if !out.json {
        let _ = writeln!(
            err,
            "examining {} constraint subsets (limit {})",
            constraint_subset_count(&loaded.support),
            args.box_limit
        );
    }
    let result = with_jobs(args.jobs.jobs, || certify_min(&loaded.support, args.box_limit))?;
    let cert = match result {
        Ok(c) => c,
        Err(e @ SearchError::CombinatorialBudgetExceeded { .. }) => {
            let _ = writeln!(err, "{e}");
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    let payload = CertifyPayload {
        minimum: cert.minimum.to_string(),
        witness: strings(cert.witness.entries()),
        walls_used: cert.walls_used.clone(),
        vertex_count: cert.vertex_count,
        wall_count: cert.wall_count,
        subset_count: cert.subset_count.to_string(),
        minimum_float: args.input.float.then(|| to_f64(&cert.minimum)),
    };
    let text = || {
        let mut s = format!(
            "minimum: {}\nwitness: {}\nvertices: {}\nwalls: {}\nactive constraints:\n",
            with_float(&cert.minimum, args.input.float),
            format_tuple(cert.witness.entries()),
            cert.vertex_count,
            cert.wall_count
        );
        for w in &cert.walls_used {
            s += &format!("  {w}\n");
        }
        s
    };
    out.emit(&loaded, &payload, text).map_err(|e| Failure::new(1, e))?;
    Ok(if cert.minimum.is_negative() { EXIT_VIOLATION } else { EXIT_OK })
}

#[derive(Serialize)]
struct FutakiPayload {
    invariant: bool,
    lambda: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    futaki: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distinct_weights: Option<Vec<String>>,
}

fn cmd_futaki(args: &EvalArgs, out: &mut Output) -> Result<i32, Failure> {
    let loaded = load(&args.input)?;
    let lambda = parse_lambda(&args.lambda, &loaded.support)?;
    let r = report(&loaded.support, &lambda)?;
    let (payload, code) = match &r.invariant {
        Some(info) => (
            FutakiPayload {
                invariant: true,
                lambda: strings(lambda.entries()),
                kappa: Some(info.kappa.to_string()),
                futaki: Some(info.futaki.to_string()),
                energy: Some(r.energy.to_string()),
                distinct_weights: None,
            },
            EXIT_OK,
        ),
        None => {
            let mut distinct = r.weight_data.w.clone();
            distinct.sort();
            distinct.dedup();
            (
                FutakiPayload {
                    invariant: false,
                    lambda: strings(lambda.entries()),
                    kappa: None,
                    futaki: None,
                    energy: None,
                    distinct_weights: Some(strings(&distinct)),
                },
                EXIT_NOT_INVARIANT,
            )
        }
    };
    let text = || match (&payload.kappa, &payload.futaki) {
        (Some(k), Some(f)) => format!("kappa: {k}\nfutaki: {f}\nenergy: {}\n", r.energy),
        _ => format!(
            "not invariant: distinct weights {}\n",
            payload.distinct_weights.as_deref().unwrap_or_default().join(",")
        ),
    };
    out.emit(&loaded, &payload, text).map_err(|e| Failure::new(1, e))?;
    Ok(code)
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the given streams. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let (json, name) = match &cli.command {
        Command::Eval(a) => (a.input.json, "eval"),
        Command::Envelope(a) => (a.eval.input.json, "envelope"),
        Command::Check(a) => (a.json, "check"),
        Command::Search(a) => (a.input.json, "search"),
        Command::Certify(a) => (a.input.json, "certify"),
        Command::Futaki(a) => (a.input.json, "futaki"),
    };
    let mut output = Output {
        out,
        json,
        command: name,
    };
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a, &mut output),
        Command::Envelope(a) => cmd_envelope(a, &mut output),
        Command::Check(a) => cmd_check(a, &mut output),
        Command::Search(a) => cmd_search(a, &mut output),
        Command::Certify(a) => cmd_certify(a, &mut output, err),
        Command::Futaki(a) => cmd_futaki(a, &mut output),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Whether a rational string in JSON output re-parses to `q`.
pub fn round_trips(text: &str, q: &Rational) -> bool {
    crate::rational::parse_rational(text).is_ok_and(|p| &p == q) && !text.contains('.')
}
