use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use delsub::ball::{ball_del_sub, ball_size_formula, BallSpec};
use delsub::binary::{BinaryCodeSpec, BinaryDelSubCode, DecodeOutcome, DecodeStatus};
use delsub::bounds::{default_weights, to_csv, verify_transversal, BoundReport};
use delsub::channel::{run_trials, run_trials_q, ChannelConfig};
use delsub::lab::{ds_table, verify_code, Certificate};
use delsub::qary::{build_inner_code_searched, InnerCodeC2, QaryDelSubCode};
use delsub::{Budget, Error, Result, Word, SCHEMA};

#[derive(Parser)]
#[command(name = "delsub", version, about = "Single-deletion single-substitution codes: balls, bounds, constructions, verification, decoding")]
struct Cli {
    /// Worker threads for enumeration and verification
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Print rationals as floating point
    #[arg(long, global = true)]
    float: bool,
    /// Maximum number of word evaluations for exhaustive work
    #[arg(long, global = true, default_value_t = delsub::space::DEFAULT_BUDGET)]
    budget: u128,
    /// Add wall time to certificates (makes output run-dependent)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the error ball of a word
    Ball {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// Compare against the closed-form ball size (t = s = 1)
        #[arg(long)]
        formula: bool,
    },
    /// Bounds on the largest code size
    Bound {
        #[arg(long, required_unless_present = "sweep")]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        s: usize,
        /// Range N1..N2 (inclusive)
        #[arg(long)]
        sweep: Option<String>,
        /// Exhaustively check the transversal behind the weight sum
        #[arg(long)]
        exact_sum: bool,
        /// Add greedy and constructed code sizes
        #[arg(long)]
        greedy: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Build a code and report size and redundancy
    Construct(CodeArgs),
    /// Check pairwise ball disjointness of a code
    Verify {
        #[command(flatten)]
        code: CodeArgs,
        /// File with "n=<int>" header and one word per line
        #[arg(long)]
        code_file: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        s: usize,
    },
    /// Decode one channel output
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        received: String,
    },
    /// Monte Carlo channel trials
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        deletions: usize,
        #[arg(long, default_value_t = 1)]
        substitutions: usize,
    },
    /// List all codewords
    Enumerate(CodeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Binary,
    Qary,
}

#[derive(Args, Clone)]
struct CodeArgs {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    q: usize,
    /// "auto", "a,b,c,d" (binary) or "a,b,c" (q-ary)
    #[arg(long, default_value = "auto")]
    params: String,
    /// Inner code file for the q-ary construction
    #[arg(long)]
    inner: Option<PathBuf>,
    /// Binary code as "n=..;a=..;b=..;c=..;d=.." or "n=..;params=auto"
    #[arg(long)]
    code: Option<String>,
}

enum Code {
    Binary(BinaryDelSubCode),
    Qary(QaryDelSubCode),
}

impl Code {
    fn words(&self, budget: &Budget) -> Result<Vec<Word>> {
        match self {
            Code::Binary(c) => c.enumerate(budget),
            Code::Qary(c) => c.enumerate(budget),
        }
    }

    fn describe(&self) -> Map<String, Value> {
        let mut m = Map::new();
        match self {
            Code::Binary(c) => {
                m.insert("kind".into(), json!("binary"));
                m.insert("n".into(), json!(c.n));
                m.insert("q".into(), json!(2));
                m.insert("params".into(), json!(c.params));
                m.insert("moduli".into(), json!(c.moduli()));
            }
            Code::Qary(c) => {
                m.insert("kind".into(), json!("qary"));
                m.insert("n".into(), json!(c.n));
                m.insert("q".into(), json!(c.q));
                m.insert("params".into(), json!(c.params));
                m.insert("moduli".into(), json!(c.moduli()));
                m.insert("inner_size".into(), json!(c.inner.len()));
                m.insert("inner_provenance".into(), json!(c.inner.provenance()));
            }
        }
        m
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse {
        what: "arguments",
        detail: msg.into(),
    }
}

fn parse_list(text: &str, len: usize) -> Result<Vec<u64>> {
    let vals = text
        .split(',')
        .map(|v| v.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("params {text:?}: {e}")))?;
    if vals.len() != len {
        return Err(usage(format!("params needs {len} comma-separated residues")));
    }
    Ok(vals)
}

fn build_code(args: &CodeArgs, budget: &Budget) -> Result<Code> {
    if let Some(spec) = &args.code {
        let spec: BinaryCodeSpec = spec.parse()?;
        return Ok(Code::Binary(spec.resolve(budget)?));
    }
    let kind = args
        .kind
        .ok_or_else(|| usage("one of --kind or --code is required"))?;
    let n = args.n.ok_or_else(|| usage("--n is required"))?;
    match kind {
        Kind::Binary => {
            if args.q != 2 {
                return Err(usage("binary codes take --q 2"));
            }
            let code = if args.params == "auto" {
                BinaryDelSubCode::best(n, budget)?
            } else {
                let v = parse_list(&args.params, 4)?;
                BinaryDelSubCode::new(n, [v[0], v[1], v[2], v[3]])?
            };
            Ok(Code::Binary(code))
        }
        Kind::Qary => {
            let inner = match &args.inner {
                Some(path) => InnerCodeC2::load(path, budget)?,
                None => build_inner_code_searched(n, budget)?,
            };
            let code = if args.params == "auto" {
                QaryDelSubCode::best(n, args.q, inner, budget)?
            } else {
                let v = parse_list(&args.params, 3)?;
                QaryDelSubCode::new(n, args.q, [v[0], v[1], v[2]], inner)?
            };
            Ok(Code::Qary(code))
        }
    }
}

fn load_code_file(path: &PathBuf, q: usize) -> Result<Vec<Word>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().unwrap_or_default();
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse {
            what: "code file",
            detail: format!("bad header {header:?}"),
        })?;
    lines
        .map(|l| {
            let w = Word::parse(l, q)?;
            if w.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: w.len(),
                });
            }
            Ok(w)
        })
        .collect()
}

fn with_schema(mut body: Map<String, Value>) -> Value {
    body.insert("schema".into(), json!(SCHEMA));
    Value::Object(body)
}

fn object(v: impl serde::Serialize) -> Map<String, Value> {
    match serde_json::to_value(v).expect("serializable") {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("serializable"));
}

fn report_value(r: &BoundReport, float: bool) -> Value {
    if !float {
        return serde_json::to_value(r).expect("serializable");
    }
    json!({
        "n": r.n,
        "q": r.q,
        "s": r.s,
        "closed_form_bound": r.closed_form_bound.as_ref().map(|v| v.to_f64()),
        "exact_weight_sum": r.exact_weight_sum.to_f64(),
        "greedy_code_size": r.greedy_code_size,
        "constructed_code_size": r.constructed_code_size,
    })
}

fn parse_sweep(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| usage(format!("sweep {text:?} is not N1..N2")))?;
    let a = a.trim().parse().map_err(|_| usage(format!("bad sweep start {a:?}")))?;
    let b = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| usage(format!("bad sweep end {b:?}")))?;
    if a > b {
        return Err(usage(format!("empty sweep {text:?}")));
    }
    Ok((a, b))
}

fn certificate_value(cert: Certificate, code: Map<String, Value>, start: Instant, timing: bool) -> (Value, bool) {
    let cert = if timing { cert.with_wall_time(start) } else { cert };
    let passed = cert.passed();
    let mut body = object(&cert);
    if !code.is_empty() {
        body.insert("code".into(), Value::Object(code));
    }
    (with_schema(body), passed)
}

/// Exit status 1 means a verification verdict of fail.
fn run(cli: Cli) -> Result<bool> {
    let budget = Budget::new(cli.budget);
    let start = Instant::now();
    match cli.command {
        Command::Ball {
            word,
            q,
            t,
            s,
            formula,
        } => {
            let x = Word::parse(&word, q)?;
            let ball = ball_del_sub(&x, BallSpec::del_sub(t, s))?;
            let mut body = Map::new();
            body.insert("word".into(), json!(x));
            body.insert("q".into(), json!(q));
            body.insert("t".into(), json!(t));
            body.insert("s".into(), json!(s));
            body.insert("size".into(), json!(ball.len()));
            body.insert("ball".into(), json!(ball));
            if formula {
                if (t, s) != (1, 1) {
                    return Err(usage("--formula needs --t 1 --s 1"));
                }
                let f = ball_size_formula(&x)?;
                body.insert("formula".into(), json!(f));
                body.insert("agree".into(), json!(f == ball.len() as u64));
            }
            print_json(&with_schema(body));
            Ok(true)
        }
        Command::Bound {
            n,
            q,
            s,
            sweep,
            exact_sum,
            greedy,
            csv,
        } => {
            let (lo, hi) = match (&sweep, n) {
                (Some(text), _) => parse_sweep(text)?,
                (None, Some(n)) => (n, n),
                (None, None) => return Err(usage("--n or --sweep is required")),
            };
            let rows = ds_table(lo..=hi, q, s, greedy, &budget)?;
            let mut all_pass = true;
            let mut checks = Vec::new();
            if exact_sum {
                for n in lo..=hi {
                    let weights = default_weights(n, q, s)?;
                    let cert = verify_transversal(
                        n,
                        q,
                        s,
                        |y| weights.weight(y).expect("word shape fixed"),
                        &budget,
                    )?;
                    all_pass &= cert.verdict == delsub::bounds::Verdict::Pass;
                    checks.push(cert);
                }
            }
            if csv {
                print!("{}", to_csv(&rows, cli.float));
            } else {
                let mut body = Map::new();
                body.insert(
                    "rows".into(),
                    Value::Array(rows.iter().map(|r| report_value(r, cli.float)).collect()),
                );
                if exact_sum {
                    body.insert("transversal_checks".into(), json!(checks));
                }
                print_json(&with_schema(body));
            }
            Ok(all_pass)
        }
        Command::Construct(args) => {
            let code = build_code(&args, &budget)?;
            let size = code.words(&budget)?.len();
            let (n, q) = match &code {
                Code::Binary(c) => (c.n, 2),
                Code::Qary(c) => (c.n, c.q),
            };
            let mut body = code.describe();
            body.insert("size".into(), json!(size));
            // bits: n·log₂q − log₂|C|
            let redundancy = n as f64 * (q as f64).log2() - (size.max(1) as f64).log2();
            body.insert("redundancy".into(), json!(redundancy));
            print_json(&with_schema(body));
            Ok(true)
        }
        Command::Verify { code, code_file, t, s } => {
            let spec = BallSpec::del_sub(t, s);
            let (words, describe) = match &code_file {
                Some(path) => (load_code_file(path, code.q)?, Map::new()),
                None => {
                    let c = build_code(&code, &budget)?;
                    (c.words(&budget)?, c.describe())
                }
            };
            let cert = verify_code(&words, spec, &budget)?;
            let (v, passed) = certificate_value(cert, describe, start, cli.timing);
            print_json(&v);
            Ok(passed)
        }
        Command::Decode { code, received } => {
            let c = build_code(&code, &budget)?;
            let out: DecodeOutcome = match &c {
                Code::Binary(b) => b.decode(&Word::parse(&received, 2)?)?,
                Code::Qary(qc) => qc.decode_q(&Word::parse(&received, qc.q)?)?,
            };
            let ok = out.status != DecodeStatus::Ambiguous;
            print_json(&with_schema(object(&out)));
            Ok(ok)
        }
        Command::Simulate {
            code,
            trials,
            seed,
            deletions,
            substitutions,
        } => {
            let config = ChannelConfig {
                deletion_count: deletions,
                substitution_count: substitutions,
                seed,
                trials,
            };
            config.validate()?;
            let report = match build_code(&code, &budget)? {
                Code::Binary(b) => run_trials(&b, &config, &budget)?,
                Code::Qary(qc) => run_trials_q(&qc, &config, &budget)?,
            };
            print!("{}", report.to_json_lines());
            Ok(report.all_decoded())
        }
        Command::Enumerate(args) => {
            let code = build_code(&args, &budget)?;
            let words = code.words(&budget)?;
            let mut body = code.describe();
            body.insert("size".into(), json!(words.len()));
            body.insert("codewords".into(), json!(words));
            print_json(&with_schema(body));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("bad arguments");
            eprintln!("{}", line.trim());
            return ExitCode::from(2);
        }
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
