//! Command-line front end: argument parsing, dispatch and exit codes.

pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use expmeasure::ball::parse_decimal;
use expmeasure::bounds::{competitor_exponents, excess_ratio, theorem1_report, threshold_n1};
use expmeasure::convergents::exp_cf_rows;
use expmeasure::verify::{self, SweepOptions, Verdict, MAX_PRECISION_BITS, MIN_PRECISION_BITS};
use expmeasure::zsolve::{z_of, zn_error_bound, zn_iterate};
use expmeasure::{ArithmeticProfile, BallReal, Error};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use report::{
    Ball, BoundRecord, CompareRecord, ConvergentRecord, ErrorBody, ErrorReport, Format, InvariantsRecord, Report,
    ZsolveRecord, SCHEMA_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "expmeasure", version, about = "Explicit rational approximation bounds for exp(s/t)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Working precision in bits, within [64, 2^20].
    #[arg(long = "precision", default_value_t = 1024)]
    pub precision_bits: u32,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Exit with status 2 if any verdict is undecided.
    #[arg(long)]
    pub strict: bool,
    /// Significant digits of ball midpoints.
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct StArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: i64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convergent rows n, A, B, C+, C-, D, J, H.
    Convergents {
        #[command(flatten)]
        st: StArgs,
        #[arg(long)]
        n_max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Arithmetic constants of (s, t) and the threshold log N_1.
    Invariants {
        #[command(flatten)]
        st: StArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Inverse of z log z and its iterates z_n.
    Zsolve {
        /// Decimal value of y.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, default_value_t = 6)]
        iterations: u32,
        #[command(flatten)]
        common: Common,
    },
    /// The general lower bound at one N.
    Bound {
        #[command(flatten)]
        st: StArgs,
        #[command(flatten)]
        n: NSelector,
        #[command(flatten)]
        common: Common,
    },
    /// Exponent against earlier bounds; delta and eps-z must be supplied.
    Compare {
        #[command(flatten)]
        st: StArgs,
        #[arg(long = "logn")]
        log_n: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
        #[arg(long = "eps-z", allow_hyphen_values = true)]
        eps_z: String,
        #[command(flatten)]
        common: Common,
    },
    /// Certify the general bound at one N or on a seeded sample.
    Verify {
        #[command(flatten)]
        st: StArgs,
        #[command(flatten)]
        sel: VerifySelector,
        #[command(flatten)]
        common: Common,
    },
    /// Certify the e^3 bound on seeded samples of log N in [983, ...].
    Corollary4 {
        #[arg(long = "logn-lo", default_value_t = 983.0)]
        log_n_lo: f64,
        #[arg(long = "logn-hi", default_value_t = 3000.0)]
        log_n_hi: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16384)]
        cap: u32,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
#[group(required = true, multiple = false)]
pub struct NSelector {
    /// Decimal value of log N.
    #[arg(long = "logn")]
    pub log_n: Option<String>,
    /// Exact integer N.
    #[arg(long = "n")]
    pub n: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifySelector {
    /// Exact integer N (single record).
    #[arg(long = "n", conflicts_with_all = ["log_n_lo", "log_n_hi"])]
    pub n: Option<String>,
    /// Numerator M (default: nearest integer to N e^{s/t}).
    #[arg(long = "m", allow_hyphen_values = true, requires = "n")]
    pub m: Option<String>,
    #[arg(long = "logn-lo", requires = "log_n_hi")]
    pub log_n_lo: Option<f64>,
    #[arg(long = "logn-hi", requires = "log_n_lo")]
    pub log_n_hi: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also check every SCF convergent denominator in range.
    #[arg(long)]
    pub with_scf: bool,
    /// Precision cap in bits for the adaptive loop.
    #[arg(long, default_value_t = MAX_PRECISION_BITS)]
    pub cap: u32,
}

/// Rendered report plus exit status.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub output: Option<PathBuf>,
    pub exit: i32,
}

enum Failure {
    Invalid(String),
    Internal(String),
}

/// Exit status for a library error: bad input is a configuration error,
/// everything else (failed internal checks, exhausted precision) is internal.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::Domain(_) => EXIT_INVALID,
        _ => EXIT_INTERNAL,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if exit_code_for(&e) == EXIT_INVALID {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn error_text(command: Option<&str>, kind: &str, message: String) -> String {
    let r = ErrorReport {
        schema_version: SCHEMA_VERSION.into(),
        command: command.map(str::to_string),
        error: ErrorBody { kind: kind.into(), message },
    };
    let mut s = serde_json::to_string_pretty(&r).expect("error serializes");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let exit = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { text: e.to_string(), output: None, exit: EXIT_OK };
            } else {
                EXIT_INVALID
            };
            return Outcome {
                text: error_text(None, "invalid_config", e.render().to_string().trim_end().to_string()),
                output: None,
                exit,
            };
        }
    };
    let name = command_name(&cli.command);
    let common = common_of(&cli.command).clone();
    match dispatch(&cli.command, &common) {
        Ok((text, exit)) => Outcome {
            text,
            output: common.output.clone(),
            exit,
        },
        Err(Failure::Invalid(m)) => Outcome {
            text: error_text(Some(name), "invalid_config", m),
            output: None,
            exit: EXIT_INVALID,
        },
        Err(Failure::Internal(m)) => Outcome {
            text: error_text(Some(name), "internal", m),
            output: None,
            exit: EXIT_INTERNAL,
        },
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Convergents { .. } => "convergents",
        Command::Invariants { .. } => "invariants",
        Command::Zsolve { .. } => "zsolve",
        Command::Bound { .. } => "bound",
        Command::Compare { .. } => "compare",
        Command::Verify { .. } => "verify",
        Command::Corollary4 { .. } => "corollary4",
    }
}

fn common_of(c: &Command) -> &Common {
    match c {
        Command::Convergents { common, .. }
        | Command::Invariants { common, .. }
        | Command::Zsolve { common, .. }
        | Command::Bound { common, .. }
        | Command::Compare { common, .. }
        | Command::Verify { common, .. }
        | Command::Corollary4 { common, .. } => common,
    }
}

fn decimal_ball(text: &str, what: &str, p: u32) -> Run<BallReal> {
    parse_decimal(text)
        .map(|q| BallReal::from_rational(&q, p))
        .ok_or_else(|| Failure::Invalid(format!("{what}: not a decimal number: {text:?}")))
}

fn integer(text: &str, what: &str) -> Run<BigInt> {
    text.trim()
        .parse::<BigInt>()
        .map_err(|_| Failure::Invalid(format!("{what}: not an integer: {text:?}")))
}

fn params<T: Serialize>(st: Option<&StArgs>, extra: &T, common: &Common) -> Value {
    let mut v = json!({});
    if let Some(st) = st {
        v["s"] = json!(st.s);
        v["t"] = json!(st.t);
    }
    if let Value::Object(m) = serde_json::to_value(extra).expect("params serialize") {
        for (k, x) in m {
            v[k] = x;
        }
    }
    v["precision_bits"] = json!(common.precision_bits);
    v["digits"] = json!(common.digits);
    v["strict"] = json!(common.strict);
    v
}

fn render<R: Serialize>(command: &str, params: Value, records: Vec<R>, common: &Common) -> String {
    let format = match common.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    Report {
        schema_version: SCHEMA_VERSION.into(),
        command: command.into(),
        params,
        records,
    }
    .render(format)
}

fn dispatch(cmd: &Command, common: &Common) -> Run<(String, i32)> {
    let p = common.precision_bits;
    if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&p) {
        return Err(Failure::Invalid(format!(
            "precision {p} outside [{MIN_PRECISION_BITS}, {MAX_PRECISION_BITS}]"
        )));
    }
    let dg = common.digits.max(1);
    let ball = |x: &BallReal| Ball::new(x, dg);
    let name = command_name(cmd);
    match cmd {
        Command::Convergents { st, n_max, .. } => {
            let rows = exp_cf_rows(st.s, st.t, *n_max)?;
            let records = rows
                .iter()
                .map(|r| ConvergentRecord {
                    n: r.n,
                    a: r.a.to_string(),
                    b: r.b.to_string(),
                    c_plus: r.c_plus.to_string(),
                    c_minus: r.c_minus.to_string(),
                    d: r.d.to_string(),
                    j: r.j.to_string(),
                    h: r.h.to_string(),
                })
                .collect();
            let pr = params(Some(st), &json!({ "n_max": n_max }), common);
            Ok((render(name, pr, records, common), EXIT_OK))
        }
        Command::Invariants { st, .. } => {
            let prof = ArithmeticProfile::new(st.s, st.t, p)?;
            let factors = prof.factors().factors();
            let factors = if factors.is_empty() {
                "1".to_string()
            } else {
                factors.iter().map(|(q, k)| format!("{q}^{k}")).collect::<Vec<_>>().join("*")
            };
            let rec = InvariantsRecord {
                s: st.s,
                t: st.t,
                factors,
                alpha: ball(prof.alpha()),
                beta: prof.beta(),
                gamma: prof.gamma().to_string(),
                sigma: ball(prof.sigma()),
                rho: ball(prof.rho()),
                eta: ball(prof.eta()),
                gcd2: prof.gcd2(),
                log_s_over_alpha: ball(prof.log_s_over_alpha()),
                log_n1: ball(&threshold_n1(&prof)?),
            };
            let pr = params(Some(st), &json!({}), common);
            Ok((render(name, pr, vec![rec], common), EXIT_OK))
        }
        Command::Zsolve { y, iterations, .. } => {
            let yb = decimal_ball(y, "y", p)?;
            let z = z_of(&yb, p)?.with_prec(p);
            let above_e = (&yb - &BallReal::e(p)).is_positive();
            let mut records = Vec::new();
            if above_e {
                for n in 0..=*iterations {
                    records.push(ZsolveRecord {
                        n,
                        z: ball(&z),
                        z_n: ball(&zn_iterate(&yb, n, p)?),
                        error_bound: Some(ball(&zn_error_bound(&yb, n, p)?.with_prec(p))),
                    });
                }
            } else {
                records.push(ZsolveRecord {
                    n: 0,
                    z: ball(&z),
                    z_n: ball(&z),
                    error_bound: None,
                });
            }
            let pr = params(None, &json!({ "y": y, "iterations": iterations }), common);
            Ok((render(name, pr, records, common), EXIT_OK))
        }
        Command::Bound { st, n, .. } => {
            let prof = ArithmeticProfile::new(st.s, st.t, p)?;
            let log_n = match (&n.log_n, &n.n) {
                (Some(x), None) => decimal_ball(x, "logn", p)?,
                (None, Some(x)) => {
                    let v = integer(x, "n")?;
                    if v < BigInt::from(1) {
                        return Err(Failure::Invalid("n must be >= 1".into()));
                    }
                    BallReal::from_int(v, p).log().map_err(Error::from)?
                }
                _ => return Err(Failure::Invalid("exactly one of --logn / --n is required".into())),
            };
            let r = theorem1_report(&prof, &log_n)?;
            let rec = BoundRecord {
                s: r.s,
                t: r.t,
                log_n: ball(&r.log_n),
                zeta: ball(&r.zeta),
                big_z: ball(&r.big_z),
                log_big_z: ball(&r.log_big_z),
                mu: ball(&r.mu),
                log_lower_bound: ball(&r.log_lower_bound),
                log_n1: ball(&r.log_n1),
                threshold_ok: r.threshold_ok,
            };
            let pr = params(Some(st), n, common);
            Ok((render(name, pr, vec![rec], common), EXIT_OK))
        }
        Command::Compare {
            st, log_n, delta, eps_z, ..
        } => {
            let prof = ArithmeticProfile::new(st.s, st.t, p)?;
            let ln = decimal_ball(log_n, "logn", p)?;
            let db = decimal_ball(delta, "delta", p)?;
            let eb = decimal_ball(eps_z, "eps-z", p)?;
            let r = theorem1_report(&prof, &ln)?;
            let c = competitor_exponents(&prof, &ln, &db, &eb)?;
            let ratio = excess_ratio(&r, &c)?;
            let rec = CompareRecord {
                s: st.s,
                t: st.t,
                log_n: ball(&r.log_n),
                mu: ball(&r.mu),
                bundschuh: ball(&c.bundschuh),
                shiokawa: ball(&c.shiokawa),
                zheng: ball(&c.zheng),
                excess_ratio: ratio.as_ref().map(ball),
            };
            let extra = json!({
                "logn": log_n,
                "delta": delta,
                "eps_z": eps_z,
                "delta_source": "user-supplied",
                "eps_z_source": "user-supplied",
            });
            let pr = params(Some(st), &extra, common);
            Ok((render(name, pr, vec![rec], common), EXIT_OK))
        }
        Command::Verify { st, sel, .. } => {
            let records = match (&sel.n, sel.log_n_lo, sel.log_n_hi) {
                (Some(n), None, None) => {
                    let n = integer(n, "n")?;
                    let m = sel.m.as_deref().map(|m| integer(m, "m")).transpose()?;
                    vec![verify::check_theorem1_capped(st.s, st.t, &n, p, m.as_ref(), sel.cap)?]
                }
                (None, Some(lo), Some(hi)) => {
                    let opts = SweepOptions {
                        samples: sel.samples,
                        seed: sel.seed,
                        precision_bits: p,
                        cap: sel.cap,
                        include_scf: sel.with_scf,
                    };
                    verify::sweep_with(st.s, st.t, lo, hi, &opts)?
                }
                _ => return Err(Failure::Invalid("give either --n or both --logn-lo and --logn-hi".into())),
            };
            let pr = params(Some(st), sel, common);
            Ok(verify_output(name, pr, &records, common))
        }
        Command::Corollary4 {
            log_n_lo,
            log_n_hi,
            samples,
            seed,
            cap,
            ..
        } => {
            let records = verify::corollary4_sweep(*log_n_lo, *log_n_hi, *samples, *seed, p, *cap)?;
            let extra = json!({
                "logn_lo": log_n_lo,
                "logn_hi": log_n_hi,
                "samples": samples,
                "seed": seed,
                "cap": cap,
            });
            let pr = params(None, &extra, common);
            Ok(verify_output(name, pr, &records, common))
        }
    }
}

fn verify_output(name: &str, pr: Value, records: &[verify::VerifyRecord], common: &Common) -> (String, i32) {
    let dg = common.digits.max(1);
    let ball = |x: &BallReal| Ball::new(x, dg);
    let rows: Vec<_> = records
        .iter()
        .map(|r| report::VerifyRecord {
            s: r.s,
            t: r.t,
            bound: r.bound.as_str().into(),
            n: r.n.to_string(),
            m: r.m.to_string(),
            log_n: ball(&r.log_n),
            log_abs_lambda_over_n: ball(&r.log_abs_lambda_over_n),
            log_lower_bound: ball(&r.log_lower_bound),
            margin: ball(&r.margin),
            verdict: r.verdict.as_str().into(),
            precision_used: r.precision_used,
            threshold_ok: r.threshold_ok,
        })
        .collect();
    // a certified violation means a bug somewhere in the pipeline
    let exit = if records.iter().any(|r| r.verdict == Verdict::Violated) {
        EXIT_INTERNAL
    } else if common.strict && records.iter().any(|r| r.verdict == Verdict::Undecided) {
        EXIT_UNDECIDED
    } else {
        EXIT_OK
    };
    (render(name, pr, rows, common), exit)
}
