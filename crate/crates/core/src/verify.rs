//! Certified checks of the irrationality-measure bounds at concrete `N`.
//!
//! The linear form `Lambda = N e^{s/t} - M` is handled in log form,
//! `log|e^{s/t} - M/N| = log|Lambda| - log N`, so `N` with tens of thousands
//! of digits is no problem. Every check doubles its working precision until
//! the margin against the bound has a certified sign, or the cap is hit.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ball::{BallReal, CertifiedSign, Dyadic};
use crate::bounds::{corollary4_bound, theorem1_report, COROLLARY4_LOG_N_MIN};
use crate::error::{Error, Result};
use crate::padic::{ArithmeticProfile, ExpArg};

pub const MIN_PRECISION_BITS: u32 = 64;
pub const MAX_PRECISION_BITS: u32 = 1 << 20;
pub const DEFAULT_PRECISION_BITS: u32 = 1024;

/// `e^{s/t}` with radius at most `2^{2-prec} e^{|s|/t}`.
pub fn exp_st(s: i64, t: i64, precision_bits: u32) -> Result<BallReal> {
    let arg = ExpArg::new(s, t)?;
    Ok(BallReal::exp_ratio(&BigInt::from(arg.s()), &BigInt::from(arg.t()), precision_bits)?)
}

fn check_precision(bits: u32) -> Result<()> {
    if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&bits) {
        return Err(Error::InvalidArgument(format!(
            "precision {bits} outside [{MIN_PRECISION_BITS}, {MAX_PRECISION_BITS}]"
        )));
    }
    Ok(())
}

fn check_n(n: &BigInt) -> Result<()> {
    if n.sign() != Sign::Plus {
        return Err(Error::InvalidArgument(format!("N must be >= 1, got {n}")));
    }
    Ok(())
}

/// Nearest integer to `N e^{s/t}`; a zero result is replaced by 1, the
/// best nonzero numerator (e^{s/t} > 0).
pub fn best_numerator(s: i64, t: i64, n: &BigInt, precision_bits: u32) -> Result<BigInt> {
    best_numerator_capped(s, t, n, precision_bits, MAX_PRECISION_BITS)
}

pub fn best_numerator_capped(s: i64, t: i64, n: &BigInt, precision_bits: u32, cap: u32) -> Result<BigInt> {
    ExpArg::new(s, t)?;
    check_n(n)?;
    let mut p = precision_bits.max(n.bits() as u32 + 64);
    loop {
        let x = &BallReal::from_int(n.clone(), p) * &exp_st(s, t, p)?;
        let shifted = &x + &BallReal::exact(Dyadic::new(BigInt::one(), -1), p);
        if let Some(m) = shifted.floor_certain() {
            return Ok(if m.is_zero() { BigInt::one() } else { m });
        }
        if p >= cap {
            return Err(Error::PrecisionExhausted { what: "nearest numerator".into(), bits: p });
        }
        p = (p * 2).min(cap);
    }
}

/// Partial quotients of the simple continued fraction of a real known to lie
/// in `[lo, hi]`, as long as both endpoints agree.
fn common_partial_quotients(lo: &BigRational, hi: &BigRational, limit: usize) -> Vec<BigInt> {
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let mut out = Vec::new();
    while out.len() < limit {
        let a = lo.floor();
        if hi.floor() != a {
            break;
        }
        out.push(a.to_integer());
        let (fl, fh) = (&lo - &a, &hi - &a);
        if fl.is_zero() {
            break;
        }
        lo = fh.recip();
        hi = fl.recip();
    }
    out
}

fn convergents_from_quotients(qs: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    qs.iter()
        .map(|a| {
            let p = a * &p0 + &p1;
            let q = a * &q0 + &q1;
            p1 = std::mem::replace(&mut p0, p.clone());
            q1 = std::mem::replace(&mut q0, q.clone());
            (p, q)
        })
        .collect()
}

fn endpoints(x: &BallReal) -> (BigRational, BigRational) {
    let r = |d: Dyadic| {
        let e = d.exponent();
        let m = d.mantissa().clone();
        if e >= 0 {
            BigRational::from_integer(m << e as usize)
        } else {
            BigRational::new(m, BigInt::one() << (-e) as usize)
        }
    };
    (r(x.lower()), r(x.upper()))
}

/// First `count` simple-continued-fraction convergents `(p, q)` of
/// `e^{s/t}`. Precision is raised until `count` partial quotients are
/// certain.
pub fn scf_convergents(s: i64, t: i64, count: usize, precision_bits: u32) -> Result<Vec<(BigInt, BigInt)>> {
    scf_convergents_capped(s, t, count, precision_bits, MAX_PRECISION_BITS)
}

pub fn scf_convergents_capped(
    s: i64,
    t: i64,
    count: usize,
    precision_bits: u32,
    cap: u32,
) -> Result<Vec<(BigInt, BigInt)>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be >= 1".into()));
    }
    let mut p = precision_bits;
    loop {
        let (lo, hi) = endpoints(&exp_st(s, t, p)?);
        let qs = common_partial_quotients(&lo, &hi, count);
        if qs.len() == count {
            return Ok(convergents_from_quotients(&qs));
        }
        if p >= cap {
            return Err(Error::PrecisionExhausted { what: "partial quotients".into(), bits: p });
        }
        p = (p * 2).min(cap);
    }
}

/// SCF convergents whose denominators satisfy `q <= e^{log_n_hi}`, plus the
/// first one beyond.
fn scf_convergents_below(s: i64, t: i64, log_n_hi: f64, cap: u32) -> Result<Vec<(BigInt, BigInt)>> {
    let hi_bits = (log_n_hi.max(1.0) * std::f64::consts::LOG2_E).ceil() as u32;
    let mut p = (4 * hi_bits + 128).max(256);
    loop {
        let (lo, hi) = endpoints(&exp_st(s, t, p)?);
        let cs = convergents_from_quotients(&common_partial_quotients(&lo, &hi, usize::MAX));
        if cs.last().is_some_and(|(_, q)| q.bits() as u32 > hi_bits + 1) {
            return Ok(cs);
        }
        if p >= cap {
            return Err(Error::PrecisionExhausted { what: "partial quotients".into(), bits: p });
        }
        p = (p * 2).min(cap);
    }
}

/// Which inequality a record was checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// The general bound `1/(Z(N) N^mu)`.
    Theorem1,
    /// `1/(1561 N^{2 + log 3 (1 + 4 eps)/log log N} (log N/log log N)^3)` for `e^3`.
    Corollary4,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Theorem1 => "theorem1",
            BoundKind::Corollary4 => "corollary4",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Undecided,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Undecided => "undecided",
            Verdict::Violated => "violated",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyRecord {
    pub s: i64,
    pub t: i64,
    pub bound: BoundKind,
    pub n: BigInt,
    pub m: BigInt,
    pub log_n: BallReal,
    /// `log|e^{s/t} - M/N|`.
    pub log_abs_lambda_over_n: BallReal,
    pub log_lower_bound: BallReal,
    /// `log_abs_lambda_over_n - log_lower_bound`.
    pub margin: BallReal,
    pub verdict: Verdict,
    pub precision_used: u32,
    /// `log N` certainly at or above the bound's threshold.
    pub threshold_ok: bool,
}

struct Evaluation {
    log_n: BallReal,
    log_lambda: BallReal,
    log_lower: BallReal,
    threshold_ok: bool,
}

fn log_abs_lambda_over_n(s: i64, t: i64, n: &BigInt, m: &BigInt, p: u32) -> Result<Option<(BallReal, BallReal)>> {
    let lambda = &(&BallReal::from_int(n.clone(), p) * &exp_st(s, t, p)?) - &BallReal::from_int(m.clone(), p);
    if lambda.contains_zero() {
        return Ok(None);
    }
    let log_n = BallReal::from_int(n.clone(), p).log()?;
    Ok(Some((&lambda.abs().log()? - &log_n, log_n)))
}

fn evaluate(s: i64, t: i64, bound: BoundKind, n: &BigInt, m: &BigInt, p: u32) -> Result<Option<Evaluation>> {
    let Some((log_lambda, log_n)) = log_abs_lambda_over_n(s, t, n, m, p)? else {
        return Ok(None);
    };
    let (log_lower, threshold_ok) = match bound {
        BoundKind::Theorem1 => {
            let report = theorem1_report(&ArithmeticProfile::new(s, t, p)?, &log_n)?;
            (report.log_lower_bound, report.threshold_ok)
        }
        BoundKind::Corollary4 => {
            // log N >= 983 is decided exactly: N >= e^983 iff N >= ceil(e^983)
            let ok = *n >= ceil_exp(&BallReal::from_int(COROLLARY4_LOG_N_MIN, p), p)?;
            if !ok {
                return Err(Error::Domain(format!("e^3 bound needs N >= e^983, got {} digits", n.to_string().len())));
            }
            (corollary4_bound(&log_n, p)?.log_lower_bound, ok)
        }
    };
    Ok(Some(Evaluation {
        log_n,
        log_lambda,
        log_lower,
        threshold_ok,
    }))
}

fn check_with(
    s: i64,
    t: i64,
    bound: BoundKind,
    n: &BigInt,
    m: Option<&BigInt>,
    precision_bits: u32,
    cap: u32,
) -> Result<VerifyRecord> {
    check_precision(precision_bits)?;
    check_n(n)?;
    let cap = cap.clamp(precision_bits, MAX_PRECISION_BITS);
    let m = match m {
        Some(m) if m.is_zero() => return Err(Error::InvalidArgument("M must be nonzero".into())),
        Some(m) => m.clone(),
        None => best_numerator_capped(s, t, n, precision_bits, cap)?,
    };
    let mut p = precision_bits;
    let mut last: Option<Evaluation> = None;
    loop {
        if let Some(ev) = evaluate(s, t, bound, n, &m, p)? {
            let margin = &ev.log_lambda - &ev.log_lower;
            let verdict = match margin.certify_sign() {
                CertifiedSign::Positive => Some(Verdict::Holds),
                CertifiedSign::Negative => Some(Verdict::Violated),
                CertifiedSign::Undecided => None,
            };
            if let Some(verdict) = verdict {
                return Ok(record(s, t, bound, n, m, ev, margin, verdict, p));
            }
            last = Some(ev);
        }
        if p >= cap {
            break;
        }
        p = (p * 2).min(cap);
    }
    let ev = match last {
        Some(ev) => ev,
        None => {
            // Lambda never separated from zero: report a whole-line ball
            let log_n = BallReal::from_int(n.clone(), p).log()?;
            let wide = BallReal::zero(p).inflate(crate::ball::Mag::pow2(64));
            Evaluation {
                log_n,
                log_lambda: wide.clone(),
                log_lower: wide,
                threshold_ok: false,
            }
        }
    };
    let margin = &ev.log_lambda - &ev.log_lower;
    Ok(record(s, t, bound, n, m, ev, margin, Verdict::Undecided, p))
}

#[allow(clippy::too_many_arguments)]
fn record(
    s: i64,
    t: i64,
    bound: BoundKind,
    n: &BigInt,
    m: BigInt,
    ev: Evaluation,
    margin: BallReal,
    verdict: Verdict,
    p: u32,
) -> VerifyRecord {
    VerifyRecord {
        s,
        t,
        bound,
        n: n.clone(),
        m,
        log_n: ev.log_n,
        log_abs_lambda_over_n: ev.log_lambda,
        log_lower_bound: ev.log_lower,
        margin,
        verdict,
        precision_used: p,
        threshold_ok: ev.threshold_ok,
    }
}

/// Checks `|e^{s/t} - M/N| > 1/(Z(N) N^mu)` for one `N`; `M` defaults to the
/// nearest integer. Below the threshold the record is still evaluated, with
/// `threshold_ok = false`.
pub fn check_theorem1(s: i64, t: i64, n: &BigInt, precision_bits: u32, m: Option<&BigInt>) -> Result<VerifyRecord> {
    check_with(s, t, BoundKind::Theorem1, n, m, precision_bits, MAX_PRECISION_BITS)
}

pub fn check_theorem1_capped(
    s: i64,
    t: i64,
    n: &BigInt,
    precision_bits: u32,
    m: Option<&BigInt>,
    cap: u32,
) -> Result<VerifyRecord> {
    check_with(s, t, BoundKind::Theorem1, n, m, precision_bits, cap)
}

/// `ceil(e^x)` for a ball `x`, refined until the ceiling is certain.
fn ceil_exp(x: &BallReal, precision_bits: u32) -> Result<BigInt> {
    let bits_needed = (x.to_f64().max(0.0) * std::f64::consts::LOG2_E) as u32 + 64;
    let mut p = precision_bits.max(bits_needed);
    loop {
        let y = x.with_prec(p).exp()?;
        let lo = -y.lower().neg().floor();
        let hi = -y.upper().neg().floor();
        if lo == hi {
            return Ok(lo.max(BigInt::one()));
        }
        if p >= MAX_PRECISION_BITS {
            return Err(Error::PrecisionExhausted { what: "ceil(e^x)".into(), bits: p });
        }
        p = (p * 2).min(MAX_PRECISION_BITS);
    }
}

/// `N = ceil(e^{log_n})` for an `f64` exponent taken as an exact dyadic.
pub fn n_from_log(log_n: f64) -> Result<BigInt> {
    if !log_n.is_finite() || log_n < 0.0 {
        return Err(Error::InvalidArgument(format!("log N must be finite and >= 0, got {log_n}")));
    }
    ceil_exp(&BallReal::from_f64(log_n, 128), 128)
}

/// `count` values of `log N` uniform in `[lo, hi]` from a ChaCha8 stream
/// seeded with `seed`.
pub fn sample_log_n(lo: f64, hi: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 {
        return Err(Error::InvalidArgument(format!("bad log N range [{lo}, {hi}]")));
    }
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty log N range [{lo}, {hi}]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect())
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub samples: usize,
    pub seed: u64,
    pub precision_bits: u32,
    pub cap: u32,
    /// Also check every SCF convergent denominator with `log q` in range.
    pub include_scf: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            samples: 100,
            seed: 0,
            precision_bits: DEFAULT_PRECISION_BITS,
            cap: MAX_PRECISION_BITS,
            include_scf: false,
        }
    }
}

fn sort_records(records: &mut [VerifyRecord]) {
    records.sort_by(|a, b| a.n.cmp(&b.n).then_with(|| a.m.cmp(&b.m)));
}

/// Checks the general bound on a seeded log-uniform sample of `N` with
/// `log N` in `[log_n_lo, log_n_hi]`, optionally together with the SCF
/// denominators in range. Records are sorted by `N`.
pub fn sweep_with(s: i64, t: i64, log_n_lo: f64, log_n_hi: f64, opts: &SweepOptions) -> Result<Vec<VerifyRecord>> {
    ExpArg::new(s, t)?;
    check_precision(opts.precision_bits)?;
    if opts.samples == 0 && !opts.include_scf {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let mut ns: Vec<(BigInt, Option<BigInt>)> = Vec::new();
    for x in sample_log_n(log_n_lo, log_n_hi, opts.samples, opts.seed)? {
        // sample points are strictly inside [e^lo, e^hi] up to the ceiling
        ns.push((n_from_log(x)?, None));
    }
    if opts.include_scf {
        let lo = n_from_log(log_n_lo)?;
        let hi = n_from_log(log_n_hi)?;
        for (p, q) in scf_convergents_below(s, t, log_n_hi, opts.cap)? {
            if q >= lo && q < hi && !p.is_zero() {
                ns.push((q, Some(p)));
            }
        }
    }
    let mut records = ns
        .par_iter()
        .map(|(n, m)| check_with(s, t, BoundKind::Theorem1, n, m.as_ref(), opts.precision_bits, opts.cap))
        .collect::<Result<Vec<_>>>()?;
    sort_records(&mut records);
    Ok(records)
}

pub fn sweep(
    s: i64,
    t: i64,
    log_n_lo: f64,
    log_n_hi: f64,
    samples: usize,
    seed: u64,
    precision_bits: u32,
) -> Result<Vec<VerifyRecord>> {
    let opts = SweepOptions {
        samples,
        seed,
        precision_bits,
        ..SweepOptions::default()
    };
    sweep_with(s, t, log_n_lo, log_n_hi, &opts)
}

/// Checks the `e^3` bound at `N = ceil(e^{log N})` for each sample, with the
/// nearest `M`. Every sample must have `log N >= 983`.
pub fn check_corollary4(log_n_samples: &[f64], precision_bits: u32, cap: u32) -> Result<Vec<VerifyRecord>> {
    check_precision(precision_bits)?;
    if let Some(x) = log_n_samples.iter().find(|x| x.is_nan() || **x < COROLLARY4_LOG_N_MIN as f64) {
        return Err(Error::InvalidArgument(format!("e^3 bound needs log N >= 983, got {x}")));
    }
    let ns = log_n_samples.iter().map(|&x| n_from_log(x)).collect::<Result<Vec<_>>>()?;
    let mut records = ns
        .par_iter()
        .map(|n| check_with(3, 1, BoundKind::Corollary4, n, None, precision_bits, cap))
        .collect::<Result<Vec<_>>>()?;
    sort_records(&mut records);
    Ok(records)
}

/// Seeded `log N` samples in `[log_n_lo, log_n_hi]` checked against the
/// `e^3` bound.
pub fn corollary4_sweep(
    log_n_lo: f64,
    log_n_hi: f64,
    samples: usize,
    seed: u64,
    precision_bits: u32,
    cap: u32,
) -> Result<Vec<VerifyRecord>> {
    check_corollary4(&sample_log_n(log_n_lo, log_n_hi, samples, seed)?, precision_bits, cap)
}

/// `|N e^{s/t} - M|` as a ball (for diagnostics and tests).
pub fn lambda_abs(s: i64, t: i64, n: &BigInt, m: &BigInt, precision_bits: u32) -> Result<BallReal> {
    let x = &BallReal::from_int(n.clone(), precision_bits) * &exp_st(s, t, precision_bits)?;
    Ok((&x - &BallReal::from_int(m.clone(), precision_bits)).abs())
}
