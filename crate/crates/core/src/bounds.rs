//! Evaluators for the explicit irrationality-measure bounds of `e^{s/t}`:
//! the general bound with `zeta(N)`, `Z(N)` and its threshold `N_1`, the
//! elementary-function variant with `c_2`, `d`, `N_2`, the asymptotic
//! exponents, the specialised `e^3` bound, and earlier exponents from the
//! literature for comparison.
//!
//! `N` enters only through `log N`, so all inputs are `log N` balls.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Pow;

use crate::ball::{BallReal, CertifiedSign};
use crate::error::{Error, Result};
use crate::padic::ArithmeticProfile;
use crate::zsolve::{z_of, zn_iterate};

fn ln(x: &BallReal, what: &str) -> Result<BallReal> {
    x.log().map_err(|_| Error::Domain(format!("log of {what} = {x} is undefined")))
}

fn int(n: impl Into<BigInt>, p: u32) -> BallReal {
    BallReal::from_int(n, p)
}

fn ratio(a: i64, b: i64, p: u32) -> BallReal {
    BallReal::from_ratio(&a.into(), &b.into(), p)
}

/// `log log log N / log log N`.
pub fn epsilon_of(log_n: &BallReal) -> Result<BallReal> {
    let ll = ln(log_n, "log N")?;
    let lll = ln(&ll, "log log N")?;
    Ok(lll.div(&ll)?)
}

/// `z(sigma log N)`, requiring `sigma log N > e`.
fn z_sigma(profile: &ArithmeticProfile, log_n: &BallReal) -> Result<(BallReal, BallReal)> {
    let p = profile.precision();
    let y = profile.sigma() * log_n;
    // z is the branch z >= 1 of z log z = y
    if !y.is_positive() {
        return Err(Error::Domain(format!("sigma log N = {y} is not positive")));
    }
    let z = z_of(&y, p)?.with_prec(p);
    Ok((y, z))
}

/// `zeta(N) = z(sigma log N)/sigma + beta`.
pub fn zeta_of(profile: &ArithmeticProfile, log_n: &BallReal) -> Result<BallReal> {
    let (_, z) = z_sigma(profile, log_n)?;
    zeta_from_z(profile, &z)
}

fn zeta_from_z(profile: &ArithmeticProfile, z: &BallReal) -> Result<BallReal> {
    Ok(&z.div(profile.sigma())? + &int(profile.beta(), profile.precision()))
}

fn alpha_pow(profile: &ArithmeticProfile, k: i64) -> Result<BallReal> {
    Ok(profile.alpha_log().mul_int(k).exp()?)
}

/// `Z(N)` and `log Z(N)` from `zeta(N)`.
fn big_z_from_zeta(profile: &ArithmeticProfile, zeta: &BallReal, log_n: &BallReal) -> Result<(BallReal, BallReal)> {
    let p = profile.precision();
    let (s, t) = (profile.s(), profile.t());
    let beta = profile.beta() as u64;
    let s2 = int(s * s, p);
    let gamma = int(profile.gamma().clone(), p);
    let alpha = profile.alpha();

    // (s^2/alpha^2 (zeta + 1))^beta
    let outer_base = (&s2 * &(zeta + &BallReal::one(p))).div(&alpha_pow(profile, 2)?)?;
    let first = (&int(8 * s.abs(), p) * &gamma.sqr())
        * (&(&int(4 * t, p) * zeta) + &int(6 * t + s * s, p))
        * zeta.pow_uint(beta);
    let first = first.div(alpha)?;
    let inv_n2 = log_n.mul_int(-2).exp()?;
    let denom = &s2 * &(profile.exp_st() - &BallReal::one(p)).abs();
    let second = (&(&int(profile.gcd2(), p) * &alpha_pow(profile, 2)?) * &gamma).div(&denom)? * inv_n2;
    let inner = &first + &second;
    let big_z = &outer_base.pow_uint(beta) * &inner;
    let log_z = &ln(&outer_base, "s^2 (zeta+1)/alpha^2")?.mul_int(beta as i64) + &ln(&inner, "Z inner factor")?;
    Ok((big_z, log_z))
}

/// `Z(N)`.
pub fn big_z(profile: &ArithmeticProfile, log_n: &BallReal) -> Result<BallReal> {
    let zeta = zeta_of(profile, log_n)?;
    Ok(big_z_from_zeta(profile, &zeta, log_n)?.0)
}

/// `log N_1`, the larger of `(eta - beta) log(sigma (eta - beta))` and
/// `log(gcd(2,s) / |4s + 2(s - 2t)(e^{s/t} - 1)|)`.
pub fn threshold_n1(profile: &ArithmeticProfile) -> Result<BallReal> {
    let p = profile.precision();
    let (s, t) = (profile.s(), profile.t());
    let eb = profile.eta() - &int(profile.beta(), p);
    let first = &eb * &ln(&(profile.sigma() * &eb), "sigma (eta - beta)")?;
    let inner = &int(4 * s, p) + &(&int(2 * (s - 2 * t), p) * &(profile.exp_st() - &BallReal::one(p)));
    let second = ln(&int(profile.gcd2(), p).div(&inner.abs())?, "gcd(2,s)/|4s + ...|")?;
    Ok(first.max(&second))
}

/// Every quantity of the general bound at one `log N`.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub s: i64,
    pub t: i64,
    pub log_n: BallReal,
    pub zeta: BallReal,
    pub big_z: BallReal,
    pub log_big_z: BallReal,
    /// `2 + 2 log(|s|/alpha) z(sigma log N) / (sigma log N)`.
    pub mu: BallReal,
    /// `-log Z(N) - mu log N`: the bound is `|e^{s/t} - M/N| > exp(log_lower_bound)`.
    pub log_lower_bound: BallReal,
    pub log_n1: BallReal,
    /// `log N >= log N_1`, certified; false when undecidable.
    pub threshold_ok: bool,
}

pub fn theorem1_report(profile: &ArithmeticProfile, log_n: &BallReal) -> Result<BoundReport> {
    let p = profile.precision();
    let log_n = log_n.with_prec(p);
    let (y, z) = z_sigma(profile, &log_n)?;
    let zeta = zeta_from_z(profile, &z)?;
    let (big_z, log_big_z) = big_z_from_zeta(profile, &zeta, &log_n)?;
    let mu = &int(2, p) + &(&profile.log_s_over_alpha().mul_int(2) * &z.div(&y)?);
    let log_lower_bound = -(&log_big_z + &(&mu * &log_n));
    let log_n1 = threshold_n1(profile)?;
    let threshold_ok = (&log_n - &log_n1).certify_sign() == CertifiedSign::Positive;
    Ok(BoundReport {
        s: profile.s(),
        t: profile.t(),
        log_n,
        zeta,
        big_z,
        log_big_z,
        mu,
        log_lower_bound,
        log_n1,
        threshold_ok,
    })
}

/// The constants of the elementary-function bound.
#[derive(Clone, Debug)]
pub struct Corollary2Constants {
    pub c2: BallReal,
    pub d: BallReal,
    pub log_n2: BallReal,
    /// Whether the `(rho (2 beta + 1) / (2 log(|s|/alpha)))^{4/3}` entry was
    /// dropped from the maximum because `|s| = alpha`.
    pub degenerate_term_omitted: bool,
}

pub fn corollary2_constants(profile: &ArithmeticProfile) -> Result<Corollary2Constants> {
    let p = profile.precision();
    let (s, t) = (profile.s(), profile.t());
    let beta = profile.beta();
    let e = BallReal::e(p);
    let mut log_n2 = threshold_n1(profile)?;
    log_n2 = log_n2.max(&e.mul_int(4).exp()?);
    log_n2 = log_n2.max(&profile.sigma().sqr().recip()?);
    log_n2 = log_n2.max(&int(beta * beta, p));
    let degenerate = profile.s_equals_alpha();
    if !degenerate {
        let base = (profile.rho() * &int(2 * beta + 1, p)).div(&profile.log_s_over_alpha().mul_int(2))?;
        let term = (&ln(&base, "rho (2 beta + 1) / (2 log(|s|/alpha))")? * &ratio(4, 3, p)).exp()?;
        log_n2 = log_n2.max(&term);
    }
    let root4 = (&ln(&log_n2, "log N_2")? * &ratio(1, 4, p)).exp()?;
    let d = (&root4.div(profile.sigma())? + &int(beta, p)).recip()?;

    let one = BallReal::one(p);
    let gamma = int(profile.gamma().clone(), p);
    let k = 2 * beta as u64 + 1;
    let abs_s_pow = int(Pow::pow(&BigInt::from(s.abs()), k), p);
    let first = (&int(8, p) * &gamma.sqr()) * abs_s_pow * (&d + &one).pow_uint(beta as u64)
        * (&int(4 * t, p) + &(&d * &int(6 * t + s * s, p)));
    let first = first.div(&alpha_pow(profile, k as i64)?)?;
    // s^{2(beta-1)} and alpha^{2(beta-1)} may have negative exponents
    let s_pow = int(s * s, p).pow_int(beta as i64 - 1)?;
    let inv_n2sq = log_n2.mul_int(-2).exp()?;
    let num = &(&int(profile.gcd2(), p) * &gamma) * &s_pow;
    let num = &(&num * &d) * &(&d + &d.sqr()).pow_uint(beta as u64);
    let den = &alpha_pow(profile, 2 * (beta as i64 - 1))? * &(profile.exp_st() - &one).abs();
    let second = num.div(&den)? * inv_n2sq;
    Ok(Corollary2Constants {
        c2: &first + &second,
        d,
        log_n2,
        degenerate_term_omitted: degenerate,
    })
}

/// `2 + 2 log(|s|/alpha) (1 + rho eps(N)) / log log N`.
pub fn corollary2_exponent(profile: &ArithmeticProfile, log_n: &BallReal) -> Result<BallReal> {
    let p = profile.precision();
    let log_n = log_n.with_prec(p);
    let eps = epsilon_of(&log_n)?;
    let ll = ln(&log_n, "log N")?;
    let corr = (&BallReal::one(p) + &(profile.rho() * &eps)).div(&ll)?;
    Ok(&int(2, p) + &(&profile.log_s_over_alpha().mul_int(2) * &corr))
}

/// `log` of the elementary-function lower bound:
/// `-log c_2 - exponent log N - (2 beta + 1) log(log N / log log N)`.
pub fn corollary2_log_lower_bound(
    profile: &ArithmeticProfile,
    constants: &Corollary2Constants,
    log_n: &BallReal,
) -> Result<BallReal> {
    let p = profile.precision();
    let log_n = log_n.with_prec(p);
    let exponent = corollary2_exponent(profile, &log_n)?;
    let ll = ln(&log_n, "log N")?;
    let poly = (&log_n.log()? - &ln(&ll, "log log N")?).mul_int(2 * profile.beta() as i64 + 1);
    Ok(-(&(&ln(&constants.c2, "c_2")? + &(&exponent * &log_n)) + &poly))
}

/// Asymptotic exponents. For `n = 1`:
/// `2 + 2 log(|s|/alpha) (1 + (1 + eps_3) eps(N)) / log log N`; for
/// `n >= 2`: `2 + 2 log(|s|/alpha) (1/log z_{n-1}(log N) + c_3/(log log N)^2)`.
/// The constants `c_3` and `eps_3` are only known to exist, so the caller
/// supplies them.
pub fn corollary3_exponent(
    profile: &ArithmeticProfile,
    log_n: &BallReal,
    n: u32,
    c3: &BallReal,
    eps3: &BallReal,
) -> Result<BallReal> {
    let p = profile.precision();
    let log_n = log_n.with_prec(p);
    let ll = ln(&log_n, "log N")?;
    let one = BallReal::one(p);
    let corr = match n {
        0 => return Err(Error::InvalidArgument("asymptotic exponent needs n >= 1".into())),
        1 => {
            let eps = epsilon_of(&log_n)?;
            (&one + &(&(&one + eps3) * &eps)).div(&ll)?
        }
        _ => {
            let zn = zn_iterate(&log_n, n - 1, p)?;
            let lz = ln(&zn, "z_{n-1}(log N)")?;
            &lz.recip()? + &c3.with_prec(p).div(&ll.sqr())?
        }
    };
    Ok(&int(2, p) + &(&profile.log_s_over_alpha().mul_int(2) * &corr))
}

/// The three factors of the `e^3` bound and its logarithmic lower bound.
#[derive(Clone, Debug)]
pub struct Corollary4Bound {
    pub factor: u32,
    /// `2 + log 3 (1 + 4 eps(N)) / log log N`.
    pub exponent: BallReal,
    /// `(log N / log log N)^3`.
    pub polylog: BallReal,
    /// `-log 1561 - exponent log N - 3 log(log N / log log N)`.
    pub log_lower_bound: BallReal,
}

pub const COROLLARY4_FACTOR: u32 = 1561;
pub const COROLLARY4_LOG_N_MIN: i64 = 983;

/// Rejects `log N` only when it is certainly below 983; a ball straddling
/// 983 is accepted (callers passing an exact `N` know which side it is on).
pub fn corollary4_bound(log_n: &BallReal, precision_bits: u32) -> Result<Corollary4Bound> {
    let p = precision_bits;
    let log_n = log_n.with_prec(p);
    if (&log_n - &int(COROLLARY4_LOG_N_MIN, p)).is_negative() {
        return Err(Error::Domain(format!("e^3 bound needs log N >= 983, got {log_n}")));
    }
    let eps = epsilon_of(&log_n)?;
    let ll = ln(&log_n, "log N")?;
    let log3 = int(3, p).log()?;
    let exponent = &int(2, p) + &(&log3 * &(&BallReal::one(p) + &eps.mul_int(4))).div(&ll)?;
    let ratio = log_n.div(&ll)?;
    let polylog = ratio.pow_uint(3);
    let log_lower_bound = -(&(&int(COROLLARY4_FACTOR, p).log()? + &(&exponent * &log_n))
        + &ln(&ratio, "log N / log log N")?.mul_int(3));
    Ok(Corollary4Bound {
        factor: COROLLARY4_FACTOR,
        exponent,
        polylog,
        log_lower_bound,
    })
}

/// Exponents of earlier bounds, written in terms of `log N`.
#[derive(Clone, Debug)]
pub struct CompetitorExponents {
    /// `2 + 4 log|s| w(log N) / log N` with `w(x) = (x + delta)/log(x + delta)`.
    pub bundschuh: BallReal,
    /// `2 + 2 log|s| z(tau log N) / (tau log N)` with `tau = 4t/(e s^2)`.
    pub shiokawa: BallReal,
    /// `2 + (2 + eps_Z) log|s| / log log N`.
    pub zheng: BallReal,
    pub tau: BallReal,
}

/// `delta` and `eps_Z` come from the original works and are not
/// reproduced here; the caller supplies them.
pub fn competitor_exponents(
    profile: &ArithmeticProfile,
    log_n: &BallReal,
    delta: &BallReal,
    eps_z: &BallReal,
) -> Result<CompetitorExponents> {
    let p = profile.precision();
    let log_n = log_n.with_prec(p);
    let two = int(2, p);
    let log_s = profile.log_abs_s();

    let xd = &log_n + &delta.with_prec(p);
    let w = xd.div(&ln(&xd, "log N + delta")?)?;
    let bundschuh = &two + &(&log_s.mul_int(4) * &w).div(&log_n)?;

    let tau = int(4 * profile.t(), p).div(&(&BallReal::e(p) * &int(profile.s() * profile.s(), p)))?;
    let y = &tau * &log_n;
    let z = z_of(&y, p)?.with_prec(p);
    let shiokawa = &two + &(&log_s.mul_int(2) * &z.div(&y)?);

    let ll = ln(&log_n, "log N")?;
    let zheng = &two + &(&(&two + &eps_z.with_prec(p)) * log_s).div(&ll)?;
    Ok(CompetitorExponents { bundschuh, shiokawa, zheng, tau })
}

/// `(mu - 2) / (shiokawa - 2)`; `None` when `log|s| = 0`.
pub fn excess_ratio(report: &BoundReport, competitors: &CompetitorExponents) -> Result<Option<BallReal>> {
    let p = report.mu.prec();
    let den = &competitors.shiokawa - &int(2, p);
    if den.contains_zero() {
        return Ok(None);
    }
    Ok(Some((&report.mu - &int(2, p)).div(&den)?))
}

/// Certified `a < b`; `None` if undecidable at the current precision.
pub fn certified_less(a: &BallReal, b: &BallReal) -> Option<bool> {
    a.certified_cmp(b).map(|o| o == Ordering::Less)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn profile(s: i64, t: i64) -> ArithmeticProfile {
        ArithmeticProfile::new(s, t, P).unwrap()
    }

    fn f(x: f64) -> BallReal {
        BallReal::from_f64(x, P)
    }

    #[test]
    fn n1_for_e_cubed() {
        let n1 = threshold_n1(&profile(3, 1)).unwrap();
        assert!((n1.to_f64() - 982.40529).abs() < 5e-6, "{n1}");
        assert!(n1.rad().to_f64() < 1e-50);
    }

    #[test]
    fn n1_for_e() {
        let pr = profile(1, 1);
        let n1 = threshold_n1(&pr).unwrap();
        assert!(n1.to_f64() < 10.0);
        // second entry: log(1/|4 - 2(e - 1)|) = -log(6 - 2e)
        let e = std::f64::consts::E;
        let second = -(6.0 - 2.0 * e).ln();
        let eta = pr.eta().to_f64();
        let sigma = 4.0 / e;
        let first = eta * (sigma * eta).ln();
        assert!((n1.to_f64() - first.max(second)).abs() < 1e-12);
    }

    #[test]
    fn zeta_at_983() {
        let pr = profile(3, 1);
        let zeta = zeta_of(&pr, &f(983.0)).unwrap();
        assert!(zeta.to_f64() >= 111.0);
        let z = big_z(&pr, &f(983.0)).unwrap();
        assert!((&(&int(1561, P) * &zeta.pow_uint(3)) - &z).is_positive());
    }

    #[test]
    fn zeta_dominates_first_iterate() {
        let pr = profile(1, 1);
        let log_n = f(100.0);
        let zeta = zeta_of(&pr, &log_n).unwrap();
        let y = pr.sigma() * &log_n;
        let lower = &zn_iterate(&y, 1, P).unwrap().div(pr.sigma()).unwrap() + &int(pr.beta(), P);
        assert!((&zeta - &lower).is_positive());
        assert_eq!(pr.beta(), 0);
        let z = z_of(&y, P).unwrap();
        assert!(zeta.overlaps(&z.div(pr.sigma()).unwrap()));
    }

    #[test]
    fn big_z_finite_and_stable() {
        let lo = big_z(&ArithmeticProfile::new(1, 2, P).unwrap(), &f(50.0)).unwrap();
        let hi = big_z(&ArithmeticProfile::new(1, 2, 2 * P).unwrap(), &BallReal::from_f64(50.0, 2 * P)).unwrap();
        assert!(lo.is_positive() && lo.overlaps(&hi));
        assert!(hi.rad().to_f64() <= lo.rad().to_f64());
    }

    #[test]
    fn second_term_fades() {
        let pr = profile(2, 3);
        let first_only = |log_n: f64| {
            let zeta = zeta_of(&pr, &f(log_n)).unwrap();
            let s = pr.s();
            // beta = 0, gamma = 1 for s = 2
            let first = &int(8 * s.abs(), P) * &(&(&int(4 * pr.t(), P) * &zeta) + &int(6 * pr.t() + s * s, P));
            first.div(pr.alpha()).unwrap()
        };
        // sigma = 4t alpha/(e s^2) = 6/e, so sigma log N > e from log N = 2
        let near = big_z(&pr, &f(2.0)).unwrap();
        assert_eq!(certified_less(&first_only(2.0), &near), Some(true));
        let far = big_z(&pr, &f(1e4)).unwrap();
        assert!(far.overlaps(&first_only(1e4)));
    }

    #[test]
    fn report_monotone() {
        let pr = profile(5, 2);
        let samples = [200.0, 1e3, 1e5, 1e7];
        let reports: Vec<BoundReport> = samples.iter().map(|&x| theorem1_report(&pr, &f(x)).unwrap()).collect();
        for r in &reports {
            assert!((&r.mu - &int(2, P)).is_positive());
            assert_eq!(r.zeta.certified_cmp(&(pr.sigma().recip().unwrap())), Some(Ordering::Greater));
        }
        for w in reports.windows(2) {
            assert_eq!(certified_less(&w[0].zeta, &w[1].zeta), Some(true));
            assert_eq!(certified_less(&w[1].mu, &w[0].mu), Some(true));
            assert_eq!(certified_less(&w[0].big_z, &w[1].big_z), Some(true));
        }
        assert!(reports[3].mu.to_f64() - 2.0 < (reports[0].mu.to_f64() - 2.0) / 2.0);
        assert!(!theorem1_report(&profile(3, 1), &f(100.0)).unwrap().threshold_ok);
        assert!(theorem1_report(&profile(3, 1), &f(983.0)).unwrap().threshold_ok);
    }

    #[test]
    fn zeta_domain() {
        assert!(matches!(zeta_of(&profile(3, 1), &f(0.0)), Err(Error::Domain(_))));
        assert!(zeta_of(&profile(3, 1), &f(2.0)).is_ok());
        // for |s| = 1 the threshold sits exactly at sigma log N = e, i.e. z = e
        let pr = profile(1, 1);
        let n1 = threshold_n1(&pr).unwrap();
        assert!((&(pr.sigma() * &n1) - &BallReal::e(P)).contains_zero());
        let z = zeta_of(&pr, &n1).unwrap();
        assert!((&(&z * pr.sigma()) - &BallReal::e(P)).contains_zero());
    }

    #[test]
    fn corollary2_for_e_cubed() {
        let pr = profile(3, 1);
        let c = corollary2_constants(&pr).unwrap();
        let e4e = (4.0 * std::f64::consts::E).exp();
        assert!((c.log_n2.to_f64() - e4e).abs() < 1e-6 * e4e);
        assert!((c.log_n2.to_f64() - 52740.0).abs() < 1.0);
        let c2 = c.c2.to_f64();
        assert!(c2 < 1629.0 && c2 > 1628.0, "{c2}");
        // the exponent coefficient 2 log(|s|/alpha) = log 3, rho rounds up to 8
        assert!(pr.log_s_over_alpha().mul_int(2).overlaps(&int(3, P).log().unwrap()));
        assert!(pr.rho().to_f64() < 8.0 && pr.rho().to_f64() > 7.0);
        assert!(!c.degenerate_term_omitted);
    }

    #[test]
    fn corollary2_degenerate_and_d() {
        for s in [1i64, 2, -1, -2] {
            let c = corollary2_constants(&ArithmeticProfile::new(s, 3, P).unwrap()).unwrap();
            assert!(c.degenerate_term_omitted);
            assert!(c.c2.is_positive());
        }
        // d shrinks as N_2 grows: here N_2 is driven by the last entry for large s
        let small = corollary2_constants(&profile(3, 1)).unwrap().d;
        let large = corollary2_constants(&ArithmeticProfile::new(3 * 5 * 7 * 11 * 13, 1, P).unwrap()).unwrap();
        assert!(large.log_n2.to_f64() >= 52740.0);
        assert!(small.is_positive() && small.to_f64() < 1.0);
    }

    #[test]
    fn corollary2_chain() {
        for (s, t) in [(3i64, 1i64), (-6, 5), (10, 1)] {
            let pr = profile(s, t);
            let c = corollary2_constants(&pr).unwrap();
            for k in [1.0, 2.0, 10.0, 1e3] {
                let log_n = &c.log_n2 * &f(k);
                let mu = theorem1_report(&pr, &log_n).unwrap().mu;
                let e2 = corollary2_exponent(&pr, &log_n).unwrap();
                assert_eq!(certified_less(&mu, &e2), Some(true), "s={s} t={t} k={k}");
            }
        }
    }

    #[test]
    fn corollary3_values() {
        let pr = profile(3, 1);
        let half = ratio(1, 2, P);
        let one = BallReal::one(P);
        let e1 = corollary3_exponent(&pr, &f(1e6), 1, &one, &half).unwrap();
        assert!(e1.rad().to_f64() < 1e-50 && (&e1 - &int(2, P)).is_positive());
        let a = corollary3_exponent(&pr, &f(1e8), 1, &one, &half).unwrap();
        let b = corollary3_exponent(&pr, &f(1e8), 2, &one, &half).unwrap();
        let ll = 1e8f64.ln().ln();
        assert!((a.to_f64() - b.to_f64()).abs() < 10.0 / (ll * ll));
        let later = corollary3_exponent(&pr, &f(1e12), 1, &one, &half).unwrap();
        assert_eq!(certified_less(&later, &e1), Some(true));
        for n in 2..6 {
            let x = corollary3_exponent(&pr, &f(1e6), n, &one, &half).unwrap();
            let y = corollary3_exponent(&pr, &f(1e9), n, &one, &half).unwrap();
            assert_eq!(certified_less(&y, &x), Some(true), "n={n}");
        }
        assert!(corollary3_exponent(&pr, &f(1e6), 0, &one, &half).is_err());
    }

    #[test]
    fn corollary4_threshold() {
        let b = corollary4_bound(&f(983.0), P).unwrap();
        assert_eq!(b.factor, 1561);
        assert!(epsilon_of(&f(983.0)).unwrap().to_f64() < 0.3);
        assert!(corollary4_bound(&f(982.0), P).is_err());
        let far = corollary4_bound(&f(1e9), P).unwrap();
        assert!(far.exponent.to_f64() - 2.0 < (b.exponent.to_f64() - 2.0) / 2.0);
        let x = 983.0f64;
        let eps = x.ln().ln() / x.ln();
        assert!((b.exponent.to_f64() - (2.0 + 3f64.ln() * (1.0 + 4.0 * eps) / x.ln())).abs() < 1e-12);
        assert!((b.polylog.to_f64() - (x / x.ln()).powi(3)).abs() < 1e-9 * b.polylog.to_f64());
    }

    #[test]
    fn competitors() {
        let pr = profile(3, 1);
        let c = competitor_exponents(&pr, &f(1e6), &BallReal::one(P), &ratio(1, 10, P)).unwrap();
        let tau = 4.0 / (9.0 * std::f64::consts::E);
        assert!((c.tau.to_f64() - tau).abs() < 1e-15);
        let r = theorem1_report(&pr, &f(1e6)).unwrap();
        let q = excess_ratio(&r, &c).unwrap().unwrap().to_f64();
        assert!((q - 0.5).abs() < 0.05, "{q}");
        assert!(c.bundschuh.is_positive() && c.zheng.is_positive());
        // |s| = 2: alpha = 2 so the excess coefficient vanishes
        let r2 = theorem1_report(&profile(2, 1), &f(1e6)).unwrap();
        assert!(r2.mu.contains(&crate::ball::Dyadic::from_int(2)));
    }

    #[test]
    fn improvement_over_shiokawa() {
        for (s, t) in [(3i64, 1i64), (4, 3), (-5, 1), (6, 7), (12, 5)] {
            let pr = profile(s, t);
            let n1 = threshold_n1(&pr).unwrap().to_f64().max(10.0);
            for k in [1.5, 10.0, 1e3] {
                let log_n = f(n1 * k);
                let r = match theorem1_report(&pr, &log_n) {
                    Ok(r) => r,
                    Err(Error::Domain(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                let c = competitor_exponents(&pr, &log_n, &BallReal::one(P), &BallReal::zero(P)).unwrap();
                assert_eq!(certified_less(&r.mu, &c.shiokawa), Some(true), "s={s} t={t} k={k}");
            }
        }
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn beats_shiokawa_for_large_s(s in 3i64..200, t in 1i64..20, k in 1.0f64..1e4, neg in any::<bool>()) {
            let s = if neg { -s } else { s };
            prop_assume!(num_integer::Integer::gcd(&s, &t) == 1);
            let pr = profile(s, t);
            // above both the threshold and the point where sigma log N, tau log N > e
            let n1 = threshold_n1(&pr).unwrap().to_f64();
            prop_assume!(n1.is_finite() && n1 < 1e12);
            let floor = 3.0 / pr.sigma().to_f64();
            let log_n = f(n1.max(floor) * (1.0 + k));
            let r = theorem1_report(&pr, &log_n).unwrap();
            let c = competitor_exponents(&pr, &log_n, &BallReal::one(P), &BallReal::zero(P)).unwrap();
            prop_assert_eq!(certified_less(&(&r.mu - &int(2, P)), &(&c.shiokawa - &int(2, P))), Some(true));
        }

        #[test]
        fn zeta_up_mu_down(s in -30i64..=30, t in 1i64..=10, x in 5.0f64..1e6, step in 1.01f64..10.0) {
            prop_assume!(s.abs() >= 3 && num_integer::Integer::gcd(&s, &t) == 1);
            let pr = profile(s, t);
            let a = theorem1_report(&pr, &f(x)).unwrap();
            let b = theorem1_report(&pr, &f(x * step)).unwrap();
            prop_assert_eq!(certified_less(&a.zeta, &b.zeta), Some(true));
            prop_assert_eq!(certified_less(&b.mu, &a.mu), Some(true));
        }
    }
}
