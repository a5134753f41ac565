//! Factorization of `s`, p-adic valuations, Legendre's formula, the common
//! divisor `D_n` and the arithmetic constants attached to `e^{s/t}`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::ball::{BallReal, CertifiedSign};
use crate::error::{Error, Result};

/// The exponent `s/t` of `e^{s/t}`: `s != 0`, `t >= 1`, `gcd(|s|, t) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExpArg {
    s: i64,
    t: i64,
}

impl ExpArg {
    pub fn new(s: i64, t: i64) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidArgument("s must be nonzero".into()));
        }
        if t < 1 {
            return Err(Error::InvalidArgument(format!("t must be positive, got {t}")));
        }
        let g = s.unsigned_abs().gcd(&(t as u64));
        if g != 1 {
            return Err(Error::InvalidArgument(format!(
                "s and t must be coprime, gcd({s}, {t}) = {g}"
            )));
        }
        Ok(ExpArg { s, t })
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn abs_s(&self) -> u64 {
        self.s.unsigned_abs()
    }
}

impl fmt::Display for ExpArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^({}/{})", self.s, self.t)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin; the first twelve prime bases suffice below 2^64.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut r) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factors with multiplicities, ascending by prime.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PrimeFactorization {
    factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn odd_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes().filter(|&p| p != 2)
    }

    pub fn has_two(&self) -> bool {
        self.factors.first().is_some_and(|&(p, _)| p == 2)
    }

    pub fn product(&self) -> BigInt {
        self.factors
            .iter()
            .map(|&(p, m)| Pow::pow(&BigInt::from(p), m))
            .product()
    }

    /// `r_p(n)` for each prime: `n + 1` for `p = 2`, `v_p((n+1)!)` otherwise.
    pub fn divisor_exponents(&self, n: u64) -> Vec<(u64, u64)> {
        self.primes()
            .map(|p| (p, if p == 2 { n + 1 } else { vp_factorial(n + 1, p) }))
            .collect()
    }
}

/// Trial division, finishing early once the cofactor is prime. Intended for
/// the small `|s|` this crate works with; a product of two primes near 2^32
/// is the slow worst case.
pub fn factorize(n: u64) -> Result<PrimeFactorization> {
    if n == 0 {
        return Err(Error::InvalidArgument("cannot factorize 0".into()));
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut take = |m: &mut u64, p: u64| {
        let mut k = 0;
        while (*m).is_multiple_of(p) {
            *m /= p;
            k += 1;
        }
        if k > 0 {
            factors.push((p, k));
        }
    };
    take(&mut m, 2);
    take(&mut m, 3);
    let mut d = 5u64;
    while m > 1 && !is_prime(m) && d.saturating_mul(d) <= m {
        take(&mut m, d);
        take(&mut m, d + 2);
        d += 6;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    factors.sort_unstable();
    Ok(PrimeFactorization { factors })
}

/// A p-adic order; `v_p(0)` is infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{p} is not prime")))
    }
}

/// Exponent of `p` in `n` (sign ignored).
pub fn vp(n: &BigInt, p: u64) -> Result<Valuation> {
    require_prime(p)?;
    if n.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let p = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Ok(Valuation::Finite(v));
        }
        m = q;
        v += 1;
    }
}

/// Sum of the base-`p` digits of `n`.
pub fn digit_sum(mut n: u64, p: u64) -> u64 {
    assert!(p >= 2, "base must be at least 2");
    let mut sum = 0;
    while n > 0 {
        sum += n % p;
        n /= p;
    }
    sum
}

/// `v_p(n!) = (n - s_p(n)) / (p - 1)`.
pub fn vp_factorial(n: u64, p: u64) -> u64 {
    (n - digit_sum(n, p)) / (p - 1)
}

/// `D_n = prod_{p | s} p^{r_p(n)}`.
pub fn big_divisor(n: u64, s: i64) -> BigInt {
    let f = factorize(s.unsigned_abs()).expect("s is nonzero");
    divisor_from_factors(&f, n)
}

pub(crate) fn divisor_from_factors(f: &PrimeFactorization, n: u64) -> BigInt {
    f.divisor_exponents(n)
        .into_iter()
        .map(|(p, r)| Pow::pow(&BigInt::from(p), r))
        .product()
}

/// Outcome of one side of the two-sided bound on `D_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundCheck {
    /// Strict inequality certified by ball arithmetic on logarithms.
    Strict,
    /// Ball comparison inconclusive; an exact integer comparison shows
    /// equality.
    Equal,
    /// Strict inequality certified only by the exact comparison.
    StrictExact,
    /// The bound fails.
    Violated,
}

impl BoundCheck {
    pub fn holds(self) -> bool {
        self != BoundCheck::Violated
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivisorBounds {
    pub n: u64,
    pub lower: BoundCheck,
    pub upper: BoundCheck,
}

/// Constants derived from `(s, t)`, evaluated as balls at a fixed precision.
#[derive(Clone, Debug)]
pub struct ArithmeticProfile {
    arg: ExpArg,
    factors: PrimeFactorization,
    precision: u32,
    log_primes: Vec<BallReal>,
    alpha_log: BallReal,
    alpha: BallReal,
    log_abs_s: BallReal,
    log_s_over_alpha: BallReal,
    beta: u32,
    gamma: BigInt,
    sigma: BallReal,
    log_sigma: BallReal,
    rho: BallReal,
    eta: BallReal,
    gcd2: u32,
    exp_st: BallReal,
}

impl ArithmeticProfile {
    pub fn new(s: i64, t: i64, precision_bits: u32) -> Result<Self> {
        ArithmeticProfile::from_arg(ExpArg::new(s, t)?, precision_bits)
    }

    pub fn from_arg(arg: ExpArg, precision_bits: u32) -> Result<Self> {
        if precision_bits < 32 {
            return Err(Error::InvalidArgument(format!(
                "precision {precision_bits} is below 32 bits"
            )));
        }
        let prec = precision_bits;
        let factors = factorize(arg.abs_s())?;
        let log_primes = factors
            .primes()
            .map(|p| BallReal::from_int(p, prec).log())
            .collect::<std::result::Result<Vec<_>, _>>()?;

        let mut alpha_log = BallReal::zero(prec);
        let mut log_abs_s = BallReal::zero(prec);
        let mut log_s_over_alpha = BallReal::zero(prec);
        for (&(p, m), lp) in factors.factors().iter().zip(&log_primes) {
            let pm1 = BigInt::from(p - 1);
            alpha_log = &alpha_log + &lp.div(&BallReal::from_int(pm1.clone(), prec))?;
            log_abs_s = &log_abs_s + &lp.mul_int(m as i64);
            // log p * (m - 1/(p-1)), exactly zero when p = 2 and m = 1
            let coeff: BigInt = BigInt::from(m) * &pm1 - 1;
            if !coeff.is_zero() {
                let term = (lp * &BallReal::from_int(coeff, prec)).div(&BallReal::from_int(pm1, prec))?;
                log_s_over_alpha = &log_s_over_alpha + &term;
            }
        }
        let alpha = alpha_log.exp()?;
        let beta = factors.odd_primes().count() as u32;
        let gamma: BigInt = factors.odd_primes().map(BigInt::from).product();
        let gcd2 = if factors.has_two() { 2 } else { 1 };

        let log_sigma = log_sigma_ball(arg, &factors, prec)?;
        let sigma = log_sigma.exp()?;
        // sigma = 1 exactly is impossible (e is transcendental), so refining
        // until the sign is certain terminates in practice
        let sign = sign_with_refinement(|p| log_sigma_ball(arg, &factors, p), &log_sigma)?;
        let rho = match sign {
            CertifiedSign::Negative => &BallReal::from_int(5, prec) - &log_sigma.mul_int(2),
            _ => BallReal::from_ratio(&7.into(), &3.into(), prec),
        };

        let exp_st = BallReal::exp_ratio(&arg.s().into(), &arg.t().into(), prec)?;
        let e = BallReal::e(prec);
        let sqrt_e = BallReal::exp_ratio(&1.into(), &2.into(), prec)?;
        let sqrt2 = BallReal::from_int(2, prec).sqrt()?;
        let gamma_ball = BallReal::from_int(gamma.clone(), prec);
        let first = (&(&sqrt_e * &(&exp_st - &BallReal::one(prec)).abs()) * &gamma_ball)
            .div(&(&sqrt2 * &sigma.pow_uint(beta as u64)))?;
        let first = &first - &BallReal::from_ratio(&1.into(), &2.into(), prec);
        let second = &e.div(&sigma)? + &BallReal::from_int(beta, prec);
        let eta = first.max(&second);

        Ok(ArithmeticProfile {
            arg,
            factors,
            precision: prec,
            log_primes,
            alpha_log,
            alpha,
            log_abs_s,
            log_s_over_alpha,
            beta,
            gamma,
            sigma,
            log_sigma,
            rho,
            eta,
            gcd2,
            exp_st,
        })
    }

    pub fn arg(&self) -> ExpArg {
        self.arg
    }

    pub fn s(&self) -> i64 {
        self.arg.s()
    }

    pub fn t(&self) -> i64 {
        self.arg.t()
    }

    pub fn factors(&self) -> &PrimeFactorization {
        &self.factors
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `log alpha = sum_{p | s} log p / (p - 1)`.
    pub fn alpha_log(&self) -> &BallReal {
        &self.alpha_log
    }

    pub fn alpha(&self) -> &BallReal {
        &self.alpha
    }

    pub fn log_abs_s(&self) -> &BallReal {
        &self.log_abs_s
    }

    /// `log(|s| / alpha)`; the exact zero ball when `|s|` is 1 or 2.
    pub fn log_s_over_alpha(&self) -> &BallReal {
        &self.log_s_over_alpha
    }

    /// Whether `alpha = |s|`, which happens exactly for `|s|` in {1, 2}.
    pub fn s_equals_alpha(&self) -> bool {
        self.arg.abs_s() <= 2
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn gamma(&self) -> &BigInt {
        &self.gamma
    }

    pub fn sigma(&self) -> &BallReal {
        &self.sigma
    }

    pub fn log_sigma(&self) -> &BallReal {
        &self.log_sigma
    }

    pub fn rho(&self) -> &BallReal {
        &self.rho
    }

    pub fn eta(&self) -> &BallReal {
        &self.eta
    }

    pub fn gcd2(&self) -> u32 {
        self.gcd2
    }

    /// `e^{s/t}`.
    pub fn exp_st(&self) -> &BallReal {
        &self.exp_st
    }

    /// `log D_n` from the factorization.
    pub fn log_divisor(&self, n: u64) -> BallReal {
        let mut acc = BallReal::zero(self.precision);
        for ((_, r), lp) in self.factors.divisor_exponents(n).into_iter().zip(&self.log_primes) {
            acc = &acc + &(lp * &BallReal::from_int(r, self.precision));
        }
        acc
    }

    pub fn divisor(&self, n: u64) -> BigInt {
        divisor_from_factors(&self.factors, n)
    }

    /// Checks `alpha^{n+1} / (gamma (n+1)^beta) <= D_n <= gcd(2,s) alpha^n`.
    ///
    /// The logarithms are compared as balls; when a ball straddles zero the
    /// comparison is redone exactly after raising both sides to the power
    /// `L = lcm(p - 1)`, which makes `alpha^L` an integer.
    pub fn check_divisor_bounds(&self, n: u64) -> Result<DivisorBounds> {
        let prec = self.precision;
        let log_d = self.log_divisor(n);
        let n1 = BallReal::from_int(n + 1, prec);
        let log_lower = &(&self.alpha_log * &n1)
            - &(&BallReal::from_int(self.gamma.clone(), prec).log()?
                + &n1.log()?.mul_int(self.beta as i64));
        let log_upper = &BallReal::from_int(self.gcd2, prec).log()?
            + &(&self.alpha_log * &BallReal::from_int(n, prec));

        let lower = match (&log_d - &log_lower).certify_sign() {
            CertifiedSign::Positive => BoundCheck::Strict,
            CertifiedSign::Negative => BoundCheck::Violated,
            CertifiedSign::Undecided => self.exact_lower(n),
        };
        let upper = match (&log_upper - &log_d).certify_sign() {
            CertifiedSign::Positive => BoundCheck::Strict,
            CertifiedSign::Negative => BoundCheck::Violated,
            CertifiedSign::Undecided => self.exact_upper(n),
        };
        Ok(DivisorBounds { n, lower, upper })
    }

    fn lcm_exponent(&self) -> u64 {
        self.factors.primes().fold(1u64, |l, p| l.lcm(&(p - 1)))
    }

    /// `alpha^{k L}` as an exact integer.
    fn alpha_power(&self, k: u64, l: u64) -> BigInt {
        self.factors
            .primes()
            .map(|p| Pow::pow(&BigInt::from(p), k * (l / (p - 1))))
            .product()
    }

    fn exact_lower(&self, n: u64) -> BoundCheck {
        let l = self.lcm_exponent();
        let lhs = self.alpha_power(n + 1, l);
        let base = self.divisor(n) * &self.gamma * Pow::pow(&BigInt::from(n + 1), self.beta);
        classify(&Pow::pow(&base, l), &lhs)
    }

    fn exact_upper(&self, n: u64) -> BoundCheck {
        let l = self.lcm_exponent();
        let rhs = Pow::pow(&BigInt::from(self.gcd2), l) * self.alpha_power(n, l);
        classify(&rhs, &Pow::pow(&self.divisor(n), l))
    }
}

/// `log sigma = log(4t) - 1 + sum_p log p (1/(p-1) - 2 m_p)`.
fn log_sigma_ball(arg: ExpArg, factors: &PrimeFactorization, prec: u32) -> Result<BallReal> {
    let mut log_sigma = BallReal::from_int(4 * arg.t(), prec).log()? - BallReal::one(prec);
    for &(p, m) in factors.factors() {
        let lp = BallReal::from_int(p, prec).log()?;
        let coeff = BigInt::one() - BigInt::from(2 * m as u64) * BigInt::from(p - 1);
        let term = (lp * BallReal::from_int(coeff, prec)).div(&BallReal::from_int(p - 1, prec))?;
        log_sigma = &log_sigma + &term;
    }
    Ok(log_sigma)
}

/// `big >= small` as a bound outcome.
fn classify(big: &BigInt, small: &BigInt) -> BoundCheck {
    match big.cmp(small) {
        std::cmp::Ordering::Greater => BoundCheck::StrictExact,
        std::cmp::Ordering::Equal => BoundCheck::Equal,
        std::cmp::Ordering::Less => BoundCheck::Violated,
    }
}

/// Sign of `x`, recomputing it at doubled precision through `at` while the
/// ball straddles zero. Gives up (reporting undecided) at 2^16 bits.
fn sign_with_refinement(
    at: impl Fn(u32) -> Result<BallReal>,
    x: &BallReal,
) -> Result<CertifiedSign> {
    let mut sign = x.certify_sign();
    let mut prec = x.prec();
    while sign == CertifiedSign::Undecided && prec < 1 << 16 {
        prec *= 2;
        sign = at(prec)?.certify_sign();
    }
    Ok(sign)
}
