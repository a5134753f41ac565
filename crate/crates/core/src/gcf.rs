//! Generalized continued fractions `b0 + K(a_k / b_k)` with exact rational
//! coefficients: convergent recurrences, the telescoped value series and the
//! alternating-tail error estimate.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::BallReal;
use crate::error::{Error, Result};

type TermFn = dyn Fn(u64) -> (BigRational, BigRational) + Send + Sync;

/// Coefficient stream of `b0 + a1/(b1 + a2/(b2 + ...))`.
///
/// The closure maps `k >= 1` to `(a_k, b_k)` and must be deterministic.
#[derive(Clone)]
pub struct GcfCoefficients {
    b0: BigRational,
    terms: Arc<TermFn>,
}

impl fmt::Debug for GcfCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GcfCoefficients").field("b0", &self.b0).finish_non_exhaustive()
    }
}

impl GcfCoefficients {
    pub fn new<F>(b0: BigRational, terms: F) -> Self
    where
        F: Fn(u64) -> (BigRational, BigRational) + Send + Sync + 'static,
    {
        GcfCoefficients {
            b0,
            terms: Arc::new(terms),
        }
    }

    /// `E(s, t)`: `b0 = 0`, `a_k = s^2`, `b_k = 2t(2k + 1)`.
    pub fn exp_tail(s: i64, t: i64) -> Self {
        let a = BigRational::from_integer(BigInt::from(s) * BigInt::from(s));
        let t = BigInt::from(t);
        GcfCoefficients::new(BigRational::zero(), move |k| {
            let b = BigInt::from(2) * &t * BigInt::from(2 * k + 1);
            (a.clone(), BigRational::from_integer(b))
        })
    }

    pub fn b0(&self) -> &BigRational {
        &self.b0
    }

    /// `(a_k, b_k)` for `k >= 1`.
    pub fn term(&self, k: u64) -> (BigRational, BigRational) {
        assert!(k >= 1, "coefficient index starts at 1");
        (self.terms)(k)
    }

    fn checked_term(&self, k: u64) -> Result<(BigRational, BigRational)> {
        let (a, b) = self.term(k);
        if a.is_zero() {
            return Err(Error::InvalidArgument(format!("partial numerator a_{k} is zero")));
        }
        Ok((a, b))
    }

    fn check_positive(&self, upto: u64) -> Result<()> {
        for k in 1..=upto {
            let (a, b) = self.term(k);
            if !a.is_positive() || !b.is_positive() {
                return Err(Error::Domain(format!(
                    "alternating tail estimate needs positive coefficients; index {k} is not"
                )));
            }
        }
        Ok(())
    }
}

/// Numerator and denominator of the `n`-th convergent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentPair {
    pub n: u64,
    pub a: BigRational,
    pub b: BigRational,
}

/// Rows `0..=n_max` of the convergent recurrence
/// `C_n = b_n C_{n-1} + a_n C_{n-2}` with `(A_0, B_0) = (b0, 1)` and
/// `(A_1, B_1) = (b0 b1 + a1, b1)`.
pub fn gcf_convergents(coeffs: &GcfCoefficients, n_max: u64) -> Result<Vec<ConvergentPair>> {
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    rows.push(ConvergentPair {
        n: 0,
        a: coeffs.b0.clone(),
        b: BigRational::one(),
    });
    if n_max == 0 {
        return Ok(rows);
    }
    let (a1, b1) = coeffs.checked_term(1)?;
    rows.push(ConvergentPair {
        n: 1,
        a: &coeffs.b0 * &b1 + a1,
        b: b1,
    });
    for n in 2..=n_max {
        let (an, bn) = coeffs.checked_term(n)?;
        let (prev, prev2) = (&rows[n as usize - 1], &rows[n as usize - 2]);
        let a = &bn * &prev.a + &an * &prev2.a;
        let b = &bn * &prev.b + &an * &prev2.b;
        rows.push(ConvergentPair { n, a, b });
    }
    Ok(rows)
}

/// `a_1 ... a_{n+1} / (B_n B_{n+1})`, a strict upper bound on
/// `|tau - A_n / B_n|` when every coefficient is positive.
pub fn gcf_tail_bound(
    coeffs: &GcfCoefficients,
    n: u64,
    b_n: &BigRational,
    b_n1: &BigRational,
) -> Result<BigRational> {
    coeffs.check_positive(n + 1)?;
    let mut product = BigRational::one();
    for k in 1..=n + 1 {
        product *= coeffs.term(k).0;
    }
    Ok(product / (b_n * b_n1))
}

/// The telescoped partial sum
/// `b0 + sum_{k < n_terms} (-1)^k a_1...a_{k+1} / (B_k B_{k+1})` (which
/// equals `A_n / B_n`), as a ball whose radius also covers the tail.
pub fn gcf_value(coeffs: &GcfCoefficients, n_terms: u64, precision_bits: u32) -> Result<BallReal> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("gcf_value needs n_terms >= 1".into()));
    }
    coeffs.check_positive(n_terms + 1).map_err(|_| {
        Error::Domain("tail radius undecidable: coefficients are not all positive".into())
    })?;
    let rows = gcf_convergents(coeffs, n_terms + 1)?;
    let mut sum = coeffs.b0.clone();
    let mut product = BigRational::one();
    for k in 0..n_terms {
        product *= coeffs.term(k + 1).0;
        let term = &product / (&rows[k as usize].b * &rows[k as usize + 1].b);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let n = n_terms as usize;
    let tail = gcf_tail_bound(coeffs, n_terms, &rows[n].b, &rows[n + 1].b)?;
    let value = BallReal::from_rational(&sum, precision_bits);
    let tail_ball = BallReal::from_rational(&tail, precision_bits);
    Ok(value.inflate(tail_ball.abs_upper()))
}
