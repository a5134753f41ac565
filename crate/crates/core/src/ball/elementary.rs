//! Exponential, logarithm and square root on balls.
//!
//! `exp` reduces the argument by a power of two, sums the Taylor series in
//! fixed point with an explicit bound on truncation and tail, and squares
//! back up. `log` runs Newton's iteration on `x e^{-y} = 1` with doubling
//! precision and then certifies the candidate through one more ball `exp`:
//! `log x = y + log(1 + delta)` with `|log(1 + delta)| <= 2|delta|`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{BallError, BallReal, CertifiedSign, Dyadic, Mag};

fn log2_ceil(n: u64) -> i64 {
    64 - n.saturating_sub(1).leading_zeros() as i64
}

/// `e^x` for an exact point: returns an approximation and an absolute error
/// bound. The approximation has about `prec` significant bits.
pub(crate) fn exp_point(x: &Dyadic, prec: u32) -> (Dyadic, Mag) {
    if x.is_zero() {
        return (Dyadic::one(), Mag::zero());
    }
    let prec = prec.max(16) as i64;
    let top = x.top_bit();
    let q = (((prec as f64).sqrt() / 2.0).ceil() as i64).max(4);
    let squarings = (top + q).max(0);
    let wp = prec + squarings + 2 * log2_ceil(prec as u64) + 24;

    // u = x / 2^squarings, |u| < 2^-q, held as u_fixed * 2^-wp
    let shift = x.exponent() - squarings + wp;
    let u_fixed = if shift >= 0 {
        x.mantissa() << (shift as usize)
    } else {
        x.mantissa() >> ((-shift) as usize)
    };
    let one = BigInt::one() << (wp as usize);
    let mut sum = one.clone();
    let mut term = one;
    let mut k: u64 = 1;
    loop {
        term = (&term * &u_fixed) >> (wp as usize);
        term /= k;
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    // Each computed term is within 4 units of the exact term of the series
    // in the rounded argument; the tail past the first vanishing term is at
    // most 8 units; rounding the argument moves e^u by at most 2 units.
    let err_units = 4 * k + 16;
    // Relative error of the series value (which exceeds 1/2).
    let mut rel = Mag::from_u64(2 * err_units).mul_2exp(-wp);
    let mut value = Dyadic::new(sum, -wp);
    let step = Mag::pow2(1 - wp);
    for _ in 0..squarings {
        value = value.mul(&value).round(wp as u32).0;
        rel = rel.add(&step);
    }
    // (1 + r)^(2^j) - 1 <= 2^(j+1) r while 2^j r < 1/2
    let rel = rel.mul_2exp(squarings + 1);
    let err = Mag::from_dyadic_up(&value).mul(&rel).mul_2exp(1);
    (value, err)
}

/// `log x` for an exact positive point, with an absolute error bound.
pub(crate) fn log_point(x: &Dyadic, prec: u32) -> Result<(Dyadic, Mag), BallError> {
    if x.sign() != num_bigint::Sign::Plus {
        return Err(BallError::Domain { op: "log" });
    }
    if x.cmp_value(&Dyadic::one()) == Ordering::Equal {
        return Ok((Dyadic::zero(), Mag::zero()));
    }
    let target = prec.max(32) + 16;
    let guess = x.ln_abs_f64();
    let mut y = Dyadic::from_f64(guess);
    // bits of the integer part of log x
    let int_bits = (guess.abs().max(1.0).log2().ceil() as u32) + 2;
    let mut w: u32 = 40;
    let newton = |y: &Dyadic, w: u32| -> Dyadic {
        let (e, _) = exp_point(&y.neg(), w + 8);
        let t = x.mul(&e).round(w + 8).0.sub(&Dyadic::one());
        y.add(&t).round(w + int_bits + 8).0
    };
    loop {
        w = (w * 2).min(target);
        y = newton(&y, w);
        if w >= target {
            break;
        }
    }
    for attempt in 0..4 {
        let (e, e_err) = exp_point(&y.neg(), target + 8);
        let e_ball = BallReal::from_parts(e, e_err, target + 8);
        let scaled = &BallReal::exact(x.clone(), target + 8) * &e_ball;
        let delta = &scaled - &BallReal::one(target + 8);
        let bound = delta.abs_upper();
        let usable = bound.cmp_value(&Mag::pow2(-1)) == Ordering::Less;
        if usable && (bound.exponent_bound() <= 8 - target as i64 || attempt == 3) {
            return Ok((y, bound.mul_2exp(1)));
        }
        y = newton(&y, target);
    }
    Err(BallError::Overflow { op: "log" })
}

const HUGE_EXP_BITS: i64 = 40;

impl BallReal {
    pub fn exp(&self) -> Result<BallReal, BallError> {
        let prec = self.prec();
        // beyond 2^40 in magnitude: e^x < 2^x underflows to a zero-centred
        // ball, overflow is an error
        let huge = Dyadic::new(BigInt::one(), HUGE_EXP_BITS);
        if self.upper().cmp_value(&huge.neg()) == Ordering::Less {
            return Ok(BallReal::from_parts(Dyadic::zero(), Mag::pow2(-(1i64 << HUGE_EXP_BITS)), prec));
        }
        if self.upper().cmp_value(&huge) == Ordering::Greater {
            return Err(BallError::Overflow { op: "exp" });
        }
        let (v, err) = exp_point(self.mid(), prec + 4);
        let spread = self.rad().expm1().ok_or(BallError::Overflow { op: "exp" })?;
        let v_abs = Mag::from_dyadic_up(&v).add(&err);
        let rad = err.add(&v_abs.mul(&spread));
        Ok(BallReal::from_parts(v, rad, prec))
    }

    pub fn log(&self) -> Result<BallReal, BallError> {
        match self.certify_sign() {
            CertifiedSign::Positive => {}
            CertifiedSign::Negative => return Err(BallError::Domain { op: "log" }),
            CertifiedSign::Undecided => {
                return Err(if self.mid().is_zero() && self.is_exact() {
                    BallError::Domain { op: "log" }
                } else {
                    BallError::DomainStraddle { op: "log" }
                })
            }
        }
        let prec = self.prec();
        let (y, err) = log_point(self.mid(), prec + 4)?;
        let mut rad = err;
        if !self.rad().is_zero() {
            // |log x - log m| <= r / (m - r)
            rad = rad.add(&self.rad().div(&self.abs_lower()));
        }
        Ok(BallReal::from_parts(y, rad, prec))
    }

    pub fn sqrt(&self) -> Result<BallReal, BallError> {
        if self.mid().is_zero() && self.is_exact() {
            return Ok(self.clone());
        }
        if self.lower().is_negative() {
            return Err(if self.mid().is_negative() {
                BallError::Domain { op: "sqrt" }
            } else {
                BallError::DomainStraddle { op: "sqrt" }
            });
        }
        let prec = self.prec();
        let mid = self.mid();
        let man = mid.mantissa().magnitude();
        // choose an even exponent with at least 2 * (prec + 4) mantissa bits
        let want = 2 * (prec as i64 + 4);
        let mut shift = (want - man.bits() as i64).max(0);
        if (mid.exponent() - shift) % 2 != 0 {
            shift += 1;
        }
        let scaled = man << (shift as usize);
        let root = scaled.sqrt();
        let exact = &root * &root == scaled;
        let exp = (mid.exponent() - shift) / 2;
        let root = Dyadic::new(BigInt::from(root), exp);
        let mut rad = if exact { Mag::zero() } else { Mag::pow2(exp) };
        if !self.rad().is_zero() {
            // |sqrt x - sqrt m| <= r / sqrt m and floor sqrt is a lower bound
            let lower = Mag::from_dyadic_down(&root);
            if lower.is_zero() {
                return Err(BallError::DomainStraddle { op: "sqrt" });
            }
            rad = rad.add(&self.rad().div(&lower));
        }
        Ok(BallReal::from_parts(root, rad, prec))
    }

    /// `e^{num/den}` with radius at most a few ulps of the result: the
    /// quotient is formed with extra guard bits so its rounding error does
    /// not get amplified by `|num/den|`.
    pub fn exp_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<BallReal, BallError> {
        if den.is_zero() {
            return Err(BallError::Domain { op: "exp_ratio" });
        }
        let magnitude = (num.bits() as i64 - den.bits() as i64 + 1).max(0) as u32;
        let wp = prec + magnitude + 8;
        let x = BallReal::from_ratio(num, den, wp);
        Ok(x.exp()?.with_prec(prec))
    }

    /// Euler's number.
    pub fn e(prec: u32) -> BallReal {
        BallReal::one(prec).exp().expect("exp(1)")
    }
}
