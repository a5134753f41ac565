//! Midpoint-radius ("ball") real arithmetic at arbitrary precision.
//!
//! A [`BallReal`] denotes the closed interval `[mid - rad, mid + rad]`. The
//! midpoint is an exact dyadic rational rounded to the ball's working
//! precision after every operation; the radius is a short-mantissa upper
//! bound that absorbs propagated input error and every rounding error. Each
//! operation therefore returns an enclosure of the exact image of its
//! inputs, and strict inequalities are decided only through
//! [`BallReal::certify_sign`].

mod decimal;
mod dyadic;
mod elementary;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub use decimal::parse_decimal;
pub use dyadic::{Dyadic, Mag};

/// Failures of ball operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BallError {
    #[error("{op}: argument ball straddles the domain boundary")]
    DomainStraddle { op: &'static str },
    #[error("{op}: argument outside the domain")]
    Domain { op: &'static str },
    #[error("radius overflow in {op}")]
    Overflow { op: &'static str },
}

/// Outcome of a sign certification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CertifiedSign {
    Positive,
    Negative,
    Undecided,
}

#[derive(Clone, Debug)]
pub struct BallReal {
    mid: Dyadic,
    rad: Mag,
    prec: u32,
}

impl BallReal {
    /// Builds a ball, rounding the midpoint to `prec` bits.
    pub fn from_parts(mid: Dyadic, rad: Mag, prec: u32) -> Self {
        let (mid, err) = mid.round(prec);
        BallReal {
            mid,
            rad: rad.add(&err),
            prec,
        }
    }

    /// An exact point; the midpoint is kept unrounded.
    pub fn exact(mid: Dyadic, prec: u32) -> Self {
        BallReal {
            mid,
            rad: Mag::zero(),
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        BallReal::exact(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        BallReal::exact(Dyadic::one(), prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        BallReal::exact(Dyadic::from_int(n), prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        BallReal::exact(Dyadic::from_f64(x), prec)
    }

    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        BallReal::from_int(num.clone(), prec)
            .div(&BallReal::from_int(den.clone(), prec))
            .expect("exact nonzero denominator")
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        BallReal::from_ratio(q.numer(), q.denom(), prec)
    }

    /// The ball with endpoints `lo <= hi`.
    pub fn from_endpoints(lo: &Dyadic, hi: &Dyadic, prec: u32) -> Self {
        let mid = lo.add(hi).mul_2exp(-1);
        let rad = Mag::from_dyadic_up(&hi.sub(lo).mul_2exp(-1));
        BallReal::from_parts(mid, rad, prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BallReal::from_parts(self.mid.clone(), self.rad, prec)
    }

    /// Adds `extra` to the radius.
    pub fn inflate(&self, extra: Mag) -> Self {
        BallReal {
            mid: self.mid.clone(),
            rad: self.rad.add(&extra),
            prec: self.prec,
        }
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad.to_dyadic())
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad.to_dyadic())
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        Mag::from_dyadic_up(&self.mid).add(&self.rad)
    }

    /// Lower bound on `|x|` over the ball (zero when it contains zero).
    pub fn abs_lower(&self) -> Mag {
        let gap = self.mid.abs().sub(&self.rad.to_dyadic());
        if gap.is_negative() {
            Mag::zero()
        } else {
            Mag::from_dyadic_down(&gap)
        }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Positive iff the whole ball lies above zero, negative iff below.
    pub fn certify_sign(&self) -> CertifiedSign {
        let r = self.rad.to_dyadic();
        if self.mid.cmp_value(&r) == Ordering::Greater {
            CertifiedSign::Positive
        } else if self.mid.neg().cmp_value(&r) == Ordering::Greater {
            CertifiedSign::Negative
        } else {
            CertifiedSign::Undecided
        }
    }

    pub fn is_positive(&self) -> bool {
        self.certify_sign() == CertifiedSign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.certify_sign() == CertifiedSign::Negative
    }

    /// Certified comparison; `None` when the balls overlap.
    pub fn certified_cmp(&self, other: &BallReal) -> Option<Ordering> {
        match (self - other).certify_sign() {
            CertifiedSign::Positive => Some(Ordering::Greater),
            CertifiedSign::Negative => Some(Ordering::Less),
            CertifiedSign::Undecided => None,
        }
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        self.lower().cmp_value(x) != Ordering::Greater && self.upper().cmp_value(x) != Ordering::Less
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Dyadic::zero())
    }

    pub fn overlaps(&self, other: &BallReal) -> bool {
        self.lower().cmp_value(&other.upper()) != Ordering::Greater
            && other.lower().cmp_value(&self.upper()) != Ordering::Greater
    }

    /// Whether `other` lies entirely inside `self`.
    pub fn contains_ball(&self, other: &BallReal) -> bool {
        self.lower().cmp_value(&other.lower()) != Ordering::Greater
            && self.upper().cmp_value(&other.upper()) != Ordering::Less
    }

    /// The integer `floor(x)` when it is the same for every point.
    pub fn floor_certain(&self) -> Option<BigInt> {
        let lo = self.lower().floor();
        let hi = self.upper().floor();
        (lo == hi).then_some(lo)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    fn result_prec(&self, other: &BallReal) -> u32 {
        self.prec.max(other.prec)
    }

    fn add_ball(&self, other: &BallReal) -> BallReal {
        let prec = self.result_prec(other);
        let rad = self.rad.add(&other.rad);
        if other.mid.is_zero() {
            return BallReal::from_parts(self.mid.clone(), rad, prec);
        }
        if self.mid.is_zero() {
            return BallReal::from_parts(other.mid.clone(), rad, prec);
        }
        let (ta, tb) = (self.mid.top_bit(), other.mid.top_bit());
        let guard = prec as i64 + 16;
        if tb < ta - guard && tb < self.mid.exponent() {
            let rad = rad.add(&Mag::from_dyadic_up(&other.mid));
            return BallReal::from_parts(self.mid.clone(), rad, prec);
        }
        if ta < tb - guard && ta < other.mid.exponent() {
            let rad = rad.add(&Mag::from_dyadic_up(&self.mid));
            return BallReal::from_parts(other.mid.clone(), rad, prec);
        }
        BallReal::from_parts(self.mid.add(&other.mid), rad, prec)
    }

    fn mul_ball(&self, other: &BallReal) -> BallReal {
        let prec = self.result_prec(other);
        let mid = self.mid.mul(&other.mid);
        let mut rad = Mag::zero();
        if !other.rad.is_zero() {
            rad = rad.add(&Mag::from_dyadic_up(&self.mid).mul(&other.rad));
        }
        if !self.rad.is_zero() {
            rad = rad.add(&Mag::from_dyadic_up(&other.mid).mul(&self.rad));
            rad = rad.add(&self.rad.mul(&other.rad));
        }
        BallReal::from_parts(mid, rad, prec)
    }

    pub fn sqr(&self) -> BallReal {
        self.mul_ball(self)
    }

    pub fn mul_int(&self, n: i64) -> BallReal {
        self.mul_ball(&BallReal::from_int(n, self.prec))
    }

    pub fn mul_2exp(&self, k: i64) -> BallReal {
        BallReal {
            mid: self.mid.mul_2exp(k),
            rad: self.rad.mul_2exp(k),
            prec: self.prec,
        }
    }

    pub fn div(&self, other: &BallReal) -> Result<BallReal, BallError> {
        let prec = self.result_prec(other);
        if other.contains_zero() {
            return Err(if other.mid.is_zero() && other.rad.is_zero() {
                BallError::Domain { op: "div" }
            } else {
                BallError::DomainStraddle { op: "div" }
            });
        }
        let (a, b) = (self.mid.mantissa(), other.mid.mantissa());
        let shift = (prec as i64 + 2 + b.bits() as i64 - a.bits() as i64).max(0);
        let q_man = (a << (shift as usize)) / b;
        let q_exp = self.mid.exponent() - shift - other.mid.exponent();
        let exact = (&q_man * b) == (a << (shift as usize));
        let q = Dyadic::new(q_man, q_exp);
        let q_err = if exact { Mag::zero() } else { Mag::pow2(q_exp) };
        let mut rad = q_err;
        if !self.rad.is_zero() || !other.rad.is_zero() {
            let q_abs = Mag::from_dyadic_up(&q).add(&q_err);
            let num = self.rad.add(&q_abs.mul(&other.rad));
            let den = other.abs_lower();
            rad = rad.add(&num.div(&den));
        }
        Ok(BallReal::from_parts(q, rad, prec))
    }

    pub fn recip(&self) -> Result<BallReal, BallError> {
        BallReal::one(self.prec).div(self)
    }

    pub fn pow_uint(&self, n: u64) -> BallReal {
        let mut result = BallReal::one(self.prec);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        result
    }

    pub fn pow_int(&self, n: i64) -> Result<BallReal, BallError> {
        if n >= 0 {
            Ok(self.pow_uint(n as u64))
        } else {
            self.pow_uint(n.unsigned_abs()).recip()
        }
    }

    pub fn abs(&self) -> BallReal {
        match self.certify_sign() {
            CertifiedSign::Positive => self.clone(),
            CertifiedSign::Negative => -self,
            CertifiedSign::Undecided => {
                let hi = Dyadic::max(&self.upper(), &self.lower().neg());
                BallReal::from_endpoints(&Dyadic::zero(), &hi, self.prec)
            }
        }
    }

    pub fn max(&self, other: &BallReal) -> BallReal {
        match self.certified_cmp(other) {
            Some(Ordering::Greater) => self.clone(),
            Some(_) => other.clone(),
            None => {
                let lo = Dyadic::max(&self.lower(), &other.lower());
                let hi = Dyadic::max(&self.upper(), &other.upper());
                BallReal::from_endpoints(&lo, &hi, self.result_prec(other))
            }
        }
    }

    pub fn min(&self, other: &BallReal) -> BallReal {
        -(&(-self).max(&(-other)))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&BallReal> for &BallReal {
            type Output = BallReal;
            fn $method(self, rhs: &BallReal) -> BallReal {
                self.$imp(rhs)
            }
        }
        impl $trait<BallReal> for BallReal {
            type Output = BallReal;
            fn $method(self, rhs: BallReal) -> BallReal {
                (&self).$imp(&rhs)
            }
        }
        impl $trait<&BallReal> for BallReal {
            type Output = BallReal;
            fn $method(self, rhs: &BallReal) -> BallReal {
                (&self).$imp(rhs)
            }
        }
        impl $trait<BallReal> for &BallReal {
            type Output = BallReal;
            fn $method(self, rhs: BallReal) -> BallReal {
                self.$imp(&rhs)
            }
        }
    };
}

impl BallReal {
    fn sub_ball(&self, other: &BallReal) -> BallReal {
        self.add_ball(&-other)
    }
}

forward_binop!(Add, add, add_ball);
forward_binop!(Sub, sub, sub_ball);
forward_binop!(Mul, mul, mul_ball);

impl Neg for &BallReal {
    type Output = BallReal;
    fn neg(self) -> BallReal {
        BallReal {
            mid: self.mid.neg(),
            rad: self.rad,
            prec: self.prec,
        }
    }
}

impl Neg for BallReal {
    type Output = BallReal;
    fn neg(self) -> BallReal {
        -&self
    }
}

impl fmt::Display for BallReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (mid, rad) = self.to_decimal(20);
        write!(f, "{mid} +/- {rad}")
    }
}

/// Free-function form of [`BallReal::certify_sign`].
pub fn certify_sign(x: &BallReal) -> CertifiedSign {
    x.certify_sign()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ball(m: f64, r: f64) -> BallReal {
        BallReal::from_f64(m, 64).inflate(Mag::from_dyadic_up(&Dyadic::from_f64(r)))
    }

    #[test]
    fn sign_certification() {
        assert_eq!(ball(1.0, 0.5).certify_sign(), CertifiedSign::Positive);
        assert_eq!(ball(0.0, 1.0).certify_sign(), CertifiedSign::Undecided);
        assert_eq!(ball(-3.0, 2.9).certify_sign(), CertifiedSign::Negative);
        assert_eq!(ball(1.0, 1.0).certify_sign(), CertifiedSign::Undecided);
    }

    #[test]
    fn division_by_zero_ball_rejected() {
        let one = BallReal::one(64);
        assert!(matches!(one.div(&ball(0.0, 0.1)), Err(BallError::DomainStraddle { .. })));
        assert!(matches!(one.div(&BallReal::zero(64)), Err(BallError::Domain { .. })));
    }

    #[test]
    fn third_encloses() {
        let t = BallReal::from_ratio(&BigInt::from(1), &BigInt::from(3), 128);
        let back = t.mul_int(3);
        assert!(back.contains(&Dyadic::one()));
        assert!(back.rad().to_f64() < 1e-35);
    }

    #[test]
    fn abs_and_max() {
        let x = ball(-0.5, 1.0);
        let a = x.abs();
        assert!(a.contains(&Dyadic::zero()));
        assert!(a.contains(&Dyadic::from_f64(1.5)));
        let m = ball(1.0, 0.1).max(&ball(2.0, 0.1));
        assert!((m.to_f64() - 2.0).abs() < 1e-12);
        let hull = ball(1.0, 0.5).max(&ball(1.2, 0.1));
        assert!(hull.contains(&Dyadic::from_f64(1.5)));
        assert!(!hull.contains(&Dyadic::from_f64(1.0)));
    }

    #[test]
    fn tiny_addend_absorbed() {
        let big = BallReal::one(64);
        let tiny = BallReal::exact(Dyadic::new(BigInt::from(3), -1_000_000), 64);
        let s = &big + &tiny;
        assert!(s.contains(&Dyadic::one()));
        assert!(s.mid().bits() <= 64);
    }

    proptest! {
        #[test]
        fn add_sub_encloses(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let x = BallReal::from_f64(a, 40);
            let y = BallReal::from_f64(b, 40);
            let back = &(&x + &y) - &y;
            prop_assert!(back.contains(&Dyadic::from_f64(a)));
        }

        #[test]
        fn mul_div_encloses(a in -1e6f64..1e6, b in 1e-3f64..1e6, r in 0f64..1e-3) {
            let x = ball(a, r).with_prec(53);
            let y = BallReal::from_f64(b, 53);
            let q = (&x * &y).div(&y).unwrap();
            prop_assert!(q.contains(&Dyadic::from_f64(a)));
        }
    }
}
