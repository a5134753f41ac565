//! Exact dyadic rationals `man * 2^exp` and upper-bound magnitudes.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact dyadic rational `man * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        Dyadic { man, exp }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Dyadic::new(BigInt::one(), 0)
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    /// Exact conversion; panics on non-finite input.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite f64 {x}");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Dyadic::new(BigInt::from(m) * sign, e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.man.sign()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    /// Number of significant bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// An exponent `k` with `2^(k-1) <= |x| < 2^k`; `i64::MIN` for zero.
    pub fn top_bit(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.man.bits() as i64 + self.exp
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic::new(-&self.man, self.exp)
    }

    pub fn abs(&self) -> Self {
        Dyadic::new(self.man.abs(), self.exp)
    }

    /// Multiplication by `2^k`.
    pub fn mul_2exp(&self, k: i64) -> Self {
        Dyadic::new(self.man.clone(), self.exp + k)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => Dyadic::new(&self.man + &other.man, self.exp),
            Ordering::Greater => {
                let shifted = &self.man << ((self.exp - other.exp) as usize);
                Dyadic::new(shifted + &other.man, other.exp)
            }
            Ordering::Less => {
                let shifted = &other.man << ((other.exp - self.exp) as usize);
                Dyadic::new(&self.man + shifted, self.exp)
            }
        }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    /// Truncates the mantissa to at most `prec` bits (rounding toward
    /// negative infinity). Returns the rounded value and a bound on the
    /// absolute error.
    pub fn round(&self, prec: u32) -> (Dyadic, Mag) {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return (self.clone(), Mag::zero());
        }
        let shift = bits - prec as u64;
        let man = &self.man >> (shift as usize);
        let exp = self.exp + shift as i64;
        let exact = (&man << (shift as usize)) == self.man;
        let err = if exact { Mag::zero() } else { Mag::pow2(exp) };
        (Dyadic::new(man, exp), err)
    }

    /// `floor(x)` as an integer.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << (self.exp as usize)
        } else {
            let shift = (-self.exp) as u64;
            if shift > self.man.bits() + 1 {
                return if self.man.is_negative() {
                    -BigInt::one()
                } else {
                    BigInt::zero()
                };
            }
            // BigInt >> rounds toward negative infinity.
            &self.man >> (shift as usize)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        match (self.sign(), other.sign()) {
            (Sign::Minus, Sign::Minus) | (Sign::Plus, Sign::Plus) => {}
            (a, b) => return a.cmp(&b),
        }
        if self.sign() == Sign::NoSign && other.sign() == Sign::NoSign {
            return Ordering::Equal;
        }
        let (ta, tb) = (self.top_bit(), other.top_bit());
        if ta != tb {
            let by_mag = ta.cmp(&tb);
            return if self.is_negative() { by_mag.reverse() } else { by_mag };
        }
        match self.sub(other).sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn max(a: &Dyadic, b: &Dyadic) -> Dyadic {
        if a.cmp_value(b) == Ordering::Less {
            b.clone()
        } else {
            a.clone()
        }
    }

    /// Nearest `f64`, saturating to infinity or zero outside its range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (top, shift) = if bits > 64 {
            ((&self.man >> ((bits - 64) as usize)), (bits - 64) as i64)
        } else {
            (self.man.clone(), 0)
        };
        let m = top.to_f64().unwrap_or(0.0);
        ldexp(m, self.exp + shift)
    }

    /// Approximate natural logarithm of `|x|` that does not overflow for
    /// huge exponents.
    pub fn ln_abs_f64(&self) -> f64 {
        let bits = self.man.bits();
        let take = bits.min(64);
        let top = (self.man.abs() >> ((bits - take) as usize)).to_f64().unwrap_or(1.0);
        top.ln() + ((self.exp + (bits - take) as i64) as f64) * std::f64::consts::LN_2
    }
}

pub(crate) fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

const MAG_BITS: u32 = 30;

/// A nonnegative magnitude `man * 2^exp` with a short mantissa, used for
/// radii. Every operation rounds upward unless named otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub fn zero() -> Self {
        Mag { man: 0, exp: 0 }
    }

    pub fn pow2(exp: i64) -> Self {
        Mag { man: 1, exp }
    }

    pub fn from_u64(n: u64) -> Self {
        Mag::normalize_up(n as u128, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    pub fn exponent_bound(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            64 - self.man.leading_zeros() as i64 + self.exp
        }
    }

    fn normalize_up(man: u128, exp: i64) -> Mag {
        if man == 0 {
            return Mag::zero();
        }
        let bits = 128 - man.leading_zeros();
        if bits <= MAG_BITS {
            return Mag { man: man as u64, exp };
        }
        let shift = bits - MAG_BITS;
        let mut m = man >> shift;
        if (m << shift) != man {
            m += 1;
        }
        let mut e = exp + shift as i64;
        if m == 1u128 << MAG_BITS {
            m >>= 1;
            e += 1;
        }
        Mag { man: m as u64, exp: e }
    }

    fn normalize_down(man: u128, exp: i64) -> Mag {
        if man == 0 {
            return Mag::zero();
        }
        let bits = 128 - man.leading_zeros();
        if bits <= MAG_BITS {
            return Mag { man: man as u64, exp };
        }
        let shift = bits - MAG_BITS;
        Mag {
            man: (man >> shift) as u64,
            exp: exp + shift as i64,
        }
    }

    pub fn add(&self, other: &Mag) -> Mag {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let d = hi.exp - lo.exp;
        if d > 64 {
            // lo < 2^(lo.exp + MAG_BITS) <= 2^hi.exp
            return Mag::normalize_up(hi.man as u128 + 1, hi.exp);
        }
        Mag::normalize_up(((hi.man as u128) << d) + lo.man as u128, lo.exp)
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::zero();
        }
        Mag::normalize_up(self.man as u128 * other.man as u128, self.exp + other.exp)
    }

    /// Upper bound on `self / other`; `other` must be nonzero.
    pub fn div(&self, other: &Mag) -> Mag {
        assert!(!other.is_zero(), "Mag division by zero");
        if self.is_zero() {
            return Mag::zero();
        }
        let num = (self.man as u128) << 64;
        let den = other.man as u128;
        let q = num.div_ceil(den);
        Mag::normalize_up(q, self.exp - 64 - other.exp)
    }

    pub fn mul_2exp(&self, k: i64) -> Mag {
        if self.is_zero() {
            *self
        } else {
            Mag {
                man: self.man,
                exp: self.exp + k,
            }
        }
    }

    pub fn max(&self, other: &Mag) -> Mag {
        if self.cmp_value(other) == Ordering::Less {
            *other
        } else {
            *self
        }
    }

    pub fn cmp_value(&self, other: &Mag) -> Ordering {
        self.to_dyadic().cmp_value(&other.to_dyadic())
    }

    /// Upper bound on `|x|`.
    pub fn from_dyadic_up(x: &Dyadic) -> Mag {
        Mag::from_dyadic(x, true)
    }

    /// Lower bound on `|x|`.
    pub fn from_dyadic_down(x: &Dyadic) -> Mag {
        Mag::from_dyadic(x, false)
    }

    fn from_dyadic(x: &Dyadic, up: bool) -> Mag {
        if x.is_zero() {
            return Mag::zero();
        }
        let m = x.man.magnitude();
        let bits = m.bits();
        let (top, shift) = if bits > 64 {
            let shift = bits - 64;
            let top = m >> (shift as usize);
            let inexact = up && m.trailing_zeros().unwrap_or(0) < shift;
            (top.to_u128().unwrap() + inexact as u128, shift as i64)
        } else {
            (m.to_u128().unwrap(), 0)
        };
        if up {
            Mag::normalize_up(top, x.exp + shift)
        } else {
            Mag::normalize_down(top, x.exp + shift)
        }
    }

    pub fn to_dyadic(&self) -> Dyadic {
        Dyadic::new(BigInt::from(self.man), self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        ldexp(self.man as f64, self.exp)
    }

    /// Upper bound on `e^self - 1`.
    pub fn expm1(&self) -> Option<Mag> {
        if self.is_zero() {
            return Some(Mag::zero());
        }
        if self.cmp_value(&Mag::from_u64(1)) != Ordering::Greater {
            // e^r - 1 <= (e - 1) r for r <= 1
            return Some(self.mul(&Mag::from_u64(2)));
        }
        let ceil = self.to_dyadic().ceil().to_u64()?;
        if ceil > 1 << 32 {
            return None;
        }
        let mut result = Mag::from_u64(1);
        let mut base = Mag::from_u64(3);
        let mut k = ceil;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        Some(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_rounds_down_for_negatives() {
        let x = Dyadic::new(BigInt::from(-5), -1); // -2.5
        assert_eq!(x.floor(), BigInt::from(-3));
        assert_eq!(x.ceil(), BigInt::from(-2));
        let y = Dyadic::new(BigInt::from(5), -1);
        assert_eq!(y.floor(), BigInt::from(2));
        let tiny = Dyadic::new(BigInt::from(-1), -500);
        assert_eq!(tiny.floor(), BigInt::from(-1));
    }

    #[test]
    fn round_reports_error() {
        let x = Dyadic::from_int(0b1011_0111);
        let (r, err) = x.round(4);
        assert_eq!(r, Dyadic::new(BigInt::from(0b1011), 4));
        assert_eq!(err, Mag::pow2(4));
        let (same, none) = Dyadic::from_int(0b1011_0000).round(4);
        assert_eq!(same.cmp_value(&Dyadic::from_int(0b1011_0000)), Ordering::Equal);
        assert!(none.is_zero());
    }

    #[test]
    fn mag_rounds_up() {
        let a = Mag::from_u64((1 << 40) + 1);
        assert!(a.to_dyadic().cmp_value(&Dyadic::from_int((1u64 << 40) + 1)) != Ordering::Less);
        let third = Mag::from_u64(1).div(&Mag::from_u64(3));
        assert!(third.to_f64() >= 1.0 / 3.0);
        let far = Mag::pow2(0).add(&Mag::pow2(-200));
        assert!(far.to_f64() > 1.0);
    }

    #[test]
    fn f64_roundtrip() {
        for x in [1.5, -0.1, 1e300, 3e-310, std::f64::consts::E] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn cmp_value_orders() {
        let a = Dyadic::from_f64(-3.0);
        let b = Dyadic::from_f64(0.25);
        assert_eq!(a.cmp_value(&b), Ordering::Less);
        assert_eq!(b.cmp_value(&a), Ordering::Greater);
        assert_eq!(Dyadic::from_f64(-0.5).cmp_value(&Dyadic::from_f64(-0.25)), Ordering::Less);
    }
}
