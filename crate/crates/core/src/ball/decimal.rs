//! Decimal parsing and enclosure-preserving decimal output.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed};

use super::{BallReal, Dyadic, Mag};

/// Parses `[-+]digits[.digits][e[-+]digits]` exactly.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 1_000_000 {
        return None;
    }
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * Pow::pow(&ten, scale as u64))
    } else {
        BigRational::new(numer, Pow::pow(&ten, (-scale) as u64))
    };
    Some(value)
}

/// `x * 10^k` rounded to the nearest integer (|error| <= 1/2) or upward.
fn scaled_integer(x: &Dyadic, k: i64, up: bool) -> BigInt {
    let ten = BigInt::from(10);
    let (mut num, mut den) = (x.mantissa().clone(), BigInt::one());
    if k >= 0 {
        num *= Pow::pow(&ten, k as u64);
    } else {
        den *= Pow::pow(&ten, (-k) as u64);
    }
    if x.exponent() >= 0 {
        num <<= x.exponent() as usize;
    } else {
        den <<= (-x.exponent()) as usize;
    }
    if up {
        num.div_ceil(&den)
    } else {
        // round half away from zero
        let twice: BigInt = num * 2 + if x.is_negative() { -&den } else { den.clone() };
        let q = twice.abs().div_floor(&(den * 2));
        if x.is_negative() {
            -q
        } else {
            q
        }
    }
}

fn sci(digits: &BigInt, exp10: i64) -> String {
    let negative = digits.is_negative();
    let s = digits.abs().to_string();
    let e = exp10 + s.len() as i64 - 1;
    let (head, tail) = s.split_at(1);
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

fn decimal_exponent_estimate(x: &Dyadic) -> i64 {
    (x.ln_abs_f64() / std::f64::consts::LN_10).floor() as i64
}

impl BallReal {
    /// Midpoint with `sig_digits` significant digits and a radius (three
    /// significant digits, rounded up) that together still enclose the
    /// ball.
    pub fn to_decimal(&self, sig_digits: usize) -> (String, String) {
        let sig = sig_digits.max(1) as i64;
        let (mid_text, mid_err) = if self.mid().is_zero() {
            ("0".to_string(), Mag::zero())
        } else {
            let k = sig - 1 - decimal_exponent_estimate(self.mid());
            let d = scaled_integer(self.mid(), k, false);
            // |mid - d 10^-k| <= 10^-k / 2 <= 2^(-3.32 k - 1 + 1)
            let err = if k >= 0 {
                Mag::pow2(-(k * 3) - 1)
            } else {
                Mag::from_dyadic_up(&Dyadic::from_int(Pow::pow(&BigInt::from(10), (-k) as u64)))
                    .mul_2exp(-1)
            };
            (sci(&d, -k), err)
        };
        let rad = self.rad().add(&mid_err);
        (mid_text, mag_to_decimal(&rad))
    }
}

/// Upward-rounded three-digit scientific rendering of a magnitude.
pub(crate) fn mag_to_decimal(m: &Mag) -> String {
    if m.is_zero() {
        return "0".to_string();
    }
    let d = m.to_dyadic();
    let k = 2 - decimal_exponent_estimate(&d);
    let digits = scaled_integer(&d, k, true);
    sci(&digits, -k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        let q = |s: &str| parse_decimal(s).unwrap();
        assert_eq!(q("983"), BigRational::from_integer(983.into()));
        assert_eq!(q("1e6"), BigRational::from_integer(1_000_000.into()));
        assert_eq!(q("-0.25"), BigRational::new((-1).into(), 4.into()));
        assert_eq!(q("2.5E-1"), BigRational::new(1.into(), 4.into()));
        assert_eq!(q(".5"), BigRational::new(1.into(), 2.into()));
        assert!(parse_decimal("abc").is_none());
        assert!(parse_decimal("1.2.3").is_none());
        assert!(parse_decimal("").is_none());
    }

    #[test]
    fn decimal_output_encloses() {
        let e = BallReal::e(200);
        let (mid, rad) = e.to_decimal(25);
        assert!(mid.starts_with("2.718281828459045235360287"), "{mid}");
        let m = parse_decimal(&mid).unwrap();
        let r = parse_decimal(&rad).unwrap();
        let printed = BallReal::from_rational(&m, 300).inflate(
            Mag::from_dyadic_up(&Dyadic::from_f64(
                num_traits::ToPrimitive::to_f64(&r).unwrap() * 1.01,
            )),
        );
        assert!(printed.contains_ball(&e.with_prec(300)) || printed.overlaps(&e));
        assert_eq!(BallReal::zero(64).to_decimal(5).0, "0");
        assert_eq!(BallReal::from_int(-1500, 64).to_decimal(3).0, "-1.50e3");
    }

    #[test]
    fn radius_rounds_up() {
        let m = Mag::from_u64(1).div(&Mag::from_u64(3));
        let s = mag_to_decimal(&m);
        let v: f64 = s.parse().unwrap();
        assert!(v >= 1.0 / 3.0, "{s}");
        assert_eq!(mag_to_decimal(&Mag::zero()), "0");
    }
}
