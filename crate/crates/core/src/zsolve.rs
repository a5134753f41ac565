//! The inverse `z(y)` of `y = z log z` on `z >= 1/e`, the iterates
//! `z_0 = y`, `z_n = y / log z_{n-1}`, and their error bounds.

use crate::ball::{BallReal, CertifiedSign, Dyadic, Mag};
use crate::error::{Error, Result};

/// A point or ball `y` at which to evaluate `z(y)`.
#[derive(Clone, Debug)]
pub struct ZQuery {
    pub y: BallReal,
    pub precision_bits: u32,
}

impl ZQuery {
    pub fn new(y: BallReal, precision_bits: u32) -> Self {
        ZQuery { y, precision_bits }
    }
}

fn inv_e(prec: u32) -> BallReal {
    BallReal::e(prec).recip().expect("e is nonzero")
}

/// `z log z - y` at an exact point.
fn residual(z: &Dyadic, y: &Dyadic, prec: u32) -> Result<BallReal> {
    let zb = BallReal::exact(z.clone(), prec);
    Ok(&(&zb * &zb.log()?) - &BallReal::exact(y.clone(), prec))
}

/// Seed for Newton above `e`: the fixed-point iteration
/// `log z = log y - log log z`, run in `f64` on logarithms.
fn seed(y: &Dyadic) -> Dyadic {
    let ly = y.ln_abs_f64();
    let mut lz = ly;
    for _ in 0..100 {
        lz = ly - lz.ln();
    }
    // exp(lz) through a ball to cope with values outside the f64 range
    let z = BallReal::exact(Dyadic::from_f64(lz), 64).exp().expect("finite log");
    z.mid().clone()
}

/// Certified bisection on `[1/e, max(y, e)]` for `-1/e < y <= e`, where the
/// derivative `log z + 1` may be arbitrarily small.
fn bisect(y: &Dyadic, tol: &Mag, wp: u32) -> Result<(Dyadic, Dyadic)> {
    let mut lo = inv_e(wp).upper();
    let mut hi = Dyadic::from_int(3);
    let (mut f_lo, mut f_hi) = (residual(&lo, y, wp)?, residual(&hi, y, wp)?);
    if !f_lo.is_negative() || !f_hi.is_positive() {
        return Err(Error::PrecisionExhausted { what: "z(y) initial bracket".into(), bits: wp });
    }
    for _ in 0..4 * wp {
        let spread = Mag::from_dyadic_up(&f_hi.upper().sub(&f_lo.lower()));
        if spread.cmp_value(tol) != std::cmp::Ordering::Greater {
            return Ok((lo, hi));
        }
        let mid = lo.add(&hi).mul_2exp(-1);
        let f_mid = residual(&mid, y, wp)?;
        match f_mid.certify_sign() {
            CertifiedSign::Negative => (lo, f_lo) = (mid, f_mid),
            CertifiedSign::Positive => (hi, f_hi) = (mid, f_mid),
            CertifiedSign::Undecided => break,
        }
    }
    Err(Error::PrecisionExhausted { what: "z(y) bisection".into(), bits: wp })
}

fn newton(z: &Dyadic, y: &Dyadic, prec: u32) -> Result<Dyadic> {
    let zb = BallReal::exact(z.clone(), prec);
    let lz = zb.log()?;
    let f = &(&zb * &lz) - &BallReal::exact(y.clone(), prec);
    let fp = &lz + &BallReal::one(prec);
    if fp.contains_zero() {
        return Ok(z.clone());
    }
    let step = f.div(&fp)?;
    Ok(z.sub(step.mid()).round(prec).0)
}

/// Certified enclosure of `z(y)` for an exact `y > -1/e`, as a bracket
/// `[lo, hi]` with `f(lo) <= 0 <= f(hi)` and `f(hi) - f(lo) <= tol`.
fn solve_point(y: &Dyadic, prec: u32) -> Result<(Dyadic, Dyadic)> {
    let y_bits = y.top_bit().max(0) as u32;
    let wp = prec + y_bits + 32;
    // half of the contract 2^{1-prec} max(1, |y|), leaving room for the
    // rounding of the final ball
    let scale = Mag::from_dyadic_up(y).max(&Mag::from_u64(1));
    let tol = scale.mul_2exp(-(prec as i64));
    // within tol/8 of -1/e: z lies in [1/e, 1/e + 2 sqrt(y + 1/e)] because
    // (z log z)'' = 1/z > 0.7 there, and the residual over that range is
    // below tol
    let excess = &BallReal::exact(y.clone(), wp) + &inv_e(wp);
    if excess.abs_upper().cmp_value(&tol.mul_2exp(-3)) != std::cmp::Ordering::Greater {
        let root = BallReal::exact(excess.abs_upper().to_dyadic(), wp).sqrt()?;
        let hi = inv_e(wp).upper().add(&root.upper().mul_2exp(1));
        return Ok((inv_e(wp).lower(), hi));
    }
    if y.cmp_value(&Dyadic::from_f64(std::f64::consts::E)) != std::cmp::Ordering::Greater {
        return bisect(y, &tol, wp);
    }
    let mut z = seed(y);
    let mut w = 48u32;
    while w < wp {
        w = (w * 2).min(wp);
        z = newton(&z, y, w)?;
    }
    for attempt in 0..6u32 {
        let p = wp + 16 * attempt;
        z = newton(&z, y, p)?;
        let zb = BallReal::exact(z.clone(), p);
        let slope = (&zb.log()? + &BallReal::one(p)).abs_upper();
        // half-width tol / (4 slope), at least one ulp
        let delta = tol.div(&slope.mul_2exp(2)).to_dyadic();
        let lo = z.sub(&delta);
        let hi = z.add(&delta);
        if !lo.is_negative() && !lo.is_zero() {
            let f_lo = residual(&lo, y, p)?;
            let f_hi = residual(&hi, y, p)?;
            let bracketed = f_lo.is_negative() && f_hi.is_positive();
            let spread = Mag::from_dyadic_up(&f_hi.upper().sub(&f_lo.lower()));
            let above_inv_e = (&BallReal::exact(lo.clone(), p) - &inv_e(p)).is_positive();
            if bracketed && above_inv_e && spread.cmp_value(&tol) != std::cmp::Ordering::Greater {
                return Ok((lo, hi));
            }
        }
    }
    Err(Error::PrecisionExhausted {
        what: "z(y) bracket".into(),
        bits: wp + 80,
    })
}

/// `z(y)`. For a ball `y` the result encloses `z` over the whole ball
/// (`z` is increasing); where the ball reaches down to `-1/e` the lower end
/// is `1/e`.
pub fn xi_inverse(q: &ZQuery) -> Result<BallReal> {
    let prec = q.precision_bits;
    let neg_inv_e = -inv_e(prec + 32);
    let (y_lo, y_hi) = (q.y.lower(), q.y.upper());
    let hi_ball = BallReal::exact(y_hi.clone(), prec + 32);
    if (&hi_ball - &neg_inv_e).is_negative() {
        return Err(Error::Domain(format!("z(y) needs y >= -1/e, got {}", q.y)));
    }
    let lo_ball = BallReal::exact(y_lo.clone(), prec + 32);
    let lower = if (&lo_ball - &neg_inv_e).is_positive() {
        solve_point(&y_lo, prec)?.0
    } else {
        inv_e(prec + 32).lower()
    };
    let upper = solve_point(&y_hi, prec)?.1;
    Ok(BallReal::from_endpoints(&lower, &upper, prec + 8).with_prec(prec + 8))
}

/// `z(y)` at precision `prec`.
pub fn z_of(y: &BallReal, prec: u32) -> Result<BallReal> {
    xi_inverse(&ZQuery::new(y.clone(), prec))
}

fn checked_log(x: &BallReal, what: &str) -> Result<BallReal> {
    let l = x.log().map_err(|_| Error::Domain(format!("log of nonpositive {what}")))?;
    if !l.is_positive() {
        return Err(Error::Domain(format!("log {what} is not certifiably positive")));
    }
    Ok(l)
}

/// `z_n(y)`: `z_0 = y`, `z_k = y / log z_{k-1}`.
pub fn zn_iterate(y: &BallReal, n: u32, precision_bits: u32) -> Result<BallReal> {
    let y = y.with_prec(precision_bits);
    let mut z = y.clone();
    for k in 1..=n {
        let l = checked_log(&z, &format!("z_{}", k - 1))?;
        z = y.div(&l)?;
    }
    Ok(z)
}

/// Right-hand side of the error bound for `|z(y) - z_n(y)|`, valid for `y > e`:
///
/// * `n = 0`: `y (1 - 1/log z)` (an equality, since `z = y / log z`),
/// * `n = 1`: `z_1 log log z / log z` (also an equality),
/// * `n >= 2`: `(log y)^{n/2} z_1 log log z / ((log z_1)^{n-1} (log z)^{n/2+1})`
///   with `n/2` rounded down.
pub fn zn_error_bound(y: &BallReal, n: u32, precision_bits: u32) -> Result<BallReal> {
    let p = precision_bits;
    let y = y.with_prec(p);
    if !(&y - &BallReal::e(p)).is_positive() {
        return Err(Error::Domain(format!("error bound needs y > e, got {y}")));
    }
    let z = z_of(&y, p)?;
    let log_z = checked_log(&z, "z")?;
    if n == 0 {
        return Ok(&y * &(&BallReal::one(p) - &log_z.recip()?));
    }
    let loglog_z = checked_log(&log_z, "log z")?;
    let z1 = zn_iterate(&y, 1, p)?;
    if n == 1 {
        return (&z1 * &loglog_z).div(&log_z).map_err(Error::from);
    }
    let half = (n / 2) as u64;
    let log_y = checked_log(&y, "y")?;
    let log_z1 = checked_log(&z1, "z_1")?;
    let num = &(&log_y.pow_uint(half) * &z1) * &loglog_z;
    let den = &log_z1.pow_uint((n - 1) as u64) * &log_z.pow_uint(half + 1);
    num.div(&den).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    const P: u32 = 256;

    // z log z is monotone on z >= 1/e, so the residual over the ball is
    // attained at its endpoints
    fn residual_ok(y: &BallReal, z: &BallReal, p: u32) -> bool {
        assert!(y.is_exact());
        let scale = y.abs_upper().max(&Mag::from_u64(1));
        let tol = scale.mul_2exp(1 - p as i64);
        [z.lower(), z.upper()].iter().all(|end| {
            let r = residual(end, y.mid(), p + 64).unwrap();
            r.abs_upper().cmp_value(&tol) != Ordering::Greater
        })
    }

    #[test]
    fn e_maps_to_e() {
        let e = BallReal::e(P + 40);
        let z = z_of(&e, P).unwrap();
        assert!(z.overlaps(&e));
        assert!(z.rad().to_f64() < 1e-70);
    }

    #[test]
    fn two_log_two() {
        let y = BallReal::from_int(2, P + 40).log().unwrap().mul_int(2);
        let z = z_of(&y, P).unwrap();
        assert!(z.contains(&Dyadic::from_int(2)));
    }

    #[test]
    fn million_residual() {
        let y = BallReal::from_int(1_000_000, P);
        let z = z_of(&y, P).unwrap();
        assert!(residual_ok(&y, &z, P));
        let zf = z.to_f64();
        assert!((zf * zf.ln() - 1e6).abs() < 1e-6);
    }

    #[test]
    fn small_branch() {
        for yf in [-0.3, -0.1, 0.0, 0.5, 1.0, 2.5] {
            let y = BallReal::from_f64(yf, P);
            let z = z_of(&y, P).unwrap();
            assert!(residual_ok(&y, &z, P), "y={yf}");
        }
        assert!(z_of(&BallReal::zero(P), P).unwrap().contains(&Dyadic::one()));
        assert!(matches!(z_of(&BallReal::from_f64(-0.4, P), P), Err(Error::Domain(_))));
    }

    #[test]
    fn near_minus_inv_e() {
        // exact point within rounding of -1/e
        let y = BallReal::exact((-inv_e(P + 64)).mid().clone(), P);
        let z = z_of(&y, P).unwrap();
        assert!(z.overlaps(&inv_e(P)));
        assert!(residual_ok(&y, &z, P));
        // slightly further away: the flat region is handled by bisection
        let y = &-inv_e(P + 64) + &BallReal::exact(Dyadic::new(1.into(), -200), P);
        let y = BallReal::exact(y.mid().clone(), P);
        let z = z_of(&y, P).unwrap();
        assert!(residual_ok(&y, &z, P));
        // a ball straddling -1/e
        let z = z_of(&-inv_e(P), P).unwrap();
        assert!(z.overlaps(&inv_e(P)));
    }

    #[test]
    fn iterates_by_hand() {
        let y = BallReal::from_int(7, P);
        assert!(zn_iterate(&y, 0, P).unwrap().contains(&Dyadic::from_int(7)));
        let e2 = BallReal::from_int(2, P).exp().unwrap();
        let z1 = zn_iterate(&e2, 1, P).unwrap();
        assert!(z1.overlaps(&e2.mul_2exp(-1)));
        let z2 = zn_iterate(&e2, 2, P).unwrap();
        let want = e2.div(&(&BallReal::from_int(2, P) - &BallReal::from_int(2, P).log().unwrap())).unwrap();
        assert!(z2.overlaps(&want));
        assert!(matches!(zn_iterate(&BallReal::from_f64(0.5, P), 2, P), Err(Error::Domain(_))));
    }

    #[test]
    fn error_bounds_at_e_squared() {
        let e2 = BallReal::from_int(2, P).exp().unwrap();
        let z = z_of(&e2, P).unwrap();
        let lz = z.log().unwrap();
        let want = (&zn_iterate(&e2, 1, P).unwrap() * &lz.log().unwrap()).div(&lz).unwrap();
        assert!(zn_error_bound(&e2, 1, P).unwrap().overlaps(&want));
        let b0 = zn_error_bound(&e2, 0, P).unwrap();
        assert!(b0.overlaps(&(&e2 - &z)));
        assert!(zn_error_bound(&BallReal::from_int(2, P), 1, P).is_err());
    }

    #[test]
    fn interleaving_and_bounds() {
        for yf in [3.0, 10.0, 1e3, 1e6, 1e9] {
            let y = BallReal::from_f64(yf, P);
            let z = z_of(&y, P).unwrap();
            let it: Vec<BallReal> = (0..=6).map(|n| zn_iterate(&y, n, P).unwrap()).collect();
            let chain = [&it[1], &it[3], &it[5], &z, &it[6], &it[4], &it[2], &it[0]];
            for w in chain.windows(2) {
                assert_eq!(w[0].certified_cmp(w[1]), Some(Ordering::Less), "y={yf}");
            }
            for n in 0..=6u32 {
                let gap = &zn_error_bound(&y, n, P).unwrap() - &(&z - &it[n as usize]).abs();
                assert_ne!(gap.certify_sign(), CertifiedSign::Negative, "y={yf} n={n}");
            }
        }
    }

    #[test]
    fn strictly_increasing() {
        let ys = [0.1, 2.0, 2.8, 50.0, 1e5];
        let zs: Vec<BallReal> = ys.iter().map(|&y| z_of(&BallReal::from_f64(y, P), P).unwrap()).collect();
        for w in zs.windows(2) {
            assert_eq!(w[0].certified_cmp(&w[1]), Some(Ordering::Less));
        }
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn increasing_on_pairs(a in -0.36f64..1e7, b in -0.36f64..1e7) {
            prop_assume!((a - b).abs() > 1e-9 * a.abs().max(1.0));
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let zl = z_of(&BallReal::from_f64(lo, P), P).unwrap();
            let zh = z_of(&BallReal::from_f64(hi, P), P).unwrap();
            prop_assert_eq!(zl.certified_cmp(&zh), Some(Ordering::Less));
        }

        #[test]
        fn residual_contract(y in -0.3678f64..1e12, p in prop::sample::select(vec![64u32, 128, 512])) {
            let yb = BallReal::from_f64(y, p);
            let z = z_of(&yb, p).unwrap();
            prop_assert!(residual_ok(&yb, &z, p));
        }
    }
}
