//! Convergents of `E(s,t) = K(s^2 / (2t(2k+1)))`, the shifted sequences
//! `C_n^± = A_n + (2t ± s) B_n`, their reductions by `D_n`, and the linear
//! forms `R_n = B_n E(s,t) - A_n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::ball::{BallReal, CertifiedSign};
use crate::error::{Error, Result};
use crate::gcf::{gcf_convergents, GcfCoefficients};
use crate::padic::{divisor_from_factors, factorize, ExpArg};
use crate::verify::exp_st;

/// One index of the convergent table; every field is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentRow {
    pub n: u64,
    pub a: BigInt,
    pub b: BigInt,
    pub c_plus: BigInt,
    pub c_minus: BigInt,
    pub d: BigInt,
    pub j: BigInt,
    pub h: BigInt,
}

impl ConvergentRow {
    /// `1 + 2s / (2t - s + A_n/B_n)`, which simplifies to `C_n^+ / C_n^-`.
    /// `None` when `C_n^- = 0` (only `s = 2, t = 1, n = 0`).
    pub fn reduced_convergent(&self) -> Option<BigRational> {
        if self.c_minus.is_zero() {
            None
        } else {
            Some(BigRational::new(self.c_plus.clone(), self.c_minus.clone()))
        }
    }
}

fn to_integer(q: BigRational, what: &str) -> Result<BigInt> {
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(Error::Internal(format!("{what} is not an integer: {q}")))
    }
}

/// Rows `0..=n_max`. A row where `D_n` fails to divide `C_n^±` is reported
/// as an internal-consistency error.
pub fn exp_cf_rows(s: i64, t: i64, n_max: u64) -> Result<Vec<ConvergentRow>> {
    let arg = ExpArg::new(s, t)?;
    let factors = factorize(arg.abs_s())?;
    let pairs = gcf_convergents(&GcfCoefficients::exp_tail(s, t), n_max)?;
    let plus = BigInt::from(2 * t + s);
    let minus = BigInt::from(2 * t - s);
    pairs
        .into_iter()
        .map(|pair| {
            let n = pair.n;
            let a = to_integer(pair.a, "A_n")?;
            let b = to_integer(pair.b, "B_n")?;
            let c_plus = &a + &plus * &b;
            let c_minus = &a + &minus * &b;
            let d = divisor_from_factors(&factors, n);
            let (j, rp) = c_plus.div_rem(&d);
            let (h, rm) = c_minus.div_rem(&d);
            if !rp.is_zero() || !rm.is_zero() {
                return Err(Error::Internal(format!(
                    "D_{n} = {d} does not divide C_{n}^+ and C_{n}^- for s={s}, t={t}"
                )));
            }
            Ok(ConvergentRow { n, a, b, c_plus, c_minus, d, j, h })
        })
        .collect()
}

/// `sum_{k=0}^{n+1} (n+1+k)! / (k! (n+1-k)!) t^k (±s)^{n+1-k}`.
pub fn cpm_closed_form(s: i64, t: i64, n: u64) -> (BigInt, BigInt) {
    let m = n + 1;
    let (s_big, t_big) = (BigInt::from(s), BigInt::from(t));
    let mut coeff = BigInt::one();
    let mut t_pow = BigInt::one();
    let mut plus = BigInt::zero();
    let mut minus = BigInt::zero();
    for k in 0..=m {
        let term = &coeff * &t_pow * Pow::pow(&s_big, m - k);
        if (m - k).is_multiple_of(2) {
            minus += &term;
        } else {
            minus -= &term;
        }
        plus += term;
        // c_{k+1} = c_k (m+1+k)(m-k)/(k+1), an exact division
        coeff = coeff * BigInt::from(m + 1 + k) * BigInt::from(m - k) / BigInt::from(k + 1);
        t_pow *= &t_big;
    }
    (plus, minus)
}

fn row_at(rows: &[ConvergentRow], n: u64) -> Result<&ConvergentRow> {
    rows.iter()
        .find(|r| r.n == n)
        .ok_or_else(|| Error::InvalidArgument(format!("row {n} not present")))
}

/// `J_n H_{n+1} - J_{n+1} H_n - (-1)^n 2 s^{2n+3} / (D_n D_{n+1})`; zero when
/// the determinant identity holds.
pub fn determinant_residual(rows: &[ConvergentRow], s: i64, n: u64) -> Result<BigRational> {
    let (r0, r1) = (row_at(rows, n)?, row_at(rows, n + 1)?);
    let lhs = BigRational::from_integer(&r0.j * &r1.h - &r1.j * &r0.h);
    let mut rhs = BigRational::new(
        BigInt::from(2) * Pow::pow(&BigInt::from(s), 2 * n + 3),
        &r0.d * &r1.d,
    );
    if n % 2 == 1 {
        rhs = -rhs;
    }
    Ok(lhs - rhs)
}

/// `R_n` and `L_n` for one index.
#[derive(Clone, Debug)]
pub struct LinearFormSample {
    pub n: u64,
    /// `B_n E(s,t) - A_n`.
    pub r: BallReal,
    /// `(1 - e^{s/t}) R_n / D_n`.
    pub l: BallReal,
    /// `s^{2(n+1)} / B_{n+1}`.
    pub tail_bound: BigRational,
    pub precision_used: u32,
}

/// `E(s,t) = 2s/(e^{s/t} - 1) + s - 2t` from a ball exponential.
pub fn exp_tail_closed_form(s: i64, t: i64, precision_bits: u32) -> Result<BallReal> {
    let x = exp_st(s, t, precision_bits)?;
    let p = precision_bits;
    let frac = BallReal::from_int(2 * s, p).div(&(&x - &BallReal::one(p)))?;
    Ok(&frac + &BallReal::from_int(s - 2 * t, p))
}

const LINEAR_FORM_CAP: u32 = 1 << 20;

/// `R_n` and `L_n` for `n <= n_max`, each certified against the tail
/// estimate `|R_n| < s^{2(n+1)}/B_{n+1}`, the sign `(-1)^n`, and the
/// identity `(1 - e^{s/t}) R_n = C_n^- e^{s/t} - C_n^+`.
///
/// Starts at `max(256, 4 (n_max+1) log2|s| + 64)` bits, or at
/// `precision_bits` if larger, and doubles until everything is certified.
pub fn linear_forms(s: i64, t: i64, n_max: u64, precision_bits: u32) -> Result<Vec<LinearFormSample>> {
    linear_forms_capped(s, t, n_max, precision_bits, LINEAR_FORM_CAP)
}

pub fn linear_forms_capped(
    s: i64,
    t: i64,
    n_max: u64,
    precision_bits: u32,
    cap_bits: u32,
) -> Result<Vec<LinearFormSample>> {
    let rows = exp_cf_rows(s, t, n_max + 1)?;
    let log2_s = 64 - s.unsigned_abs().leading_zeros() as u64;
    let start = (4 * (n_max + 1) * log2_s + 64).clamp(256, cap_bits as u64) as u32;
    let mut prec = start.max(precision_bits).min(cap_bits);
    loop {
        if let Some(samples) = try_linear_forms(s, t, &rows, n_max, prec)? {
            return Ok(samples);
        }
        if prec >= cap_bits {
            return Err(Error::PrecisionExhausted {
                what: format!("linear forms for s={s}, t={t}, n<={n_max}"),
                bits: prec,
            });
        }
        prec = prec.saturating_mul(2).min(cap_bits);
    }
}

fn try_linear_forms(
    s: i64,
    t: i64,
    rows: &[ConvergentRow],
    n_max: u64,
    prec: u32,
) -> Result<Option<Vec<LinearFormSample>>> {
    let x = exp_st(s, t, prec)?;
    let e_val = exp_tail_closed_form(s, t, prec)?;
    let one_minus_x = &BallReal::one(prec) - &x;
    let s2 = BigInt::from(s) * BigInt::from(s);
    let mut out = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let row = &rows[n as usize];
        let next = &rows[n as usize + 1];
        let r = &(&BallReal::from_int(row.b.clone(), prec) * &e_val) - &BallReal::from_int(row.a.clone(), prec);
        let tail_bound = BigRational::new(Pow::pow(&s2, n + 1), next.b.clone());
        let tail_ball = BallReal::from_rational(&tail_bound, prec);
        let expected = if n % 2 == 0 { CertifiedSign::Positive } else { CertifiedSign::Negative };
        if r.certify_sign() != expected || !(&tail_ball - &r.abs()).is_positive() {
            return Ok(None);
        }
        let lhs = &one_minus_x * &r;
        let rhs = &(&BallReal::from_int(row.c_minus.clone(), prec) * &x) - &BallReal::from_int(row.c_plus.clone(), prec);
        if !lhs.overlaps(&rhs) {
            return Err(Error::Internal(format!(
                "(1 - e^(s/t)) R_{n} and C_{n}^- e^(s/t) - C_{n}^+ are disjoint for s={s}, t={t}"
            )));
        }
        let l = lhs.div(&BallReal::from_int(row.d.clone(), prec))?;
        out.push(LinearFormSample { n, r, l, tail_bound, precision_used: prec });
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn e11_rows() {
        let rows = exp_cf_rows(1, 1, 3).unwrap();
        assert_eq!(rows.iter().map(|r| r.b.clone()).collect::<Vec<_>>(), ints(&[1, 6, 61, 860]));
        assert_eq!(rows.iter().map(|r| r.a.clone()).collect::<Vec<_>>(), ints(&[0, 1, 10, 141]));
    }

    #[test]
    fn initial_shifted_values() {
        for (s, t) in [(1i64, 1i64), (3, 1), (-5, 2), (7, 3), (-12, 5)] {
            let rows = exp_cf_rows(s, t, 1).unwrap();
            assert_eq!(rows[0].c_plus, BigInt::from(2 * t + s));
            assert_eq!(rows[0].c_minus, BigInt::from(2 * t - s));
            assert_eq!(rows[1].c_plus, BigInt::from(12 * t * t + 6 * t * s + s * s));
            assert_eq!(rows[1].c_minus, BigInt::from(12 * t * t - 6 * t * s + s * s));
            assert_eq!(cpm_closed_form(s, t, 0), (rows[0].c_plus.clone(), rows[0].c_minus.clone()));
            assert_eq!(cpm_closed_form(s, t, 1), (rows[1].c_plus.clone(), rows[1].c_minus.clone()));
        }
    }

    #[test]
    fn closed_form_three_one() {
        let rows = exp_cf_rows(3, 1, 4).unwrap();
        assert_eq!(cpm_closed_form(3, 1, 4), (rows[4].c_plus.clone(), rows[4].c_minus.clone()));
    }

    #[test]
    fn reduced_rows_multiply_back() {
        for (s, t) in [(6i64, 1i64), (-10, 3), (12, 7)] {
            for row in exp_cf_rows(s, t, 80).unwrap() {
                assert_eq!(&row.j * &row.d, row.c_plus);
                assert_eq!(&row.h * &row.d, row.c_minus);
                assert!(row.b >= BigInt::one());
            }
        }
    }

    #[test]
    fn determinant_examples() {
        for (s, t, n) in [(1i64, 1i64, 0u64), (3, 1, 5), (-2, 3, 7)] {
            let rows = exp_cf_rows(s, t, n + 1).unwrap();
            assert!(determinant_residual(&rows, s, n).unwrap().is_zero());
        }
        let rows = exp_cf_rows(3, 1, 3).unwrap();
        assert!(determinant_residual(&rows, 3, 3).is_err());
    }

    #[test]
    fn denominators_exceed_product() {
        for (s, t) in [(1i64, 1i64), (5, 3), (-12, 1)] {
            let rows = exp_cf_rows(s, t, 60).unwrap();
            let mut product = BigInt::one();
            for n in 0..60u64 {
                product *= BigInt::from(2 * t * (2 * n as i64 + 3));
                let b = &rows[n as usize + 1].b;
                if n == 0 {
                    assert_eq!(b, &product);
                } else {
                    assert!(b > &product, "s={s} t={t} n={n}");
                }
            }
        }
    }

    #[test]
    fn tail_estimate_small() {
        let lf = linear_forms(1, 1, 2, 256).unwrap();
        assert_eq!(lf[2].tail_bound, BigRational::new(1.into(), 860.into()));
        assert!(lf[2].r.abs_upper().to_f64() < 1.0 / 860.0);
    }

    #[test]
    fn first_linear_form_is_e21() {
        let lf = linear_forms(2, 1, 0, 256).unwrap();
        let x = exp_st(2, 1, 256).unwrap();
        let direct = BallReal::from_int(4, 256).div(&(&x - &BallReal::one(256))).unwrap();
        assert!(lf[0].r.overlaps(&direct));
        let via_gcf = crate::gcf::gcf_value(&GcfCoefficients::exp_tail(2, 1), 60, 256).unwrap();
        assert!(lf[0].r.overlaps(&via_gcf));
    }

    #[test]
    fn l_decreases() {
        for (s, t) in [(1i64, 1i64), (3, 1)] {
            let lf = linear_forms(s, t, 40, 512).unwrap();
            let mags: Vec<BallReal> = lf.iter().map(|x| x.l.abs()).collect();
            for w in mags.windows(2) {
                assert!((&w[0] - &w[1]).is_positive(), "s={s} t={t}");
            }
        }
    }

    #[test]
    fn reduced_convergent_degenerate() {
        let rows = exp_cf_rows(2, 1, 2).unwrap();
        assert!(rows[0].reduced_convergent().is_none());
        assert_eq!(rows[1].reduced_convergent().unwrap(), BigRational::new(BigInt::from(12 + 12 + 4), BigInt::from(4)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn closed_form_matches_recurrence(s in -30i64..=30, t in 1i64..=12, n in 0u64..60) {
            prop_assume!(s != 0 && s.unsigned_abs().gcd(&(t as u64)) == 1);
            let rows = exp_cf_rows(s, t, n).unwrap();
            let row = &rows[n as usize];
            prop_assert_eq!(cpm_closed_form(s, t, n), (row.c_plus.clone(), row.c_minus.clone()));
        }

        #[test]
        fn determinant_residual_vanishes(s in -30i64..=30, t in 1i64..=12, n in 0u64..60) {
            prop_assume!(s != 0 && s.unsigned_abs().gcd(&(t as u64)) == 1);
            let rows = exp_cf_rows(s, t, n + 1).unwrap();
            prop_assert!(determinant_residual(&rows, s, n).unwrap().is_zero());
        }
    }
}
