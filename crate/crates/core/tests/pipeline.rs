//! End-to-end checks across modules.

use expmeasure::convergents::{exp_cf_rows, linear_forms};
use expmeasure::padic::big_divisor;
use expmeasure::verify::{best_numerator, check_theorem1, exp_st, lambda_abs, n_from_log, scf_convergents, Verdict};
use expmeasure::BallReal;
use num_bigint::BigInt;
use num_traits::One;
use proptest::prelude::*;

#[test]
fn rows_agree_with_divisor_and_linear_forms() {
    for (s, t) in [(3, 1), (-4, 3), (6, 5)] {
        let rows = exp_cf_rows(s, t, 30).unwrap();
        let forms = linear_forms(s, t, 30, 256).unwrap();
        for (row, lf) in rows.iter().zip(&forms) {
            assert_eq!(row.d, big_divisor(row.n, s));
            // L_n = (1 - e^{s/t}) R_n / D_n = H_n e^{s/t} - J_n
            let p = lf.l.prec();
            let x = exp_st(s, t, p).unwrap();
            let direct = &(&BallReal::from_int(row.h.clone(), p) * &x) - &BallReal::from_int(row.j.clone(), p);
            assert!(direct.overlaps(&lf.l), "s={s} t={t} n={}", row.n);
        }
    }
}

#[test]
fn convergent_numerators_verify_cleanly() {
    // SCF convergents are the hardest N for the bound; check a run of them
    let cs = scf_convergents(2, 3, 80, 512).unwrap();
    for (p, q) in cs.iter().filter(|(_, q)| q.bits() > 4) {
        let rec = check_theorem1(2, 3, q, 256, Some(p)).unwrap();
        assert_eq!(rec.verdict, Verdict::Holds, "q = {q}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn nearest_numerator_within_half(
        s in prop::sample::select(vec![1i64, -1, 2, -2, 3, 5, -7]),
        t in 1i64..5,
        log_n in 0.0f64..200.0,
    ) {
        prop_assume!(num_integer::Integer::gcd(&s, &t) == 1);
        let n = n_from_log(log_n).unwrap();
        let m = best_numerator(s, t, &n, 128).unwrap();
        let l = lambda_abs(s, t, &n, &m, 1024).unwrap();
        if m.is_one() {
            // the nonzero replacement for 0: |N e^{s/t} - 1| < 1
            prop_assert!((&BallReal::one(1024) - &l).is_positive());
        } else {
            prop_assert!((&BallReal::from_f64(0.5, 1024) - &l).is_positive());
        }
    }

    #[test]
    fn holds_is_stable_under_doubling(
        st in prop::sample::select(vec![(1i64, 1i64), (2, 3), (-1, 2), (3, 1)]),
        extra in 0.0f64..60.0,
    ) {
        let (s, t) = st;
        let prof = expmeasure::ArithmeticProfile::new(s, t, 128).unwrap();
        let n1 = expmeasure::bounds::threshold_n1(&prof).unwrap().to_f64();
        let n: BigInt = n_from_log(n1 + 1.0 + extra).unwrap();
        let a = check_theorem1(s, t, &n, 512, None).unwrap();
        prop_assume!(a.verdict == Verdict::Holds);
        let b = check_theorem1(s, t, &n, 2 * a.precision_used, None).unwrap();
        prop_assert_eq!(b.verdict, Verdict::Holds);
        prop_assert!(a.margin.overlaps(&b.margin));
    }
}
