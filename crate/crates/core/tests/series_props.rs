use proptest::prelude::*;
use vreg_core::formal::{binom_expand, mul, three_term_check, Base, ExpandIn, MonoStatus, TruncatedSeries};
use vreg_core::ratfun::{recognize_from_upper, verify_expansion_jacobi, RationalFn, RecognizeBounds};
use vreg_core::scalars::{qi, FieldConfig, Scalar};
use vreg_core::Error;

fn field() -> FieldConfig {
    FieldConfig::formal(1).unwrap()
}

fn z() -> Scalar {
    Scalar::t_pow(1)
}

fn agree_on_common_window(a: &TruncatedSeries<Scalar>, b: &TruncatedSeries<Scalar>) -> usize {
    let nv = a.vars().len();
    let mut compared = 0;
    let ranges: Vec<(i64, i64)> = (0..nv)
        .map(|i| {
            let lo = a.var(i).lo.max(b.var(i).lo).to_integer();
            let hi = a.var(i).hi.min(b.var(i).hi).to_integer();
            (lo, hi)
        })
        .collect();
    let mut idx: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|r| r.0 > r.1) {
        return 0;
    }
    loop {
        let e: Vec<_> = idx.iter().map(|&x| qi(x)).collect();
        assert_eq!(a.coeff(&e).unwrap(), b.coeff(&e).unwrap(), "exponent {idx:?}");
        compared += 1;
        let mut i = 0;
        loop {
            if i == nv {
                return compared;
            }
            idx[i] += 1;
            if idx[i] <= ranges[i].1 {
                break;
            }
            idx[i] = ranges[i].0;
            i += 1;
        }
    }
}

#[test]
fn expansion_homomorphism() {
    let f = field();
    let bases = [
        Base::VarMinus("x".into(), z()),
        Base::ScalarPlus(z(), "x".into()),
        Base::Diff("x1".into(), "x2".into()),
    ];
    for base in &bases {
        for dir in [ExpandIn::First, ExpandIn::Second] {
            for r1 in -3..=3 {
                for r2 in -3..=3 {
                    let a = binom_expand(&f, base, qi(r1), dir, 10).unwrap();
                    let b = binom_expand(&f, base, qi(r2), dir, 10).unwrap();
                    let ab = mul(&a, &b).unwrap();
                    let c = binom_expand(&f, base, qi(r1 + r2), dir, 12).unwrap();
                    assert!(agree_on_common_window(&ab, &c) > 0, "{base:?} {dir:?} {r1} {r2}");
                }
            }
        }
    }
}

#[test]
fn delta_identity_window_8() {
    let f = field();
    let one = |v: &str| TruncatedSeries::finite_from(v, [(qi(0), Scalar::one())]);
    let checks = three_term_check(&f, &one("x"), &one("x"), &one("x0"), &z(), 8).unwrap();
    assert_eq!(checks.len(), 17 * 17);
    assert!(checks.iter().all(|c| c.status == MonoStatus::Pass));
}

#[test]
fn expansion_jacobi_family() {
    let f = field();
    for m in -2..=2 {
        for n in -3..=2 {
            let r = RationalFn::monomial(m, n, z());
            let checks = verify_expansion_jacobi(&f, &r, 8).unwrap();
            assert!(checks.iter().all(|c| c.status == MonoStatus::Pass), "x^{m}(x-z)^{n}");
        }
    }
}

#[test]
fn recognition_round_trip() {
    let f = field();
    let b = RecognizeBounds { l_max: 3, k_max: 3, deg_max: 6, a_priori: None };
    for a in -3..=3 {
        for e in -3..=3 {
            let r = RationalFn::monomial(a, e, z());
            let s = r.iota_infinity(&f, 16).unwrap();
            let back = recognize_from_upper(&f, &s, &z(), b).unwrap();
            assert_eq!(back.f, r, "x^{a}(x-z)^{e}");
        }
    }
}

#[test]
fn recognition_failure_is_honest() {
    let f = field();
    let s = RationalFn::monomial(0, -1, z().scale_int(2)).iota_infinity(&f, 16).unwrap();
    let b = RecognizeBounds { l_max: 3, k_max: 3, deg_max: 3, a_priori: None };
    assert!(matches!(recognize_from_upper(&f, &s, &z(), b), Err(Error::NoCandidate(_))));
}

proptest! {
    #[test]
    fn recognize_then_iota_zero_is_x_linear(a in -3i64..=3, e in -3i64..=0, m in -3i64..=3) {
        let f = field();
        let b = RecognizeBounds { l_max: 6, k_max: 3, deg_max: 6, a_priori: None };
        let s = RationalFn::monomial(a, e, z()).iota_infinity(&f, 20).unwrap();
        let xm = TruncatedSeries::finite_from("x", [(qi(m), Scalar::one())]);
        let shifted = mul(&xm, &s).unwrap();
        let r1 = recognize_from_upper(&f, &s, &z(), b).unwrap().f;
        let r2 = recognize_from_upper(&f, &shifted, &z(), b).unwrap().f;
        let lhs = mul(&xm, &r1.iota_zero(&f, 10).unwrap()).unwrap();
        let rhs = r2.iota_zero(&f, 12).unwrap();
        prop_assert!(agree_on_common_window(&lhs, &rhs) > 0);
    }
}
