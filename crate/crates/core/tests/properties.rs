use num_traits::{Signed, Zero};
use proptest::prelude::*;

use diffsys::exact::{q, qi, FormalReal, Lattice, Rational};
use diffsys::function::{zero_test, SymbolicFunction, ZeroVerdict};
use diffsys::operator::DifferenceOperator;
use diffsys::solver::{two_term_base_compare, BaseComparison};

fn nonzero(lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
    (lo..=hi, 1i64..=4).prop_filter_map("nonzero", |(n, d)| (n != 0).then(|| q(n, d)))
}

fn shift() -> impl Strategy<Value = FormalReal> {
    (-4i64..=4, -2i64..=2, -2i64..=2)
        .prop_map(|(u, x, y)| FormalReal::from_coords([(0, q(u, 2)), (1, qi(x)), (2, qi(y))]))
}

fn coset_sum() -> impl Strategy<Value = SymbolicFunction> {
    let atom = prop_oneof![
        (-2i64..=2).prop_map(|c| SymbolicFunction::constant(qi(c))),
        (shift(), shift()).prop_map(|(g, o)| SymbolicFunction::coset(Lattice::from_generators([&g]), &o)),
        (shift(), shift(), shift())
            .prop_map(|(g, h, o)| SymbolicFunction::coset(Lattice::from_generators([&g, &h]), &o)),
        shift().prop_map(|p| SymbolicFunction::point_indicator(&p)),
    ];
    proptest::collection::vec((-2i64..=2, atom), 1..=4)
        .prop_map(|t| SymbolicFunction::lin_comb(t.into_iter().map(|(c, f)| (qi(c), f))).unwrap())
}

fn mixed() -> impl Strategy<Value = SymbolicFunction> {
    let atom = prop_oneof![
        proptest::collection::vec(-3i64..=3, 0..=3).prop_map(|c| SymbolicFunction::polynomial(c.into_iter().map(qi).collect())),
        (1i64..=3, 1i64..=2).prop_map(|(f, d)| SymbolicFunction::cos2pi(q(f, d)).unwrap()),
        (-2i64..=2).prop_map(|c| SymbolicFunction::constant(qi(c))),
        (1i64..=3).prop_map(|d| SymbolicFunction::coset(Lattice::from_generators([&FormalReal::rational(q(1, d))]), &FormalReal::zero())),
    ];
    proptest::collection::vec((-2i64..=2, atom), 1..=4)
        .prop_map(|t| SymbolicFunction::lin_comb(t.into_iter().map(|(c, f)| (qi(c), f))).unwrap())
}

fn samples(formal: bool) -> Vec<FormalReal> {
    let mut out = Vec::new();
    let r = if formal { 2 } else { 0 };
    for u in -12..=12 {
        for x in -r..=r {
            for y in -r..=r {
                out.push(FormalReal::from_coords([(0, q(u, 8)), (1, q(x, 2)), (2, qi(y))]));
            }
        }
    }
    out
}

fn check_verdict(f: &SymbolicFunction, formal: bool) -> Result<(), TestCaseError> {
    match zero_test(f).unwrap() {
        ZeroVerdict::NonZero(w) => prop_assert!(!f.evaluate(&w).unwrap().is_zero(), "witness {:?} gives 0", w),
        ZeroVerdict::Zero => {
            for x in samples(formal) {
                prop_assert!(f.evaluate(&x).unwrap().is_zero(), "zero verdict but f({:?}) != 0", x);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn base_compare_is_symmetric(a1 in nonzero(-9, 9), b1 in nonzero(-6, 6), a2 in nonzero(-9, 9), b2 in nonzero(-6, 6)) {
        prop_assert_eq!(
            two_term_base_compare(&a1, &b1, &a2, &b2).unwrap(),
            two_term_base_compare(&a2, &b2, &a1, &b1).unwrap()
        );
    }

    #[test]
    fn base_compare_is_scale_invariant(a in nonzero(-9, 9), b in nonzero(-6, 6), k in 1i32..=4, a2 in nonzero(-9, 9), b2 in nonzero(-6, 6)) {
        let ak = a.pow(k);
        let bk = &b * Rational::from_integer(k.into());
        prop_assert_eq!(two_term_base_compare(&ak, &bk, &a, &b).unwrap(), BaseComparison::Equal);
        prop_assert_eq!(
            two_term_base_compare(&ak, &bk, &a2, &b2).unwrap(),
            two_term_base_compare(&a, &b, &a2, &b2).unwrap()
        );
    }

    #[test]
    fn base_compare_agrees_with_floats(a1 in nonzero(-9, 9), b1 in nonzero(-6, 6), a2 in nonzero(-9, 9), b2 in nonzero(-6, 6)) {
        let l = |a: &Rational, b: &Rational| {
            let a = num_traits::ToPrimitive::to_f64(&a.abs()).unwrap();
            let b = num_traits::ToPrimitive::to_f64(b).unwrap();
            a.ln() / b
        };
        let close = (l(&a1, &b1) - l(&a2, &b2)).abs() < 1e-12;
        let equal = two_term_base_compare(&a1, &b1, &a2, &b2).unwrap() == BaseComparison::Equal;
        prop_assert_eq!(close, equal);
    }

    #[test]
    fn coset_zero_test_is_sound(f in coset_sum()) {
        check_verdict(&f, true)?;
    }

    #[test]
    fn periodic_differences_vanish(g in shift(), h in shift(), o in shift(), k in -2i64..=2) {
        let l = Lattice::from_generators([&g, &h]);
        let f = SymbolicFunction::coset(l, &o);
        let step = &g.scale(&qi(k)) + &h;
        let d = f.apply(&DifferenceOperator::delta(step)).unwrap();
        prop_assert!(zero_test(&d).unwrap().is_zero());
    }

    #[test]
    fn cancelled_sums_are_zero(f in coset_sum(), g in mixed(), b in shift()) {
        let t = DifferenceOperator::translation(b.clone());
        let ff = f.apply(&t).unwrap().sub(&f.translate(&b).unwrap()).unwrap();
        prop_assert!(zero_test(&ff).unwrap().is_zero());
        let z = g.sub(&g.scale(&qi(1)).unwrap()).unwrap();
        prop_assert!(zero_test(&z).unwrap().is_zero());
    }

    #[test]
    fn mixed_zero_test_is_sound(f in mixed(), g in mixed()) {
        check_verdict(&f.sub(&g).unwrap(), false)?;
        let s = DifferenceOperator::delta(FormalReal::rational(q(1, 2)));
        check_verdict(&f.apply(&s).unwrap(), false)?;
    }
}

#[test]
fn nonzero_rational_compare_rejects_zero() {
    assert!(two_term_base_compare(&Rational::zero(), &qi(1), &qi(2), &qi(1)).is_err());
}
