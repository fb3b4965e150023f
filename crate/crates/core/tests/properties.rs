use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use tp_mahler::arith::{nu_p, nu_p_rational, rational_height, ExactRational, Prime, Valuation};
use tp_mahler::series::{
    ps_derivative, ps_div_one_minus_zp, ps_exp, ps_log, ps_mul, ps_substitute_power, TruncSeries,
};

const SMALL_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn rational() -> impl Strategy<Value = ExactRational> {
    (-60i64..=60, 1i64..=40).prop_map(|(n, d)| ExactRational::new(BigInt::from(n), BigInt::from(d)))
}

fn nonzero_rational() -> impl Strategy<Value = ExactRational> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

fn series(max_order: usize) -> impl Strategy<Value = TruncSeries> {
    proptest::collection::vec(rational(), 1..=max_order + 1)
        .prop_map(|c| TruncSeries::new(c).unwrap())
}

fn unit_series(max_order: usize) -> impl Strategy<Value = TruncSeries> {
    proptest::collection::vec(
        (-3i64..=3, prop_oneof![Just(1i64), Just(2), Just(3)]),
        0..=max_order,
    )
    .prop_map(|tail| {
        let mut c = vec![ExactRational::one()];
        c.extend(
            tail.into_iter()
                .map(|(n, d)| ExactRational::new(BigInt::from(n), BigInt::from(d))),
        );
        TruncSeries::new(c).unwrap()
    })
}

fn prime() -> impl Strategy<Value = Prime> {
    proptest::sample::select(SMALL_PRIMES.to_vec()).prop_map(|p| Prime::new(p).unwrap())
}

fn brute_valuation(p: u64, mut n: u64) -> i64 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_valuation_is_numerator_minus_denominator(
        p in prime(),
        a in 1u64..100_000,
        b in 1u64..100_000,
        negative in any::<bool>(),
    ) {
        let sign = if negative { -1 } else { 1 };
        let x = ExactRational::new(BigInt::from(a) * sign, BigInt::from(b));
        let (na, nb) = (x.numer().magnitude().clone(), x.denom().magnitude().clone());
        let na: u64 = na.try_into().unwrap();
        let nb: u64 = nb.try_into().unwrap();
        let expected = brute_valuation(p.get(), na) - brute_valuation(p.get(), nb);
        prop_assert_eq!(nu_p_rational(p, &x), Valuation::Finite(expected));
        prop_assert_eq!(nu_p(p, na).unwrap() as i64, brute_valuation(p.get(), na));
    }

    #[test]
    fn valuation_is_additive(p in prime(), x in nonzero_rational(), y in nonzero_rational()) {
        prop_assert_eq!(nu_p_rational(p, &(&x * &y)), nu_p_rational(p, &x) + nu_p_rational(p, &y));
    }

    #[test]
    fn height_power_rule(x in nonzero_rational(), m in -5i32..=5) {
        let xm = if m >= 0 {
            num_traits::pow(x.clone(), m as usize)
        } else {
            num_traits::pow(x.recip(), (-m) as usize)
        };
        let expected = m.abs() as f64 * rational_height(&x);
        prop_assert!((rational_height(&xm) - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn multiplication_is_commutative_and_associative(
        a in series(10), b in series(10), c in series(10),
    ) {
        prop_assert_eq!(ps_mul(&a, &b), ps_mul(&b, &a));
        prop_assert_eq!(ps_mul(&ps_mul(&a, &b), &c), ps_mul(&a, &ps_mul(&b, &c)));
    }

    #[test]
    fn multiplication_distributes(a in series(8), b in series(8), c in series(8)) {
        prop_assert_eq!(ps_mul(&a, &b.add(&c)), ps_mul(&a, &b).add(&ps_mul(&a, &c)));
    }

    #[test]
    fn substitution_is_multiplicative(p in prime(), a in series(14), b in series(14)) {
        prop_assert_eq!(
            ps_substitute_power(&ps_mul(&a, &b), p),
            ps_mul(&ps_substitute_power(&a, p), &ps_substitute_power(&b, p))
        );
    }

    #[test]
    fn division_by_one_minus_zp_round_trips(p in prime(), a in series(16)) {
        let q = ps_div_one_minus_zp(&a, p);
        let back = ps_mul(&q, &TruncSeries::one_minus_zp(p, a.order()));
        prop_assert_eq!(back, a);
    }

    #[test]
    fn derivative_obeys_product_rule(a in series(8), b in series(8)) {
        let lhs = ps_derivative(&ps_mul(&a, &b));
        let rhs = ps_mul(&ps_derivative(&a), &b).add(&ps_mul(&a, &ps_derivative(&b)));
        prop_assume!(a.order() >= 1 && b.order() >= 1);
        let n = a.order().min(b.order()) - 1;
        prop_assert_eq!(lhs.truncate(n), rhs.truncate(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exp_inverts_log(a in unit_series(64)) {
        let round = ps_exp(&ps_log(&a).unwrap()).unwrap();
        prop_assert_eq!(round, a);
    }

    #[test]
    fn log_of_product_is_sum(a in unit_series(24), b in unit_series(24)) {
        let lhs = ps_log(&ps_mul(&a, &b)).unwrap();
        let rhs = ps_log(&a).unwrap().add(&ps_log(&b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn zero_has_infinite_valuation() {
    let p = Prime::new(3).unwrap();
    assert!(nu_p_rational(p, &ExactRational::zero()).is_infinite());
    assert!(nu_p(p, 0).is_err());
}
