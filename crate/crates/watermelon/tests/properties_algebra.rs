use num_bigint::BigInt;
use proptest::prelude::*;

use watermelon::partitions::{convert_partition, iter_plane_partitions, macmahon_count, zq_product, Direction};
use watermelon::qpoly::{binomial, q_binomial};
use watermelon::QPoly;

fn qpoly() -> impl Strategy<Value = QPoly> {
    (-3i64..4, prop::collection::vec(-5i64..6, 0..6)).prop_map(|(d, c)| QPoly::from_i64s(d, &c))
}

fn nonzero_qpoly() -> impl Strategy<Value = QPoly> {
    qpoly().prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ring_axioms(a in qpoly(), b in qpoly(), c in qpoly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &b) + &b, a);
    }
}

proptest! {
    #[test]
    fn exact_division_inverts_product(a in qpoly(), b in nonzero_qpoly()) {
        prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
    }

    #[test]
    fn staircase_round_trip(mut parts in prop::collection::vec(0usize..30, 0..9)) {
        parts.sort_unstable_by(|x, y| y.cmp(x));
        let n = parts.len();
        let strict = convert_partition(&parts, Direction::ToStrict, n).unwrap();
        prop_assert!(strict.windows(2).all(|w| w[0] > w[1]));
        prop_assert_eq!(convert_partition(&strict, Direction::ToWeak, n).unwrap(), parts);
    }

    #[test]
    fn box_product_is_symmetric(l in 0usize..5, n in 0usize..5, k in 0usize..5) {
        let z = zq_product(l, n, k);
        for (a, b, c) in [(l, k, n), (n, l, k), (n, k, l), (k, l, n), (k, n, l)] {
            prop_assert_eq!(&zq_product(a, b, c), &z);
        }
    }
}

#[test]
fn q_binomial_facts() {
    for n in 0..=20i64 {
        for r in 0..=n {
            let b = q_binomial(n as u64, r);
            assert_eq!(b.eval_at_one(), binomial(n, r));
            assert_eq!(b, q_binomial(n as u64, n - r));
            if n > 0 && r > 0 {
                let pascal = &q_binomial(n as u64 - 1, r - 1) + &q_binomial(n as u64 - 1, r).shift(r);
                assert_eq!(b, pascal, "n={n} r={r}");
            }
        }
    }
    // Factorials as an independent check of the q = 1 value.
    let fact = |m: i64| (1..=m).fold(BigInt::from(1), |a, v| a * v);
    for r in 0..=20 {
        assert_eq!(q_binomial(20, r).eval_at_one(), fact(20) / (fact(r) * fact(20 - r)));
    }
}

#[test]
fn plane_partitions_sum_to_box_product() {
    for l in 0..=4 {
        for n in 0..=4 {
            for k in 0..=4 {
                let brute = iter_plane_partitions(l, n, k)
                    .fold(QPoly::zero(), |acc, pp| &acc + &QPoly::q_pow(pp.volume() as i64));
                assert_eq!(brute, zq_product(l, n, k), "L={l} N={n} K={k}");
            }
        }
    }
}

#[test]
fn macmahon_counts_agree() {
    for l in 0..=5usize {
        for n in 0..=5usize {
            for k in 0..=5usize {
                // prod (i + j + k - 1) / (i + j - 1) accumulated as a rational.
                let mut num = BigInt::from(1);
                let mut den = BigInt::from(1);
                for i in 1..=l {
                    for j in 1..=n {
                        num *= i + j + k - 1;
                        den *= i + j - 1;
                    }
                }
                let a = macmahon_count(l, n, k);
                assert_eq!(&num % &den, BigInt::from(0));
                assert_eq!(a, num / den);
                assert_eq!(a, zq_product(l, n, k).eval_at_one());
            }
        }
    }
    assert_eq!(macmahon_count(2, 2, 2), BigInt::from(20));
    assert_eq!(macmahon_count(2, 2, 1), BigInt::from(6));
}
