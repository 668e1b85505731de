use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use watermelon::cbident::{cb_pair_det, cb_pair_sum, CBSpec};
use watermelon::partitions::iter_partitions_in_box;
use watermelon::qpoly::q_binomial;
use watermelon::ring::{product, seeded_rationals, Scalar};
use watermelon::schur::{
    complete_homogeneous, q_range, schur_eval, schur_jacobi_trudi, schur_tableau_eval, schur_tableau_oracle,
    ssyt_count_formula,
};
use watermelon::QPoly;

fn partition(max_part: usize, len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..=max_part, len).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    })
}

#[test]
fn three_schur_forms_agree() {
    for n in 1..=4usize {
        for lam in iter_partitions_in_box(n.min(3), 3, 0) {
            let mut l = lam.parts().to_vec();
            l.resize(n, 0);
            for seed in 0..5u64 {
                let x = seeded_rationals(seed * 31 + n as u64, n);
                let a = schur_eval(&l, &x).unwrap();
                assert_eq!(a, schur_tableau_eval(&l, &x), "tableau {l:?}");
                assert_eq!(a, schur_jacobi_trudi(&l, &x).unwrap(), "jacobi-trudi {l:?}");
            }
        }
    }
}

#[test]
fn tableau_counts_match_hook_content() {
    for n in 1..=4usize {
        for lam in iter_partitions_in_box(4, 4, 0) {
            let oracle = schur_tableau_oracle(lam.parts(), n);
            assert_eq!(
                oracle.count,
                ssyt_count_formula(lam.parts(), n),
                "{:?} over [{n}]",
                lam.parts()
            );
        }
    }
}

#[test]
fn complete_homogeneous_is_q_binomial() {
    for m in 1..=6usize {
        let x = q_range(0, m as i64 - 1);
        for r in 0..=6i64 {
            assert_eq!(complete_homogeneous(r, &x), q_binomial((m as i64 + r - 1) as u64, r));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symmetric_under_transpositions(
        lam in (1usize..=4).prop_flat_map(|n| partition(3, n)),
        seed in any::<u64>(),
        swap in any::<(prop::sample::Index, prop::sample::Index)>(),
    ) {
        let n = lam.len();
        let x = seeded_rationals(seed, n);
        let mut y = x.clone();
        y.swap(swap.0.index(n), swap.1.index(n));
        prop_assert_eq!(schur_eval(&lam, &x).unwrap(), schur_eval(&lam, &y).unwrap());
    }

    // Sending the points of an index set to zero leaves the Schur function of
    // the padded partition in the surviving variables.
    #[test]
    fn zero_variable_limit(
        (n, k, lam, zeros) in (1usize..=4)
            .prop_flat_map(|n| (Just(n), 0..=n.min(2)))
            .prop_flat_map(|(n, k)| (Just(n), Just(k), partition(3, n - k), prop::sample::subsequence((0..n).collect::<Vec<_>>(), k))),
        seed in any::<u64>(),
    ) {
        let mut hat = lam.clone();
        hat.resize(n, 0);
        let xbar = seeded_rationals(seed, n - k);
        let mut x = Vec::with_capacity(n);
        let mut rest = xbar.iter();
        for i in 0..n {
            x.push(if zeros.contains(&i) { <BigRational as Zero>::zero() } else { rest.next().unwrap().clone() });
        }
        let limit = schur_eval(&lam, &xbar).unwrap();
        prop_assert_eq!(&schur_tableau_eval(&hat, &x), &limit);
        prop_assert_eq!(schur_eval(&hat, &x).unwrap(), limit);
    }

    // Dropping the first k points of q_N/q multiplies the surviving points by q^k.
    #[test]
    fn shifted_specialization_homogeneity((n, k, lam) in (1usize..=5)
        .prop_flat_map(|n| (Just(n), 0..n))
        .prop_flat_map(|(n, k)| (Just(n), Just(k), partition(4, n - k))))
    {
        let w: usize = lam.iter().sum();
        let dropped = q_range(k as i64, n as i64 - 1);
        let base = q_range(0, (n - k) as i64 - 1);
        prop_assert_eq!(
            schur_eval(&lam, &dropped).unwrap(),
            schur_eval(&lam, &base).unwrap().shift((k * w) as i64)
        );
    }

    #[test]
    fn lower_bound_factors_out(n in 1usize..=3, ell in 0usize..=3, lower_frac in 0usize..=3, seed in any::<u64>()) {
        let lower = lower_frac.min(ell);
        let pts = seeded_rationals(seed, 2 * n);
        let (x, y) = (pts[..n].to_vec(), pts[n..].to_vec());
        let bounded = cb_pair_sum(&CBSpec::unrestricted(ell, lower, x.clone(), y.clone())).unwrap();
        let shifted = cb_pair_sum(&CBSpec::unrestricted(ell - lower, 0, x.clone(), y.clone())).unwrap();
        let pre = Scalar::pow(&product(&x).mul(&product(&y)), lower as u32);
        prop_assert_eq!(bounded, shifted.mul(&pre));
    }

    #[test]
    fn cauchy_binet_sum_equals_determinant(n in 1usize..=3, ell in 0usize..=3, lower in 0usize..=3, seed in any::<u64>()) {
        prop_assume!(lower <= ell);
        let pts = seeded_rationals(seed, 2 * n);
        let spec = CBSpec::unrestricted(ell, lower, pts[..n].to_vec(), pts[n..].to_vec());
        prop_assert_eq!(cb_pair_sum(&spec).unwrap(), cb_pair_det(&spec).unwrap());
    }
}

#[test]
fn schur_at_ones_counts_tableaux() {
    let ones = vec![BigRational::from_integer(BigInt::from(1)); 3];
    assert_eq!(
        schur_eval(&[2, 1, 0], &ones).unwrap(),
        BigRational::from_integer(BigInt::from(8))
    );
    let q = q_range(1, 3);
    assert_eq!(
        schur_eval(&[2, 1, 0], &q).unwrap(),
        schur_eval(&[2, 1, 0], &q_range(0, 2)).unwrap().mul(&QPoly::q_pow(3))
    );
}
