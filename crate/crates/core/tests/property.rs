//! Property-based invariants over random tables.

use cloneforge_core::fourier::{inverse_transform, transform};
use cloneforge_core::table::FunctionTable;
use proptest::prelude::*;

fn table_strategy() -> impl Strategy<Value = FunctionTable> {
    (0usize..=6).prop_flat_map(|k| {
        prop::collection::vec(0.0f64..8.0, 1 << k)
            .prop_map(move |values| FunctionTable::non_negative(k, values).unwrap())
    })
}

proptest! {
    #[test]
    fn transform_round_trips(f in table_strategy()) {
        let back = inverse_transform(&transform(&f));
        prop_assert!(back.linf_distance(&f).unwrap() <= 1e-9);
    }

    #[test]
    fn complement_is_an_involution(f in table_strategy()) {
        prop_assert_eq!(f.complement().complement(), f);
    }

    #[test]
    fn fictitious_then_sum_doubles(f in table_strategy()) {
        let doubled = f.add_fictitious().unwrap().sum_out_last().unwrap();
        prop_assert!(doubled.linf_distance(&f.scale(2.0).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn permutation_round_trips(f in table_strategy(), seed in any::<u64>()) {
        let k = f.arity();
        let mut perm: Vec<usize> = (0..k).collect();
        // cheap deterministic shuffle from the seed
        for i in (1..k).rev() {
            perm.swap(i, (seed as usize).wrapping_mul(i + 1) % (i + 1));
        }
        let mut inverse = vec![0usize; k];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let round = f.permute_args(&perm).unwrap().permute_args(&inverse).unwrap();
        prop_assert_eq!(round, f);
    }

    #[test]
    fn transform_preserves_the_mean_at_zero(f in table_strategy()) {
        let mean = f.values().iter().sum::<f64>() / f.len() as f64;
        prop_assert!((transform(&f).get(0) - mean).abs() <= 1e-9 * (1.0 + mean));
    }

    #[test]
    fn products_commute(f in table_strategy(), shift in 0.0f64..4.0) {
        let g = FunctionTable::non_negative(
            f.arity(),
            f.values().iter().rev().map(|v| v + shift).collect(),
        )
        .unwrap();
        prop_assert_eq!(f.product(&g).unwrap(), g.product(&f).unwrap());
    }
}
