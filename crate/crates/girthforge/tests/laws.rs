//! Property tests for subtreasuries and common projections.

mod common;

use std::collections::BTreeSet;

use common::{
    perfect_matchings, random_matching, random_subtreasury, random_treasury, subtreasury_oracle, Id,
};
use girthforge::config_hypergraphs::{common_projection, is_subtreasury};
use girthforge::generator::stage_rng;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn perfect_matchings_of_a_subtreasury_are_perfect_in_the_treasury(seed in any::<u64>()) {
        let mut rng = stage_rng(seed, 0);
        let (t, lines) = random_treasury(&mut rng);
        let protect = if rng.gen_bool(0.8) { lines } else { Vec::new() };
        let sub = random_subtreasury(&t, &protect, &mut rng);
        prop_assert!(subtreasury_oracle(&sub, &t));
        prop_assert!(is_subtreasury(&sub, &t));
        for m in perfect_matchings(&sub) {
            prop_assert!(sub.is_perfect_matching(&m));
            prop_assert!(t.is_perfect_matching(&m), "{:?}", m);
        }
    }

    #[test]
    fn larger_matching_families_project_to_subtreasuries(seed in any::<u64>()) {
        let mut rng = stage_rng(seed, 1);
        let (t, _) = random_treasury(&mut rng);
        let small: Vec<BTreeSet<Id>> = (0..rng.gen_range(0..3)).map(|_| random_matching(&t, &mut rng)).collect();
        let mut large = small.clone();
        for _ in 0..rng.gen_range(1..3) {
            large.push(random_matching(&t, &mut rng));
        }
        large.shuffle(&mut rng);
        let coarse = common_projection(&t, &small).unwrap();
        let fine = common_projection(&t, &large).unwrap();
        prop_assert!(subtreasury_oracle(&fine, &coarse));
        prop_assert!(is_subtreasury(&fine, &coarse));
    }

    #[test]
    fn subtreasury_check_agrees_with_definition(seed in any::<u64>()) {
        let mut rng = stage_rng(seed, 2);
        let (t, _) = random_treasury(&mut rng);
        let (u, _) = random_treasury(&mut rng);
        let sub = random_subtreasury(&t, &[], &mut rng);
        for (x, y) in [(&sub, &t), (&t, &sub), (&u, &t), (&t, &t)] {
            prop_assert_eq!(is_subtreasury(x, y), subtreasury_oracle(x, y));
        }
    }
}

#[test]
fn fano_remainder_is_a_perfect_matching() {
    let mut hits = 0;
    for seed in 0..40 {
        let (t, lines) = random_treasury(&mut stage_rng(seed, 3));
        assert!(t.is_perfect_matching(&lines));
        let all = perfect_matchings(&t);
        assert!(all.iter().any(|m| {
            let mut m = m.clone();
            m.sort_unstable();
            let mut l = lines.clone();
            l.sort_unstable();
            m == l
        }));
        hits += all.len();
    }
    assert!(hits >= 40);
}

#[test]
fn projection_onto_nothing_keeps_the_design() {
    let (t, _) = random_treasury(&mut stage_rng(5, 4));
    let none = common_projection(&t, &[]).unwrap();
    assert_eq!(none.g1().edges(), t.g1().edges());
    assert_eq!(none.h().edge_count(), 0);
    let empty = common_projection(&t, &[BTreeSet::new()]).unwrap();
    assert!(subtreasury_oracle(&empty, &t) && subtreasury_oracle(&t, &empty));
}
