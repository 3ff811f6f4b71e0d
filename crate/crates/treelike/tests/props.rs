//! Property tests over randomly generated trees.

use std::collections::BTreeSet;

use proptest::prelude::*;

use treelike::amalgam::{enumerate_amalgamations, AmalgamationDiagram};
use treelike::dyadic::Dyadic;
use treelike::measure::enumerate_measures;
use treelike::ring::{reduce_marked, MarkedStructure};
use treelike::tree::ColoredTree;

/// Builds a tree from insertion seeds: each step picks one of the possible
/// single-leaf extensions (all positions and colors).
fn tree_from_seeds(n: u8, seeds: &[(u8, u8)]) -> ColoredTree {
    let mut t = ColoredTree::leaf();
    for &(a, b) in seeds {
        let exts = t.one_point_extensions(n);
        let pick = (a as usize * 256 + b as usize) % exts.len();
        t = exts[pick].0.clone();
    }
    t
}

fn seeds(n_leaves: usize) -> impl Strategy<Value = Vec<(u8, u8)>> {
    proptest::collection::vec((any::<u8>(), any::<u8>()), 0..n_leaves)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn canonicalize_is_idempotent_and_parse_round_trips(s in seeds(6)) {
        let t = tree_from_seeds(3, &s);
        let c = t.canonicalize();
        prop_assert_eq!(c.canonicalize(), c.clone());
        let reparsed = ColoredTree::parse(&c.to_text(), 3).unwrap();
        prop_assert_eq!(reparsed, c);
    }

    #[test]
    fn restriction_is_functorial(s in seeds(6), mask_u in any::<u16>(), mask_v in any::<u16>()) {
        let t = tree_from_seeds(2, &s);
        let m = t.leaf_count();
        let u: BTreeSet<u32> = (0..m).filter(|p| mask_u >> p & 1 == 1).collect();
        let v: BTreeSet<u32> = u.iter().copied().filter(|p| mask_v >> p & 1 == 1).collect();
        let inner = t.restrict(&u).unwrap();
        let reindexed: BTreeSet<u32> =
            v.iter().map(|x| u.iter().position(|y| y == x).unwrap() as u32).collect();
        prop_assert_eq!(
            inner.restrict(&reindexed).unwrap().canonicalize(),
            t.restrict(&v).unwrap().canonicalize()
        );
    }

    #[test]
    fn restriction_preserves_the_relation(s in seeds(6), mask in any::<u16>()) {
        let t = tree_from_seeds(2, &s);
        let m = t.leaf_count();
        let u: Vec<u32> = (0..m).filter(|p| mask >> p & 1 == 1).collect();
        let sub = t.restrict(&u.iter().copied().collect()).unwrap();
        for a in 0..u.len() {
            for b in 0..u.len() {
                for c in 0..u.len() {
                    prop_assert_eq!(
                        sub.relation_s(a as u32, b as u32, c as u32),
                        t.relation_s(u[a], u[b], u[c])
                    );
                }
            }
        }
    }

    #[test]
    fn amalgamation_counts_are_recoloring_invariant(s in seeds(4), t2 in seeds(3)) {
        let x = tree_from_seeds(2, &s);
        let y = tree_from_seeds(2, &t2);
        if x.leaf_count() + y.leaf_count() <= 7 {
            let swap = |c: u8| 3 - c;
            let d = AmalgamationDiagram::over_empty(x.clone(), y.clone());
            let d_swapped =
                AmalgamationDiagram::over_empty(x.map_colors(&swap), y.map_colors(&swap));
            prop_assert_eq!(
                enumerate_amalgamations(&d, 2, 8).unwrap().len(),
                enumerate_amalgamations(&d_swapped, 2, 8).unwrap().len()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn measure_values_are_zero_or_signed_powers_of_two(s in seeds(5), idx in 0usize..36) {
        let t = tree_from_seeds(2, &s);
        let mu = &enumerate_measures(2)[idx];
        let v = mu.evaluate(&t).unwrap();
        prop_assert!(v.is_zero() || v.is_pm_power_of_two(), "{} -> {}", t, v);
    }

    #[test]
    fn evaluation_is_removal_order_independent(s in seeds(5), order in any::<u64>(), idx in 0usize..36) {
        let t = tree_from_seeds(2, &s);
        let mu = &enumerate_measures(2)[idx];
        // Peel leaves in a pseudo-random order; the product of the marked
        // classes must match the canonical evaluation.
        let mut state = order | 1;
        let mut current = t.clone();
        let mut product = Dyadic::one();
        while !current.is_empty() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let m = current.leaf_count();
            let pick = (state % m as u64) as u32;
            let g = reduce_marked(&MarkedStructure { tree: current.clone(), marked: pick })
                .unwrap();
            product = &product * &mu.generator_value(&g);
            let keep: BTreeSet<u32> = (0..m).filter(|&p| p != pick).collect();
            current = current.restrict(&keep).unwrap();
        }
        prop_assert_eq!(product, mu.evaluate(&t).unwrap());
    }
}
