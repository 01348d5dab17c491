mod common;

use common::rng;
use proptest::prelude::*;
use quantile_hedge::{np_bruteforce, np_bruteforce_min, DiscreteMarket};
use rand::Rng;

fn market_strategy(max_atoms: usize) -> impl Strategy<Value = DiscreteMarket> {
    prop::collection::vec((0.01..1.0f64, 0.01..1.0f64), 1..=max_atoms)
        .prop_map(|raw| DiscreteMarket::normalised(&raw).unwrap())
}

/// Masks of the sets `{p1/p2 ≥ ratio}` for every ratio present, smallest first.
fn threshold_masks(dm: &DiscreteMarket) -> Vec<u32> {
    let ratio = |i: usize| dm.atoms()[i].0 / dm.atoms()[i].1;
    let mut levels: Vec<f64> = (0..dm.len()).map(ratio).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels
        .iter()
        .map(|&l| (0..dm.len()).filter(|&i| ratio(i) >= l).fold(0u32, |m, i| m | 1 << i))
        .collect()
}

/// Masses of a set, clamped against rounding in the sum over all atoms.
fn masses(dm: &DiscreteMarket, mask: u32) -> (f64, f64) {
    let (p1, p2) = dm.measure(mask);
    (p1.min(1.0), p2.min(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn threshold_sets_are_optimal(dm in market_strategy(10), pick in 0usize..10) {
        let masks = threshold_masks(&dm);
        let mask = masks[pick % masks.len()];
        let (p1, p2) = masses(&dm, mask);
        let max = np_bruteforce(&dm, p2).unwrap();
        prop_assert!(max.threshold_set.is_some());
        prop_assert!((max.best_value - p1).abs() < 1e-12);
        let min = np_bruteforce_min(&dm, p1).unwrap();
        prop_assert!(min.threshold_set.is_some());
        prop_assert!((min.best_value - p2).abs() < 1e-12);
    }

    #[test]
    fn neyman_pearson_inequality_holds_atomwise(dm in market_strategy(8), pick in 0usize..8) {
        let masks = threshold_masks(&dm);
        let a = masks[pick % masks.len()];
        let ratio = |i: usize| dm.atoms()[i].0 / dm.atoms()[i].1;
        let level = (0..dm.len()).filter(|&i| a >> i & 1 == 1).map(ratio).fold(f64::INFINITY, f64::min);
        let (pa1, pa2) = dm.measure(a);
        for b in 0..(1u32 << dm.len()) {
            // Σ (1_A − 1_B)(p1 − c p2) ≥ 0 atom by atom.
            for (i, &(p1, p2)) in dm.atoms().iter().enumerate() {
                let diff = (a >> i & 1) as f64 - (b >> i & 1) as f64;
                prop_assert!(diff * (p1 - level * p2) >= -1e-15);
            }
            let (pb1, pb2) = dm.measure(b);
            if pb2 <= pa2 + 1e-15 {
                prop_assert!(pb1 <= pa1 + 1e-12);
            }
        }
    }

    #[test]
    fn exhaustive_optimum_dominates_any_threshold(dm in market_strategy(10), budget in 0.0..1.0f64) {
        let out = np_bruteforce(&dm, budget).unwrap();
        prop_assert!(dm.measure(out.best_set).1 <= budget + 1e-12);
        if out.threshold_set.is_some() {
            prop_assert!(out.best_value >= out.threshold_value - 1e-12);
        }
    }
}

#[test]
fn twelve_atoms_many_budgets() {
    let mut g = rng(12);
    for _ in 0..5 {
        let raw: Vec<(f64, f64)> = (0..12).map(|_| (g.random_range(0.05..1.0), g.random_range(0.05..1.0))).collect();
        let dm = DiscreteMarket::normalised(&raw).unwrap();
        let masks = threshold_masks(&dm);
        for _ in 0..20 {
            let mask = masks[g.random_range(0..masks.len())];
            let (p1, p2) = masses(&dm, mask);
            let max = np_bruteforce(&dm, p2).unwrap();
            assert_eq!(max.threshold_set, Some(max.best_set));
            let min = np_bruteforce_min(&dm, p1).unwrap();
            assert_eq!(min.threshold_set, Some(min.best_set));
        }
    }
}
