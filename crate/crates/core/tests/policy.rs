use echelon_core::policy::{core_membership, shapley_value, CoalitionGame, PayoffVector};
use proptest::prelude::*;

fn coalition_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..5.0f64, (1 << n) - 1).prop_map(|mut v| {
        v.insert(0, 0.0);
        v
    })
}

proptest! {
    #[test]
    fn shapley_is_efficient(v in (1usize..=7).prop_flat_map(coalition_values)) {
        let n = v.len().trailing_zeros() as usize;
        let game = CoalitionGame::new(n, v.clone()).unwrap();
        let phi = shapley_value(&game).unwrap();
        prop_assert!((phi.shares().iter().sum::<f64>() - v[v.len() - 1]).abs() < 1e-9);
    }

    #[test]
    fn scaling_scales_shares(v in (1usize..=6).prop_flat_map(coalition_values), c in -3.0..3.0f64) {
        let n = v.len().trailing_zeros() as usize;
        let phi = shapley_value(&CoalitionGame::new(n, v.clone()).unwrap()).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        let psi = shapley_value(&CoalitionGame::new(n, scaled).unwrap()).unwrap();
        for (a, b) in phi.shares().iter().zip(psi.shares()) {
            prop_assert!((c * a - b).abs() < 1e-9);
        }
    }

    /// Supermodular games have a nonempty core that contains the Shapley value.
    #[test]
    fn convex_game_shapley_in_core(n in 1usize..=6, weights in prop::collection::vec(0.0..2.0f64, 6)) {
        let v = |mask: u32| {
            let s: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| weights[i]).sum();
            s * s
        };
        let game = CoalitionGame::from_fn(n, v).unwrap();
        let phi = shapley_value(&game).unwrap();
        prop_assert!(core_membership(&game, &phi).unwrap().in_core());
    }
}

#[test]
fn majority_game_has_empty_core() {
    // any two of three players win
    let game = CoalitionGame::from_fn(3, |m| if m.count_ones() >= 2 { 1.0 } else { 0.0 }).unwrap();
    let phi = shapley_value(&game).unwrap();
    assert!(phi.shares().iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
    assert!(!core_membership(&game, &phi).unwrap().in_core());
    let skewed = PayoffVector(vec![0.5, 0.5, 0.0]);
    assert!(!core_membership(&game, &skewed).unwrap().in_core());
}
