//! Deterministic benchmark inputs shared by the criterion targets.

use echelon_core::strategic::{ContestSpec, StrategicGame};
use echelon_core::{BimatrixGame, MatrixGame, TechLevel};

/// Cheap reproducible pseudo-random entries in `[-1, 1)`.
fn entries(seed: u64, count: usize) -> Vec<f64> {
    let mut x = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..count)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect()
}

fn grid(seed: u64, m: usize, n: usize) -> Vec<Vec<f64>> {
    entries(seed, m * n).chunks(n).map(|r| r.to_vec()).collect()
}

pub fn matrix_game(n: usize) -> MatrixGame {
    MatrixGame::new(grid(n as u64, n, n)).unwrap()
}

pub fn bimatrix_game(n: usize) -> BimatrixGame {
    BimatrixGame::new(grid(2 * n as u64, n, n), grid(2 * n as u64 + 1, n, n)).unwrap()
}

pub fn blotto(fields: usize, budget: f64) -> StrategicGame {
    StrategicGame {
        operations: (0..fields).map(|i| format!("field{i}")).collect(),
        weights: vec![1.0 / fields as f64; fields],
        budget_d: budget,
        budget_a: budget,
        contests: vec![ContestSpec::lottery(1.0); fields],
        grid_step: 1.0,
        tech: TechLevel::default(),
        allow_slack: false,
        outcome_scale: vec![1.0; fields],
    }
}
