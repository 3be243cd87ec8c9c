use super::{exploitability, expected_payoff, BimatrixGame, EquilibriumProfile, MatrixGame, MixedStrategy};

/// Simultaneous fictitious play. Both players start on action 0 and then
/// best-respond to the opponent's empirical mix, breaking ties toward the
/// lowest index. Returns the empirical frequencies.
pub fn fictitious_play(game: &MatrixGame, iterations: usize) -> EquilibriumProfile {
    let (m, n) = (game.rows(), game.cols());
    let iterations = iterations.max(1);
    let mut count_d = vec![0u64; m];
    let mut count_a = vec![0u64; n];
    // cumulative payoff of each defender row against the attacker's history
    let mut row_totals = vec![0.0; m];
    // cumulative payoff (to the defender) of each attacker column
    let mut col_totals = vec![0.0; n];
    let (mut i, mut j) = (0usize, 0usize);
    for _ in 0..iterations {
        count_d[i] += 1;
        count_a[j] += 1;
        for (r, total) in row_totals.iter_mut().enumerate() {
            *total += game.get(r, j);
        }
        for (c, total) in col_totals.iter_mut().enumerate() {
            *total += game.get(i, c);
        }
        i = argmax(&row_totals);
        j = argmin(&col_totals);
    }
    let t = iterations as f64;
    let p: Vec<f64> = count_d.iter().map(|&c| c as f64 / t).collect();
    let q: Vec<f64> = count_a.iter().map(|&c| c as f64 / t).collect();
    let value_d = expected_payoff(game.payoff(), &p, &q);
    let mut profile = EquilibriumProfile {
        strategy_d: MixedStrategy::normalized(p),
        strategy_a: MixedStrategy::normalized(q),
        value_d,
        value_a: -value_d,
        epsilon: 0.0,
    };
    profile.epsilon = exploitability(&BimatrixGame::zero_sum(game), &profile)
        .expect("profile built from the game's own dimensions");
    profile
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..v.len() {
        if v[k] > v[best] {
            best = k;
        }
    }
    best
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..v.len() {
        if v[k] < v[best] {
            best = k;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_is_exact() {
        let g = MatrixGame::new(vec![vec![-2.5]]).unwrap();
        let p = fictitious_play(&g, 17);
        assert_eq!(p.value_d, -2.5);
        assert_eq!(p.epsilon, 0.0);
    }

    #[test]
    fn matching_pennies_converges() {
        let g = MatrixGame::new(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let p = fictitious_play(&g, 10_000);
        assert!(p.epsilon <= 0.05, "exploitability {}", p.epsilon);
    }

    #[test]
    fn rock_paper_scissors_approaches_uniform() {
        let g = MatrixGame::new(vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])
        .unwrap();
        let p = fictitious_play(&g, 100_000);
        for w in p.strategy_d.weights().iter().chain(p.strategy_a.weights()) {
            assert!((w - 1.0 / 3.0).abs() <= 0.05);
        }
    }
}
