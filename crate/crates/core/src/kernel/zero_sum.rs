use num_rational::BigRational;

use super::lp::{Constraint, LinearProgram, Relation, Scalar};
use super::{exploitability, BimatrixGame, EquilibriumProfile, MatrixGame, MixedStrategy};
use crate::error::Result;

/// Both LP routes of a zero-sum solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumSolution {
    pub profile: EquilibriumProfile,
    /// Value guaranteed by the defender's LP.
    pub maximin: f64,
    /// Value conceded by the attacker's LP.
    pub minimax: f64,
    /// Whether exact rational pivoting was used.
    pub exact: bool,
}

pub fn solve_zero_sum(game: &MatrixGame) -> Result<EquilibriumProfile> {
    solve_zero_sum_detailed(game).map(|s| s.profile)
}

/// Solves the game through two independent LPs, one per player.
pub fn solve_zero_sum_detailed(game: &MatrixGame) -> Result<ZeroSumSolution> {
    let exact = admits_exact(game);
    let (p, maximin, q, minimax) = if exact {
        solve_with::<BigRational>(game)?
    } else {
        solve_with::<f64>(game)?
    };
    let strategy_d = MixedStrategy::normalized(p);
    let strategy_a = MixedStrategy::normalized(q);
    let value_d = minimax;
    let mut profile = EquilibriumProfile {
        strategy_d,
        strategy_a,
        value_d,
        value_a: -value_d,
        epsilon: 0.0,
    };
    profile.epsilon = exploitability(&BimatrixGame::zero_sum(game), &profile)?;
    Ok(ZeroSumSolution {
        profile,
        maximin,
        minimax,
        exact,
    })
}

/// Entries that are multiples of 2^-16 with moderate magnitude keep rational
/// pivoting cheap enough.
fn admits_exact(game: &MatrixGame) -> bool {
    let cells = game.rows() * game.cols();
    cells <= 400
        && game.payoff().iter().flatten().all(|&v| {
            let scaled = v * 65536.0;
            v.abs() <= 1e6 && scaled == scaled.trunc()
        })
}

/// Returns `(p, maximin, q, minimax)`.
fn solve_with<S: Scalar>(game: &MatrixGame) -> Result<(Vec<f64>, f64, Vec<f64>, f64)> {
    let (m, n) = (game.rows(), game.cols());
    let min = game.payoff().iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let max = game
        .payoff()
        .iter()
        .flatten()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let min_s = S::from_f64(min);
    let max_s = S::from_f64(max);

    // attacker: max Σy  s.t.  (A - min + 1) y ≤ 1
    let col_lp = LinearProgram {
        objective: vec![S::one(); n],
        constraints: (0..m)
            .map(|i| Constraint {
                coeffs: (0..n)
                    .map(|j| S::from_f64(game.get(i, j)) - min_s.clone() + S::one())
                    .collect(),
                relation: Relation::Le,
                rhs: S::one(),
            })
            .collect(),
    };
    // defender: same construction on (max - A)^T + 1
    let row_lp = LinearProgram {
        objective: vec![S::one(); m],
        constraints: (0..n)
            .map(|j| Constraint {
                coeffs: (0..m)
                    .map(|i| max_s.clone() - S::from_f64(game.get(i, j)) + S::one())
                    .collect(),
                relation: Relation::Le,
                rhs: S::one(),
            })
            .collect(),
    };
    let col = col_lp.solve()?;
    let row = row_lp.solve()?;

    let minimax = S::one() / col.objective.clone() + min_s - S::one();
    let maximin = max_s + S::one() - S::one() / row.objective.clone();
    let q = col
        .x
        .iter()
        .map(|y| (y.clone() / col.objective.clone()).to_f64())
        .collect();
    let p = row
        .x
        .iter()
        .map(|x| (x.clone() / row.objective.clone()).to_f64())
        .collect();
    Ok((p, maximin.to_f64(), q, minimax.to_f64()))
}
