//! Finite two-player games and their equilibrium solvers.
//!
//! Every echelon of the meta-game bottoms out here: Blotto normal forms and
//! stochastic stage games go through [`solve_zero_sum`], tactical sequence
//! games through [`solve_bimatrix`].

mod bimatrix;
mod fictitious;
pub mod linalg;
pub mod lp;
mod zero_sum;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bimatrix::{
    enumerate_equilibria, solve_bimatrix, solve_bimatrix_with_cap, Enumeration,
    EquilibriumSelectionRule, SupportEquilibrium, DEFAULT_ENUMERATION_CAP,
};
pub use fictitious::fictitious_play;
pub use zero_sum::{solve_zero_sum, solve_zero_sum_detailed, ZeroSumSolution};

/// Tolerance for a mixed strategy's weights to sum to one.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Zero-sum game in normal form. Rows belong to the defender (maximizer),
/// columns to the attacker, who receives the negated payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixGame {
    payoff: Vec<Vec<f64>>,
}

impl MatrixGame {
    pub fn new(payoff: Vec<Vec<f64>>) -> Result<Self> {
        check_grid(&payoff)?;
        Ok(MatrixGame { payoff })
    }

    pub fn rows(&self) -> usize {
        self.payoff.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff[0].len()
    }

    pub fn payoff(&self) -> &[Vec<f64>] {
        &self.payoff
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.payoff[row][col]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.payoff)
    }
}

/// General-sum two-player game in normal form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BimatrixGame {
    payoff_d: Vec<Vec<f64>>,
    payoff_a: Vec<Vec<f64>>,
}

impl BimatrixGame {
    pub fn new(payoff_d: Vec<Vec<f64>>, payoff_a: Vec<Vec<f64>>) -> Result<Self> {
        check_grid(&payoff_d)?;
        check_grid(&payoff_a)?;
        if payoff_d.len() != payoff_a.len() || payoff_d[0].len() != payoff_a[0].len() {
            return Err(Error::ShapeMismatch(format!(
                "defender payoffs are {}x{}, attacker payoffs are {}x{}",
                payoff_d.len(),
                payoff_d[0].len(),
                payoff_a.len(),
                payoff_a[0].len()
            )));
        }
        Ok(BimatrixGame { payoff_d, payoff_a })
    }

    /// The bimatrix `(M, -M)`.
    pub fn zero_sum(game: &MatrixGame) -> Self {
        let payoff_a = game
            .payoff
            .iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
        BimatrixGame {
            payoff_d: game.payoff.clone(),
            payoff_a,
        }
    }

    pub fn rows(&self) -> usize {
        self.payoff_d.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff_d[0].len()
    }

    pub fn payoff_d(&self) -> &[Vec<f64>] {
        &self.payoff_d
    }

    pub fn payoff_a(&self) -> &[Vec<f64>] {
        &self.payoff_a
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.payoff_d).max(max_abs(&self.payoff_a))
    }
}

fn check_grid(grid: &[Vec<f64>]) -> Result<()> {
    if grid.is_empty() || grid[0].is_empty() {
        return Err(Error::ShapeMismatch("payoff grid must be at least 1x1".into()));
    }
    let cols = grid[0].len();
    for (r, row) in grid.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::ShapeMismatch(format!(
                "row {r} has {} entries, expected {cols}",
                row.len()
            )));
        }
        if let Some(c) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry { row: r, col: c });
        }
    }
    Ok(())
}

fn max_abs(grid: &[Vec<f64>]) -> f64 {
    grid.iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Probability distribution over a finite action set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::ShapeMismatch("empty mixed strategy".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < -SIMPLEX_TOL) {
            return Err(Error::ShapeMismatch("negative or non-finite weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::ShapeMismatch(format!("weights sum to {sum}")));
        }
        Ok(MixedStrategy(weights))
    }

    /// Clamps tiny negatives and rescales onto the simplex.
    pub(crate) fn normalized(mut weights: Vec<f64>) -> Self {
        for w in weights.iter_mut() {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum > 0.0 {
            for w in weights.iter_mut() {
                *w /= sum;
            }
        }
        MixedStrategy(weights)
    }

    pub fn pure(len: usize, index: usize) -> Self {
        let mut w = vec![0.0; len];
        w[index] = 1.0;
        MixedStrategy(w)
    }

    pub fn uniform(len: usize) -> Self {
        MixedStrategy(vec![1.0 / len as f64; len])
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices with weight above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > tol).collect()
    }

    pub fn is_valid(&self) -> bool {
        MixedStrategy::new(self.0.clone()).is_ok()
    }
}

/// A strategy pair with the realized payoffs and its exploitability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumProfile {
    pub strategy_d: MixedStrategy,
    pub strategy_a: MixedStrategy,
    pub value_d: f64,
    pub value_a: f64,
    /// Largest unilateral improvement available to either player.
    pub epsilon: f64,
}

/// `p^T M q`
pub fn expected_payoff(grid: &[Vec<f64>], p: &[f64], q: &[f64]) -> f64 {
    grid.iter()
        .zip(p)
        .map(|(row, pi)| pi * row.iter().zip(q).map(|(v, qj)| v * qj).sum::<f64>())
        .sum()
}

/// Largest gain either player obtains by a unilateral deviation from
/// `(profile.strategy_d, profile.strategy_a)`.
pub fn exploitability(game: &BimatrixGame, profile: &EquilibriumProfile) -> Result<f64> {
    let p = profile.strategy_d.weights();
    let q = profile.strategy_a.weights();
    if p.len() != game.rows() || q.len() != game.cols() {
        return Err(Error::ShapeMismatch(format!(
            "profile is {}x{}, game is {}x{}",
            p.len(),
            q.len(),
            game.rows(),
            game.cols()
        )));
    }
    let realized_d = expected_payoff(&game.payoff_d, p, q);
    let realized_a = expected_payoff(&game.payoff_a, p, q);
    let best_d = game
        .payoff_d
        .iter()
        .map(|row| row.iter().zip(q).map(|(v, qj)| v * qj).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let best_a = (0..game.cols())
        .map(|j| (0..game.rows()).map(|i| p[i] * game.payoff_a[i][j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((best_d - realized_d).max(best_a - realized_a).max(0.0))
}
