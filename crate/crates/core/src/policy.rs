//! Coalition games at the policy echelon: Shapley value, core membership and
//! the budget/weight outcome handed down to the strategic game.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meta::TechLevel;

pub const MAX_PLAYERS: usize = 16;
/// Above this many players Shapley values use the subset-weighted formula
/// instead of walking every ordering.
const PERMUTATION_LIMIT: usize = 10;

/// Characteristic-function game. `values[mask]` is `v(S)` for the coalition
/// whose members are the set bits of `mask`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalitionGame {
    n_players: usize,
    values: Vec<f64>,
}

impl CoalitionGame {
    pub fn new(n_players: usize, values: Vec<f64>) -> Result<Self> {
        if n_players > MAX_PLAYERS {
            return Err(Error::TooManyPlayers(n_players));
        }
        if n_players == 0 {
            return Err(Error::validation("coalition.players", "at least one player"));
        }
        if values.len() != 1 << n_players {
            return Err(Error::ShapeMismatch(format!(
                "{} coalition values for {n_players} players",
                values.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::validation("coalition.values", "v(empty) must be 0"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("coalition.values", "values must be finite"));
        }
        Ok(CoalitionGame { n_players, values })
    }

    /// Builds `v` from a closure over coalition masks; `v(∅)` is forced to 0.
    pub fn from_fn(n_players: usize, v: impl Fn(u32) -> f64) -> Result<Self> {
        if n_players > MAX_PLAYERS {
            return Err(Error::TooManyPlayers(n_players));
        }
        let values = (0..1u32 << n_players)
            .map(|mask| if mask == 0 { 0.0 } else { v(mask) })
            .collect();
        CoalitionGame::new(n_players, values)
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn value(&self, mask: u32) -> f64 {
        self.values[mask as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grand_coalition(&self) -> u32 {
        ((1u64 << self.n_players) - 1) as u32
    }

    pub(crate) fn set_value(&mut self, mask: u32, value: f64) {
        if mask != 0 {
            self.values[mask as usize] = value;
        }
    }
}

/// One share per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PayoffVector(pub Vec<f64>);

impl PayoffVector {
    pub fn shares(&self) -> &[f64] {
        &self.0
    }
}

pub fn shapley_value(game: &CoalitionGame) -> Result<PayoffVector> {
    let n = game.n_players;
    if n > MAX_PLAYERS {
        return Err(Error::TooManyPlayers(n));
    }
    if n <= PERMUTATION_LIMIT {
        Ok(permutation_average(game))
    } else {
        Ok(weighted_marginals(game))
    }
}

/// Averages marginal contributions over all `n!` orderings (Heap's
/// algorithm).
fn permutation_average(game: &CoalitionGame) -> PayoffVector {
    let n = game.n_players;
    let mut order: Vec<usize> = (0..n).collect();
    let mut totals = vec![0.0; n];
    let mut count = 0u64;
    let mut visit = |order: &[usize]| {
        let mut mask = 0u32;
        for &p in order {
            let before = game.value(mask);
            mask |= 1 << p;
            totals[p] += game.value(mask) - before;
        }
        count += 1;
    };
    let mut c = vec![0usize; n];
    visit(&order);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            visit(&order);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    PayoffVector(totals.into_iter().map(|t| t / count as f64).collect())
}

/// `φ_i = Σ_{S ∌ i} |S|!(n-|S|-1)!/n! · (v(S ∪ i) - v(S))`
fn weighted_marginals(game: &CoalitionGame) -> PayoffVector {
    let n = game.n_players;
    // weight[s] = s!(n-s-1)!/n! computed as 1 / (n · C(n-1, s))
    let weight: Vec<f64> = (0..n)
        .map(|s| {
            let binom = (0..s).fold(1.0, |acc, k| acc * (n - 1 - k) as f64 / (k + 1) as f64);
            1.0 / (n as f64 * binom)
        })
        .collect();
    let mut shares = vec![0.0; n];
    for mask in 0..(1u32 << n) {
        let size = mask.count_ones() as usize;
        for (i, share) in shares.iter_mut().enumerate() {
            if mask & (1 << i) == 0 {
                *share += weight[size] * (game.value(mask | (1 << i)) - game.value(mask));
            }
        }
    }
    PayoffVector(shares)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CoreVerdict {
    InCore,
    /// Shares do not sum to `v(N)`.
    Inefficient { total: f64, grand_value: f64 },
    /// `members` can do better on their own: `v(S) - x(S) = excess > 0`.
    Blocked { members: Vec<usize>, excess: f64 },
}

impl CoreVerdict {
    pub fn in_core(&self) -> bool {
        matches!(self, CoreVerdict::InCore)
    }
}

pub fn core_membership(game: &CoalitionGame, x: &PayoffVector) -> Result<CoreVerdict> {
    let n = game.n_players;
    if x.0.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} shares for {n} players",
            x.0.len()
        )));
    }
    let tol = 1e-9;
    let total: f64 = x.0.iter().sum();
    let grand_value = game.value(game.grand_coalition());
    if (total - grand_value).abs() > tol {
        return Ok(CoreVerdict::Inefficient { total, grand_value });
    }
    let mut worst: Option<(u32, f64)> = None;
    for mask in 1..(1u32 << n) {
        let share: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| x.0[i]).sum();
        let excess = game.value(mask) - share;
        if excess > tol && worst.is_none_or(|(_, e)| excess > e + tol) {
            worst = Some((mask, excess));
        }
    }
    Ok(match worst {
        None => CoreVerdict::InCore,
        Some((mask, excess)) => CoreVerdict::Blocked {
            members: (0..n).filter(|i| mask & (1 << i) != 0).collect(),
            excess,
        },
    })
}

/// Affine map from the defender's Shapley share to its budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetRule {
    pub base: f64,
    pub scale: f64,
}

/// `E_policy = (w*, B*)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyOutcome {
    pub weights: Vec<f64>,
    pub budget: f64,
}

impl PolicyOutcome {
    pub fn new(weights: Vec<f64>, budget: f64) -> Result<Self> {
        check_simplex("policy.weights", &weights)?;
        if !(budget >= 0.0 && budget.is_finite()) {
            return Err(Error::validation("policy.budget", "budget must be finite and >= 0"));
        }
        Ok(PolicyOutcome { weights, budget })
    }
}

pub(crate) fn check_simplex(path: &str, weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::validation(path, "weights must be nonempty"));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < -1e-9) {
        return Err(Error::validation(path, "weights must be finite and nonnegative"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::validation(path, format!("weights sum to {sum}, not 1")));
    }
    Ok(())
}

pub fn policy_equilibrium(
    game: &CoalitionGame,
    defender_index: usize,
    base_weights: &[f64],
    budget_rule: BudgetRule,
    tech: &TechLevel,
) -> Result<PolicyOutcome> {
    if defender_index >= game.n_players {
        return Err(Error::IndexOutOfRange(format!(
            "defender {defender_index} of {} players",
            game.n_players
        )));
    }
    let share = shapley_value(game)?.0[defender_index];
    let budget = budget_rule.base + budget_rule.scale * share * tech.budget_multiplier;
    PolicyOutcome::new(base_weights.to_vec(), budget.max(0.0))
}
