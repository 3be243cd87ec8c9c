//! Blotto-style allocation game across operations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    exploitability, fictitious_play, solve_zero_sum, BimatrixGame, MatrixGame, MixedStrategy,
};
use crate::meta::TechLevel;

pub const MAX_UNITS: u64 = 60;
pub const MAX_OPERATIONS: usize = 6;
pub const MAX_ALLOCATIONS: u128 = 2_000_000;
const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContestKind {
    /// `r_d^s / (r_d^s + r_a^s)`
    Lottery,
    /// Larger commitment takes the field; ties split.
    WinnerTakeAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContestSpec {
    pub kind: ContestKind,
    #[serde(default = "one")]
    pub sharpness: f64,
}

fn one() -> f64 {
    1.0
}

impl ContestSpec {
    pub fn lottery(sharpness: f64) -> Self {
        ContestSpec {
            kind: ContestKind::Lottery,
            sharpness,
        }
    }

    pub fn winner_take_all() -> Self {
        ContestSpec {
            kind: ContestKind::WinnerTakeAll,
            sharpness: 1.0,
        }
    }
}

/// Defender's share of one operation given both commitments.
pub fn contest_value(spec: &ContestSpec, r_d: f64, r_a: f64, tech: &TechLevel) -> f64 {
    match spec.kind {
        ContestKind::Lottery => {
            if r_d <= 0.0 && r_a <= 0.0 {
                return 0.5;
            }
            let s = spec.sharpness * tech.contest_sharpness;
            let (d, a) = (r_d.max(0.0).powf(s), r_a.max(0.0).powf(s));
            if d + a == 0.0 {
                0.5
            } else {
                d / (d + a)
            }
        }
        ContestKind::WinnerTakeAll => {
            if r_d > r_a {
                1.0
            } else if r_d < r_a {
                0.0
            } else {
                0.5
            }
        }
    }
}

/// Resources per operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Allocation(pub Vec<f64>);

impl Allocation {
    pub fn amounts(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicGame {
    pub operations: Vec<String>,
    pub weights: Vec<f64>,
    pub budget_d: f64,
    pub budget_a: f64,
    pub contests: Vec<ContestSpec>,
    pub grid_step: f64,
    pub tech: TechLevel,
    /// Permit allocations that leave budget unspent.
    pub allow_slack: bool,
    /// Multiplicative feedback on each contest from operational outcomes
    /// (1 where no feedback exists). Effective share is
    /// `min(1, scale · contest_value)`.
    pub outcome_scale: Vec<f64>,
}

impl StrategicGame {
    pub fn validate(&self) -> Result<()> {
        let n = self.operations.len();
        if n == 0 {
            return Err(Error::validation("strategic.operations", "at least one operation"));
        }
        if self.weights.len() != n || self.contests.len() != n || self.outcome_scale.len() != n {
            return Err(Error::ShapeMismatch(
                "weights, contests and outcome scales must match the operations".into(),
            ));
        }
        crate::policy::check_simplex("strategic.weights", &self.weights)?;
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return Err(Error::validation("strategic.grid_step", "must be > 0"));
        }
        for (name, b) in [("budget_d", self.budget_d), ("budget_a", self.budget_a)] {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::validation(format!("strategic.{name}"), "must be >= 0"));
            }
            grid_units(b, self.grid_step)
                .ok_or_else(|| Error::validation(format!("strategic.{name}"), "not a multiple of grid_step"))?;
        }
        for (i, c) in self.contests.iter().enumerate() {
            if !(c.sharpness > 0.0 && c.sharpness.is_finite()) {
                return Err(Error::validation(
                    format!("strategic.contests[{i}].sharpness"),
                    "must be > 0",
                ));
            }
        }
        if self.outcome_scale.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::validation("strategic.outcome_scale", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Share of operation `op` after outcome feedback.
    pub fn field_value(&self, op: usize, r_d: f64, r_a: f64) -> f64 {
        let base = contest_value(&self.contests[op], r_d, r_a, &self.tech);
        (self.outcome_scale[op] * base).min(1.0)
    }

    fn check_allocation(&self, alloc: &Allocation, budget: f64, side: &str) -> Result<()> {
        if alloc.0.len() != self.operations.len() {
            return Err(Error::InfeasibleAllocation(format!(
                "{side} allocation has {} entries for {} operations",
                alloc.0.len(),
                self.operations.len()
            )));
        }
        if alloc.0.iter().any(|a| a.is_nan() || *a < 0.0 || grid_units(*a, self.grid_step).is_none()) {
            return Err(Error::InfeasibleAllocation(format!(
                "{side} amounts must be nonnegative multiples of {}",
                self.grid_step
            )));
        }
        if alloc.total() > budget + GRID_TOL {
            return Err(Error::InfeasibleAllocation(format!(
                "{side} spends {} of budget {budget}",
                alloc.total()
            )));
        }
        Ok(())
    }

    fn payoff_unchecked(&self, r_d: &Allocation, r_a: &Allocation) -> f64 {
        (0..self.operations.len())
            .map(|op| self.weights[op] * self.field_value(op, r_d.0[op], r_a.0[op]))
            .sum()
    }
}

/// Number of grid units in `amount`, if it lies on the grid.
pub fn grid_units(amount: f64, grid_step: f64) -> Option<u64> {
    let units = (amount / grid_step).round();
    if (units * grid_step - amount).abs() <= GRID_TOL * (1.0 + amount.abs()) && units >= 0.0 {
        Some(units as u64)
    } else {
        None
    }
}

/// `(value_d, value_a)` with `value_a = 1 - value_d`.
pub fn strategic_payoff(
    game: &StrategicGame,
    r_d: &Allocation,
    r_a: &Allocation,
) -> Result<(f64, f64)> {
    game.check_allocation(r_d, game.budget_d, "defender")?;
    game.check_allocation(r_a, game.budget_a, "attacker")?;
    let v = game.payoff_unchecked(r_d, r_a);
    Ok((v, 1.0 - v))
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Every way to place the budget's grid units on `n_ops` operations, in
/// lexicographic order of the amounts.
pub fn enumerate_allocations(
    budget: f64,
    grid_step: f64,
    n_ops: usize,
    allow_slack: bool,
) -> Result<Vec<Allocation>> {
    let units = grid_units(budget, grid_step).ok_or_else(|| {
        Error::InfeasibleAllocation(format!("budget {budget} is not a multiple of {grid_step}"))
    })?;
    if n_ops == 0 {
        return Err(Error::InfeasibleAllocation("no operations".into()));
    }
    let count = if allow_slack {
        binomial(units + n_ops as u64, n_ops as u64)
    } else {
        binomial(units + n_ops as u64 - 1, n_ops as u64 - 1)
    };
    if count > MAX_ALLOCATIONS || units > MAX_UNITS || n_ops > MAX_OPERATIONS {
        return Err(Error::CombinatorialBlowup {
            count,
            limit: MAX_ALLOCATIONS,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u64; n_ops];
    fill(&mut out, &mut current, 0, units, allow_slack, grid_step);
    Ok(out)
}

fn fill(
    out: &mut Vec<Allocation>,
    current: &mut [u64],
    pos: usize,
    remaining: u64,
    allow_slack: bool,
    step: f64,
) {
    if pos + 1 == current.len() {
        let lo = if allow_slack { 0 } else { remaining };
        for last in lo..=remaining {
            current[pos] = last;
            out.push(Allocation(current.iter().map(|&u| u as f64 * step).collect()));
        }
        return;
    }
    for u in 0..=remaining {
        current[pos] = u;
        fill(out, current, pos + 1, remaining - u, allow_slack, step);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategicMethod {
    #[default]
    ExactLp,
    FictitiousPlay { iterations: usize },
}

/// `E_strategic = (r_d*, r_a*)` as mixtures over enumerated allocations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicEquilibrium {
    pub allocations_d: Vec<Allocation>,
    pub allocations_a: Vec<Allocation>,
    pub mix_d: MixedStrategy,
    pub mix_a: MixedStrategy,
    pub value_d: f64,
    pub value_a: f64,
    pub exploitability: f64,
    pub grid_step: f64,
}

impl StrategicEquilibrium {
    fn mean(allocs: &[Allocation], mix: &MixedStrategy) -> Vec<f64> {
        let n = allocs.first().map_or(0, |a| a.0.len());
        let mut mean = vec![0.0; n];
        for (a, w) in allocs.iter().zip(mix.weights()) {
            for (m, x) in mean.iter_mut().zip(&a.0) {
                *m += w * x;
            }
        }
        mean
    }

    /// Expected defender commitment per operation.
    pub fn mean_allocation_d(&self) -> Vec<f64> {
        Self::mean(&self.allocations_d, &self.mix_d)
    }

    pub fn mean_allocation_a(&self) -> Vec<f64> {
        Self::mean(&self.allocations_a, &self.mix_a)
    }

    /// Expected share of each operation won by the defender, unweighted.
    pub fn field_shares(&self, game: &StrategicGame) -> Vec<f64> {
        let mut out = vec![0.0; game.operations.len()];
        for (rd, p) in self.allocations_d.iter().zip(self.mix_d.weights()) {
            if *p == 0.0 {
                continue;
            }
            for (ra, q) in self.allocations_a.iter().zip(self.mix_a.weights()) {
                if *q == 0.0 {
                    continue;
                }
                for (op, c) in out.iter_mut().enumerate() {
                    *c += p * q * game.field_value(op, rd.0[op], ra.0[op]);
                }
            }
        }
        out
    }

    /// Expected weighted share each operation contributes to `value_d`.
    pub fn contributions(&self, game: &StrategicGame) -> Vec<f64> {
        self.field_shares(game)
            .into_iter()
            .zip(&game.weights)
            .map(|(s, w)| s * w)
            .collect()
    }
}

/// Normal form over all allocation pairs.
pub fn normal_form(game: &StrategicGame) -> Result<(Vec<Allocation>, Vec<Allocation>, MatrixGame)> {
    game.validate()?;
    let n = game.operations.len();
    let alloc_d = enumerate_allocations(game.budget_d, game.grid_step, n, game.allow_slack)?;
    let alloc_a = enumerate_allocations(game.budget_a, game.grid_step, n, game.allow_slack)?;
    let cells = alloc_d.len() as u128 * alloc_a.len() as u128;
    if cells > MAX_ALLOCATIONS {
        return Err(Error::CombinatorialBlowup {
            count: cells,
            limit: MAX_ALLOCATIONS,
        });
    }
    let rows: Vec<Vec<f64>> = alloc_d
        .par_iter()
        .map(|rd| alloc_a.iter().map(|ra| game.payoff_unchecked(rd, ra)).collect())
        .collect();
    let matrix = MatrixGame::new(rows)?;
    Ok((alloc_d, alloc_a, matrix))
}

pub fn solve_strategic(game: &StrategicGame, method: StrategicMethod) -> Result<StrategicEquilibrium> {
    let (allocations_d, allocations_a, matrix) = normal_form(game)?;
    let profile = match method {
        StrategicMethod::ExactLp => solve_zero_sum(&matrix)?,
        StrategicMethod::FictitiousPlay { iterations } => fictitious_play(&matrix, iterations),
    };
    let exploitability = exploitability(&BimatrixGame::zero_sum(&matrix), &profile)?;
    Ok(StrategicEquilibrium {
        allocations_d,
        allocations_a,
        value_d: profile.value_d,
        value_a: 1.0 - profile.value_d,
        mix_d: profile.strategy_d,
        mix_a: profile.strategy_a,
        exploitability,
        grid_step: game.grid_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn game(weights: &[f64], contests: Vec<ContestSpec>, bd: f64, ba: f64) -> StrategicGame {
        let n = weights.len();
        StrategicGame {
            operations: (0..n).map(|i| format!("op{i}")).collect(),
            weights: weights.to_vec(),
            budget_d: bd,
            budget_a: ba,
            contests,
            grid_step: 1.0,
            tech: TechLevel::default(),
            allow_slack: false,
            outcome_scale: vec![1.0; n],
        }
    }

    #[test]
    fn contest_conventions() {
        let t = TechLevel::default();
        assert!((contest_value(&ContestSpec::lottery(1.0), 2.0, 1.0, &t) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(contest_value(&ContestSpec::lottery(1.0), 0.0, 0.0, &t), 0.5);
        assert_eq!(contest_value(&ContestSpec::winner_take_all(), 0.0, 0.0, &t), 0.5);
        assert_eq!(contest_value(&ContestSpec::winner_take_all(), 3.0, 3.0, &t), 0.5);
        let sharp = TechLevel {
            contest_sharpness: 2.0,
            ..TechLevel::default()
        };
        // effective exponent 2: 4 / (4 + 1)
        assert!((contest_value(&ContestSpec::lottery(1.0), 2.0, 1.0, &sharp) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn payoff_examples() {
        let g = game(&[0.5, 0.5], vec![ContestSpec::lottery(1.0); 2], 2.0, 2.0);
        let (vd, va) =
            strategic_payoff(&g, &Allocation(vec![2.0, 0.0]), &Allocation(vec![1.0, 1.0])).unwrap();
        assert!((vd - 1.0 / 3.0).abs() < 1e-15);
        assert!((va - 2.0 / 3.0).abs() < 1e-15);

        let third = 1.0 / 3.0;
        let g = game(&[third; 3], vec![ContestSpec::winner_take_all(); 3], 3.0, 3.0);
        let (vd, _) = strategic_payoff(
            &g,
            &Allocation(vec![2.0, 1.0, 0.0]),
            &Allocation(vec![1.0, 1.0, 1.0]),
        )
        .unwrap();
        assert!((vd - 0.5).abs() < 1e-15);
    }

    #[test]
    fn infeasible_allocations_are_rejected() {
        let g = game(&[0.5, 0.5], vec![ContestSpec::lottery(1.0); 2], 2.0, 2.0);
        let over = Allocation(vec![2.0, 1.0]);
        let ok = Allocation(vec![1.0, 1.0]);
        assert!(matches!(
            strategic_payoff(&g, &over, &ok),
            Err(Error::InfeasibleAllocation(_))
        ));
        assert!(strategic_payoff(&g, &ok, &Allocation(vec![0.5, 1.0])).is_err());
    }

    #[test]
    fn allocation_counts() {
        let a = enumerate_allocations(3.0, 1.0, 2, false).unwrap();
        let amounts: Vec<Vec<f64>> = a.into_iter().map(|x| x.0).collect();
        assert_eq!(
            amounts,
            vec![vec![0.0, 3.0], vec![1.0, 2.0], vec![2.0, 1.0], vec![3.0, 0.0]]
        );
        assert_eq!(enumerate_allocations(0.0, 1.0, 4, false).unwrap().len(), 1);
        assert_eq!(enumerate_allocations(2.0, 1.0, 3, false).unwrap().len(), 6);
        // with slack: C(2 + 3, 3)
        assert_eq!(enumerate_allocations(2.0, 1.0, 3, true).unwrap().len(), 10);
        assert!(matches!(
            enumerate_allocations(60.0, 1.0, 6, false),
            Err(Error::CombinatorialBlowup { .. })
        ));
        assert!(enumerate_allocations(2.5, 1.0, 2, false).is_err());
    }

    #[test]
    fn symmetric_blotto_is_even() {
        let g = game(&[0.5, 0.5], vec![ContestSpec::winner_take_all(); 2], 3.0, 3.0);
        let eq = solve_strategic(&g, StrategicMethod::ExactLp).unwrap();
        assert!((eq.value_d - 0.5).abs() < 1e-9);
        assert!(eq.exploitability <= 1e-8);
    }

    #[test]
    fn fictitious_play_method_runs() {
        let g = game(&[0.5, 0.5], vec![ContestSpec::lottery(1.0); 2], 2.0, 2.0);
        let eq = solve_strategic(&g, StrategicMethod::FictitiousPlay { iterations: 5000 }).unwrap();
        assert!((eq.value_d - 0.5).abs() < 0.02);
        assert!(eq.exploitability < 0.05);
    }
}
