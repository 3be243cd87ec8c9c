//! Capital-dependent coin-tossing games whose random mixture wins although
//! each game alone loses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParrondoSpec {
    /// Win probability of game A.
    pub p_a: f64,
    pub modulus: usize,
    /// Game B win probability when capital ≡ 0 (mod `modulus`).
    pub p_b_zero: f64,
    /// Game B win probability on every other residue.
    pub p_b_other: f64,
    /// Probability of playing A in the random mixture.
    pub mix_gamma: f64,
}

impl ParrondoSpec {
    /// The usual instantiation: `1/2 − ε`, `1/10 − ε`, `3/4 − ε` with M = 3.
    pub fn canonical(epsilon: f64, mix_gamma: f64) -> Self {
        ParrondoSpec {
            p_a: 0.5 - epsilon,
            modulus: 3,
            p_b_zero: 0.1 - epsilon,
            p_b_other: 0.75 - epsilon,
            mix_gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::validation(format!("parrondo.{name}"), "must lie in [0, 1]"))
            }
        };
        prob("p_a", self.p_a)?;
        prob("p_b_zero", self.p_b_zero)?;
        prob("p_b_other", self.p_b_other)?;
        prob("mix_gamma", self.mix_gamma)?;
        if self.modulus < 2 {
            return Err(Error::validation("parrondo.modulus", "must be at least 2"));
        }
        Ok(())
    }

    fn p_b(&self, residue: usize) -> f64 {
        if residue == 0 {
            self.p_b_zero
        } else {
            self.p_b_other
        }
    }

    /// Effective win probability of `game` at `residue`.
    pub fn win_probability(&self, game: ParrondoGame, residue: usize) -> f64 {
        match game {
            ParrondoGame::A => self.p_a,
            ParrondoGame::B => self.p_b(residue),
            ParrondoGame::Mixed => {
                self.mix_gamma * self.p_a + (1.0 - self.mix_gamma) * self.p_b(residue)
            }
        }
    }
}

impl Default for ParrondoSpec {
    fn default() -> Self {
        ParrondoSpec::canonical(0.005, 0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParrondoGame {
    A,
    B,
    /// Each step plays A with probability `mix_gamma`, otherwise B.
    Mixed,
}

/// Deterministic alternation such as `AABB`, repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule(pub Vec<ParrondoGame>);

impl Schedule {
    /// Parse a pattern of `A`, `B` and `M` (mixed) letters.
    pub fn parse(pattern: &str) -> Result<Self> {
        let games = pattern
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'A' => Ok(ParrondoGame::A),
                'B' => Ok(ParrondoGame::B),
                'M' => Ok(ParrondoGame::Mixed),
                _ => Err(Error::validation("parrondo.schedule", format!("unknown game `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if games.is_empty() {
            return Err(Error::validation("parrondo.schedule", "must name at least one game"));
        }
        Ok(Schedule(games))
    }
}

/// Stationary distribution and drift of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftAnalysis {
    /// Stationary probabilities, indexed by `phase · M + residue`.
    pub stationary: Vec<f64>,
    pub drift: f64,
}

/// Transition matrix over `(phase, residue)` for a schedule. A single-game
/// schedule reduces to the plain residue chain.
fn transition_matrix(spec: &ParrondoSpec, schedule: &[ParrondoGame]) -> Vec<Vec<f64>> {
    let m = spec.modulus;
    let len = schedule.len();
    let n = m * len;
    let mut p = vec![vec![0.0; n]; n];
    for (phase, game) in schedule.iter().enumerate() {
        let next = (phase + 1) % len;
        for r in 0..m {
            let w = spec.win_probability(*game, r);
            p[phase * m + r][next * m + (r + 1) % m] += w;
            p[phase * m + r][next * m + (r + m - 1) % m] += 1.0 - w;
        }
    }
    p
}

fn irreducible(p: &[Vec<f64>]) -> bool {
    let n = p.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let w = if forward { p[i][j] } else { p[j][i] };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Solve `π P = π`, `Σ π = 1` by replacing one balance equation with the
/// normalization.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    if !irreducible(p) {
        return Err(Error::SingularChain);
    }
    let mut a = vec![vec![0.0; n]; n];
    for (i, row) in a.iter_mut().enumerate().take(n - 1) {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = p[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[n - 1] = vec![1.0; n];
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    linalg::solve(a, b).ok_or(Error::SingularChain)
}

fn analyse(spec: &ParrondoSpec, schedule: &[ParrondoGame]) -> Result<DriftAnalysis> {
    spec.validate()?;
    let m = spec.modulus;
    let stationary = stationary_distribution(&transition_matrix(spec, schedule))?;
    let drift = schedule
        .iter()
        .enumerate()
        .flat_map(|(phase, g)| (0..m).map(move |r| (phase * m + r, *g, r)))
        .map(|(i, g, r)| stationary[i] * (2.0 * spec.win_probability(g, r) - 1.0))
        .sum();
    Ok(DriftAnalysis { stationary, drift })
}

/// Expected capital change per step at stationarity.
pub fn parrondo_drift(spec: &ParrondoSpec, game: ParrondoGame) -> Result<f64> {
    Ok(parrondo_analysis(spec, game)?.drift)
}

pub fn parrondo_analysis(spec: &ParrondoSpec, game: ParrondoGame) -> Result<DriftAnalysis> {
    analyse(spec, &[game])
}

/// Drift of a periodic schedule, on the period-extended state space.
pub fn schedule_drift(spec: &ParrondoSpec, schedule: &Schedule) -> Result<f64> {
    Ok(analyse(spec, &schedule.0)?.drift)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub seed: u64,
    pub steps: u64,
    pub drift: f64,
    /// Batch-means standard error of `drift`.
    pub std_error: f64,
}

const BATCHES: u64 = 100;

fn simulate(spec: &ParrondoSpec, schedule: &[ParrondoGame], steps: u64, seed: u64) -> SimulationResult {
    let m = spec.modulus as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut capital: i64 = 0;
    let batches = BATCHES.min(steps);
    let batch_len = steps / batches;
    let mut batch_means = Vec::with_capacity(batches as usize);
    let mut batch_sum = 0i64;
    let mut in_batch = 0u64;
    for t in 0..steps {
        let game = match schedule[(t % schedule.len() as u64) as usize] {
            ParrondoGame::Mixed => {
                if rng.random::<f64>() < spec.mix_gamma {
                    ParrondoGame::A
                } else {
                    ParrondoGame::B
                }
            }
            g => g,
        };
        let p = spec.win_probability(game, capital.rem_euclid(m) as usize);
        let step = if rng.random::<f64>() < p { 1 } else { -1 };
        capital += step;
        batch_sum += step;
        in_batch += 1;
        if in_batch == batch_len && (batch_means.len() as u64) < batches {
            batch_means.push(batch_sum as f64 / batch_len as f64);
            batch_sum = 0;
            in_batch = 0;
        }
    }
    let drift = capital as f64 / steps as f64;
    let k = batch_means.len() as f64;
    let std_error = if k > 1.0 {
        let mean = batch_means.iter().sum::<f64>() / k;
        let var = batch_means.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        f64::INFINITY
    };
    SimulationResult {
        seed,
        steps,
        drift,
        std_error,
    }
}

/// Seeded Monte Carlo estimate of the drift starting from zero capital.
pub fn parrondo_simulate(spec: &ParrondoSpec, game: ParrondoGame, steps: u64, seed: u64) -> SimulationResult {
    simulate(spec, &[game], steps.max(1), seed)
}

pub fn schedule_simulate(spec: &ParrondoSpec, schedule: &Schedule, steps: u64, seed: u64) -> SimulationResult {
    simulate(spec, &schedule.0, steps.max(1), seed)
}
