//! Finite-horizon two-player stochastic games solved by backward induction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{solve_bimatrix, solve_zero_sum, BimatrixGame, EquilibriumSelectionRule, MatrixGame, MixedStrategy};

pub const MAX_HORIZON: usize = 64;
const ROW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticGameSpec {
    pub states: Vec<String>,
    pub actions_d: Vec<String>,
    pub actions_a: Vec<String>,
    pub horizon: usize,
    /// `transition[s][a_d][a_a][s']`
    pub transition: Vec<Vec<Vec<Vec<f64>>>>,
    /// `u_d^O(s)`
    pub stage_payoff_state: Vec<f64>,
    /// `u_d^O(λ, θ)`
    pub stage_payoff_context: f64,
    /// `(U_d^{T*}, U_a^{T*})` per operational action pair.
    pub tactical_term: Vec<Vec<(f64, f64)>>,
    pub deception_index: String,
    pub initial_state: usize,
    /// Solve stages as bimatrix games instead of zero-sum games.
    pub general_sum: bool,
}

impl StochasticGameSpec {
    pub fn validate(&self) -> Result<()> {
        let (ns, nd, na) = (self.states.len(), self.actions_d.len(), self.actions_a.len());
        if ns == 0 || nd == 0 || na == 0 {
            return Err(Error::ShapeMismatch("states and action sets must be nonempty".into()));
        }
        if self.horizon == 0 || self.horizon > MAX_HORIZON {
            return Err(Error::validation(
                "operational.horizon",
                format!("horizon must be in 1..={MAX_HORIZON}"),
            ));
        }
        if self.initial_state >= ns {
            return Err(Error::IndexOutOfRange(format!("initial state {}", self.initial_state)));
        }
        if self.stage_payoff_state.len() != ns {
            return Err(Error::ShapeMismatch("one state payoff per state".into()));
        }
        if self.tactical_term.len() != nd || self.tactical_term.iter().any(|r| r.len() != na) {
            return Err(Error::ShapeMismatch("tactical term must be |A_d| x |A_a|".into()));
        }
        let finite = self.stage_payoff_context.is_finite()
            && self.stage_payoff_state.iter().all(|v| v.is_finite())
            && self
                .tactical_term
                .iter()
                .flatten()
                .all(|(d, a)| d.is_finite() && a.is_finite());
        if !finite {
            return Err(Error::validation("operational.payoffs", "payoffs must be finite"));
        }
        if self.transition.len() != ns {
            return Err(Error::ShapeMismatch("one transition block per state".into()));
        }
        for (s, block) in self.transition.iter().enumerate() {
            if block.len() != nd || block.iter().any(|r| r.len() != na) {
                return Err(Error::ShapeMismatch(format!("transition block for state {s}")));
            }
            for (d, per_a) in block.iter().enumerate() {
                for (a, row) in per_a.iter().enumerate() {
                    let label = || {
                        format!(
                            "({}, {}, {})",
                            self.states[s], self.actions_d[d], self.actions_a[a]
                        )
                    };
                    if row.len() != ns {
                        return Err(Error::ShapeMismatch(format!("transition row {}", label())));
                    }
                    let sum: f64 = row.iter().sum();
                    if row.iter().any(|p| p.is_nan() || *p < 0.0) || (sum - 1.0).abs() > ROW_TOL {
                        return Err(Error::NonStochasticRow { row: label(), sum });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_indices(&self, s: usize, a_d: usize, a_a: usize) -> Result<()> {
        if s >= self.states.len() || a_d >= self.actions_d.len() || a_a >= self.actions_a.len() {
            return Err(Error::IndexOutOfRange(format!("(state {s}, a_d {a_d}, a_a {a_a})")));
        }
        Ok(())
    }

    fn stage_d(&self, s: usize, a_d: usize, a_a: usize) -> f64 {
        self.tactical_term[a_d][a_a].0 + self.stage_payoff_state[s] + self.stage_payoff_context
    }

    fn stage_a(&self, s: usize, a_d: usize, a_a: usize) -> f64 {
        if self.general_sum {
            self.tactical_term[a_d][a_a].1 - self.stage_payoff_state[s] - self.stage_payoff_context
        } else {
            -self.stage_d(s, a_d, a_a)
        }
    }
}

/// `U_d^{T*}(a_d, a_a) + u_d^O(s) + u_d^O(λ, θ)`
pub fn stage_payoff(spec: &StochasticGameSpec, s: usize, a_d: usize, a_a: usize) -> Result<f64> {
    spec.check_indices(s, a_d, a_a)?;
    Ok(spec.stage_d(s, a_d, a_a))
}

/// Attacker's stage payoff: the negation in zero-sum mode; in general-sum
/// mode the tactical attacker term minus the state and context terms.
pub fn stage_payoff_attacker(spec: &StochasticGameSpec, s: usize, a_d: usize, a_a: usize) -> Result<f64> {
    spec.check_indices(s, a_d, a_a)?;
    Ok(spec.stage_a(s, a_d, a_a))
}

/// `policy[k][s]`, stage `k` counted from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StagePolicy(pub Vec<Vec<MixedStrategy>>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationalSolution {
    pub policy_d: StagePolicy,
    pub policy_a: StagePolicy,
    /// `value[k][s]` for `k = 0..=K`; the last layer is the terminal zero.
    pub value: Vec<Vec<f64>>,
    pub value_a: Vec<Vec<f64>>,
    pub cumulative_value_d: f64,
    pub cumulative_value_a: f64,
}

/// Continuation-augmented stage game at `(k, s)` given the next layer.
pub fn stage_matrices(
    spec: &StochasticGameSpec,
    s: usize,
    next_d: &[f64],
    next_a: &[f64],
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (nd, na) = (spec.actions_d.len(), spec.actions_a.len());
    let mut md = vec![vec![0.0; na]; nd];
    let mut ma = vec![vec![0.0; na]; nd];
    for d in 0..nd {
        for a in 0..na {
            let row = &spec.transition[s][d][a];
            let cont_d: f64 = row.iter().zip(next_d).map(|(p, v)| p * v).sum();
            let cont_a: f64 = row.iter().zip(next_a).map(|(p, v)| p * v).sum();
            md[d][a] = spec.stage_d(s, d, a) + cont_d;
            ma[d][a] = spec.stage_a(s, d, a) + cont_a;
        }
    }
    (md, ma)
}

struct StageSolution {
    value_d: f64,
    value_a: f64,
    mix_d: MixedStrategy,
    mix_a: MixedStrategy,
}

fn solve_stage(spec: &StochasticGameSpec, md: Vec<Vec<f64>>, ma: Vec<Vec<f64>>) -> Result<StageSolution> {
    if spec.general_sum {
        let eq = solve_bimatrix(&BimatrixGame::new(md, ma)?, EquilibriumSelectionRule::default())?;
        Ok(StageSolution {
            value_d: eq.profile.value_d,
            value_a: eq.profile.value_a,
            mix_d: eq.profile.strategy_d,
            mix_a: eq.profile.strategy_a,
        })
    } else {
        let eq = solve_zero_sum(&MatrixGame::new(md)?)?;
        Ok(StageSolution {
            value_d: eq.value_d,
            value_a: -eq.value_d,
            mix_d: eq.strategy_d,
            mix_a: eq.strategy_a,
        })
    }
}

pub fn solve_operational(spec: &StochasticGameSpec) -> Result<OperationalSolution> {
    spec.validate()?;
    let (k_max, ns) = (spec.horizon, spec.states.len());
    let mut value = vec![vec![0.0; ns]; k_max + 1];
    let mut value_a = vec![vec![0.0; ns]; k_max + 1];
    let mut policy_d = vec![Vec::new(); k_max];
    let mut policy_a = vec![Vec::new(); k_max];
    for k in (0..k_max).rev() {
        let (next_d, next_a) = (&value[k + 1], &value_a[k + 1]);
        let layer: Vec<StageSolution> = (0..ns)
            .into_par_iter()
            .map(|s| {
                let (md, ma) = stage_matrices(spec, s, next_d, next_a);
                solve_stage(spec, md, ma)
            })
            .collect::<Result<_>>()?;
        for (s, st) in layer.into_iter().enumerate() {
            value[k][s] = st.value_d;
            value_a[k][s] = st.value_a;
            policy_d[k].push(st.mix_d);
            policy_a[k].push(st.mix_a);
        }
    }
    Ok(OperationalSolution {
        cumulative_value_d: value[0][spec.initial_state],
        cumulative_value_a: value_a[0][spec.initial_state],
        policy_d: StagePolicy(policy_d),
        policy_a: StagePolicy(policy_a),
        value,
        value_a,
    })
}

/// Expected `(defender, attacker)` totals from the initial state when both
/// sides follow the given stage policies.
pub fn evaluate_policies(
    spec: &StochasticGameSpec,
    policy_d: &StagePolicy,
    policy_a: &StagePolicy,
) -> Result<(f64, f64)> {
    let ns = spec.states.len();
    if policy_d.0.len() != spec.horizon || policy_a.0.len() != spec.horizon {
        return Err(Error::ShapeMismatch("policy horizon does not match spec".into()));
    }
    let mut next_d = vec![0.0; ns];
    let mut next_a = vec![0.0; ns];
    for k in (0..spec.horizon).rev() {
        let mut cur_d = vec![0.0; ns];
        let mut cur_a = vec![0.0; ns];
        for s in 0..ns {
            let (md, ma) = stage_matrices(spec, s, &next_d, &next_a);
            let p = policy_d.0[k][s].weights();
            let q = policy_a.0[k][s].weights();
            cur_d[s] = crate::kernel::expected_payoff(&md, p, q);
            cur_a[s] = crate::kernel::expected_payoff(&ma, p, q);
        }
        next_d = cur_d;
        next_a = cur_a;
    }
    Ok((next_d[spec.initial_state], next_a[spec.initial_state]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub state: usize,
    pub action_d: usize,
    pub action_a: usize,
    pub payoff_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub steps: Vec<TrajectoryStep>,
    pub total_d: f64,
}

fn sample(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Samples one play of the game with ChaCha8 seeded from `seed`.
pub fn simulate(spec: &StochasticGameSpec, sol: &OperationalSolution, seed: u64) -> Result<Trajectory> {
    if sol.policy_d.0.len() != spec.horizon
        || sol.policy_d.0.iter().any(|layer| layer.len() != spec.states.len())
    {
        return Err(Error::ShapeMismatch("solution does not match spec".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = spec.initial_state;
    let mut steps = Vec::with_capacity(spec.horizon);
    let mut total_d = 0.0;
    for k in 0..spec.horizon {
        let action_d = sample(&mut rng, sol.policy_d.0[k][state].weights());
        let action_a = sample(&mut rng, sol.policy_a.0[k][state].weights());
        let payoff_d = spec.stage_d(state, action_d, action_a);
        total_d += payoff_d;
        steps.push(TrajectoryStep {
            state,
            action_d,
            action_a,
            payoff_d,
        });
        state = sample(&mut rng, &spec.transition[state][action_d][action_a]);
    }
    Ok(Trajectory {
        seed,
        steps,
        total_d,
    })
}
