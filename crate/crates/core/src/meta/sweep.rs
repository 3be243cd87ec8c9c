//! The unfold/fold mappings between adjacent echelons and one full sweep.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Echelon, Error, Result};
use crate::operational::{solve_operational, StochasticGameSpec};
use crate::policy::{policy_equilibrium, shapley_value, PolicyOutcome};
use crate::scenario::Scenario;
use crate::strategic::{solve_strategic, StrategicEquilibrium, StrategicGame};
use crate::tactical::{solve_tactical, tactical_term_table, TacticalOutcome};

use super::config::{EchelonPayoff, Encounter, Feedback, OperationEntry, WarfareConfiguration};

/// Commitments below this count as unfunded.
const FUNDED_TOL: f64 = 1e-12;

/// Largest grid multiple not above `budget`.
pub fn snap_budget(budget: f64, grid_step: f64) -> f64 {
    ((budget / grid_step + 1e-9).floor()).max(0.0) * grid_step
}

/// Unfold policy into the strategic game it constrains.
pub fn strategic_game(
    policy: &PolicyOutcome,
    feedback: &BTreeMap<String, Feedback>,
    scenario: &Scenario,
) -> Result<StrategicGame> {
    let st = &scenario.strategic;
    if policy.weights.len() != st.operations.len() {
        return Err(Error::ShapeMismatch("policy weights do not match the operations".into()));
    }
    let game = StrategicGame {
        operations: st.operations.clone(),
        weights: policy.weights.clone(),
        budget_d: snap_budget(policy.budget, st.grid_step),
        budget_a: st.budget_a,
        contests: st.operations.iter().map(|op| st.contests[op]).collect(),
        grid_step: st.grid_step,
        tech: scenario.tech.clone(),
        allow_slack: st.allow_slack,
        outcome_scale: st
            .operations
            .iter()
            .map(|op| feedback.get(op).map_or(1.0, |f| f.scale))
            .collect(),
    };
    game.validate()?;
    Ok(game)
}

/// An operation instantiated from the strategic equilibrium, before its
/// tactical term is known.
#[derive(Debug, Clone)]
pub struct Instance {
    pub operation: String,
    pub spec: StochasticGameSpec,
}

#[derive(Debug, Clone, Default)]
pub struct Instantiation {
    pub instances: Vec<Instance>,
    pub diagnostics: Vec<String>,
}

/// Build the stochastic game for `op` restricted to the given actions, with
/// a zero tactical term.
pub fn operation_spec(
    scenario: &Scenario,
    op: &str,
    actions_d: &[String],
    actions_a: &[String],
) -> Result<StochasticGameSpec> {
    let template = scenario
        .operational
        .get(op)
        .ok_or_else(|| Error::MissingOperation(op.to_string()))?;
    let index = |list: &[String], name: &String| {
        list.iter()
            .position(|x| x == name)
            .ok_or_else(|| Error::IndexOutOfRange(format!("action `{name}` in `{op}`")))
    };
    let keep_d = actions_d
        .iter()
        .map(|a| index(&template.actions_d, a))
        .collect::<Result<Vec<_>>>()?;
    let keep_a = actions_a
        .iter()
        .map(|a| index(&template.actions_a, a))
        .collect::<Result<Vec<_>>>()?;
    let full = template.transition_table();
    let transition = full
        .iter()
        .map(|block| {
            keep_d
                .iter()
                .map(|&d| keep_a.iter().map(|&a| block[d][a].clone()).collect())
                .collect()
        })
        .collect();
    Ok(StochasticGameSpec {
        states: template.states.clone(),
        actions_d: actions_d.to_vec(),
        actions_a: actions_a.to_vec(),
        horizon: template.horizon,
        transition,
        stage_payoff_state: template
            .states
            .iter()
            .map(|s| template.state_payoff.get(s).copied().unwrap_or(0.0))
            .collect(),
        stage_payoff_context: template.context_payoff + scenario.tech.context_payoff_shift,
        tactical_term: vec![vec![(0.0, 0.0); actions_a.len()]; actions_d.len()],
        deception_index: template.deception_index.clone(),
        initial_state: template
            .states
            .iter()
            .position(|s| *s == template.initial_state)
            .unwrap_or(0),
        general_sum: template.general_sum,
    })
}

/// Unfold a strategic equilibrium into one stochastic game per funded
/// operation. Defender actions whose per-stage cost exceeds the mean
/// commitment spread over the horizon are filtered out.
pub fn instantiate_operations(strat: &StrategicEquilibrium, scenario: &Scenario) -> Result<Instantiation> {
    let mean = strat.mean_allocation_d();
    let mut out = Instantiation::default();
    for (i, op) in scenario.strategic.operations.iter().enumerate() {
        let r = mean.get(i).copied().unwrap_or(0.0);
        if r <= FUNDED_TOL {
            continue;
        }
        let template = &scenario.operational[op];
        let per_stage = r / template.horizon as f64;
        let tech = &scenario.tech;
        let actions_d: Vec<String> = template
            .actions_d
            .iter()
            .filter(|a| !tech.action_mask_d.contains(a))
            .filter(|a| template.cost(a) * tech.cost_scale <= per_stage + FUNDED_TOL)
            .cloned()
            .collect();
        let actions_a: Vec<String> = template
            .actions_a
            .iter()
            .filter(|a| !tech.action_mask_a.contains(a))
            .cloned()
            .collect();
        if actions_d.is_empty() || actions_a.is_empty() {
            out.diagnostics.push(Error::NoFeasibleAction(op.clone()).to_string());
            continue;
        }
        out.instances.push(Instance {
            operation: op.clone(),
            spec: operation_spec(scenario, op, &actions_d, &actions_a)?,
        });
    }
    Ok(out)
}

/// Solve the tactical encounter behind every action pair of `spec`.
/// Returns `None` when the operation has no tactical section.
pub fn solve_encounters(
    scenario: &Scenario,
    op: &str,
    spec: &StochasticGameSpec,
) -> Result<Option<BTreeMap<(usize, usize), TacticalOutcome>>> {
    let Some(section) = scenario.tactical.get(op) else {
        return Ok(None);
    };
    let catalog = section.catalog()?;
    let table = section.rule_table(&scenario.operational[op]);
    let pairs: Vec<(usize, usize)> = (0..spec.actions_d.len())
        .flat_map(|d| (0..spec.actions_a.len()).map(move |a| (d, a)))
        .collect();
    let outcomes = pairs
        .par_iter()
        .map(|&(d, a)| {
            let rule = table.rule(&spec.actions_d[d], &spec.actions_a[a]);
            solve_tactical(&catalog, rule).map(|o| ((d, a), o))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(outcomes.into_iter().collect()))
}

/// Tactical pass, fold into the operational game, and operational solve.
pub fn solve_instance(scenario: &Scenario, instance: &Instance) -> Result<(OperationEntry, Vec<Encounter>)> {
    let mut spec = instance.spec.clone();
    let outcomes = solve_encounters(scenario, &instance.operation, &spec).map_err(|e| e.at(Echelon::Tactical))?;
    let mut encounters = Vec::new();
    if let Some(outcomes) = outcomes {
        spec.tactical_term = tactical_term_table(&outcomes, spec.actions_d.len(), spec.actions_a.len())
            .map_err(|e| e.at(Echelon::Tactical))?;
        for ((d, a), outcome) in outcomes {
            encounters.push(Encounter {
                operation: instance.operation.clone(),
                action_d: spec.actions_d[d].clone(),
                action_a: spec.actions_a[a].clone(),
                outcome,
            });
        }
    }
    let solution = solve_operational(&spec).map_err(|e| e.at(Echelon::Operational))?;
    Ok((
        OperationEntry {
            actions_d: spec.actions_d,
            actions_a: spec.actions_a,
            tactical_term: spec.tactical_term,
            solution,
        },
        encounters,
    ))
}

pub(crate) fn solve_instances(
    scenario: &Scenario,
    instances: &[Instance],
) -> Result<(BTreeMap<String, OperationEntry>, Vec<Encounter>)> {
    let solved = instances
        .par_iter()
        .map(|inst| solve_instance(scenario, inst))
        .collect::<Result<Vec<_>>>()?;
    let mut ops = BTreeMap::new();
    let mut encounters = Vec::new();
    for (inst, (entry, enc)) in instances.iter().zip(solved) {
        ops.insert(inst.operation.clone(), entry);
        encounters.extend(enc);
    }
    Ok((ops, encounters))
}

/// Fold operational values into the per-operation feedback table.
pub fn outcome_feedback(
    operational: &BTreeMap<String, OperationEntry>,
    strat: &StrategicEquilibrium,
    game: &StrategicGame,
    scenario: &Scenario,
) -> BTreeMap<String, Feedback> {
    let [lo, hi] = scenario.strategic.payoff_range;
    // raw contest share expected under the equilibrium mixes
    let mut raw = game.clone();
    raw.outcome_scale = vec![1.0; game.operations.len()];
    let expected = strat.field_shares(&raw);
    let mut out = BTreeMap::new();
    for (i, op) in game.operations.iter().enumerate() {
        let base = expected[i];
        let entry = match operational.get(op) {
            Some(e) => {
                let share = ((e.solution.cumulative_value_d - lo) / (hi - lo)).clamp(0.0, 1.0);
                let scale = if !scenario.strategic.feedback || base <= FUNDED_TOL {
                    1.0
                } else {
                    share / base
                };
                Feedback { share, scale }
            }
            None => Feedback {
                share: base,
                scale: 1.0,
            },
        };
        out.insert(op.clone(), entry);
    }
    out
}

/// Fold the strategic value into the coalition game and recompute the
/// policy. Returns the new policy and the defender's Shapley share.
pub fn fold_policy(
    strat: &StrategicEquilibrium,
    game: &StrategicGame,
    scenario: &Scenario,
) -> Result<(PolicyOutcome, f64)> {
    let coalition = &scenario.coalition;
    let mut cg = coalition.game()?;
    let defender = coalition.defender_index();
    cg.set_value(1 << defender, strat.value_d * scenario.strategic.value_unit);

    let shares = strat.field_shares(game);
    let total: f64 = shares.iter().sum();
    let rate = scenario.strategic.weight_rate;
    let mut weights: Vec<f64> = game
        .weights
        .iter()
        .zip(&shares)
        .map(|(w, c)| {
            let share = if total > FUNDED_TOL { c / total } else { *w };
            (1.0 - rate) * w + rate * share
        })
        .collect();
    let sum: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= sum);

    let phi = shapley_value(&cg)?.0[defender];
    let policy = policy_equilibrium(&cg, defender, &weights, coalition.budget_rule, &scenario.tech)?;
    Ok((policy, phi))
}

fn payoffs(
    policy_share: f64,
    strat: &StrategicEquilibrium,
    operational: &BTreeMap<String, OperationEntry>,
    encounters: &[Encounter],
    weights: &[f64],
    scenario: &Scenario,
) -> BTreeMap<Echelon, EchelonPayoff> {
    let pay = |defender, attacker| EchelonPayoff { defender, attacker };
    let mut out = BTreeMap::new();
    out.insert(
        Echelon::Policy,
        pay(policy_share, scenario.strategic.value_unit * strat.value_a),
    );
    out.insert(Echelon::Strategic, pay(strat.value_d, strat.value_a));

    let (mut wd, mut wa, mut wsum) = (0.0, 0.0, 0.0);
    for (i, op) in scenario.strategic.operations.iter().enumerate() {
        if let Some(e) = operational.get(op) {
            wd += weights[i] * e.solution.cumulative_value_d;
            wa += weights[i] * e.solution.cumulative_value_a;
            wsum += weights[i];
        }
    }
    let op_pay = if wsum > FUNDED_TOL {
        pay(wd / wsum, wa / wsum)
    } else if let Some(e) = operational.values().next() {
        pay(e.solution.cumulative_value_d, e.solution.cumulative_value_a)
    } else {
        pay(0.0, 0.0)
    };
    out.insert(Echelon::Operational, op_pay);

    let tactical = if encounters.is_empty() {
        pay(0.0, 0.0)
    } else {
        pay(
            encounters.iter().map(|e| e.outcome.value_d).fold(f64::INFINITY, f64::min),
            encounters.iter().map(|e| e.outcome.value_a).fold(f64::NEG_INFINITY, f64::max),
        )
    };
    out.insert(Echelon::Tactical, tactical);
    let shift = scenario.tech.context_payoff_shift;
    out.insert(Echelon::Technical, pay(shift, 0.0 - shift));
    out
}

/// One full sweep `Φ`: unfold top-down, fold bottom-up, policy last.
pub fn phi(config: &WarfareConfiguration, scenario: &Scenario) -> Result<WarfareConfiguration> {
    sweep(&config.policy, &config.feedback, scenario)
}

pub(crate) fn sweep(
    policy: &PolicyOutcome,
    feedback: &BTreeMap<String, Feedback>,
    scenario: &Scenario,
) -> Result<WarfareConfiguration> {
    let method = scenario.solver.strategic_method;
    let game = strategic_game(policy, feedback, scenario).map_err(|e| e.at(Echelon::Strategic))?;
    let first = solve_strategic(&game, method).map_err(|e| e.at(Echelon::Strategic))?;
    let inst = instantiate_operations(&first, scenario).map_err(|e| e.at(Echelon::Operational))?;
    let (operational, tactical) = solve_instances(scenario, &inst.instances)?;

    let new_feedback = outcome_feedback(&operational, &first, &game, scenario);
    let mut refit = game.clone();
    refit.outcome_scale = game
        .operations
        .iter()
        .map(|op| new_feedback[op].scale)
        .collect();
    let strategic = solve_strategic(&refit, method).map_err(|e| e.at(Echelon::Strategic))?;
    let (new_policy, policy_share) =
        fold_policy(&strategic, &refit, scenario).map_err(|e| e.at(Echelon::Policy))?;
    let payoffs = payoffs(
        policy_share,
        &strategic,
        &operational,
        &tactical,
        &policy.weights,
        scenario,
    );
    Ok(WarfareConfiguration {
        policy: new_policy,
        policy_share,
        strategic,
        feedback: new_feedback,
        operational,
        tactical,
        tech: scenario.tech.clone(),
        payoffs,
        diagnostics: inst.diagnostics,
    })
}

/// Policy implied by the scenario's own coalition game and base weights,
/// with neutral feedback.
pub fn initial_inputs(scenario: &Scenario) -> Result<(PolicyOutcome, BTreeMap<String, Feedback>)> {
    let coalition = &scenario.coalition;
    let policy = policy_equilibrium(
        &coalition.game()?,
        coalition.defender_index(),
        &scenario.strategic.weights,
        coalition.budget_rule,
        &scenario.tech,
    )
    .map_err(|e| e.at(Echelon::Policy))?;
    let feedback = scenario
        .strategic
        .operations
        .iter()
        .map(|op| (op.clone(), Feedback::NEUTRAL))
        .collect();
    Ok((policy, feedback))
}

/// Starting configuration: one sweep from the scenario's initial policy.
pub fn bootstrap(scenario: &Scenario) -> Result<WarfareConfiguration> {
    let (policy, feedback) = initial_inputs(scenario)?;
    sweep(&policy, &feedback, scenario)
}
