//! Perturbation sites and shock propagation through the echelons.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Echelon, Error, Result};
use crate::scenario::{Scenario, TransitionRow};

use super::config::{EchelonPayoff, WarfareConfiguration};
use super::fixed_point::{iterate_from, ConvergenceTrace, IterationSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TechField {
    BudgetMultiplier,
    ContestSharpness,
    ContextPayoffShift,
    CostScale,
}

/// A parameter that can be shocked, addressed by a dotted path:
///
/// * `policy.budget`
/// * `policy.weights.<operation>`
/// * `tech.<field>`
/// * `tactical.<operation>.<tactic_d>.<tactic_a>`
/// * `operational.<operation>.<state>.<action_d>.<action_a>.<next_state>`
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Site {
    PolicyBudget,
    PolicyWeight(usize),
    Tech(TechField),
    TacticalPair {
        operation: String,
        tactic_d: String,
        tactic_a: String,
    },
    Transition {
        operation: String,
        state: String,
        action_d: String,
        action_a: String,
        next: String,
    },
}

impl Site {
    pub fn parse(path: &str, scenario: &Scenario) -> Result<Site> {
        let invalid = || Error::InvalidSite(path.to_string());
        let parts: Vec<&str> = path.split('.').collect();
        let site = match parts.as_slice() {
            ["policy", "budget"] => Site::PolicyBudget,
            ["policy", "weights", op] => Site::PolicyWeight(scenario.operation_index(op).ok_or_else(invalid)?),
            ["tech", field] => Site::Tech(match *field {
                "budget_multiplier" => TechField::BudgetMultiplier,
                "contest_sharpness" => TechField::ContestSharpness,
                "context_payoff_shift" => TechField::ContextPayoffShift,
                "cost_scale" => TechField::CostScale,
                _ => return Err(invalid()),
            }),
            ["tactical", op, td, ta] => {
                let section = scenario.tactical.get(*op).ok_or_else(invalid)?;
                if !section.tactics_d.iter().any(|t| t == td) || !section.tactics_a.iter().any(|t| t == ta) {
                    return Err(invalid());
                }
                Site::TacticalPair {
                    operation: op.to_string(),
                    tactic_d: td.to_string(),
                    tactic_a: ta.to_string(),
                }
            }
            ["operational", op, s, ad, aa, to] => {
                let t = scenario.operational.get(*op).ok_or_else(invalid)?;
                let known = |list: &[String], x: &str| list.iter().any(|y| y == x);
                if !(known(&t.states, s) && known(&t.actions_d, ad) && known(&t.actions_a, aa) && known(&t.states, to)) {
                    return Err(invalid());
                }
                Site::Transition {
                    operation: op.to_string(),
                    state: s.to_string(),
                    action_d: ad.to_string(),
                    action_a: aa.to_string(),
                    next: to.to_string(),
                }
            }
            _ => return Err(invalid()),
        };
        Ok(site)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::PolicyBudget => write!(f, "policy.budget"),
            Site::PolicyWeight(i) => write!(f, "policy.weights[{i}]"),
            Site::Tech(field) => write!(f, "tech.{field:?}"),
            Site::TacticalPair {
                operation,
                tactic_d,
                tactic_a,
            } => write!(f, "tactical.{operation}.{tactic_d}.{tactic_a}"),
            Site::Transition {
                operation,
                state,
                action_d,
                action_a,
                next,
            } => write!(f, "operational.{operation}.{state}.{action_d}.{action_a}.{next}"),
        }
    }
}

fn shift_weight(weights: &mut [f64], i: usize, delta: f64) -> Result<()> {
    weights[i] = (weights[i] + delta).max(0.0);
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return Err(Error::validation("policy.weights", "perturbation leaves no positive weight"));
    }
    weights.iter_mut().for_each(|w| *w /= sum);
    Ok(())
}

/// Apply `delta` at `site`. Scenario parameters change persistently; the
/// configuration's own state is shifted so iteration restarts from the
/// shocked point.
pub fn apply_perturbation(
    config: &WarfareConfiguration,
    scenario: &Scenario,
    site: &Site,
    delta: f64,
) -> Result<(WarfareConfiguration, Scenario)> {
    let mut config = config.clone();
    let mut scenario = scenario.clone();
    if delta == 0.0 {
        return Ok((config, scenario));
    }
    match site {
        Site::PolicyBudget => {
            scenario.coalition.budget_rule.base += delta;
            config.policy.budget = (config.policy.budget + delta).max(0.0);
        }
        Site::PolicyWeight(i) => {
            shift_weight(&mut config.policy.weights, *i, delta)?;
            shift_weight(&mut scenario.strategic.weights, *i, delta)?;
        }
        Site::Tech(field) => {
            let t = &mut scenario.tech;
            match field {
                TechField::BudgetMultiplier => t.budget_multiplier += delta,
                TechField::ContestSharpness => t.contest_sharpness += delta,
                TechField::ContextPayoffShift => t.context_payoff_shift += delta,
                TechField::CostScale => t.cost_scale += delta,
            }
            config.tech = t.clone();
        }
        Site::TacticalPair {
            operation,
            tactic_d,
            tactic_a,
        } => {
            let section = scenario
                .tactical
                .get_mut(operation)
                .ok_or_else(|| Error::InvalidSite(site.to_string()))?;
            let entry = section
                .payoffs
                .iter_mut()
                .rev()
                .find(|p| p.d == *tactic_d && p.a == *tactic_a)
                .ok_or_else(|| Error::InvalidSite(site.to_string()))?;
            entry.value.0 += delta;
        }
        Site::Transition {
            operation,
            state,
            action_d,
            action_a,
            next,
        } => {
            let template = scenario
                .operational
                .get_mut(operation)
                .ok_or_else(|| Error::InvalidSite(site.to_string()))?;
            let pos = |list: &[String], x: &str| list.iter().position(|y| y == x).unwrap_or(0);
            let (s, d, a) = (
                pos(&template.states, state),
                pos(&template.actions_d, action_d),
                pos(&template.actions_a, action_a),
            );
            let mut row = template.transition_table()[s][d][a].clone();
            let to = pos(&template.states, next);
            row[to] = (row[to] + delta).max(0.0);
            let sum: f64 = row.iter().sum();
            if sum <= 0.0 {
                return Err(Error::validation(
                    format!("operational.{operation}.transition"),
                    "perturbation leaves an empty row",
                ));
            }
            let dist: BTreeMap<String, f64> = template
                .states
                .iter()
                .zip(&row)
                .filter(|(_, p)| **p > 0.0)
                .map(|(name, p)| (name.clone(), p / sum))
                .collect();
            template.transitions.push(TransitionRow {
                from: state.clone(),
                d: action_d.clone(),
                a: action_a.clone(),
                to: dist,
            });
        }
    }
    scenario.validate()?;
    Ok((config, scenario))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub site: String,
    pub delta: f64,
    /// Signed change of each echelon's payoffs after re-convergence.
    pub deltas: BTreeMap<Echelon, EchelonPayoff>,
    pub iterations: usize,
    pub trace: ConvergenceTrace,
    pub config: WarfareConfiguration,
}

pub fn payoff_deltas(
    before: &WarfareConfiguration,
    after: &WarfareConfiguration,
) -> BTreeMap<Echelon, EchelonPayoff> {
    Echelon::ALL
        .iter()
        .map(|&e| {
            let (b, a) = (before.payoff(e), after.payoff(e));
            (
                e,
                EchelonPayoff {
                    defender: a.defender - b.defender,
                    attacker: a.attacker - b.attacker,
                },
            )
        })
        .collect()
}

/// Perturb a converged configuration and iterate back to a fixed point of
/// the perturbed scenario.
pub fn perturb_and_propagate(
    config: &WarfareConfiguration,
    scenario: &Scenario,
    site: &str,
    delta: f64,
    settings: IterationSettings,
) -> Result<PerturbationReport> {
    let parsed = Site::parse(site, scenario)?;
    let (shocked, perturbed) = apply_perturbation(config, scenario, &parsed, delta)?;
    let (after, trace) = iterate_from(shocked, &perturbed, settings)?;
    Ok(PerturbationReport {
        site: site.to_string(),
        delta,
        deltas: payoff_deltas(config, &after),
        iterations: trace.iterations.len(),
        trace,
        config: after,
    })
}
