//! Stability, dominance and winning verdicts for a converged configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Echelon, Error, Result};
use crate::kernel::expected_payoff;
use crate::operational::{stage_matrices, StochasticGameSpec};
use crate::scenario::{serde_real, Scenario, ShockSpec};
use crate::strategic::normal_form;
use crate::tactical::sequence_game;

use super::config::{sup_distance, WarfareConfiguration};
use super::fixed_point::{iterate_from, ConvergenceTrace, IterationSettings};
use super::perturb::{apply_perturbation, Site};
use super::sweep::{operation_spec, phi, strategic_game};

/// Slack allowed when comparing payoffs produced by floating-point solves.
const COMPARE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockOutcome {
    pub site: String,
    pub delta: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm distance of the re-converged configuration from the original.
    #[serde(with = "serde_real")]
    pub distance: f64,
    pub recovered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceCheck {
    pub echelon: Echelon,
    pub location: String,
    pub defender: f64,
    /// Best attacker payoff over its deviations with the defender held fixed.
    pub attacker_best: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCheck {
    pub echelon: Echelon,
    pub defender: f64,
    #[serde(with = "serde_real")]
    pub theta_d: f64,
    pub attacker: f64,
    #[serde(with = "serde_real")]
    pub theta_a: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub stable: bool,
    pub dominant: bool,
    pub winning: bool,
    pub lose_battle_win_war: bool,
    pub shocks: Vec<ShockOutcome>,
    pub dominance: Vec<DominanceCheck>,
    pub thresholds: Vec<ThresholdCheck>,
}

fn check(echelon: Echelon, location: String, defender: f64, attacker_best: f64) -> DominanceCheck {
    DominanceCheck {
        echelon,
        location,
        defender,
        attacker_best,
        holds: defender >= attacker_best - COMPARE_TOL,
    }
}

/// Attacker's best-response value in a stochastic game when the defender
/// plays its stored policy.
fn attacker_best_response(spec: &StochasticGameSpec, policy_d: &crate::operational::StagePolicy) -> f64 {
    let ns = spec.states.len();
    let mut next_a = vec![0.0; ns];
    let zeros = vec![0.0; ns];
    for k in (0..spec.horizon).rev() {
        let mut cur = vec![0.0; ns];
        for (s, slot) in cur.iter_mut().enumerate() {
            let (_, ma) = stage_matrices(spec, s, &zeros, &next_a);
            let p = policy_d.0[k][s].weights();
            *slot = (0..spec.actions_a.len())
                .map(|a| ma.iter().zip(p).map(|(row, w)| w * row[a]).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
        }
        next_a = cur;
    }
    next_a[spec.initial_state]
}

fn dominance(config: &WarfareConfiguration, scenario: &Scenario) -> Result<Vec<DominanceCheck>> {
    let mut out = Vec::new();
    let scope = &scenario.assessment.deviations;
    if scope.contains(&Echelon::Strategic) {
        let game = strategic_game(&config.policy, &config.feedback, scenario)?;
        let (_, _, matrix) = normal_form(&game)?;
        let p = config.strategic.mix_d.weights();
        let best = (0..matrix.cols())
            .map(|j| 1.0 - (0..matrix.rows()).map(|i| p[i] * matrix.get(i, j)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(check(Echelon::Strategic, "allocation".into(), config.strategic.value_d, best));
    }
    if scope.contains(&Echelon::Operational) {
        for (op, entry) in &config.operational {
            let mut spec = operation_spec(scenario, op, &entry.actions_d, &entry.actions_a)?;
            spec.tactical_term = entry.tactical_term.clone();
            let best = attacker_best_response(&spec, &entry.solution.policy_d);
            out.push(check(
                Echelon::Operational,
                op.clone(),
                entry.solution.cumulative_value_d,
                best,
            ));
        }
    }
    if scope.contains(&Echelon::Tactical) {
        for e in &config.tactical {
            let section = &scenario.tactical[&e.operation];
            let game = sequence_game(&section.catalog()?, &e.outcome.sequences_d, &e.outcome.sequences_a)?;
            let p = e.outcome.mix_d.weights();
            let best = (0..game.cols())
                .map(|j| {
                    let q = crate::kernel::MixedStrategy::pure(game.cols(), j);
                    expected_payoff(game.payoff_a(), p, q.weights())
                })
                .fold(f64::NEG_INFINITY, f64::max);
            out.push(check(
                Echelon::Tactical,
                format!("{}.{}.{}", e.operation, e.action_d, e.action_a),
                e.outcome.value_d,
                best,
            ));
        }
    }
    Ok(out)
}

/// Threshold comparison at every winning echelon.
pub fn threshold_checks(config: &WarfareConfiguration, scenario: &Scenario) -> Vec<ThresholdCheck> {
    let t = &scenario.thresholds;
    t.winning_echelons
        .iter()
        .map(|&e| {
            let p = config.payoff(e);
            let theta_d = t.theta_d.get(&e).copied().unwrap_or(f64::NEG_INFINITY);
            let theta_a = t.theta_a.get(&e).copied().unwrap_or(f64::INFINITY);
            ThresholdCheck {
                echelon: e,
                defender: p.defender,
                theta_d,
                attacker: p.attacker,
                theta_a,
                holds: p.defender >= theta_d && p.attacker <= theta_a,
            }
        })
        .collect()
}

fn shock_outcome(
    config: &WarfareConfiguration,
    scenario: &Scenario,
    shock: &ShockSpec,
    settings: IterationSettings,
) -> Result<ShockOutcome> {
    let site = Site::parse(&shock.site, scenario)?;
    let (state, perturbed) = apply_perturbation(config, scenario, &site, shock.delta)?;
    // one sweep under the shock, then recovery under the original scenario
    let shocked = phi(&state, &perturbed)?;
    let (after, trace) = iterate_from(shocked, scenario, settings)?;
    let distance = sup_distance(&config.coordinates(), &after.coordinates());
    Ok(ShockOutcome {
        site: shock.site.clone(),
        delta: shock.delta,
        converged: trace.converged,
        iterations: trace.iterations.len(),
        distance,
        recovered: trace.converged && distance <= scenario.assessment.stability_tolerance,
    })
}

pub fn assess(
    config: &WarfareConfiguration,
    trace: &ConvergenceTrace,
    scenario: &Scenario,
    shocks: &[ShockSpec],
) -> Result<Assessment> {
    if !trace.converged {
        return Err(Error::NotConverged);
    }
    let settings = IterationSettings::from(&scenario.solver);
    let shocks = shocks
        .iter()
        .map(|s| shock_outcome(config, scenario, s, settings))
        .collect::<Result<Vec<_>>>()?;
    let dominance = dominance(config, scenario)?;
    let thresholds = threshold_checks(config, scenario);
    let winning = thresholds.iter().all(|c| c.holds);
    let lose_battle_win_war = winning
        && scenario
            .thresholds
            .theta_d
            .get(&Echelon::Tactical)
            .is_some_and(|theta| config.tactical.iter().any(|e| e.outcome.value_d < *theta));
    Ok(Assessment {
        stable: shocks.iter().all(|s| s.recovered),
        dominant: dominance.iter().all(|c| c.holds),
        winning,
        lose_battle_win_war,
        shocks,
        dominance,
        thresholds,
    })
}
