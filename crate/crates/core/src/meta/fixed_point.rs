//! Damped fixed-point search for the warfare equilibrium and the
//! round-trip consistency checks between echelons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Echelon, Result};
use crate::scenario::{serde_real, Scenario, SolverSettings};
use crate::strategic::solve_strategic;

use super::config::{sup_distance, Coordinates, EchelonPayoff, WarfareConfiguration};
use super::sweep::{
    bootstrap, fold_policy, instantiate_operations, operation_spec, outcome_feedback, phi,
    solve_instance, strategic_game, Instance,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationSettings {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl From<&SolverSettings> for IterationSettings {
    fn from(s: &SolverSettings) -> Self {
        IterationSettings {
            damping: s.damping,
            tolerance: s.tolerance,
            max_iter: s.max_iter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    #[serde(with = "serde_real")]
    pub residual: f64,
    pub payoffs: BTreeMap<Echelon, EchelonPayoff>,
}

/// Round-trip residuals for the four echelon pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyloResiduals {
    #[serde(with = "serde_real")]
    pub policy_strategic: f64,
    #[serde(with = "serde_real")]
    pub strategic_operational: f64,
    #[serde(with = "serde_real")]
    pub operational_tactical: f64,
    #[serde(with = "serde_real")]
    pub policy_tactical: f64,
}

impl HyloResiduals {
    pub fn max(&self) -> f64 {
        [
            self.policy_strategic,
            self.strategic_operational,
            self.operational_tactical,
            self.policy_tactical,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    #[serde(with = "serde_real")]
    pub final_residual: f64,
    /// Residuals at the returned configuration, when it passed the sweep
    /// residual test.
    pub hylomorphism: Option<HyloResiduals>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyloPair {
    PolicyStrategic,
    StrategicOperational,
    OperationalTactical,
    PolicyTactical,
}

fn policy_coordinates(c: &WarfareConfiguration) -> Coordinates {
    let mut out = Coordinates::new();
    for (i, w) in c.policy.weights.iter().enumerate() {
        out.insert(format!("weights.{i}"), *w);
    }
    out.insert("budget".into(), c.policy.budget);
    out.insert("share".into(), c.policy_share);
    out
}

fn feedback_coordinates(feedback: &BTreeMap<String, super::Feedback>) -> Coordinates {
    let mut out = Coordinates::new();
    for (op, f) in feedback {
        out.insert(format!("{op}.scale"), f.scale);
        out.insert(format!("{op}.share"), f.share);
    }
    out
}

/// Sup-norm distance between a configuration's state at the upper echelon
/// of `pair` and the state recovered by unfolding down and folding back.
pub fn check_hylomorphism(config: &WarfareConfiguration, scenario: &Scenario, pair: HyloPair) -> Result<f64> {
    let method = scenario.solver.strategic_method;
    match pair {
        HyloPair::PolicyStrategic => {
            let game = strategic_game(&config.policy, &config.feedback, scenario)?;
            let strat = solve_strategic(&game, method)?;
            let (policy, share) = fold_policy(&strat, &game, scenario)?;
            let mut back = config.clone();
            back.policy = policy;
            back.policy_share = share;
            Ok(sup_distance(&policy_coordinates(config), &policy_coordinates(&back)))
        }
        HyloPair::StrategicOperational => {
            let game = strategic_game(&config.policy, &config.feedback, scenario)?;
            let inst = instantiate_operations(&config.strategic, scenario)?;
            let (ops, _) = super::sweep::solve_instances(scenario, &inst.instances)?;
            let feedback = outcome_feedback(&ops, &config.strategic, &game, scenario);
            Ok(sup_distance(
                &feedback_coordinates(&config.feedback),
                &feedback_coordinates(&feedback),
            ))
        }
        HyloPair::OperationalTactical => {
            let mut back = config.clone();
            for (op, entry) in back.operational.iter_mut() {
                let spec = operation_spec(scenario, op, &entry.actions_d, &entry.actions_a)?;
                let (solved, _) = solve_instance(
                    scenario,
                    &Instance {
                        operation: op.clone(),
                        spec,
                    },
                )?;
                *entry = solved;
            }
            Ok(sup_distance(
                &config.operation_coordinates(),
                &back.operation_coordinates(),
            ))
        }
        HyloPair::PolicyTactical => {
            let swept = phi(config, scenario)?;
            Ok(sup_distance(&policy_coordinates(config), &policy_coordinates(&swept)))
        }
    }
}

pub fn hylomorphism_residuals(config: &WarfareConfiguration, scenario: &Scenario) -> Result<HyloResiduals> {
    Ok(HyloResiduals {
        policy_strategic: check_hylomorphism(config, scenario, HyloPair::PolicyStrategic)?,
        strategic_operational: check_hylomorphism(config, scenario, HyloPair::StrategicOperational)?,
        operational_tactical: check_hylomorphism(config, scenario, HyloPair::OperationalTactical)?,
        policy_tactical: check_hylomorphism(config, scenario, HyloPair::PolicyTactical)?,
    })
}

/// `x + η (y − x)` on the sweep inputs; the solved parts come from `next`.
fn damp(current: &WarfareConfiguration, next: WarfareConfiguration, eta: f64) -> WarfareConfiguration {
    let same_shape = sup_distance(&current.input_coordinates(), &next.input_coordinates()).is_finite();
    if !same_shape || eta >= 1.0 {
        return next;
    }
    let mix = |x: f64, y: f64| (1.0 - eta) * x + eta * y;
    let mut out = next;
    for (w, x) in out.policy.weights.iter_mut().zip(&current.policy.weights) {
        *w = mix(*x, *w);
    }
    let sum: f64 = out.policy.weights.iter().sum();
    out.policy.weights.iter_mut().for_each(|w| *w /= sum);
    out.policy.budget = mix(current.policy.budget, out.policy.budget);
    for (op, f) in out.feedback.iter_mut() {
        let old = current.feedback[op];
        f.scale = mix(old.scale, f.scale);
        f.share = mix(old.share, f.share);
    }
    out
}

/// Iterate `Φ` from `start` until the sweep residual and all round-trip
/// residuals drop to the tolerance. Non-convergence is reported in the
/// trace, not as an error.
pub fn iterate_from(
    start: WarfareConfiguration,
    scenario: &Scenario,
    settings: IterationSettings,
) -> Result<(WarfareConfiguration, ConvergenceTrace)> {
    let mut x = start;
    let mut trace = ConvergenceTrace {
        iterations: Vec::new(),
        converged: false,
        final_residual: f64::INFINITY,
        hylomorphism: None,
    };
    for _ in 0..settings.max_iter {
        let y = phi(&x, scenario)?;
        let residual = sup_distance(&x.coordinates(), &y.coordinates());
        trace.iterations.push(IterationRecord {
            residual,
            payoffs: y.payoffs.clone(),
        });
        trace.final_residual = residual;
        if residual <= settings.tolerance {
            let hylo = hylomorphism_residuals(&x, scenario)?;
            trace.hylomorphism = Some(hylo);
            if hylo.max() <= settings.tolerance {
                trace.converged = true;
                return Ok((x, trace));
            }
        }
        x = damp(&x, y, settings.damping);
    }
    Ok((x, trace))
}

pub fn find_warfare_equilibrium(
    scenario: &Scenario,
    settings: IterationSettings,
) -> Result<(WarfareConfiguration, ConvergenceTrace)> {
    iterate_from(bootstrap(scenario)?, scenario, settings)
}
