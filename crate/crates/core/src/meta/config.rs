use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Echelon;
use crate::operational::OperationalSolution;
use crate::policy::PolicyOutcome;
use crate::strategic::StrategicEquilibrium;
use crate::tactical::TacticalOutcome;

use super::TechLevel;

/// Operational outcome fed back into one operation's contest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feedback {
    /// Normalized operational value `f_λ` in `[0, 1]`.
    pub share: f64,
    /// Multiplier applied to the contest so that the contest share expected
    /// under the equilibrium mixes becomes `share`.
    pub scale: f64,
}

impl Feedback {
    pub const NEUTRAL: Feedback = Feedback {
        share: 0.5,
        scale: 1.0,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationEntry {
    pub actions_d: Vec<String>,
    pub actions_a: Vec<String>,
    /// Tactical term `(U_d^T, U_a^T)` per action pair that the solve used.
    pub tactical_term: Vec<Vec<(f64, f64)>>,
    pub solution: OperationalSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encounter {
    pub operation: String,
    pub action_d: String,
    pub action_a: String,
    pub outcome: TacticalOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchelonPayoff {
    pub defender: f64,
    pub attacker: f64,
}

/// Cross-echelon state `E = (E_policy, E_strategic, E_operational,
/// E_tactical, E_technical)` plus the feedback table that couples the
/// operational and strategic levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarfareConfiguration {
    pub policy: PolicyOutcome,
    /// Defender's Shapley share in the coalition game behind `policy`.
    pub policy_share: f64,
    pub strategic: StrategicEquilibrium,
    pub feedback: BTreeMap<String, Feedback>,
    pub operational: BTreeMap<String, OperationEntry>,
    pub tactical: Vec<Encounter>,
    pub tech: TechLevel,
    pub payoffs: BTreeMap<Echelon, EchelonPayoff>,
    /// Operations dropped during instantiation, with the reason.
    pub diagnostics: Vec<String>,
}

/// Flat keyed view of every numeric coordinate of a configuration.
pub type Coordinates = BTreeMap<String, f64>;

fn push_all(out: &mut Coordinates, prefix: &str, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        out.insert(format!("{prefix}.{i}"), *v);
    }
}

impl WarfareConfiguration {
    /// Coordinates that drive the next sweep: weights, budget and feedback.
    pub fn input_coordinates(&self) -> Coordinates {
        let mut out = Coordinates::new();
        self.visit_inputs(&mut out);
        out
    }

    fn visit_inputs(&self, out: &mut Coordinates) {
        push_all(out, "policy.weights", &self.policy.weights);
        out.insert("policy.budget".into(), self.policy.budget);
        for (op, f) in &self.feedback {
            out.insert(format!("feedback.{op}.scale"), f.scale);
            out.insert(format!("feedback.{op}.share"), f.share);
        }
    }

    pub fn coordinates(&self) -> Coordinates {
        let mut out = Coordinates::new();
        self.visit_inputs(&mut out);
        out.insert("policy.share".into(), self.policy_share);
        let s = &self.strategic;
        push_all(&mut out, "strategic.mix_d", s.mix_d.weights());
        push_all(&mut out, "strategic.mix_a", s.mix_a.weights());
        out.insert("strategic.value_d".into(), s.value_d);
        for (op, entry) in &self.operational {
            self.visit_operation(&mut out, op, entry);
        }
        for e in &self.tactical {
            let key = format!("tactical.{}.{}.{}", e.operation, e.action_d, e.action_a);
            out.insert(format!("{key}.value_d"), e.outcome.value_d);
            out.insert(format!("{key}.value_a"), e.outcome.value_a);
            push_all(&mut out, &format!("{key}.mix_d"), e.outcome.mix_d.weights());
            push_all(&mut out, &format!("{key}.mix_a"), e.outcome.mix_a.weights());
        }
        for (echelon, p) in &self.payoffs {
            out.insert(format!("payoff.{echelon}.defender"), p.defender);
            out.insert(format!("payoff.{echelon}.attacker"), p.attacker);
        }
        out
    }

    pub(crate) fn operation_coordinates(&self) -> Coordinates {
        let mut out = Coordinates::new();
        for (op, entry) in &self.operational {
            self.visit_operation(&mut out, op, entry);
        }
        out
    }

    fn visit_operation(&self, out: &mut Coordinates, op: &str, entry: &OperationEntry) {
        let sol = &entry.solution;
        for (k, layer) in sol.value.iter().enumerate() {
            push_all(out, &format!("operational.{op}.value.{k}"), layer);
        }
        for (k, layer) in sol.policy_d.0.iter().enumerate() {
            for (s, mix) in layer.iter().enumerate() {
                push_all(out, &format!("operational.{op}.policy_d.{k}.{s}"), mix.weights());
            }
        }
        for (k, layer) in sol.policy_a.0.iter().enumerate() {
            for (s, mix) in layer.iter().enumerate() {
                push_all(out, &format!("operational.{op}.policy_a.{k}.{s}"), mix.weights());
            }
        }
        for (d, row) in entry.tactical_term.iter().enumerate() {
            for (a, (ud, ua)) in row.iter().enumerate() {
                out.insert(format!("operational.{op}.term.{d}.{a}.d"), *ud);
                out.insert(format!("operational.{op}.term.{d}.{a}.a"), *ua);
            }
        }
    }

    pub fn payoff(&self, echelon: Echelon) -> EchelonPayoff {
        self.payoffs.get(&echelon).copied().unwrap_or(EchelonPayoff {
            defender: 0.0,
            attacker: 0.0,
        })
    }
}

/// Sup-norm distance between two coordinate sets; infinite when their keys
/// differ (a structural change).
pub fn sup_distance(a: &Coordinates, b: &Coordinates) -> f64 {
    if a.len() != b.len() || a.keys().zip(b.keys()).any(|(x, y)| x != y) {
        return f64::INFINITY;
    }
    a.values()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
