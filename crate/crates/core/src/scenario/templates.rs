//! Skeleton scenarios for three conflict categories.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meta::TechLevel;
use crate::policy::BudgetRule;
use crate::strategic::ContestSpec;
use crate::tactical::{FeasibilityRule, Repetition};

use super::schema::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateCategory {
    /// Security game with a resource imbalance.
    Asymmetric,
    /// Zero-sum conflict with mirrored payoffs.
    Symmetric,
    /// Multi-stage game whose stakes rise with every stage.
    Escalatory,
}

impl FromStr for TemplateCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymmetric" => Ok(TemplateCategory::Asymmetric),
            "symmetric" => Ok(TemplateCategory::Symmetric),
            "escalatory" => Ok(TemplateCategory::Escalatory),
            other => Err(Error::UnknownCategory(other.to_string())),
        }
    }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn row(from: &str, d: &str, a: &str, to: &[(&str, f64)]) -> TransitionRow {
    TransitionRow {
        from: from.into(),
        d: d.into(),
        a: a.into(),
        to: to.iter().map(|(s, p)| (s.to_string(), *p)).collect(),
    }
}

fn two_state(costs: &[(&str, f64)]) -> OperationTemplate {
    OperationTemplate {
        stage_labels: Vec::new(),
        states: names(&["secure", "compromised"]),
        initial_state: "secure".into(),
        actions_d: names(&["monitor", "harden"]),
        actions_a: names(&["probe", "exploit"]),
        action_costs: costs.iter().map(|(a, c)| (a.to_string(), *c)).collect(),
        horizon: 2,
        state_payoff: [("secure".to_string(), 0.0), ("compromised".to_string(), -1.0)].into(),
        context_payoff: 0.0,
        deception_index: "honeypots".into(),
        general_sum: false,
        transitions: vec![
            row("*", "*", "*", &[("secure", 1.0)]),
            row("secure", "monitor", "exploit", &[("secure", 0.5), ("compromised", 0.5)]),
            row("secure", "harden", "exploit", &[("secure", 0.8), ("compromised", 0.2)]),
            row("compromised", "*", "*", &[("compromised", 1.0)]),
            row("compromised", "harden", "*", &[("secure", 0.5), ("compromised", 0.5)]),
        ],
    }
}

fn mirrored_tactics() -> TacticalSection {
    let payoff = |d: &str, a: &str, v: f64| PairPayoff {
        d: d.into(),
        a: a.into(),
        value: (v, -v),
    };
    TacticalSection {
        tactics_d: names(&["isolate", "deceive"]),
        tactics_a: names(&["phish", "pivot"]),
        payoffs: vec![
            payoff("isolate", "phish", 1.0),
            payoff("isolate", "pivot", -1.0),
            payoff("deceive", "phish", -0.5),
            payoff("deceive", "pivot", 1.5),
        ],
        step_discount: 1.0,
        idle_payoff_d: (0.0, 0.0),
        idle_payoff_a: (0.0, 0.0),
        rules: vec![RuleEntry {
            d: "*".into(),
            a: "*".into(),
            rule: FeasibilityRule {
                allowed_d: names(&["isolate", "deceive"]),
                allowed_a: names(&["phish", "pivot"]),
                max_len_d: 1,
                max_len_a: 1,
                repetition: Repetition::Allowed,
            },
        }],
        default_rule: None,
    }
}

fn skeleton(name: &str, description: &str, budget_d: f64, budget_a: f64) -> Scenario {
    let ops = names(&["perimeter", "core"]);
    Scenario {
        schema_version: SCHEMA_VERSION,
        metadata: Metadata {
            name: name.into(),
            description: description.into(),
        },
        coalition: CoalitionSection {
            players: names(&["defender"]),
            defender: "defender".into(),
            budget_rule: BudgetRule {
                base: budget_d,
                scale: 0.0,
            },
            singletons: BTreeMap::new(),
            synergies: Vec::new(),
            table: Vec::new(),
        },
        strategic: StrategicSection {
            operations: ops.clone(),
            weights: vec![0.5, 0.5],
            budget_a,
            grid_step: 1.0,
            contests: ops.iter().map(|o| (o.clone(), ContestSpec::lottery(1.0))).collect(),
            payoff_range: [-4.0, 4.0],
            weight_rate: 0.0,
            value_unit: 1.0,
            allow_slack: false,
            feedback: true,
        },
        operational: ops.iter().map(|o| (o.clone(), two_state(&[]))).collect(),
        tactical: BTreeMap::new(),
        tech: TechLevel::default(),
        thresholds: ThresholdSection::default(),
        assessment: AssessmentSection::default(),
        shocks: BTreeMap::new(),
        solver: SolverSettings::default(),
    }
}

pub fn instantiate_template(category: TemplateCategory) -> Scenario {
    match category {
        TemplateCategory::Asymmetric => {
            let mut s = skeleton(
                "asymmetric",
                "Security game: the defender holds fewer resources and pays for hardening.",
                2.0,
                4.0,
            );
            for t in s.operational.values_mut() {
                *t = two_state(&[("monitor", 0.0), ("harden", 0.5)]);
            }
            s
        }
        TemplateCategory::Symmetric => {
            let mut s = skeleton(
                "symmetric",
                "Zero-sum conflict: every tactical payoff is mirrored between the sides.",
                3.0,
                3.0,
            );
            for op in s.strategic.operations.clone() {
                s.tactical.insert(op, mirrored_tactics());
            }
            s
        }
        TemplateCategory::Escalatory => {
            let mut s = skeleton(
                "escalatory",
                "Staged campaign: each stage moves one rung up the escalation ladder.",
                3.0,
                3.0,
            );
            let states = ["foothold", "spread", "disrupt", "cascade"];
            let mut transitions: Vec<TransitionRow> = states
                .windows(2)
                .map(|w| row(w[0], "*", "*", &[(w[1], 1.0)]))
                .collect();
            transitions.push(row("cascade", "*", "*", &[("cascade", 1.0)]));
            let template = OperationTemplate {
                stage_labels: names(&["opening", "spread", "disruption", "cascade"]),
                states: names(&states),
                initial_state: "foothold".into(),
                actions_d: names(&["contain", "absorb"]),
                actions_a: names(&["press", "hold"]),
                action_costs: BTreeMap::new(),
                horizon: 3,
                state_payoff: states
                    .iter()
                    .enumerate()
                    .map(|(i, st)| (st.to_string(), i as f64))
                    .collect(),
                context_payoff: 0.0,
                deception_index: "canaries".into(),
                general_sum: false,
                transitions,
            };
            for t in s.operational.values_mut() {
                *t = template.clone();
            }
            s.strategic.payoff_range = [0.0, 8.0];
            s
        }
    }
}
