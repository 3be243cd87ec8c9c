//! Scenario document model and its validation rules.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Echelon, Error, Result};
use crate::meta::TechLevel;
use crate::operational::MAX_HORIZON;
use crate::policy::{BudgetRule, CoalitionGame, MAX_PLAYERS};
use crate::strategic::{grid_units, ContestSpec, StrategicMethod};
use crate::tactical::{FeasibilityRule, RuleTable, TacticCatalog, IDLE};

pub const SCHEMA_VERSION: u32 = 1;

/// Matches every action in a transition row or rule entry.
pub const WILDCARD: &str = "*";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub coalition: CoalitionSection,
    pub strategic: StrategicSection,
    pub operational: BTreeMap<String, OperationTemplate>,
    #[serde(default)]
    pub tactical: BTreeMap<String, TacticalSection>,
    #[serde(default)]
    pub tech: TechLevel,
    #[serde(default)]
    pub thresholds: ThresholdSection,
    #[serde(default)]
    pub assessment: AssessmentSection,
    #[serde(default)]
    pub shocks: BTreeMap<String, Vec<ShockSpec>>,
    #[serde(default)]
    pub solver: SolverSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Synergy {
    pub members: Vec<String>,
    pub bonus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalitionValue {
    pub members: Vec<String>,
    pub value: f64,
}

/// Coalition values come either from singletons plus additive synergy
/// bonuses, or from an explicit table (unlisted coalitions are worth 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalitionSection {
    pub players: Vec<String>,
    pub defender: String,
    pub budget_rule: BudgetRule,
    #[serde(default)]
    pub singletons: BTreeMap<String, f64>,
    #[serde(default)]
    pub synergies: Vec<Synergy>,
    #[serde(default)]
    pub table: Vec<CoalitionValue>,
}

fn default_one() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategicSection {
    pub operations: Vec<String>,
    pub weights: Vec<f64>,
    pub budget_a: f64,
    pub grid_step: f64,
    pub contests: BTreeMap<String, ContestSpec>,
    /// Range used to normalize operational values into `[0, 1]`.
    pub payoff_range: [f64; 2],
    /// Rate at which weights move toward realized contribution shares.
    #[serde(default)]
    pub weight_rate: f64,
    /// Converts the strategic value into coalition-value units.
    #[serde(default = "default_one")]
    pub value_unit: f64,
    #[serde(default)]
    pub allow_slack: bool,
    /// Feed operational outcomes back into the contests.
    #[serde(default = "default_true")]
    pub feedback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRow {
    pub from: String,
    pub d: String,
    pub a: String,
    pub to: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationTemplate {
    #[serde(default)]
    pub stage_labels: Vec<String>,
    pub states: Vec<String>,
    pub initial_state: String,
    pub actions_d: Vec<String>,
    pub actions_a: Vec<String>,
    /// Resource cost per stage of each defender action (unlisted: free).
    #[serde(default)]
    pub action_costs: BTreeMap<String, f64>,
    pub horizon: usize,
    #[serde(default)]
    pub state_payoff: BTreeMap<String, f64>,
    #[serde(default)]
    pub context_payoff: f64,
    pub deception_index: String,
    #[serde(default)]
    pub general_sum: bool,
    /// Later rows override earlier ones; `*` matches any action.
    pub transitions: Vec<TransitionRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairPayoff {
    pub d: String,
    pub a: String,
    pub value: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleEntry {
    /// Operational actions (or `*`).
    pub d: String,
    pub a: String,
    pub rule: FeasibilityRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TacticalSection {
    pub tactics_d: Vec<String>,
    pub tactics_a: Vec<String>,
    pub payoffs: Vec<PairPayoff>,
    #[serde(default = "default_one")]
    pub step_discount: f64,
    #[serde(default)]
    pub idle_payoff_d: (f64, f64),
    #[serde(default)]
    pub idle_payoff_a: (f64, f64),
    #[serde(default)]
    pub rules: Vec<RuleEntry>,
    #[serde(default)]
    pub default_rule: Option<FeasibilityRule>,
}

fn default_winning() -> Vec<Echelon> {
    vec![Echelon::Policy]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    /// Minimum defender payoff per echelon (unlisted: no bound).
    #[serde(default)]
    pub theta_d: BTreeMap<Echelon, f64>,
    /// Maximum attacker payoff per echelon (unlisted: no bound).
    #[serde(default)]
    pub theta_a: BTreeMap<Echelon, f64>,
    #[serde(default = "default_winning")]
    pub winning_echelons: Vec<Echelon>,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        ThresholdSection {
            theta_d: BTreeMap::new(),
            theta_a: BTreeMap::new(),
            winning_echelons: default_winning(),
        }
    }
}

fn default_deviations() -> Vec<Echelon> {
    vec![Echelon::Strategic, Echelon::Operational, Echelon::Tactical]
}

fn default_stability() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentSection {
    /// Echelons whose attacker deviations are checked for dominance.
    #[serde(default = "default_deviations")]
    pub deviations: Vec<Echelon>,
    #[serde(default = "default_stability")]
    pub stability_tolerance: f64,
}

impl Default for AssessmentSection {
    fn default() -> Self {
        AssessmentSection {
            deviations: default_deviations(),
            stability_tolerance: default_stability(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockSpec {
    pub site: String,
    pub delta: f64,
}

fn default_damping() -> f64 {
    0.5
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_max_iter() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub strategic_method: StrategicMethod,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            damping: default_damping(),
            tolerance: default_tolerance(),
            max_iter: default_max_iter(),
            seed: 0,
            strategic_method: StrategicMethod::default(),
        }
    }
}

fn position(list: &[String], name: &str) -> Option<usize> {
    list.iter().position(|x| x == name)
}

fn unique(path: &str, list: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for item in list {
        if item.is_empty() || item == WILDCARD {
            return Err(Error::validation(path, format!("invalid identifier `{item}`")));
        }
        if !seen.insert(item) {
            return Err(Error::validation(path, format!("duplicate identifier `{item}`")));
        }
    }
    if list.is_empty() {
        return Err(Error::validation(path, "must be nonempty"));
    }
    Ok(())
}

fn finite(path: impl Into<String>, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(path, "must be finite"))
    }
}

fn matches(pattern: &str, name: &str) -> bool {
    pattern == WILDCARD || pattern == name
}

impl CoalitionSection {
    pub fn defender_index(&self) -> usize {
        position(&self.players, &self.defender).unwrap_or(0)
    }

    fn mask(&self, members: &[String]) -> u32 {
        members
            .iter()
            .filter_map(|m| position(&self.players, m))
            .fold(0, |acc, i| acc | (1 << i))
    }

    pub fn game(&self) -> Result<CoalitionGame> {
        let n = self.players.len();
        if !self.table.is_empty() {
            let mut values = vec![0.0; 1 << n];
            for entry in &self.table {
                values[self.mask(&entry.members) as usize] = entry.value;
            }
            return CoalitionGame::new(n, values);
        }
        let single: Vec<f64> = self
            .players
            .iter()
            .map(|p| self.singletons.get(p).copied().unwrap_or(0.0))
            .collect();
        let synergies: Vec<(u32, f64)> = self
            .synergies
            .iter()
            .map(|s| (self.mask(&s.members), s.bonus))
            .collect();
        CoalitionGame::from_fn(n, |m| {
            let base: f64 = (0..n).filter(|i| m & (1 << i) != 0).map(|i| single[i]).sum();
            let bonus: f64 = synergies
                .iter()
                .filter(|(s, _)| m & s == *s)
                .map(|(_, b)| b)
                .sum();
            base + bonus
        })
    }

    fn validate(&self) -> Result<()> {
        unique("coalition.players", &self.players)?;
        if self.players.len() > MAX_PLAYERS {
            return Err(Error::validation(
                "coalition.players",
                format!("at most {MAX_PLAYERS} players"),
            ));
        }
        if position(&self.players, &self.defender).is_none() {
            return Err(Error::validation(
                "coalition.defender",
                format!("unknown player `{}`", self.defender),
            ));
        }
        finite("coalition.budget_rule.base", self.budget_rule.base)?;
        finite("coalition.budget_rule.scale", self.budget_rule.scale)?;
        let check_members = |path: String, members: &[String]| -> Result<()> {
            for m in members {
                if position(&self.players, m).is_none() {
                    return Err(Error::validation(path.clone(), format!("unknown player `{m}`")));
                }
            }
            Ok(())
        };
        for (p, v) in &self.singletons {
            check_members(format!("coalition.singletons.{p}"), std::slice::from_ref(p))?;
            finite(format!("coalition.singletons.{p}"), *v)?;
        }
        for (i, s) in self.synergies.iter().enumerate() {
            check_members(format!("coalition.synergies[{i}]"), &s.members)?;
            finite(format!("coalition.synergies[{i}].bonus"), s.bonus)?;
        }
        for (i, e) in self.table.iter().enumerate() {
            check_members(format!("coalition.table[{i}]"), &e.members)?;
            finite(format!("coalition.table[{i}].value"), e.value)?;
        }
        if !self.table.is_empty() && (!self.singletons.is_empty() || !self.synergies.is_empty()) {
            return Err(Error::validation(
                "coalition.table",
                "an explicit table excludes singletons and synergies",
            ));
        }
        Ok(())
    }
}

impl OperationTemplate {
    pub fn cost(&self, action: &str) -> f64 {
        self.action_costs.get(action).copied().unwrap_or(0.0)
    }

    /// Dense `transition[s][d][a][s']` after applying wildcards in order.
    pub fn transition_table(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let (ns, nd, na) = (self.states.len(), self.actions_d.len(), self.actions_a.len());
        let mut t = vec![vec![vec![Vec::new(); na]; nd]; ns];
        for row in &self.transitions {
            let dist: Vec<f64> = self
                .states
                .iter()
                .map(|s| row.to.get(s).copied().unwrap_or(0.0))
                .collect();
            for (s, name_s) in self.states.iter().enumerate() {
                if row.from != *name_s && row.from != WILDCARD {
                    continue;
                }
                for (d, name_d) in self.actions_d.iter().enumerate() {
                    if !matches(&row.d, name_d) {
                        continue;
                    }
                    for (a, name_a) in self.actions_a.iter().enumerate() {
                        if matches(&row.a, name_a) {
                            t[s][d][a] = dist.clone();
                        }
                    }
                }
            }
        }
        t
    }

    fn validate(&self, op: &str) -> Result<()> {
        let path = |tail: &str| format!("operational.{op}.{tail}");
        unique(&path("states"), &self.states)?;
        unique(&path("actions_d"), &self.actions_d)?;
        unique(&path("actions_a"), &self.actions_a)?;
        if position(&self.states, &self.initial_state).is_none() {
            return Err(Error::validation(
                path("initial_state"),
                format!("unknown state `{}`", self.initial_state),
            ));
        }
        if self.horizon == 0 || self.horizon > MAX_HORIZON {
            return Err(Error::validation(
                path("horizon"),
                format!("must be in 1..={MAX_HORIZON}"),
            ));
        }
        if self.stage_labels.len() > self.horizon + 1 {
            return Err(Error::validation(path("stage_labels"), "more labels than stages"));
        }
        for (a, c) in &self.action_costs {
            if position(&self.actions_d, a).is_none() {
                return Err(Error::validation(
                    path("action_costs"),
                    format!("unknown defender action `{a}`"),
                ));
            }
            if !(c.is_finite() && *c >= 0.0) {
                return Err(Error::validation(path("action_costs"), "costs must be finite and >= 0"));
            }
        }
        for (s, v) in &self.state_payoff {
            if position(&self.states, s).is_none() {
                return Err(Error::validation(path("state_payoff"), format!("unknown state `{s}`")));
            }
            finite(path("state_payoff"), *v)?;
        }
        finite(path("context_payoff"), self.context_payoff)?;
        if self.deception_index.is_empty() {
            return Err(Error::validation(path("deception_index"), "must be nonempty"));
        }
        let tpath = path("transition");
        for row in &self.transitions {
            if row.from != WILDCARD && position(&self.states, &row.from).is_none() {
                return Err(Error::validation(&tpath, format!("unknown state `{}`", row.from)));
            }
            if row.d != WILDCARD && position(&self.actions_d, &row.d).is_none() {
                return Err(Error::validation(&tpath, format!("unknown defender action `{}`", row.d)));
            }
            if row.a != WILDCARD && position(&self.actions_a, &row.a).is_none() {
                return Err(Error::validation(&tpath, format!("unknown attacker action `{}`", row.a)));
            }
            for (to, p) in &row.to {
                if position(&self.states, to).is_none() {
                    return Err(Error::validation(&tpath, format!("unknown state `{to}`")));
                }
                if !(p.is_finite() && *p >= 0.0) {
                    return Err(Error::validation(&tpath, "probabilities must be finite and >= 0"));
                }
            }
            let sum: f64 = row.to.values().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::validation(
                    &tpath,
                    format!("row ({}, {}, {}) sums to {sum}, not 1", row.from, row.d, row.a),
                ));
            }
        }
        let table = self.transition_table();
        for (s, block) in table.iter().enumerate() {
            for (d, per_a) in block.iter().enumerate() {
                for (a, dist) in per_a.iter().enumerate() {
                    if dist.is_empty() {
                        return Err(Error::validation(
                            &tpath,
                            format!(
                                "no row covers ({}, {}, {})",
                                self.states[s], self.actions_d[d], self.actions_a[a]
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

impl TacticalSection {
    pub fn catalog(&self) -> Result<TacticCatalog> {
        let mut pair_payoff = BTreeMap::new();
        for p in &self.payoffs {
            pair_payoff.insert((p.d.clone(), p.a.clone()), p.value);
        }
        let catalog = TacticCatalog {
            tactics_d: self.tactics_d.clone(),
            tactics_a: self.tactics_a.clone(),
            pair_payoff,
            step_discount: self.step_discount,
            idle_payoff_d: self.idle_payoff_d,
            idle_payoff_a: self.idle_payoff_a,
        };
        catalog.validate()?;
        Ok(catalog)
    }

    /// Rules keyed by concrete operational action pair.
    pub fn rule_table(&self, template: &OperationTemplate) -> RuleTable {
        let mut table = RuleTable {
            rules: BTreeMap::new(),
            default: self.default_rule.clone().unwrap_or_else(FeasibilityRule::idle),
        };
        for entry in &self.rules {
            for d in &template.actions_d {
                if !matches(&entry.d, d) {
                    continue;
                }
                for a in &template.actions_a {
                    if matches(&entry.a, a) {
                        table.rules.insert((d.clone(), a.clone()), entry.rule.clone());
                    }
                }
            }
        }
        table
    }

    fn validate(&self, op: &str, template: &OperationTemplate) -> Result<()> {
        let path = |tail: &str| format!("tactical.{op}.{tail}");
        unique(&path("tactics_d"), &self.tactics_d)?;
        unique(&path("tactics_a"), &self.tactics_a)?;
        for p in &self.payoffs {
            if position(&self.tactics_d, &p.d).is_none() {
                return Err(Error::validation(path("payoffs"), format!("unknown tactic `{}`", p.d)));
            }
            if position(&self.tactics_a, &p.a).is_none() {
                return Err(Error::validation(path("payoffs"), format!("unknown tactic `{}`", p.a)));
            }
        }
        self.catalog().map_err(|e| match e {
            Error::Validation { path: p, rule } => {
                Error::validation(p.replacen("tactical", &format!("tactical.{op}"), 1), rule)
            }
            other => other,
        })?;
        let check_rule = |rpath: String, rule: &FeasibilityRule| -> Result<()> {
            rule.validate(&rpath)?;
            for t in &rule.allowed_d {
                if t != IDLE && position(&self.tactics_d, t).is_none() {
                    return Err(Error::validation(rpath.clone(), format!("unknown tactic `{t}`")));
                }
            }
            for t in &rule.allowed_a {
                if t != IDLE && position(&self.tactics_a, t).is_none() {
                    return Err(Error::validation(rpath.clone(), format!("unknown tactic `{t}`")));
                }
            }
            Ok(())
        };
        for (i, entry) in self.rules.iter().enumerate() {
            let rpath = path(&format!("rules[{i}]"));
            if entry.d != WILDCARD && position(&template.actions_d, &entry.d).is_none() {
                return Err(Error::validation(rpath, format!("unknown defender action `{}`", entry.d)));
            }
            if entry.a != WILDCARD && position(&template.actions_a, &entry.a).is_none() {
                return Err(Error::validation(rpath, format!("unknown attacker action `{}`", entry.a)));
            }
            check_rule(rpath, &entry.rule)?;
        }
        if let Some(rule) = &self.default_rule {
            check_rule(path("default_rule"), rule)?;
        }
        Ok(())
    }
}

impl Scenario {
    pub fn operation_index(&self, op: &str) -> Option<usize> {
        position(&self.strategic.operations, op)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::validation(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, found {}", self.schema_version),
            ));
        }
        if self.metadata.name.is_empty() {
            return Err(Error::validation("metadata.name", "must be nonempty"));
        }
        self.coalition.validate()?;
        self.validate_strategic()?;
        for op in self.operational.keys() {
            if self.operation_index(op).is_none() {
                return Err(Error::validation(
                    format!("operational.{op}"),
                    "template for an operation not in strategic.operations",
                ));
            }
        }
        for op in &self.strategic.operations {
            let template = self.operational.get(op).ok_or_else(|| {
                Error::validation(format!("operational.{op}"), "missing operational template")
            })?;
            template.validate(op)?;
        }
        for (op, section) in &self.tactical {
            let template = self.operational.get(op).ok_or_else(|| {
                Error::validation(format!("tactical.{op}"), "unknown operation")
            })?;
            section.validate(op, template)?;
        }
        self.tech.validate("tech")?;
        for (side, mask, pick) in [
            ("action_mask_d", &self.tech.action_mask_d, true),
            ("action_mask_a", &self.tech.action_mask_a, false),
        ] {
            for action in mask {
                let known = self.operational.values().any(|t| {
                    let list = if pick { &t.actions_d } else { &t.actions_a };
                    position(list, action).is_some()
                });
                if !known {
                    return Err(Error::validation(
                        format!("tech.{side}"),
                        format!("unknown action `{action}`"),
                    ));
                }
            }
        }
        self.validate_thresholds()?;
        let a = &self.assessment;
        if !(a.stability_tolerance > 0.0 && a.stability_tolerance.is_finite()) {
            return Err(Error::validation("assessment.stability_tolerance", "must be > 0"));
        }
        if a.deviations.iter().any(|e| {
            !matches!(e, Echelon::Strategic | Echelon::Operational | Echelon::Tactical)
        }) {
            return Err(Error::validation(
                "assessment.deviations",
                "deviations are declared for strategic, operational and tactical echelons only",
            ));
        }
        for (name, set) in &self.shocks {
            for (i, shock) in set.iter().enumerate() {
                let path = format!("shocks.{name}[{i}]");
                finite(format!("{path}.delta"), shock.delta)?;
                crate::meta::Site::parse(&shock.site, self)
                    .map_err(|_| Error::validation(format!("{path}.site"), format!("invalid site `{}`", shock.site)))?;
            }
        }
        let s = &self.solver;
        if !(s.damping > 0.0 && s.damping <= 1.0) {
            return Err(Error::validation("solver.damping", "must lie in (0, 1]"));
        }
        if !(s.tolerance > 0.0 && s.tolerance.is_finite()) {
            return Err(Error::validation("solver.tolerance", "must be > 0"));
        }
        if s.max_iter == 0 {
            return Err(Error::validation("solver.max_iter", "must be >= 1"));
        }
        if let StrategicMethod::FictitiousPlay { iterations: 0 } = s.strategic_method {
            return Err(Error::validation("solver.strategic_method", "iterations must be >= 1"));
        }
        Ok(())
    }

    fn validate_strategic(&self) -> Result<()> {
        let st = &self.strategic;
        unique("strategic.operations", &st.operations)?;
        if st.weights.len() != st.operations.len() {
            return Err(Error::validation("strategic.weights", "one weight per operation"));
        }
        crate::policy::check_simplex("strategic.weights", &st.weights)?;
        if !(st.grid_step > 0.0 && st.grid_step.is_finite()) {
            return Err(Error::validation("strategic.grid_step", "must be > 0"));
        }
        if !(st.budget_a >= 0.0 && st.budget_a.is_finite()) || grid_units(st.budget_a, st.grid_step).is_none() {
            return Err(Error::validation(
                "strategic.budget_a",
                "must be a nonnegative multiple of grid_step",
            ));
        }
        for op in &st.operations {
            let c = st
                .contests
                .get(op)
                .ok_or_else(|| Error::validation(format!("strategic.contests.{op}"), "missing contest"))?;
            if !(c.sharpness > 0.0 && c.sharpness.is_finite()) {
                return Err(Error::validation(format!("strategic.contests.{op}.sharpness"), "must be > 0"));
            }
        }
        if let Some(extra) = st.contests.keys().find(|k| self.operation_index(k).is_none()) {
            return Err(Error::validation(
                format!("strategic.contests.{extra}"),
                "unknown operation",
            ));
        }
        let [lo, hi] = st.payoff_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::validation("strategic.payoff_range", "need finite lo < hi"));
        }
        if !(0.0..=1.0).contains(&st.weight_rate) {
            return Err(Error::validation("strategic.weight_rate", "must lie in [0, 1]"));
        }
        if !(st.value_unit > 0.0 && st.value_unit.is_finite()) {
            return Err(Error::validation("strategic.value_unit", "must be > 0"));
        }
        Ok(())
    }

    fn validate_thresholds(&self) -> Result<()> {
        let t = &self.thresholds;
        if t.winning_echelons.is_empty() || !t.winning_echelons.contains(&Echelon::Policy) {
            return Err(Error::validation(
                "thresholds.winning_echelons",
                "must be nonempty and contain policy",
            ));
        }
        for (e, v) in t.theta_d.iter().chain(&t.theta_a) {
            if v.is_nan() {
                return Err(Error::validation(format!("thresholds.{e}"), "must not be NaN"));
            }
        }
        Ok(())
    }
}
