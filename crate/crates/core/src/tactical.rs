//! Per-encounter tactic-sequence games.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    solve_bimatrix, BimatrixGame, EquilibriumSelectionRule, MixedStrategy, DEFAULT_ENUMERATION_CAP,
};

/// Identifier of the tactic every catalog implicitly contains.
pub const IDLE: &str = "idle";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TacticCatalog {
    pub tactics_d: Vec<String>,
    pub tactics_a: Vec<String>,
    /// `pair_payoff[(t_d, t_a)] = (u_d, u_a)`; must cover the whole product.
    pub pair_payoff: BTreeMap<(String, String), (f64, f64)>,
    pub step_discount: f64,
    /// Payoff when the defender idles against an active attacker tactic.
    pub idle_payoff_d: (f64, f64),
    /// Payoff when the attacker idles against an active defender tactic.
    pub idle_payoff_a: (f64, f64),
}

impl TacticCatalog {
    pub fn new(
        tactics_d: Vec<String>,
        tactics_a: Vec<String>,
        pair_payoff: BTreeMap<(String, String), (f64, f64)>,
    ) -> Result<Self> {
        let c = TacticCatalog {
            tactics_d,
            tactics_a,
            pair_payoff,
            step_discount: 1.0,
            idle_payoff_d: (0.0, 0.0),
            idle_payoff_a: (0.0, 0.0),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_discount > 0.0 && self.step_discount <= 1.0) {
            return Err(Error::validation("tactical.step_discount", "must lie in (0, 1]"));
        }
        for t in self.tactics_d.iter().chain(&self.tactics_a) {
            if t == IDLE {
                return Err(Error::validation("tactical.tactics", "`idle` is reserved"));
            }
        }
        for td in &self.tactics_d {
            for ta in &self.tactics_a {
                match self.pair_payoff.get(&(td.clone(), ta.clone())) {
                    None => {
                        return Err(Error::validation(
                            format!("tactical.pair_payoff.{td}.{ta}"),
                            "pair payoff must be total on the tactic product",
                        ))
                    }
                    Some((d, a)) if !d.is_finite() || !a.is_finite() => {
                        return Err(Error::validation(
                            format!("tactical.pair_payoff.{td}.{ta}"),
                            "payoffs must be finite",
                        ))
                    }
                    Some(_) => {}
                }
            }
        }
        if self.pair_payoff.len() != self.tactics_d.len() * self.tactics_a.len() {
            return Err(Error::validation(
                "tactical.pair_payoff",
                "entries reference tactics outside the catalog",
            ));
        }
        let idle_ok = [self.idle_payoff_d, self.idle_payoff_a]
            .iter()
            .all(|(d, a)| d.is_finite() && a.is_finite());
        if !idle_ok {
            return Err(Error::validation("tactical.idle_payoff", "payoffs must be finite"));
        }
        Ok(())
    }

    fn step_payoff(&self, td: &str, ta: &str) -> Result<(f64, f64)> {
        let known_d = td == IDLE || self.tactics_d.iter().any(|t| t == td);
        let known_a = ta == IDLE || self.tactics_a.iter().any(|t| t == ta);
        if !known_d {
            return Err(Error::UnknownTactic(td.to_string()));
        }
        if !known_a {
            return Err(Error::UnknownTactic(ta.to_string()));
        }
        Ok(match (td == IDLE, ta == IDLE) {
            (true, true) => (0.0, 0.0),
            (true, false) => self.idle_payoff_d,
            (false, true) => self.idle_payoff_a,
            (false, false) => self.pair_payoff[&(td.to_string(), ta.to_string())],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Repetition {
    #[default]
    Allowed,
    Forbidden,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityRule {
    pub allowed_d: Vec<String>,
    pub allowed_a: Vec<String>,
    pub max_len_d: usize,
    pub max_len_a: usize,
    #[serde(default)]
    pub repetition: Repetition,
}

impl FeasibilityRule {
    /// Both sides can only idle for one step.
    pub fn idle() -> Self {
        FeasibilityRule {
            allowed_d: vec![IDLE.into()],
            allowed_a: vec![IDLE.into()],
            max_len_d: 1,
            max_len_a: 1,
            repetition: Repetition::Allowed,
        }
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if self.max_len_d == 0 || self.max_len_a == 0 {
            return Err(Error::validation(path, "max lengths must be at least 1"));
        }
        if self.allowed_d.is_empty() || self.allowed_a.is_empty() {
            return Err(Error::validation(path, "allowed tactic sets must be nonempty"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Defender,
    Attacker,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TacticSequence(pub Vec<String>);

impl TacticSequence {
    pub fn steps(&self) -> &[String] {
        &self.0
    }
}

impl std::fmt::Display for TacticSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.0.join(","))
    }
}

/// Closed-form count of sequences of length `1..=max_len` over `n` symbols.
pub fn sequence_count(n: usize, max_len: usize, repetition: Repetition) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for l in 0..max_len {
        let factor = match repetition {
            Repetition::Allowed => n as u128,
            Repetition::Forbidden => (n as u128).saturating_sub(l as u128),
        };
        term = term.saturating_mul(factor);
        if term == 0 {
            break;
        }
        total = total.saturating_add(term);
    }
    total
}

/// All feasible sequences for one side, shortest first and lexicographic
/// (by position in the allowed set) within a length.
pub fn enumerate_sequences(rule: &FeasibilityRule, side: Side) -> Result<Vec<TacticSequence>> {
    let (allowed, max_len) = match side {
        Side::Defender => (&rule.allowed_d, rule.max_len_d),
        Side::Attacker => (&rule.allowed_a, rule.max_len_a),
    };
    let count = sequence_count(allowed.len(), max_len, rule.repetition);
    if count > DEFAULT_ENUMERATION_CAP as u128 {
        return Err(Error::EnumerationCapExceeded {
            count: usize::try_from(count).unwrap_or(usize::MAX),
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for prefix in &layer {
            for i in 0..allowed.len() {
                if rule.repetition == Repetition::Forbidden && prefix.contains(&i) {
                    continue;
                }
                let mut seq = prefix.clone();
                seq.push(i);
                next.push(seq);
            }
        }
        out.extend(
            next.iter()
                .map(|ix| TacticSequence(ix.iter().map(|&i| allowed[i].clone()).collect())),
        );
        layer = next;
    }
    Ok(out)
}

/// Discounted stepwise payoff; the shorter sequence is padded with idle.
pub fn sequence_payoff(
    catalog: &TacticCatalog,
    xi_d: &TacticSequence,
    xi_a: &TacticSequence,
) -> Result<(f64, f64)> {
    let len = xi_d.0.len().max(xi_a.0.len());
    let (mut ud, mut ua) = (0.0, 0.0);
    let mut weight = 1.0;
    for i in 0..len {
        let td = xi_d.0.get(i).map_or(IDLE, String::as_str);
        let ta = xi_a.0.get(i).map_or(IDLE, String::as_str);
        let (d, a) = catalog.step_payoff(td, ta)?;
        ud += weight * d;
        ua += weight * a;
        weight *= catalog.step_discount;
    }
    Ok((ud, ua))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TacticalOutcome {
    /// Representative pure pair: first sequence in each support.
    pub xi_d: TacticSequence,
    pub xi_a: TacticSequence,
    pub value_d: f64,
    pub value_a: f64,
    pub epsilon: f64,
    pub sequences_d: Vec<TacticSequence>,
    pub sequences_a: Vec<TacticSequence>,
    pub mix_d: MixedStrategy,
    pub mix_a: MixedStrategy,
}

/// Induced bimatrix over sequence pairs.
pub fn sequence_game(
    catalog: &TacticCatalog,
    seq_d: &[TacticSequence],
    seq_a: &[TacticSequence],
) -> Result<BimatrixGame> {
    let mut pd = vec![vec![0.0; seq_a.len()]; seq_d.len()];
    let mut pa = pd.clone();
    for (i, xd) in seq_d.iter().enumerate() {
        for (j, xa) in seq_a.iter().enumerate() {
            let (d, a) = sequence_payoff(catalog, xd, xa)?;
            pd[i][j] = d;
            pa[i][j] = a;
        }
    }
    BimatrixGame::new(pd, pa)
}

pub fn solve_tactical(catalog: &TacticCatalog, rule: &FeasibilityRule) -> Result<TacticalOutcome> {
    let seq_d = enumerate_sequences(rule, Side::Defender)?;
    let seq_a = enumerate_sequences(rule, Side::Attacker)?;
    let game = sequence_game(catalog, &seq_d, &seq_a)?;
    let eq = solve_bimatrix(&game, EquilibriumSelectionRule::default())?;
    let p = eq.profile;
    Ok(TacticalOutcome {
        xi_d: seq_d[eq.support_d[0]].clone(),
        xi_a: seq_a[eq.support_a[0]].clone(),
        value_d: p.value_d,
        value_a: p.value_a,
        epsilon: p.epsilon,
        sequences_d: seq_d,
        sequences_a: seq_a,
        mix_d: p.strategy_d,
        mix_a: p.strategy_a,
    })
}

/// Feasibility rules keyed by operational action pair, with a fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTable {
    pub rules: BTreeMap<(String, String), FeasibilityRule>,
    pub default: FeasibilityRule,
}

impl Default for RuleTable {
    fn default() -> Self {
        RuleTable {
            rules: BTreeMap::new(),
            default: FeasibilityRule::idle(),
        }
    }
}

impl RuleTable {
    pub fn rule(&self, a_d: &str, a_a: &str) -> &FeasibilityRule {
        self.rules
            .get(&(a_d.to_string(), a_a.to_string()))
            .unwrap_or(&self.default)
    }
}

/// Feasible sequence sets `(Ξ_d, Ξ_a)` for an operational action pair.
pub fn feasible_sequences(
    table: &RuleTable,
    a_d: &str,
    a_a: &str,
) -> Result<(Vec<TacticSequence>, Vec<TacticSequence>)> {
    let rule = table.rule(a_d, a_a);
    Ok((
        enumerate_sequences(rule, Side::Defender)?,
        enumerate_sequences(rule, Side::Attacker)?,
    ))
}

/// Tactical term table `[a_d][a_a] = (U_d^T, U_a^T)` for the operational game.
pub fn tactical_term_table(
    outcomes: &BTreeMap<(usize, usize), TacticalOutcome>,
    n_d: usize,
    n_a: usize,
) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut table = vec![vec![(0.0, 0.0); n_a]; n_d];
    for (d, row) in table.iter_mut().enumerate() {
        for (a, cell) in row.iter_mut().enumerate() {
            let o = outcomes.get(&(d, a)).ok_or(Error::MissingPair(d, a))?;
            *cell = (o.value_d, o.value_a);
        }
    }
    Ok(table)
}
