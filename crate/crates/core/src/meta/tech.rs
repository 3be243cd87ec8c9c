use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Technology level θ: numeric levers applied across every echelon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TechLevel {
    /// Scales the policy budget.
    pub budget_multiplier: f64,
    /// Multiplies every lottery contest exponent.
    pub contest_sharpness: f64,
    /// Added to each operation's context payoff `u_d^O(λ, θ)`.
    pub context_payoff_shift: f64,
    /// Multiplies defender operational action costs.
    pub cost_scale: f64,
    /// Operational defender actions removed at this technology level.
    pub action_mask_d: Vec<String>,
    /// Operational attacker actions removed at this technology level.
    pub action_mask_a: Vec<String>,
}

impl Default for TechLevel {
    fn default() -> Self {
        TechLevel {
            budget_multiplier: 1.0,
            contest_sharpness: 1.0,
            context_payoff_shift: 0.0,
            cost_scale: 1.0,
            action_mask_d: Vec::new(),
            action_mask_a: Vec::new(),
        }
    }
}

impl TechLevel {
    pub fn validate(&self, path: &str) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(format!("{path}.{name}"), "must be finite and > 0"))
            }
        };
        positive("budget_multiplier", self.budget_multiplier)?;
        positive("contest_sharpness", self.contest_sharpness)?;
        positive("cost_scale", self.cost_scale)?;
        if !self.context_payoff_shift.is_finite() {
            return Err(Error::validation(
                format!("{path}.context_payoff_shift"),
                "must be finite",
            ));
        }
        Ok(())
    }
}
