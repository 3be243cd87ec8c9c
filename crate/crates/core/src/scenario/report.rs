use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Echelon, Error, Result};
use crate::meta::{Assessment, ConvergenceTrace, HyloResiduals, WarfareConfiguration};

use super::SCHEMA_VERSION;

/// Wall-clock timings. Not serialized and ignored by equality so that
/// reports stay byte-identical across runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct Timing {
    pub elapsed_ms: f64,
}

impl PartialEq for Timing {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub version: String,
    #[serde(skip)]
    pub timing: Timing,
}

impl RunMetadata {
    pub fn new(seed: u64) -> Self {
        RunMetadata {
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timing: Timing::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub config: WarfareConfiguration,
    pub trace: ConvergenceTrace,
    pub hylomorphism: Option<HyloResiduals>,
    pub assessment: Option<Assessment>,
    pub metadata: RunMetadata,
}

impl Report {
    pub fn new(
        scenario: &str,
        config: WarfareConfiguration,
        trace: ConvergenceTrace,
        hylomorphism: Option<HyloResiduals>,
        metadata: RunMetadata,
    ) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            config,
            trace,
            hylomorphism,
            assessment: None,
            metadata,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    HumanText,
    Machine,
}

pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Machine => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::HumanText => human(report),
    }
}

pub fn parse_report(text: &str) -> Result<Report> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn human(r: &Report) -> String {
    let mut out = String::new();
    let c = &r.config;
    let _ = writeln!(out, "scenario: {}", r.scenario);
    let _ = writeln!(out, "\n{:<12} {:>14} {:>14}", "echelon", "defender", "attacker");
    for e in Echelon::ALL {
        let p = c.payoff(e);
        let _ = writeln!(out, "{:<12} {:>14.6} {:>14.6}", e.as_str(), p.defender, p.attacker);
    }
    let _ = writeln!(out, "\npolicy weights: {:?}", c.policy.weights);
    let _ = writeln!(out, "policy budget: {:.6}", c.policy.budget);
    let _ = writeln!(
        out,
        "strategic value: {:.6} (exploitability {:.2e})",
        c.strategic.value_d, c.strategic.exploitability
    );
    for (op, entry) in &c.operational {
        let f = c.feedback.get(op).copied().unwrap_or(crate::meta::Feedback::NEUTRAL);
        let _ = writeln!(
            out,
            "  {op}: cumulative {:.6}, outcome share {:.4}, actions {}x{}",
            entry.solution.cumulative_value_d,
            f.share,
            entry.actions_d.len(),
            entry.actions_a.len()
        );
    }
    for d in &c.diagnostics {
        let _ = writeln!(out, "  note: {d}");
    }
    let t = &r.trace;
    let _ = writeln!(
        out,
        "\nconverged={} after {} iterations, final residual {:e}",
        t.converged,
        t.iterations.len(),
        t.final_residual
    );
    if !t.converged {
        let tail: Vec<String> = t
            .iterations
            .iter()
            .rev()
            .take(5)
            .rev()
            .map(|i| format!("{:e}", i.residual))
            .collect();
        let _ = writeln!(out, "residual tail: {}", tail.join(", "));
    }
    if let Some(h) = &r.hylomorphism {
        let _ = writeln!(
            out,
            "round trips: P-S {:e}, S-O {:e}, O-T {:e}, P-T {:e}",
            h.policy_strategic, h.strategic_operational, h.operational_tactical, h.policy_tactical
        );
    }
    if let Some(a) = &r.assessment {
        let _ = writeln!(
            out,
            "\nstable={} dominant={} winning={} lose_battle_win_war={}",
            a.stable, a.dominant, a.winning, a.lose_battle_win_war
        );
        for s in &a.shocks {
            let _ = writeln!(
                out,
                "  shock {} {:+}: recovered={} distance {:e}",
                s.site, s.delta, s.recovered, s.distance
            );
        }
        for d in &a.dominance {
            let _ = writeln!(
                out,
                "  {} {}: defender {:.6} vs attacker best {:.6}",
                d.echelon, d.location, d.defender, d.attacker_best
            );
        }
    }
    out
}
