//! Scenario documents, templates, shipped fixtures and run reports.

mod report;
mod schema;
pub mod serde_real;
mod templates;

pub use report::{emit_report, parse_report, Report, ReportFormat, RunMetadata, Timing};
pub use schema::*;
pub use templates::{instantiate_template, TemplateCategory};

use crate::error::{Error, Result};

/// Parse and validate a scenario document.
pub fn parse_scenario(document: &str) -> Result<Scenario> {
    let scenario: Scenario = toml::from_str(document).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        let (line, column) = line_column(document, offset);
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

/// Canonical text form of a scenario.
pub fn emit_scenario(scenario: &Scenario) -> Result<String> {
    toml::to_string(scenario).map_err(|e| Error::Parse {
        line: 0,
        column: 0,
        message: e.to_string(),
    })
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Shipped scenario fixtures as `(name, document)`.
pub const FIXTURES: [(&str, &str); 6] = [
    ("redcyber", include_str!("../../scenarios/redcyber.toml")),
    ("redcyber_small", include_str!("../../scenarios/redcyber_small.toml")),
    ("decoy_sacrifice", include_str!("../../scenarios/decoy_sacrifice.toml")),
    ("degenerate", include_str!("../../scenarios/degenerate.toml")),
    ("minimal", include_str!("../../scenarios/minimal.toml")),
    ("strategic_test", include_str!("../../scenarios/strategic_test.toml")),
];

pub fn fixture(name: &str) -> Option<Scenario> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, doc)| parse_scenario(doc).expect("shipped fixtures validate"))
}

/// The staged RedCyber campaign.
pub fn redcyber_scenario() -> Scenario {
    fixture("redcyber").expect("redcyber fixture is embedded")
}
