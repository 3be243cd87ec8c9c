use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The five decision levels of the meta-game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Echelon {
    Policy,
    Strategic,
    Operational,
    Tactical,
    Technical,
}

impl Echelon {
    pub const ALL: [Echelon; 5] = [
        Echelon::Policy,
        Echelon::Strategic,
        Echelon::Operational,
        Echelon::Tactical,
        Echelon::Technical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Echelon::Policy => "policy",
            Echelon::Strategic => "strategic",
            Echelon::Operational => "operational",
            Echelon::Tactical => "tactical",
            Echelon::Technical => "technical",
        }
    }
}

impl fmt::Display for Echelon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("payoff entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("enumeration cap exceeded: {count} items (cap {cap})")]
    EnumerationCapExceeded { count: usize, cap: usize },
    #[error("degenerate game: no equilibrium recovered from {singular} singular supports")]
    DegenerateGame { singular: usize },
    #[error("coalition game has {0} players (at most 16 supported)")]
    TooManyPlayers(usize),
    #[error("infeasible allocation: {0}")]
    InfeasibleAllocation(String),
    #[error("combinatorial blowup: {count} allocations (limit {limit})")]
    CombinatorialBlowup { count: u128, limit: u128 },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("transition row {row} sums to {sum}, not 1")]
    NonStochasticRow { row: String, sum: f64 },
    #[error("unknown tactic `{0}`")]
    UnknownTactic(String),
    #[error("no tactical outcome for operational pair ({0}, {1})")]
    MissingPair(usize, usize),
    #[error("operation `{0}` has no feasible defender action under its allocation")]
    NoFeasibleAction(String),
    #[error("no operational solution for operation `{0}`")]
    MissingOperation(String),
    #[error("Markov chain is reducible or singular")]
    SingularChain,
    #[error("invalid routing network: {0}")]
    InvalidNetwork(String),
    #[error("configuration has not converged")]
    NotConverged,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error at {path}: {rule}")]
    Validation { path: String, rule: String },
    #[error("unknown template category `{0}`")]
    UnknownCategory(String),
    #[error("invalid perturbation site `{0}`")]
    InvalidSite(String),
    #[error("{echelon} echelon failed: {source}")]
    Echelon {
        echelon: Echelon,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn validation(path: impl Into<String>, rule: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            rule: rule.into(),
        }
    }

    pub(crate) fn at(self, echelon: Echelon) -> Self {
        match self {
            e @ Error::Echelon { .. } => e,
            other => Error::Echelon {
                echelon,
                source: Box::new(other),
            },
        }
    }

    /// The echelon named by an `Echelon` wrapper, if any.
    pub fn echelon(&self) -> Option<Echelon> {
        match self {
            Error::Echelon { echelon, .. } => Some(*echelon),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
