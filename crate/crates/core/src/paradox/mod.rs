//! Exactly solvable demonstrations of paradoxical outcomes: losing games
//! that win when mixed, and extra capacity that slows traffic down.

mod braess;
mod parrondo;

pub use braess::{
    braess_delta, wardrop_certificate, wardrop_equilibrium, BraessOutcome, Link, RouteFlow,
    RoutingNetwork, WardropCertificate, WardropEquilibrium, MAX_ROUTES,
};
pub use parrondo::{
    parrondo_analysis, parrondo_drift, parrondo_simulate, schedule_drift, schedule_simulate,
    stationary_distribution, DriftAnalysis, ParrondoGame, ParrondoSpec, Schedule, SimulationResult,
};
