//! Cross-echelon coupling: the sweep operator, its fixed point, shocks and
//! verdicts.

mod assess;
mod config;
mod fixed_point;
mod perturb;
mod sweep;
mod tech;

pub use assess::{assess, threshold_checks, Assessment, DominanceCheck, ShockOutcome, ThresholdCheck};
pub use config::{
    sup_distance, Coordinates, EchelonPayoff, Encounter, Feedback, OperationEntry, WarfareConfiguration,
};
pub use fixed_point::{
    check_hylomorphism, find_warfare_equilibrium, hylomorphism_residuals, iterate_from, ConvergenceTrace,
    HyloPair, HyloResiduals, IterationRecord, IterationSettings,
};
pub use perturb::{apply_perturbation, payoff_deltas, perturb_and_propagate, PerturbationReport, Site, TechField};
pub use sweep::{
    bootstrap, fold_policy, initial_inputs, instantiate_operations, operation_spec, outcome_feedback, phi,
    snap_budget, solve_encounters, solve_instance, strategic_game, Instance, Instantiation,
};
pub use tech::TechLevel;
