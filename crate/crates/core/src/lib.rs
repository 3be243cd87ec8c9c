//! Solvers for a five-echelon attacker/defender meta-game: coalition
//! policy, Blotto allocation, stochastic operations, tactical sequence games
//! and the technology parameters that tie them together, plus the damped
//! fixed-point search that couples them and two paradox reproductions.

pub mod error;
pub mod kernel;
pub mod meta;
pub mod operational;
pub mod paradox;
pub mod policy;
pub mod scenario;
pub mod strategic;
pub mod tactical;

pub use error::{Echelon, Error, Result};
pub use kernel::{BimatrixGame, EquilibriumProfile, MatrixGame, MixedStrategy};
pub use meta::{ConvergenceTrace, TechLevel, WarfareConfiguration};
pub use scenario::{parse_scenario, Report, Scenario};
