use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use echelon_core::meta::{
    assess as assess_config, find_warfare_equilibrium, operation_spec, perturb_and_propagate, IterationSettings,
};
use echelon_core::operational::{simulate as simulate_operation, Trajectory};
use echelon_core::paradox::{braess_delta, parrondo_drift, parrondo_simulate, ParrondoGame, ParrondoSpec, RoutingNetwork};
use echelon_core::scenario::{
    emit_report, emit_scenario, instantiate_template, parse_scenario, Report, ReportFormat, RunMetadata,
    TemplateCategory,
};
use echelon_core::{ConvergenceTrace, Error, Scenario, WarfareConfiguration};

use crate::OUTPUT_DIR_ENV;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. }
            | Error::Validation { .. }
            | Error::UnknownCategory(_)
            | Error::InvalidSite(_)
            | Error::InvalidNetwork(_)
            | Error::NonStochasticRow { .. }
            | Error::UnknownTactic(_) => 1,
            Error::Echelon { .. }
            | Error::EnumerationCapExceeded { .. }
            | Error::CombinatorialBlowup { .. }
            | Error::DegenerateGame { .. }
            | Error::NotConverged
            | Error::SingularChain => 2,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn load(file: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(file).map_err(|e| Failure::validation(format!("{}: {e}", file.display())))?;
    parse_scenario(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", file.display(), f.message);
        f
    })
}

fn out_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_out(path: &Path, text: &str) -> Outcome {
    let path = out_path(path);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Failure::internal(format!("{}: {e}", parent.display())))?;
    }
    fs::write(&path, text).map_err(|e| Failure::internal(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure::internal(e.to_string()))
}

fn not_converged(trace: &ConvergenceTrace) -> Failure {
    Failure {
        code: 2,
        message: format!(
            "no warfare equilibrium after {} iterations (final residual {:e})",
            trace.iterations.len(),
            trace.final_residual
        ),
    }
}

fn settings(scenario: &Scenario) -> IterationSettings {
    IterationSettings::from(&scenario.solver)
}

fn equilibrium(scenario: &Scenario) -> Result<(WarfareConfiguration, ConvergenceTrace), Failure> {
    let start = Instant::now();
    let found = find_warfare_equilibrium(scenario, settings(scenario))?;
    eprintln!("solved in {:.3}s", start.elapsed().as_secs_f64());
    Ok(found)
}

pub fn validate(file: &Path) -> Outcome {
    let s = load(file)?;
    println!(
        "{}: valid ({} operations, {} players)",
        s.metadata.name,
        s.strategic.operations.len(),
        s.coalition.players.len()
    );
    Ok(())
}

pub fn solve(file: &Path, eta: Option<f64>, tol: Option<f64>, max_iter: Option<usize>, out: Option<&Path>) -> Outcome {
    let mut scenario = load(file)?;
    if let Some(eta) = eta {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Failure::validation("--eta must lie in (0, 1]"));
        }
        scenario.solver.damping = eta;
    }
    if let Some(tol) = tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::validation("--tol must be positive"));
        }
        scenario.solver.tolerance = tol;
    }
    if let Some(n) = max_iter {
        scenario.solver.max_iter = n;
    }
    let (config, trace) = equilibrium(&scenario)?;
    let converged = trace.converged;
    let report = Report::new(
        &scenario.metadata.name,
        config,
        trace.clone(),
        trace.hylomorphism,
        RunMetadata::new(scenario.solver.seed),
    );
    print!("{}", emit_report(&report, ReportFormat::HumanText));
    if let Some(path) = out {
        write_out(path, &emit_report(&report, ReportFormat::Machine))?;
    }
    if converged {
        Ok(())
    } else {
        Err(not_converged(&trace))
    }
}

#[derive(Serialize)]
struct OperationRuns {
    operation: String,
    mean_total_d: f64,
    trajectories: Vec<Trajectory>,
}

pub fn simulate(file: &Path, seed: u64, trajectories: u64) -> Outcome {
    let scenario = load(file)?;
    let (config, trace) = equilibrium(&scenario)?;
    if !trace.converged {
        return Err(not_converged(&trace));
    }
    let mut runs = Vec::new();
    for (op, entry) in &config.operational {
        let mut spec = operation_spec(&scenario, op, &entry.actions_d, &entry.actions_a)?;
        spec.tactical_term = entry.tactical_term.clone();
        // collect preserves seed order regardless of scheduling
        let batch = (0..trajectories)
            .into_par_iter()
            .map(|i| simulate_operation(&spec, &entry.solution, seed.wrapping_add(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let mean = batch.iter().map(|t| t.total_d).sum::<f64>() / batch.len().max(1) as f64;
        runs.push(OperationRuns {
            operation: op.clone(),
            mean_total_d: mean,
            trajectories: batch,
        });
    }
    print!("{}", json(&runs)?);
    Ok(())
}

pub fn perturb(file: &Path, site: &str, delta: f64) -> Outcome {
    let scenario = load(file)?;
    let (config, trace) = equilibrium(&scenario)?;
    if !trace.converged {
        return Err(not_converged(&trace));
    }
    let report = perturb_and_propagate(&config, &scenario, site, delta, settings(&scenario))?;
    println!("site {site} delta {delta:+}: {} iterations", report.iterations);
    println!("{:<12} {:>14} {:>14}", "echelon", "d defender", "d attacker");
    for (e, d) in &report.deltas {
        println!("{:<12} {:>14.6} {:>14.6}", e.as_str(), d.defender, d.attacker);
    }
    if report.trace.converged {
        Ok(())
    } else {
        Err(not_converged(&report.trace))
    }
}

pub fn assess(file: &Path, shock_set: Option<&str>, out: Option<&Path>) -> Outcome {
    let scenario = load(file)?;
    let shocks = match shock_set {
        Some(name) => scenario
            .shocks
            .get(name)
            .cloned()
            .ok_or_else(|| Failure::validation(format!("shocks.{name}: no such shock set")))?,
        None => scenario.shocks.get("default").cloned().unwrap_or_default(),
    };
    let (config, trace) = equilibrium(&scenario)?;
    if !trace.converged {
        return Err(not_converged(&trace));
    }
    let assessment = assess_config(&config, &trace, &scenario, &shocks)?;
    let mut report = Report::new(
        &scenario.metadata.name,
        config,
        trace.clone(),
        trace.hylomorphism,
        RunMetadata::new(scenario.solver.seed),
    );
    report.assessment = Some(assessment);
    print!("{}", emit_report(&report, ReportFormat::HumanText));
    if let Some(path) = out {
        write_out(path, &emit_report(&report, ReportFormat::Machine))?;
    }
    Ok(())
}

pub fn template(category: &str, out: Option<&Path>) -> Outcome {
    let cat: TemplateCategory = category.parse()?;
    let text = emit_scenario(&instantiate_template(cat))?;
    match out {
        Some(path) => write_out(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct GameDrift {
    game: ParrondoGame,
    exact: f64,
    simulated: f64,
    std_error: f64,
}

#[derive(Serialize)]
struct ParrondoReport {
    spec: ParrondoSpec,
    steps: u64,
    seed: u64,
    drifts: Vec<GameDrift>,
    paradox: bool,
}

pub fn parrondo(epsilon: f64, gamma: f64, steps: u64, seed: u64) -> Outcome {
    let spec = ParrondoSpec::canonical(epsilon, gamma);
    let drifts = [ParrondoGame::A, ParrondoGame::B, ParrondoGame::Mixed]
        .into_iter()
        .map(|game| {
            let exact = parrondo_drift(&spec, game)?;
            let sim = parrondo_simulate(&spec, game, steps, seed);
            Ok(GameDrift {
                game,
                exact,
                simulated: sim.drift,
                std_error: sim.std_error,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let paradox = drifts[0].exact < 0.0 && drifts[1].exact < 0.0 && drifts[2].exact > 0.0;
    print!(
        "{}",
        json(&ParrondoReport {
            spec,
            steps,
            seed,
            drifts,
            paradox,
        })?
    );
    Ok(())
}

pub fn braess(demand: f64) -> Outcome {
    let out = braess_delta(&RoutingNetwork::classic(demand))?;
    print!("{}", json(&out)?);
    Ok(())
}
