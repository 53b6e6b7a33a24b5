//! Scenario execution: single runs, the worker pool, the κ–Γ sweep and the
//! step-size convergence report.

use std::time::Instant;

use qst_core::dynamics::{evolve_lindblad, evolve_schrodinger, IntegrationOptions, Trajectory};
use qst_core::hilbert::SpaceSignature;
use qst_core::model::{Drive, ModelParams, ThreeLevelBasis};
use qst_core::observables::{max_phonon_top_population, TransferRecord};
use qst_core::pulse::PulseSchedule;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Dissipation, Engine, Scenario, ScenarioConfig};
use crate::error::{Error, Result};

/// Largest norm drift accepted from a pure-state run.
pub const PURE_DRIFT_LIMIT: f64 = 1e-8;
/// Largest trace drift accepted from a density-matrix run.
pub const MIXED_DRIFT_LIMIT: f64 = 1e-7;
/// Slack on `P₁ + P₂ + P₃ = 1` for three-level runs.
pub const POPULATION_SUM_TOL: f64 = 1e-7;
/// Slack on `0 ≤ F ≤ 1`.
pub const FIDELITY_SLACK: f64 = 1e-9;

/// Outcome of one time evolution.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub v: f64,
    pub dissipation: Dissipation,
    pub dt: f64,
    pub record: TransferRecord,
    pub max_drift: f64,
    pub min_eigenvalue: Option<f64>,
    pub max_top_population: Option<f64>,
    pub elapsed_s: f64,
}

impl RunResult {
    /// Peak fidelity for density-matrix runs, peak `P(φ₃)` otherwise.
    pub fn peak(&self) -> (f64, f64) {
        self.record
            .peak_fidelity()
            .unwrap_or_else(|| self.record.peak_p_phi3())
    }

    pub fn final_value(&self) -> f64 {
        self.record
            .final_fidelity()
            .unwrap_or_else(|| self.record.final_p_phi3())
    }
}

/// One cell of the fidelity surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub kappa: f64,
    pub gamma_q: f64,
    pub peak_fidelity: f64,
    pub peak_time: f64,
    pub final_fidelity: f64,
}

fn drive(cfg: &ScenarioConfig) -> Drive {
    Drive {
        counter_diabatic: cfg.tqd,
        free_energy: cfg.diagonal,
    }
}

fn model_params(cfg: &ScenarioConfig, v: f64) -> qst_core::Result<ModelParams> {
    let schedule = PulseSchedule::new(v, cfg.gamma)?.with_amplitude(cfg.g_max)?;
    let sig = SpaceSignature::hybrid(cfg.truncation.n_c, cfg.truncation.n_m)?;
    ModelParams::new(cfg.omega_m, cfg.omega_q, schedule, sig)
}

fn evolve(
    cfg: &ScenarioConfig,
    v: f64,
    dissipation: &Dissipation,
    dt: f64,
) -> qst_core::Result<(Trajectory, ThreeLevelBasis)> {
    let params = model_params(cfg, v)?;
    let (t0, t1) = params.schedule.window(cfg.t_end_factor);
    let opts = IntegrationOptions::new(t0, t1, dt).with_stride(cfg.stride);
    let drive = drive(cfg);
    match cfg.engine {
        Engine::Schrodinger => {
            let basis = ThreeLevelBasis::reduced();
            let traj = evolve_schrodinger(|t| params.three_level(t, drive), &basis.ket(0), &opts)?;
            Ok((traj, basis))
        }
        Engine::Lindblad => {
            let model = params.full_space()?;
            let basis = model.basis().clone();
            let channels = dissipation.params().channels(model.signature())?;
            let rho0 = basis.ket(0).to_mixed();
            let traj = evolve_lindblad(|t| model.hamiltonian(t, drive), &rho0, &channels, &opts)?;
            Ok((traj, basis))
        }
    }
}

/// Evolve one rapidity with explicit rates and step, then check the runtime
/// invariants.
pub fn run_with(
    cfg: &ScenarioConfig,
    v: f64,
    dissipation: Dissipation,
    dt: f64,
) -> Result<RunResult> {
    let start = Instant::now();
    let sim = |source| Error::Simulation { v, source };
    let (traj, basis) = evolve(cfg, v, &dissipation, dt).map_err(sim)?;
    let record = TransferRecord::from_trajectory(&traj, &basis).map_err(sim)?;
    let max_top_population = match cfg.engine {
        Engine::Lindblad => Some(max_phonon_top_population(&traj).map_err(sim)?),
        Engine::Schrodinger => None,
    };
    let result = RunResult {
        v,
        dissipation,
        dt,
        record,
        max_drift: traj.max_norm_drift(),
        min_eigenvalue: traj.min_eigenvalue(),
        max_top_population,
        elapsed_s: start.elapsed().as_secs_f64(),
    };
    check_invariants(cfg, &result)?;
    Ok(result)
}

pub fn run_single(cfg: &ScenarioConfig, v: f64) -> Result<RunResult> {
    run_with(cfg, v, cfg.dissipation, cfg.dt)
}

fn check_invariants(cfg: &ScenarioConfig, run: &RunResult) -> Result<()> {
    let tag = format!(
        "{} v={} κ={} Γ={}",
        cfg.scenario, run.v, run.dissipation.kappa, run.dissipation.gamma_q
    );
    let limit = match cfg.engine {
        Engine::Schrodinger => PURE_DRIFT_LIMIT,
        Engine::Lindblad => MIXED_DRIFT_LIMIT,
    };
    if run.max_drift > limit {
        return Err(Error::Invariant(format!(
            "{tag}: norm/trace drift {:e} exceeds {limit:e}",
            run.max_drift
        )));
    }
    let r = &run.record;
    if cfg.engine == Engine::Schrodinger {
        for i in 0..r.len() {
            let sum = r.p_phi1[i] + r.p_phi2[i] + r.p_phi3[i];
            if (sum - 1.0).abs() > POPULATION_SUM_TOL {
                return Err(Error::Invariant(format!(
                    "{tag}: populations sum to {sum} at t = {}",
                    r.times[i]
                )));
            }
        }
    }
    if let Some(top) = run.max_top_population {
        if top >= cfg.max_top_population {
            return Err(Error::Invariant(format!(
                "{tag}: phonon top level holds {top:e} (limit {:e}); raise truncation.n_m",
                cfg.max_top_population
            )));
        }
    }
    if let Some(f) = &r.fidelity {
        if let Some((i, x)) = f
            .iter()
            .enumerate()
            .find(|(_, x)| !(-FIDELITY_SLACK..=1.0 + FIDELITY_SLACK).contains(*x))
        {
            return Err(Error::Invariant(format!(
                "{tag}: fidelity {x} at t = {}",
                r.times[i]
            )));
        }
    }
    Ok(())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

/// Every configured rapidity, in config order.
pub fn run_scenario(cfg: &ScenarioConfig, jobs: usize) -> Result<Vec<RunResult>> {
    pool(jobs)?.install(|| cfg.v.par_iter().map(|&v| run_single(cfg, v)).collect())
}

/// Peak fidelity over the configured κ–Γ grid at the first rapidity, sorted
/// by κ then Γ regardless of `jobs`.
pub fn sweep(cfg: &ScenarioConfig, jobs: usize) -> Result<Vec<GridPoint>> {
    let v = cfg.v[0];
    let points = cfg.sweep.points();
    pool(jobs)?.install(|| {
        points
            .par_iter()
            .map(|&(kappa, gamma_q)| {
                let diss = Dissipation {
                    kappa,
                    gamma_q,
                    ..cfg.dissipation
                };
                let run = run_with(cfg, v, diss, cfg.dt)?;
                let (peak_fidelity, peak_time) = run.peak();
                Ok(GridPoint {
                    kappa,
                    gamma_q,
                    peak_fidelity,
                    peak_time,
                    final_fidelity: run.final_value(),
                })
            })
            .collect()
    })
}

/// Final transfer quantity at `dt`, `dt/2`, `dt/4`.
#[derive(Debug, Clone, Serialize)]
pub struct Convergence {
    pub v: f64,
    pub dts: [f64; 3],
    pub values: [f64; 3],
    pub diffs: [f64; 2],
    /// `|x(dt) − x(dt/2)| / |x(dt/2) − x(dt/4)|`; about 16 for RK4 once the
    /// step is in the asymptotic regime.
    pub ratio: f64,
}

pub fn convergence(cfg: &ScenarioConfig, jobs: usize) -> Result<Vec<Convergence>> {
    let dts = [cfg.dt, cfg.dt / 2.0, cfg.dt / 4.0];
    let tasks: Vec<(f64, f64)> = cfg
        .v
        .iter()
        .flat_map(|&v| dts.iter().map(move |&dt| (v, dt)))
        .collect();
    let finals: Vec<f64> = pool(jobs)?.install(|| {
        tasks
            .par_iter()
            .map(|&(v, dt)| run_with(cfg, v, cfg.dissipation, dt).map(|r| r.final_value()))
            .collect::<Result<_>>()
    })?;
    Ok(cfg
        .v
        .iter()
        .zip(finals.chunks(3))
        .map(|(&v, x)| {
            let diffs = [(x[0] - x[1]).abs(), (x[1] - x[2]).abs()];
            Convergence {
                v,
                dts,
                values: [x[0], x[1], x[2]],
                diffs,
                ratio: diffs[0] / diffs[1],
            }
        })
        .collect())
}

/// Everything a `simulate` invocation produces.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub runs: Vec<RunResult>,
    pub grid: Option<Vec<GridPoint>>,
}

pub fn execute(cfg: &ScenarioConfig, jobs: usize) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let runs = run_scenario(cfg, jobs)?;
    let grid = match cfg.scenario {
        Scenario::Fig6 => Some(sweep(cfg, jobs)?),
        _ => None,
    };
    Ok(ScenarioOutcome { runs, grid })
}
