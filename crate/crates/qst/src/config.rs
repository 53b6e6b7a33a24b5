//! Scenario configuration.
//!
//! Config files are TOML with flat dotted keys, e.g.
//!
//! ```toml
//! scenario = "fig5"
//! v = [0.25, 0.75]
//! dissipation.kappa = 0.005
//! truncation.n_m = 6
//! ```
//!
//! Resolution order: scenario preset, then the file, then CLI overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qst_core::dynamics::{DissipationParams, DEFAULT_DT, DEFAULT_STRIDE};
use qst_core::pulse::DEFAULT_WINDOW_FACTOR;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rapidities of the four-panel population figures.
pub const FIGURE_RAPIDITIES: [f64; 4] = [0.25, 0.75, 1.5, 2.0];
/// Largest tolerated population of the top phonon Fock level.
pub const DEFAULT_MAX_TOP_POPULATION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Plain adiabatic passage, populations vs time.
    Fig2,
    /// Counter-diabatic driving, populations vs time.
    Fig4,
    /// Dissipative counter-diabatic transfer, fidelity vs time.
    Fig5,
    /// Peak fidelity over a (κ, Γ) grid.
    Fig6,
    Custom,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2 => "fig2",
            Scenario::Fig4 => "fig4",
            Scenario::Fig5 => "fig5",
            Scenario::Fig6 => "fig6",
            Scenario::Custom => "custom",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Pure state in the three-level single-excitation space.
    Schrodinger,
    /// Density matrix on the truncated cavity ⊗ phonon ⊗ qubit space.
    Lindblad,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dissipation {
    pub kappa: f64,
    pub gamma_q: f64,
    pub gamma_m: f64,
    pub n_th: f64,
}

impl Dissipation {
    pub const LOSSLESS: Dissipation = Dissipation {
        kappa: 0.0,
        gamma_q: 0.0,
        gamma_m: 0.0,
        n_th: 0.0,
    };

    pub fn params(&self) -> DissipationParams {
        DissipationParams {
            kappa: self.kappa,
            gamma_q: self.gamma_q,
            gamma_m: self.gamma_m,
            n_th: self.n_th,
        }
    }

    fn is_lossless(&self) -> bool {
        self.kappa == 0.0 && self.gamma_q == 0.0 && self.gamma_m == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub n_c: usize,
    pub n_m: usize,
}

/// κ–Γ grid for the fidelity surface (rad/ns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub gamma_q_min: f64,
    pub gamma_q_max: f64,
    pub resolution: usize,
}

impl Sweep {
    fn axis(min: f64, max: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| min + (max - min) * i as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn kappas(&self) -> Vec<f64> {
        Self::axis(self.kappa_min, self.kappa_max, self.resolution)
    }

    pub fn gamma_qs(&self) -> Vec<f64> {
        Self::axis(self.gamma_q_min, self.gamma_q_max, self.resolution)
    }

    /// All `(κ, Γ)` pairs sorted by κ, then Γ.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let gammas = self.gamma_qs();
        self.kappas()
            .into_iter()
            .flat_map(|k| gammas.iter().map(move |&g| (k, g)))
            .collect()
    }
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            kappa_min: 0.0,
            kappa_max: 0.05,
            gamma_q_min: 0.0,
            gamma_q_max: 0.05,
            resolution: 11,
        }
    }
}

/// Fully resolved scenario configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub v: Vec<f64>,
    pub gamma: f64,
    pub g_max: f64,
    pub omega_m: f64,
    pub omega_q: f64,
    pub engine: Engine,
    pub tqd: bool,
    pub diagonal: bool,
    pub dissipation: Dissipation,
    pub truncation: Truncation,
    pub dt: f64,
    pub stride: usize,
    pub t_end_factor: f64,
    pub sweep: Sweep,
    pub max_top_population: f64,
    pub out: PathBuf,
}

impl ScenarioConfig {
    pub fn preset(scenario: Scenario) -> Self {
        let mut cfg = Self {
            scenario,
            v: FIGURE_RAPIDITIES.to_vec(),
            gamma: 20.0,
            g_max: 1.0,
            omega_m: 1.0,
            omega_q: 1.0,
            engine: Engine::Schrodinger,
            tqd: true,
            diagonal: false,
            dissipation: Dissipation::LOSSLESS,
            truncation: Truncation { n_c: 2, n_m: 6 },
            dt: DEFAULT_DT,
            stride: DEFAULT_STRIDE,
            t_end_factor: DEFAULT_WINDOW_FACTOR,
            sweep: Sweep::default(),
            max_top_population: DEFAULT_MAX_TOP_POPULATION,
            out: PathBuf::from("out").join(scenario.name()),
        };
        let reference_bath = Dissipation {
            kappa: 0.005,
            gamma_q: 0.005,
            gamma_m: 5e-5,
            n_th: 50.0,
        };
        match scenario {
            Scenario::Fig2 => {
                cfg.tqd = false;
                cfg.diagonal = true;
            }
            Scenario::Fig4 | Scenario::Custom => {}
            Scenario::Fig5 => {
                cfg.v = vec![0.25, 0.75];
                cfg.engine = Engine::Lindblad;
                cfg.dissipation = reference_bath;
            }
            Scenario::Fig6 => {
                cfg.v = vec![0.75];
                cfg.engine = Engine::Lindblad;
                cfg.dissipation = reference_bath;
            }
        }
        cfg
    }

    /// Load a config file and apply CLI overrides on top.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, overrides).map_err(|e| match e {
            Error::ConfigParse { message, .. } => Error::ConfigParse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn from_toml(text: &str, overrides: &Overrides) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::ConfigParse {
            path: PathBuf::new(),
            message: e.to_string(),
        })?;
        let scenario = overrides
            .scenario
            .or(file.scenario)
            .ok_or_else(|| Error::Invalid(vec!["`scenario` is required".into()]))?;
        let mut cfg = Self::preset(scenario);
        file.apply(&mut cfg);
        overrides.apply(&mut cfg);
        Ok(cfg)
    }

    /// Every violated constraint, or `Ok` if none.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut positive = |name: &str, x: f64| {
            if !(x.is_finite() && x > 0.0) {
                errs.push(format!("`{name}` must be finite and > 0 (got {x})"));
            }
        };
        for &v in &self.v {
            positive("v", v);
        }
        positive("gamma", self.gamma);
        positive("g_max", self.g_max);
        positive("omega_m", self.omega_m);
        positive("dt", self.dt);
        positive("t_end_factor", self.t_end_factor);
        positive("max_top_population", self.max_top_population);
        if !self.omega_q.is_finite() {
            errs.push(format!("`omega_q` must be finite (got {})", self.omega_q));
        }
        if self.v.is_empty() {
            errs.push("`v` must list at least one rapidity".into());
        }
        if self.stride == 0 {
            errs.push("`stride` must be >= 1".into());
        }
        let d = &self.dissipation;
        for (name, x) in [
            ("dissipation.kappa", d.kappa),
            ("dissipation.gamma_q", d.gamma_q),
            ("dissipation.gamma_m", d.gamma_m),
            ("dissipation.n_th", d.n_th),
        ] {
            if !(x.is_finite() && x >= 0.0) {
                errs.push(format!("`{name}` must be finite and >= 0 (got {x})"));
            }
        }
        if self.truncation.n_c < 2 || self.truncation.n_m < 2 {
            errs.push(format!(
                "truncation dimensions must be >= 2 (got n_c = {}, n_m = {})",
                self.truncation.n_c, self.truncation.n_m
            ));
        }
        if self.engine == Engine::Schrodinger && !d.is_lossless() {
            errs.push("dissipation rates require engine = \"lindblad\"".into());
        }

        match self.scenario {
            Scenario::Fig2 if self.tqd => errs.push("fig2 requires tqd = false".into()),
            Scenario::Fig4 if !self.tqd => errs.push("fig4 requires tqd = true".into()),
            Scenario::Fig5 | Scenario::Fig6 => {
                if self.engine != Engine::Lindblad {
                    errs.push(format!("{} requires engine = \"lindblad\"", self.scenario));
                }
                if !self.tqd {
                    errs.push(format!("{} requires tqd = true", self.scenario));
                }
            }
            _ => {}
        }
        if self.scenario != Scenario::Custom && (self.omega_m != 1.0 || self.omega_q != 1.0) {
            errs.push(format!(
                "{} is the resonant case omega_m = omega_q = 1 (got {}, {})",
                self.scenario, self.omega_m, self.omega_q
            ));
        }
        if self.scenario == Scenario::Fig6 {
            let s = &self.sweep;
            if s.resolution < 2 {
                errs.push(format!(
                    "sweep.resolution must be >= 2 (got {})",
                    s.resolution
                ));
            }
            for (lo, hi, axis) in [
                (s.kappa_min, s.kappa_max, "kappa"),
                (s.gamma_q_min, s.gamma_q_max, "gamma_q"),
            ] {
                if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi >= lo) {
                    errs.push(format!(
                        "sweep {axis} range must satisfy 0 <= min <= max (got [{lo}, {hi}])"
                    ));
                }
            }
            if self.v.len() != 1 {
                errs.push(format!("fig6 sweeps a single v (got {})", self.v.len()));
            }
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errs))
        }
    }
}

/// CLI flags that win over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub v: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(v) = &self.v {
            cfg.v = v.clone();
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: Option<Scenario>,
    v: Option<Vec<f64>>,
    gamma: Option<f64>,
    g_max: Option<f64>,
    omega_m: Option<f64>,
    omega_q: Option<f64>,
    engine: Option<Engine>,
    tqd: Option<bool>,
    diagonal: Option<bool>,
    dt: Option<f64>,
    stride: Option<usize>,
    t_end_factor: Option<f64>,
    max_top_population: Option<f64>,
    out: Option<PathBuf>,
    #[serde(default)]
    dissipation: DissipationFile,
    #[serde(default)]
    truncation: TruncationFile,
    #[serde(default)]
    sweep: SweepFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DissipationFile {
    kappa: Option<f64>,
    gamma_q: Option<f64>,
    gamma_m: Option<f64>,
    n_th: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruncationFile {
    n_c: Option<usize>,
    n_m: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    kappa_min: Option<f64>,
    kappa_max: Option<f64>,
    gamma_q_min: Option<f64>,
    gamma_q_max: Option<f64>,
    resolution: Option<usize>,
}

fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *slot = v.clone();
    }
}

impl ConfigFile {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        set(&mut cfg.v, &self.v);
        set(&mut cfg.gamma, &self.gamma);
        set(&mut cfg.g_max, &self.g_max);
        set(&mut cfg.omega_m, &self.omega_m);
        set(&mut cfg.omega_q, &self.omega_q);
        set(&mut cfg.engine, &self.engine);
        set(&mut cfg.tqd, &self.tqd);
        set(&mut cfg.diagonal, &self.diagonal);
        set(&mut cfg.dt, &self.dt);
        set(&mut cfg.stride, &self.stride);
        set(&mut cfg.t_end_factor, &self.t_end_factor);
        set(&mut cfg.max_top_population, &self.max_top_population);
        set(&mut cfg.out, &self.out);

        let d = &self.dissipation;
        set(&mut cfg.dissipation.kappa, &d.kappa);
        set(&mut cfg.dissipation.gamma_q, &d.gamma_q);
        set(&mut cfg.dissipation.gamma_m, &d.gamma_m);
        set(&mut cfg.dissipation.n_th, &d.n_th);

        set(&mut cfg.truncation.n_c, &self.truncation.n_c);
        set(&mut cfg.truncation.n_m, &self.truncation.n_m);

        let s = &self.sweep;
        set(&mut cfg.sweep.kappa_min, &s.kappa_min);
        set(&mut cfg.sweep.kappa_max, &s.kappa_max);
        set(&mut cfg.sweep.gamma_q_min, &s.gamma_q_min);
        set(&mut cfg.sweep.gamma_q_max, &s.gamma_q_max);
        set(&mut cfg.sweep.resolution, &s.resolution);
    }
}
