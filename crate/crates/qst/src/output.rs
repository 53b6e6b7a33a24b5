//! CSV and JSON writers, plus a read-back validation pass over every CSV.
//!
//! Time series: `{scenario}_v{v}.csv` with header
//! `t,p_phi1,p_phi2,p_phi3[,fidelity],norm_or_trace`.
//! Fidelity surface: `fig6_grid.csv` with header `kappa,gamma_q,peak_fidelity`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::runner::{GridPoint, RunResult, ScenarioOutcome};

/// Slack on `[0, 1]` for probabilities read back from disk.
pub const PROBABILITY_SLACK: f64 = 1e-9;

pub const GRID_FILE: &str = "fig6_grid.csv";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn time_series_name(scenario: &str, v: f64) -> String {
    format!("{scenario}_v{v}.csv")
}

pub fn write_time_series(path: &Path, run: &RunResult) -> Result<()> {
    let r = &run.record;
    let mut body = String::from("t,p_phi1,p_phi2,p_phi3");
    if r.fidelity.is_some() {
        body.push_str(",fidelity");
    }
    body.push_str(",norm_or_trace\n");
    for i in 0..r.len() {
        body.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            r.times[i], r.p_phi1[i], r.p_phi2[i], r.p_phi3[i]
        ));
        if let Some(f) = &r.fidelity {
            body.push_str(&format!(",{:.16e}", f[i]));
        }
        body.push_str(&format!(",{:.16e}\n", r.norm_or_trace[i]));
    }
    fs::write(path, body).map_err(io_err(path))
}

pub fn write_grid(path: &Path, grid: &[GridPoint]) -> Result<()> {
    let mut body = String::from("kappa,gamma_q,peak_fidelity\n");
    for p in grid {
        body.push_str(&format!(
            "{:.16e},{:.16e},{:.16e}\n",
            p.kappa, p.gamma_q, p.peak_fidelity
        ));
    }
    fs::write(path, body).map_err(io_err(path))
}

#[derive(Debug, Serialize)]
struct RunSummary {
    v: f64,
    csv: String,
    samples: usize,
    dt: f64,
    peak_p_phi3: f64,
    peak_p_phi3_time: f64,
    final_p_phi3: f64,
    max_p_phi2: f64,
    peak_fidelity: Option<f64>,
    peak_fidelity_time: Option<f64>,
    final_fidelity: Option<f64>,
    max_norm_or_trace_drift: f64,
    min_eigenvalue: Option<f64>,
    max_phonon_top_population: Option<f64>,
    elapsed_s: f64,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    config: &'a ScenarioConfig,
    runs: Vec<RunSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<&'a [GridPoint]>,
}

/// Write every artifact of a scenario into `cfg.out`, validate the CSVs by
/// reading them back, and return the paths written.
pub fn write_outcome(cfg: &ScenarioConfig, outcome: &ScenarioOutcome) -> Result<Vec<PathBuf>> {
    let dir = &cfg.out;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let mut runs = Vec::new();
    let has_fidelity = outcome.runs.iter().any(|r| r.record.fidelity.is_some());

    for run in &outcome.runs {
        let name = time_series_name(cfg.scenario.name(), run.v);
        let path = dir.join(&name);
        write_time_series(&path, run)?;
        validate_time_series(&path, has_fidelity)?;
        written.push(path);

        let r = &run.record;
        let (peak3, peak3_t) = r.peak_p_phi3();
        let peak_f = r.peak_fidelity();
        runs.push(RunSummary {
            v: run.v,
            csv: name,
            samples: r.len(),
            dt: run.dt,
            peak_p_phi3: peak3,
            peak_p_phi3_time: peak3_t,
            final_p_phi3: r.final_p_phi3(),
            max_p_phi2: r.max_p_phi2(),
            peak_fidelity: peak_f.map(|p| p.0),
            peak_fidelity_time: peak_f.map(|p| p.1),
            final_fidelity: r.final_fidelity(),
            max_norm_or_trace_drift: run.max_drift,
            min_eigenvalue: run.min_eigenvalue,
            max_phonon_top_population: run.max_top_population,
            elapsed_s: run.elapsed_s,
        });
    }

    if let Some(grid) = &outcome.grid {
        let path = dir.join(GRID_FILE);
        write_grid(&path, grid)?;
        validate_grid(&path)?;
        written.push(path);
    }

    let summary = Summary {
        config: cfg,
        runs,
        grid: outcome.grid.as_deref(),
    };
    let path = dir.join(format!("{}_summary.json", cfg.scenario.name()));
    let json = serde_json::to_string_pretty(&summary)?;
    fs::write(&path, json + "\n").map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}

fn invalid(path: &Path, message: String) -> Error {
    Error::OutputValidation {
        path: path.to_path_buf(),
        message,
    }
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    let found = lines.next().unwrap_or_default();
    if found != header.join(",") {
        return Err(invalid(path, format!("unexpected header `{found}`")));
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| invalid(path, format!("line {}: {e}", n + 2)))?;
        if row.len() != header.len() {
            return Err(invalid(
                path,
                format!(
                    "line {}: {} columns, expected {}",
                    n + 2,
                    row.len(),
                    header.len()
                ),
            ));
        }
        if let Some(x) = row.iter().find(|x| !x.is_finite()) {
            return Err(invalid(
                path,
                format!("line {}: non-finite value {x}", n + 2),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(invalid(path, "no data rows".into()));
    }
    Ok(rows)
}

fn is_probability(x: f64) -> bool {
    (-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&x)
}

/// Strictly increasing time and every probability column within `[0, 1]`.
pub fn validate_time_series(path: &Path, with_fidelity: bool) -> Result<()> {
    let mut header = vec!["t", "p_phi1", "p_phi2", "p_phi3"];
    if with_fidelity {
        header.push("fidelity");
    }
    header.push("norm_or_trace");
    let rows = read_rows(path, &header)?;
    for (i, row) in rows.iter().enumerate() {
        if i > 0 && row[0] <= rows[i - 1][0] {
            return Err(invalid(
                path,
                format!("time not increasing at row {}", i + 1),
            ));
        }
        let probs = &row[1..header.len() - 1];
        if let Some(x) = probs.iter().find(|&&x| !is_probability(x)) {
            return Err(invalid(
                path,
                format!("probability {x} out of range at t = {}", row[0]),
            ));
        }
    }
    Ok(())
}

/// Sorted by `(κ, Γ)`, rates non-negative, fidelity within `[0, 1]`.
pub fn validate_grid(path: &Path) -> Result<()> {
    let rows = read_rows(path, &["kappa", "gamma_q", "peak_fidelity"])?;
    for (i, row) in rows.iter().enumerate() {
        if row[0] < 0.0 || row[1] < 0.0 {
            return Err(invalid(path, format!("negative rate at row {}", i + 1)));
        }
        if !is_probability(row[2]) {
            return Err(invalid(
                path,
                format!("fidelity {} out of range at row {}", row[2], i + 1),
            ));
        }
        if i > 0 && (rows[i - 1][0], rows[i - 1][1]) >= (row[0], row[1]) {
            return Err(invalid(path, format!("grid not sorted at row {}", i + 1)));
        }
    }
    Ok(())
}
