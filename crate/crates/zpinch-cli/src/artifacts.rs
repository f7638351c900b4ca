//! Row types of the CSV artifacts and helpers to write and read them back.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use zpinch::energy::TrialField;
use zpinch::equilibrium::EquilibriumState;
use zpinch::spectrum::SpectralResult;

use crate::error::{CliError, CliResult};

pub const EQUILIBRIUM_CSV: &str = "equilibrium.csv";
pub const CRITERIA_CSV: &str = "criteria.csv";
pub const SPECTRUM_CSV: &str = "spectrum.csv";
pub const SPECTRUM_JSON: &str = "spectrum.json";
pub const SCALING_CSV: &str = "scaling.csv";
pub const SCALING_JSON: &str = "scaling.json";
pub const SUMMARY_JSON: &str = "summary.json";
pub const MINIMIZER_DIR: &str = "minimizers";
pub const DYNAMICS_DIR: &str = "dynamics";

/// One node of the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRow {
    pub r: f64,
    pub p: f64,
    pub dp: f64,
    pub rho: f64,
    pub b_theta: f64,
    pub db_theta: f64,
    pub j_z: f64,
}

impl EquilibriumRow {
    pub fn rows(eq: &EquilibriumState) -> Vec<Self> {
        (0..eq.grid.len())
            .map(|i| EquilibriumRow {
                r: eq.grid[i],
                p: eq.p[i],
                dp: eq.dp[i],
                rho: eq.rho[i],
                b_theta: eq.b[i],
                db_theta: eq.db[i],
                j_z: eq.jz[i],
            })
            .collect()
    }
}

/// One scanned criterion value: sausage for `m = 0`, interchange otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub m: i32,
    pub r: f64,
    pub value: f64,
}

/// One solved mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub m: i32,
    pub k: i64,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub el_residual: f64,
    pub bc_residual: f64,
    pub n_grid: usize,
}

impl From<&SpectralResult> for SpectrumRow {
    fn from(r: &SpectralResult) -> Self {
        SpectrumRow {
            m: r.mode.m,
            k: r.mode.k,
            lambda: r.lambda,
            mu: r.mu,
            el_residual: r.el_residual,
            bc_residual: r.bc_residual,
            n_grid: r.n_grid,
        }
    }
}

/// One node of a minimiser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizerRow {
    pub r: f64,
    pub xi: f64,
    pub eta: f64,
    pub zeta: f64,
}

impl MinimizerRow {
    pub fn rows(field: &TrialField) -> Vec<Self> {
        (0..field.mesh.len())
            .map(|i| MinimizerRow {
                r: field.mesh[i],
                xi: field.xi[i],
                eta: field.eta[i],
                zeta: field.zeta[i],
            })
            .collect()
    }
}

/// One node of the vacuum field of a minimiser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VacuumRow {
    pub r: f64,
    pub q_r: f64,
}

/// One member of a scaling family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub alpha: f64,
    pub k: i64,
    pub j_value: f64,
    pub e_value: f64,
    pub lambda_upper: f64,
}

/// File stem `m{m}_k{k}` used for per-mode artifacts.
pub fn mode_stem(m: i32, k: i64) -> String {
    format!("m{m}_k{k}")
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Write `rows` as CSV with a header row.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let wrap = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    if rows.is_empty() {
        // csv only emits headers alongside the first record.
        drop(w);
        fs::write(path, "").map_err(|e| CliError::io(path, e))?;
        return Ok(());
    }
    for row in rows {
        w.serialize(row).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Read every row of a CSV artifact.
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    if !path.exists() {
        return Err(CliError::MissingArtifact(path.to_path_buf()));
    }
    let wrap = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(wrap)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn artifact(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
