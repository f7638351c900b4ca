//! Study configuration (JSON) and its validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zpinch::equilibrium::{GridSpec, PressureProfile};
use zpinch::spectrum::SolveOptions;

use crate::error::{CliError, CliResult};

/// Complete description of one study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub profile: PressureProfile,
    #[serde(default)]
    pub equilibrium: EquilibriumConfig,
    pub modes: ModeRange,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default)]
    pub scaling: Option<ScalingConfig>,
    #[serde(default)]
    pub dynamics: Option<DynamicsConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Seed for random initial data.
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Reject profiles that fail the strict admissibility test.
    #[serde(default)]
    pub strict_admissibility: bool,
}

/// Equilibrium grid and wall position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumConfig {
    #[serde(default = "default_equilibrium_grid")]
    pub grid: GridSpec,
    /// Conducting-wall radius; defaults to `2 r₀`.
    #[serde(default)]
    pub rw: Option<f64>,
}

fn default_equilibrium_grid() -> GridSpec {
    GridSpec::graded(512)
}

impl Default for EquilibriumConfig {
    fn default() -> Self {
        EquilibriumConfig {
            grid: default_equilibrium_grid(),
            rw: None,
        }
    }
}

/// Inclusive ranges of azimuthal and axial mode numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeRange {
    pub m_min: i32,
    pub m_max: i32,
    pub k_min: i64,
    pub k_max: i64,
}

/// Scaling study over `k = 2^k_min_power .. 2^k_max_power`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub alphas: Vec<f64>,
    #[serde(default = "default_k_min_power")]
    pub k_min_power: u32,
    #[serde(default = "default_k_max_power")]
    pub k_max_power: u32,
    /// Fits use `k ≥ fit_min_k`.
    #[serde(default = "default_fit_min_k")]
    pub fit_min_k: i64,
}

fn default_k_min_power() -> u32 {
    4
}
fn default_k_max_power() -> u32 {
    10
}
fn default_fit_min_k() -> i64 {
    zpinch::scaling::DEFAULT_FIT_MIN_K
}

/// Where initial data for the time integration comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSource {
    /// The spectral minimiser of the mode, interpolated onto the dynamics mesh.
    Minimizer,
    /// Seeded random smooth field.
    Random,
}

/// Time integration of the most unstable modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    /// Final time; `None` integrates for `efolds / μ`.
    #[serde(default)]
    pub t_end: Option<f64>,
    /// Growth time used when `t_end` is absent.
    #[serde(default = "default_efolds")]
    pub efolds: f64,
    /// Time step; `None` uses half the explicit stability limit.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_initial")]
    pub initial: InitialSource,
    /// Uniform mesh size for the integration.
    #[serde(default = "default_dynamics_grid")]
    pub grid_n: usize,
    /// Number of unstable modes (largest μ first) to integrate.
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
    /// Allowed relative ledger drift.
    #[serde(default = "default_ledger_tol")]
    pub ledger_tol: f64,
}

fn default_efolds() -> f64 {
    6.0
}
fn default_initial() -> InitialSource {
    InitialSource::Minimizer
}
fn default_dynamics_grid() -> usize {
    128
}
fn default_max_modes() -> usize {
    3
}
fn default_ledger_tol() -> f64 {
    1e-6
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            t_end: None,
            efolds: default_efolds(),
            dt: None,
            initial: default_initial(),
            grid_n: default_dynamics_grid(),
            max_modes: default_max_modes(),
            ledger_tol: default_ledger_tol(),
        }
    }
}

/// Output file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Artifact directory and formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("zpinch-out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

impl StudyConfig {
    /// Uniform-current profile, `m = 0`, `k = 1..4`, no scaling or dynamics.
    pub fn minimal() -> Self {
        StudyConfig {
            profile: PressureProfile::uniform_current(2.0, 1.0, 5.0 / 3.0),
            equilibrium: EquilibriumConfig::default(),
            modes: ModeRange {
                m_min: 0,
                m_max: 0,
                k_min: 1,
                k_max: 4,
            },
            solver: SolveOptions::default(),
            scaling: None,
            dynamics: None,
            output: OutputConfig::default(),
            seed: 0,
            threads: None,
            strict_admissibility: false,
        }
    }

    /// Read and validate a JSON configuration file.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parse and validate a JSON configuration.
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: StudyConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Check ranges, tolerances and sizes.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let m = &self.modes;
        if m.m_min > m.m_max || m.k_min > m.k_max {
            return bad(format!(
                "empty mode range m = {}..={}, k = {}..={}",
                m.m_min, m.m_max, m.k_min, m.k_max
            ));
        }
        if !(self.solver.tol > 0.0) {
            return bad(format!(
                "solver tolerance must be positive, got {}",
                self.solver.tol
            ));
        }
        if self.solver.grid.n < GridSpec::MIN_NODES || self.equilibrium.grid.n < GridSpec::MIN_NODES
        {
            return bad(format!("grids need at least {} nodes", GridSpec::MIN_NODES));
        }
        if let Some(s) = &self.scaling {
            if s.alphas.is_empty() || s.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
                return bad("scaling alphas must be a nonempty list of values in (0, 1)".into());
            }
            if s.k_min_power > s.k_max_power || s.k_max_power > 40 {
                return bad(format!(
                    "invalid scaling k powers {}..={}",
                    s.k_min_power, s.k_max_power
                ));
            }
        }
        if let Some(d) = &self.dynamics {
            if d.t_end.is_some_and(|t| !(t > 0.0))
                || d.dt.is_some_and(|t| !(t > 0.0))
                || !(d.efolds > 0.0)
            {
                return bad("dynamics times must be positive".into());
            }
            if !(d.ledger_tol > 0.0) {
                return bad("ledger tolerance must be positive".into());
            }
            if d.grid_n < GridSpec::MIN_NODES {
                return bad(format!(
                    "dynamics grid needs at least {} nodes",
                    GridSpec::MIN_NODES
                ));
            }
        }
        if self.threads == Some(0) {
            return bad("thread count must be positive".into());
        }
        if self.output.formats.is_empty() {
            return bad("at least one output format is required".into());
        }
        Ok(())
    }

    pub fn wants(&self, format: Format) -> bool {
        self.output.formats.contains(&format)
    }
}
