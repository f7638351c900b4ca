//! Study orchestration: equilibrium → criteria → sweep → scaling → dynamics.
//!
//! Every stage writes its own artifacts. Per-mode and per-α failures are
//! recorded in the summary instead of aborting the study, so partial results
//! survive; only an unusable equilibrium stops the run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use zpinch::dynamics::{evolve_mode, fit_growth_rate, EvolveOptions, InitialState};
use zpinch::energy::{ModeIndex, RandomSineField, TrialField};
use zpinch::equilibrium::{
    build_equilibrium, check_admissibility, interchange_criterion_scan, sausage_criterion_scan,
    BuildOptions, CriterionReport, EquilibriumState, GridSpec, Verdict,
};
use zpinch::scaling::{fit_scaling_exponent, powers_of_two, Bump, ScalingStudy, ScalingVerdict};
use zpinch::spectrum::{
    mesh_with_axis, solve_mode, summarise, sweep_modes, SpectralResult, SweepEntry, SweepReport,
};

use crate::artifacts::*;
use crate::config::{DynamicsConfig, Format, InitialSource, StudyConfig};
use crate::error::{
    is_nonconvergence, CliError, CliResult, EXIT_NONCONVERGED, EXIT_OK, EXIT_PARTIAL,
};

/// A recorded, non-fatal stage failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: String,
    pub message: String,
    pub nonconvergence: bool,
}

impl StageFailure {
    fn new(stage: impl Into<String>, e: &zpinch::Error) -> Self {
        StageFailure {
            stage: stage.into(),
            message: e.to_string(),
            nonconvergence: is_nonconvergence(e),
        }
    }
}

/// Admissibility findings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilitySummary {
    pub admissible: bool,
    pub relaxed_admissible: bool,
    pub failures: Vec<String>,
    pub measured_order: Option<f64>,
}

/// Verdict of one criterion scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSummary {
    pub m: i32,
    pub verdict: String,
    pub witness_r: Option<f64>,
}

/// Most unstable mode of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupMu {
    pub m: i32,
    pub k: i64,
    pub mu: f64,
}

/// Fitted exponents of one scaling study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub alpha: f64,
    pub beta: Option<f64>,
    pub gamma: f64,
    pub fit_min_k: i64,
    pub fitted_exponent: f64,
    pub exponent_interval: (f64, f64),
    pub predicted_exponent: Option<f64>,
    pub j_exponent: f64,
    pub predicted_j_exponent: Option<f64>,
    pub e_exponent: f64,
    pub predicted_e_exponent: Option<f64>,
    pub verdict: ScalingVerdict,
}

impl From<&ScalingStudy> for ScalingSummary {
    fn from(s: &ScalingStudy) -> Self {
        ScalingSummary {
            alpha: s.alpha,
            beta: s.beta,
            gamma: s.gamma,
            fit_min_k: s.fit_min_k,
            fitted_exponent: s.lambda_fit.slope,
            exponent_interval: s.lambda_fit.slope_interval(0.95),
            predicted_exponent: s.predicted_exponent(),
            j_exponent: s.j_fit.slope,
            predicted_j_exponent: s.predicted_j_exponent(),
            e_exponent: s.e_fit.slope,
            predicted_e_exponent: s.predicted_e_exponent(),
            verdict: s.verdict,
        }
    }
}

/// Growth-rate fit of one integrated mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSummary {
    pub m: i32,
    pub k: i64,
    pub mu_fit: f64,
    pub mu_interval: (f64, f64),
    pub mu_spectral: f64,
    pub relative_error: f64,
    pub ledger_drift: f64,
    pub dt: f64,
    pub steps: usize,
}

/// Headline verdicts of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    /// Some `m = 0` mode has `λ < 0`.
    pub m0_instability_found: bool,
    pub criteria: Vec<CriterionSummary>,
    pub sup_mu: Option<SupMu>,
    pub unstable_modes: usize,
    pub scaling: Vec<ScalingSummary>,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: StudyConfig,
    pub admissibility: Option<AdmissibilitySummary>,
    pub verdicts: Verdicts,
    pub symmetry_violations: Vec<(ModeIndex, ModeIndex, f64, f64)>,
    pub dynamics: Vec<DynamicsSummary>,
    pub failures: Vec<StageFailure>,
}

impl Summary {
    pub fn new(config: &StudyConfig) -> Self {
        Summary {
            config: config.clone(),
            admissibility: None,
            verdicts: Verdicts {
                m0_instability_found: false,
                criteria: Vec::new(),
                sup_mu: None,
                unstable_modes: 0,
                scaling: Vec::new(),
            },
            symmetry_violations: Vec::new(),
            dynamics: Vec::new(),
            failures: Vec::new(),
        }
    }

    /// 0 when every stage succeeded, 3 when any failure was a
    /// non-convergence, 4 for other partial results.
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            EXIT_OK
        } else if self.failures.iter().any(|f| f.nonconvergence) {
            EXIT_NONCONVERGED
        } else {
            EXIT_PARTIAL
        }
    }
}

/// Output directory of a study.
pub fn output_dir(config: &StudyConfig) -> PathBuf {
    config.output.directory.clone()
}

/// Build the equilibrium; fatal on failure.
pub fn build(config: &StudyConfig) -> CliResult<EquilibriumState> {
    let opts = BuildOptions {
        rw: config.equilibrium.rw,
        strict_admissibility: config.strict_admissibility,
    };
    build_equilibrium(&config.profile, &config.equilibrium.grid, &opts).map_err(|e| match e {
        zpinch::Error::InvalidInput(msg) => CliError::Config(msg),
        other => CliError::stage("equilibrium", other),
    })
}

/// Write `equilibrium.csv` and return the admissibility findings.
pub fn equilibrium_stage(
    config: &StudyConfig,
    eq: &EquilibriumState,
    dir: &Path,
) -> CliResult<AdmissibilitySummary> {
    write_csv(&dir.join(EQUILIBRIUM_CSV), &EquilibriumRow::rows(eq))?;
    let report = check_admissibility(&config.profile, eq);
    Ok(AdmissibilitySummary {
        admissible: report.admissible,
        relaxed_admissible: report.relaxed_admissible,
        failures: report.failures(),
        measured_order: report.measured_order,
    })
}

fn verdict_name(v: Verdict) -> String {
    match v {
        Verdict::UnstableWitnessFound => "unstable-witness-found",
        Verdict::CriterionNonnegative => "criterion-nonnegative",
        Verdict::Inconclusive => "inconclusive",
    }
    .to_string()
}

/// Scan the criterion of every `m` in range and write `criteria.csv`.
pub fn criteria_stage(
    config: &StudyConfig,
    eq: &EquilibriumState,
    dir: &Path,
    failures: &mut Vec<StageFailure>,
) -> CliResult<Vec<CriterionSummary>> {
    let mut rows = Vec::new();
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for m in config.modes.m_min..=config.modes.m_max {
        // λ and the criteria depend on |m| only.
        if seen.contains(&m.abs()) {
            continue;
        }
        seen.push(m.abs());
        let scan: zpinch::Result<CriterionReport> = if m == 0 {
            sausage_criterion_scan(eq)
        } else {
            interchange_criterion_scan(eq, m.abs())
        };
        match scan {
            Ok(rep) => {
                rows.extend(
                    rep.radii
                        .iter()
                        .zip(&rep.scan)
                        .map(|(&r, &value)| CriterionRow { m: rep.m, r, value }),
                );
                out.push(CriterionSummary {
                    m: rep.m,
                    verdict: verdict_name(rep.verdict),
                    witness_r: rep.witness_r,
                });
            }
            Err(e) => failures.push(StageFailure::new(format!("criteria m={m}"), &e)),
        }
    }
    write_csv(&dir.join(CRITERIA_CSV), &rows)?;
    Ok(out)
}

/// Write the spectrum artifacts of a set of solved modes.
pub fn write_spectrum(config: &StudyConfig, report: &SweepReport, dir: &Path) -> CliResult<()> {
    let results: Vec<&SpectralResult> = report.results().collect();
    let rows: Vec<SpectrumRow> = results.iter().map(|r| SpectrumRow::from(*r)).collect();
    write_csv(&dir.join(SPECTRUM_CSV), &rows)?;
    if config.wants(Format::Json) {
        write_json(&dir.join(SPECTRUM_JSON), &rows)?;
    }
    let mdir = dir.join(MINIMIZER_DIR);
    for r in results {
        let stem = mode_stem(r.mode.m, r.mode.k);
        write_csv(
            &mdir.join(format!("{stem}.csv")),
            &MinimizerRow::rows(&r.minimizer),
        )?;
        if let Some(vac) = &r.minimizer.vacuum {
            let rows: Vec<VacuumRow> = vac
                .mesh
                .iter()
                .zip(&vac.q)
                .map(|(&r, &q_r)| VacuumRow { r, q_r })
                .collect();
            write_csv(&mdir.join(format!("{stem}_vacuum.csv")), &rows)?;
        }
    }
    Ok(())
}

fn record_sweep(report: &SweepReport, summary: &mut Summary) {
    for e in &report.entries {
        if let Err(err) = &e.outcome {
            summary.failures.push(StageFailure::new(
                format!("solve m={} k={}", e.mode.m, e.mode.k),
                err,
            ));
        }
    }
    let unstable = report.unstable();
    summary.verdicts.m0_instability_found = unstable.iter().any(|m| m.m == 0);
    summary.verdicts.unstable_modes = unstable.len();
    summary.verdicts.sup_mu = report.sup_mu.map(|(mode, mu)| SupMu {
        m: mode.m,
        k: mode.k,
        mu,
    });
    summary.symmetry_violations = report.symmetry_violations.clone();
}

/// Solve every mode in range.
pub fn sweep_stage(config: &StudyConfig, eq: &EquilibriumState) -> SweepReport {
    let m = &config.modes;
    sweep_modes(eq, m.m_min..=m.m_max, m.k_min..=m.k_max, &config.solver)
}

/// Solve a single mode.
pub fn solve_stage(config: &StudyConfig, eq: &EquilibriumState, mode: ModeIndex) -> SweepReport {
    summarise(vec![SweepEntry {
        mode,
        outcome: solve_mode(eq, mode, &config.solver),
    }])
}

/// Run every configured scaling study and write `scaling.csv`.
pub fn scaling_stage(
    config: &StudyConfig,
    eq: &EquilibriumState,
    dir: &Path,
    failures: &mut Vec<StageFailure>,
) -> CliResult<Vec<ScalingStudy>> {
    let Some(sc) = &config.scaling else {
        return Ok(Vec::new());
    };
    let k_list = powers_of_two(sc.k_min_power, sc.k_max_power);
    let mut studies = Vec::new();
    for &alpha in &sc.alphas {
        match fit_scaling_exponent(eq, alpha, &Bump::default(), &k_list, sc.fit_min_k) {
            Ok(s) => studies.push(s),
            Err(e) => failures.push(StageFailure::new(format!("scaling alpha={alpha}"), &e)),
        }
    }
    let rows: Vec<ScalingRow> = studies
        .iter()
        .flat_map(|s| {
            s.samples.iter().map(move |x| ScalingRow {
                alpha: s.alpha,
                k: x.k,
                j_value: x.j_value,
                e_value: x.e_value,
                lambda_upper: x.lambda_upper,
            })
        })
        .collect();
    write_csv(&dir.join(SCALING_CSV), &rows)?;
    if config.wants(Format::Json) {
        let summaries: Vec<ScalingSummary> = studies.iter().map(ScalingSummary::from).collect();
        write_json(&dir.join(SCALING_JSON), &summaries)?;
    }
    Ok(studies)
}

/// Maximum number of ledger rows written per trajectory.
const MAX_LEDGER_ROWS: usize = 5000;

/// Integrate one solved unstable mode and write its ledger.
pub fn evolve_result(
    config: &StudyConfig,
    dyn_cfg: &DynamicsConfig,
    eq: &EquilibriumState,
    result: &SpectralResult,
    dir: &Path,
) -> zpinch::Result<DynamicsSummary> {
    let mode = result.mode;
    let mu = result.mu.ok_or_else(|| {
        zpinch::Error::InvalidInput(format!("mode m={} k={} is not unstable", mode.m, mode.k))
    })?;
    let mesh = mesh_with_axis(&GridSpec::uniform(dyn_cfg.grid_n).nodes(eq.r0)?);
    let displacement = match dyn_cfg.initial {
        InitialSource::Minimizer => TrialField::interpolate(mode, mesh, &result.minimizer),
        InitialSource::Random => {
            let seed = config.seed ^ ((mode.m as u64) << 32) ^ (mode.k as u64);
            TrialField::interpolate(
                mode,
                mesh,
                &RandomSineField::new(seed, 8, eq.r0, mode.m != 0),
            )
        }
    };
    let t_end = dyn_cfg.t_end.unwrap_or(dyn_cfg.efolds / mu);
    let opts = EvolveOptions {
        t_end,
        dt: dyn_cfg.dt,
        record_every: usize::MAX,
        ledger_tol: dyn_cfg.ledger_tol,
    };
    let traj = evolve_mode(eq, &InitialState::at_rest(displacement), &opts)?;
    let stride = traj.ledger.len().div_ceil(MAX_LEDGER_ROWS).max(1);
    let rows: Vec<_> = traj.ledger.iter().step_by(stride).copied().collect();
    let path = dir
        .join(DYNAMICS_DIR)
        .join(format!("{}.csv", mode_stem(mode.m, mode.k)));
    write_csv(&path, &rows).map_err(|e| zpinch::Error::InvalidInput(e.to_string()))?;
    let fit = fit_growth_rate(&traj)?;
    Ok(DynamicsSummary {
        m: mode.m,
        k: mode.k,
        mu_fit: fit.mu,
        mu_interval: fit.interval,
        mu_spectral: mu,
        relative_error: fit.mu / mu - 1.0,
        ledger_drift: traj.ledger_drift(),
        dt: traj.dt,
        steps: traj.ledger.len(),
    })
}

/// Integrate the `max_modes` most unstable solved modes.
pub fn dynamics_stage(
    config: &StudyConfig,
    eq: &EquilibriumState,
    report: &SweepReport,
    dir: &Path,
    failures: &mut Vec<StageFailure>,
) -> Vec<DynamicsSummary> {
    let Some(dyn_cfg) = &config.dynamics else {
        return Vec::new();
    };
    let mut unstable: Vec<&SpectralResult> = report.results().filter(|r| r.mu.is_some()).collect();
    unstable.sort_by(|a, b| {
        b.mu.unwrap_or(0.0)
            .total_cmp(&a.mu.unwrap_or(0.0))
            .then(a.mode.cmp(&b.mode))
    });
    let mut out = Vec::new();
    for r in unstable.into_iter().take(dyn_cfg.max_modes) {
        match evolve_result(config, dyn_cfg, eq, r, dir) {
            Ok(s) => out.push(s),
            Err(e) => failures.push(StageFailure::new(
                format!("evolve m={} k={}", r.mode.m, r.mode.k),
                &e,
            )),
        }
    }
    out
}

/// Run every stage and write `summary.json`.
pub fn run_study(config: &StudyConfig) -> CliResult<Summary> {
    config.validate()?;
    let dir = output_dir(config);
    ensure_dir(&dir)?;
    let mut summary = Summary::new(config);
    let eq = build(config)?;
    summary.admissibility = Some(equilibrium_stage(config, &eq, &dir)?);
    summary.verdicts.criteria = criteria_stage(config, &eq, &dir, &mut summary.failures)?;
    let report = sweep_stage(config, &eq);
    record_sweep(&report, &mut summary);
    write_spectrum(config, &report, &dir)?;
    let studies = scaling_stage(config, &eq, &dir, &mut summary.failures)?;
    summary.verdicts.scaling = studies.iter().map(ScalingSummary::from).collect();
    summary.dynamics = dynamics_stage(config, &eq, &report, &dir, &mut summary.failures);
    write_json(&dir.join(SUMMARY_JSON), &summary)?;
    Ok(summary)
}

/// Run only the solve stage(s) for `report`-producing subcommands and write
/// the spectrum artifacts plus a summary.
pub fn finish_spectrum(
    config: &StudyConfig,
    report: &SweepReport,
    dir: &Path,
) -> CliResult<Summary> {
    let mut summary = Summary::new(config);
    record_sweep(report, &mut summary);
    write_spectrum(config, report, dir)?;
    write_json(&dir.join(SUMMARY_JSON), &summary)?;
    Ok(summary)
}
