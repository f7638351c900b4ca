//! Mode solves with grid refinement, and sweeps over `(m, k)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{eigen_residual, smallest_eigenpair, Eigenpair, SolverKind};
use super::operators::{assemble_operators, mesh_with_axis, DiscreteOperatorPair};
use super::residual::{interface_residual, nodal_residuals};
use crate::energy::{
    assemble_j, boundary_coefficient, plasma_energy, surface_energy, Form, ModeIndex, TrialField,
};
use crate::equilibrium::{EquilibriumState, GridSpec};
use crate::{Error, Result, TWO_PI_SQ};

/// Discretisation and convergence controls for [`solve_mode`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    /// Coarsest grid.
    pub grid: GridSpec,
    /// Grid doublings always performed after the coarsest solve.
    pub refinements: usize,
    /// Further doublings allowed while `|λ(2n) − λ(n)| > tol·|λ|`.
    pub max_refinements: usize,
    /// Relative tolerance on `|λ(2n) − λ(n)|` for the last refinement.
    pub tol: f64,
    pub solver: SolverKind,
    /// Fail with [`Error::NonConvergedGrid`] when the tolerance is missed.
    pub require_convergence: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            grid: GridSpec::graded(1024),
            refinements: 2,
            max_refinements: 4,
            tol: 1e-6,
            solver: SolverKind::Auto,
            require_convergence: true,
        }
    }
}

impl SolveOptions {
    /// Single solve on `grid`, no refinement study.
    pub fn single(grid: GridSpec) -> Self {
        SolveOptions {
            grid,
            refinements: 0,
            max_refinements: 0,
            require_convergence: false,
            ..Default::default()
        }
    }
}

/// Result of one mode solve on the finest grid.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub mode: ModeIndex,
    /// Smallest eigenvalue `λ_{m,k}`: the Rayleigh quotient `E/J` of the
    /// minimiser, evaluated from the energy densities.
    pub lambda: f64,
    /// `√(−λ)` when `λ < 0`.
    pub mu: Option<f64>,
    /// Minimiser normalised to `J = 1`.
    pub minimizer: TrialField,
    /// `ρ`-weighted Euler–Lagrange residual norm.
    pub el_residual: f64,
    /// Magnitude of the interface-condition residual at `r₀`.
    pub bc_residual: f64,
    /// Relative algebraic residual `‖Kx − λMx‖/‖Kx‖`.
    pub eigen_residual: f64,
    /// Nodes of the finest grid.
    pub n_grid: usize,
    /// Every grid of the refinement study, coarsest first.
    pub history: Vec<RefinementLevel>,
    /// Multiplicity of the smallest eigenvalue on the finest grid.
    pub multiplicity: usize,
}

/// One grid of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    /// Grid nodes (excluding the axis).
    pub n: usize,
    pub lambda: f64,
    /// Euler–Lagrange residual of the minimiser on this grid.
    pub el_residual: f64,
}

impl SpectralResult {
    /// `|λ(n_last) − λ(n_prev)|`, if a refinement was performed.
    pub fn last_change(&self) -> Option<f64> {
        let h = &self.history;
        (h.len() >= 2).then(|| (h[h.len() - 1].lambda - h[h.len() - 2].lambda).abs())
    }

    /// Successive ratios `el(n/2) / el(n)` of the Euler–Lagrange residual.
    pub fn residual_ratios(&self) -> Vec<f64> {
        self.history
            .windows(2)
            .map(|w| w[0].el_residual / w[1].el_residual)
            .collect()
    }
}

/// Assemble and solve on one explicit mesh (starting at the axis).
pub fn solve_on_mesh(
    eq: &EquilibriumState,
    mode: ModeIndex,
    mesh: &[f64],
    form: Form,
    solver: SolverKind,
) -> Result<(DiscreteOperatorPair, Eigenpair)> {
    let ops = assemble_operators(eq, mode, mesh, form)?;
    if ops.m.diagonal().iter().any(|&d| !(d > 0.0)) {
        return Err(Error::InvalidInput(
            "density vanishes on a whole element; the mass matrix is singular".into(),
        ));
    }
    let pair = smallest_eigenpair(&ops.k, &ops.m, ops.boundary_dof(), solver)?;
    Ok((ops, pair))
}

/// `E/J` of a trial field, with the vacuum condensed as in `ops`.
///
/// Summing the weighted squares element by element is far less sensitive to
/// rounding than `xᵀKx` on strongly graded meshes, where the stiffness
/// entries grow like the inverse of the smallest cell.
pub fn rayleigh_quotient(
    eq: &EquilibriumState,
    ops: &DiscreteOperatorPair,
    field: &TrialField,
) -> Result<f64> {
    let xi0 = field.boundary_xi();
    let plasma = plasma_energy(eq, ops.mode, field, ops.form)?;
    let boundary = TWO_PI_SQ * boundary_coefficient(ops.form, ops.mode, eq) * xi0 * xi0;
    let vacuum = ops.vacuum.as_ref().map_or(0.0, |v| v.c * xi0 * xi0);
    let energy = plasma + boundary + surface_energy(eq, xi0) + vacuum;
    Ok(energy / assemble_j(eq, ops.mode, field))
}

/// Build the [`SpectralResult`] from an eigenpair on `ops`.
pub fn spectral_result(
    eq: &EquilibriumState,
    ops: &DiscreteOperatorPair,
    pair: &Eigenpair,
    history: Vec<RefinementLevel>,
) -> Result<SpectralResult> {
    // xᵀMx = 1 means 2J = 1; scale to J = 1.
    let x: Vec<f64> = pair
        .vector
        .iter()
        .map(|v| v * std::f64::consts::SQRT_2)
        .collect();
    let minimizer = ops.to_field(&x);
    let lambda = rayleigh_quotient(eq, ops, &minimizer)?;
    let el = nodal_residuals(eq, &minimizer, lambda).weighted_norm();
    let bc = interface_residual(eq, &minimizer, ops.vacuum.as_ref()).abs();
    Ok(SpectralResult {
        mode: ops.mode,
        lambda,
        mu: (lambda < 0.0).then(|| (-lambda).sqrt()),
        minimizer,
        el_residual: el,
        bc_residual: bc,
        eigen_residual: eigen_residual(&ops.k, &ops.m, pair.lambda, &pair.vector),
        n_grid: ops.mesh.len() - 1,
        history,
        multiplicity: pair.multiplicity,
    })
}

/// Smallest eigenvalue of `K x = λ M x` for `mode`.
///
/// The grid of `options` is doubled `options.refinements` times, then up to
/// `options.max_refinements` times in total while the last change in `λ`
/// exceeds `options.tol·|λ|`.
pub fn solve_mode(
    eq: &EquilibriumState,
    mode: ModeIndex,
    options: &SolveOptions,
) -> Result<SpectralResult> {
    let mut grid = options.grid;
    let mut history: Vec<RefinementLevel> = Vec::new();
    let mut level = 0;
    let result = loop {
        let mesh = mesh_with_axis(&grid.nodes(eq.r0)?);
        let (ops, pair) = solve_on_mesh(eq, mode, &mesh, Form::Completed, options.solver)?;
        let field = ops.to_field(&pair.vector).scaled(std::f64::consts::SQRT_2);
        let lambda = rayleigh_quotient(eq, &ops, &field)?;
        let el_residual = nodal_residuals(eq, &field, lambda).weighted_norm();
        history.push(RefinementLevel {
            n: grid.n,
            lambda,
            el_residual,
        });
        let settled = history.len() >= 2 && {
            let prev = history[history.len() - 2].lambda;
            (lambda - prev).abs() <= options.tol * lambda.abs()
        };
        if level >= options.max_refinements.max(options.refinements)
            || (level >= options.refinements && settled)
        {
            break spectral_result(eq, &ops, &pair, history)?;
        }
        grid = grid.refined();
        level += 1;
    };
    if options.require_convergence {
        if let Some(change) = result.last_change() {
            let tol = options.tol * result.lambda.abs();
            if change > tol {
                return Err(Error::NonConvergedGrid { change, tol });
            }
        }
    }
    Ok(result)
}

/// One row of a sweep.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub mode: ModeIndex,
    pub outcome: std::result::Result<SpectralResult, Error>,
}

/// Sweep outcome: per-mode results (in `(m, k)` order) and aggregates.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// `sup μ` over the unstable set and the mode attaining it.
    pub sup_mu: Option<(ModeIndex, f64)>,
    /// Pairs of sign-related modes whose eigenvalues differ by more than the
    /// relative tolerance: `(mode, partner, λ, λ_partner)`.
    pub symmetry_violations: Vec<(ModeIndex, ModeIndex, f64, f64)>,
}

impl SweepReport {
    /// Successful results.
    pub fn results(&self) -> impl Iterator<Item = &SpectralResult> {
        self.entries.iter().filter_map(|e| e.outcome.as_ref().ok())
    }

    /// Modes with `λ < 0`.
    pub fn unstable(&self) -> Vec<ModeIndex> {
        self.results()
            .filter(|r| r.lambda < 0.0)
            .map(|r| r.mode)
            .collect()
    }
}

/// Relative tolerance of the `λ_{m,k} = λ_{−m,−k} = λ_{m,−k}` check.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Solve every mode in `m_range × k_range` (concurrently); per-mode errors
/// are recorded without aborting the sweep.
pub fn sweep_modes(
    eq: &EquilibriumState,
    m_range: std::ops::RangeInclusive<i32>,
    k_range: std::ops::RangeInclusive<i64>,
    options: &SolveOptions,
) -> SweepReport {
    let modes: Vec<ModeIndex> = m_range
        .flat_map(|m| k_range.clone().map(move |k| ModeIndex::new(m, k)))
        .collect();
    let entries: Vec<SweepEntry> = modes
        .par_iter()
        .map(|&mode| SweepEntry {
            mode,
            outcome: solve_mode(eq, mode, options),
        })
        .collect();
    summarise(entries)
}

/// Aggregate sweep entries: sup μ and sign-symmetry violations.
pub fn summarise(entries: Vec<SweepEntry>) -> SweepReport {
    let lookup = |mode: ModeIndex| {
        entries
            .iter()
            .find(|e| e.mode == mode)
            .and_then(|e| e.outcome.as_ref().ok())
            .map(|r| r.lambda)
    };
    let mut sup_mu: Option<(ModeIndex, f64)> = None;
    let mut violations = Vec::new();
    for e in &entries {
        let Ok(r) = &e.outcome else { continue };
        if let Some(mu) = r.mu {
            if sup_mu.is_none_or(|(_, s)| mu > s) {
                sup_mu = Some((r.mode, mu));
            }
        }
        let m = r.mode;
        for partner in [
            ModeIndex::new(-m.m, -m.k),
            ModeIndex::new(m.m, -m.k),
            ModeIndex::new(-m.m, m.k),
        ] {
            if partner == m {
                continue;
            }
            if let Some(lp) = lookup(partner) {
                if (lp - r.lambda).abs() > SYMMETRY_TOL * r.lambda.abs().max(lp.abs()).max(1e-300)
                    && m < partner
                {
                    violations.push((m, partner, r.lambda, lp));
                }
            }
        }
    }
    SweepReport {
        entries,
        sup_mu,
        symmetry_violations: violations,
    }
}
