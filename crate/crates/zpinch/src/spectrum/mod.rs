//! Growth rates from the constrained minimisation `λ = inf E/J`.
//!
//! The trial space is continuous piecewise-linear in `ξ`, `η`, `ζ` on a mesh
//! that includes the axis, with `ξ(0) = ζ(0) = 0` built in. `K` and `M`
//! (representing `2E` and `2J`) are assembled from the same weighted squares
//! that the energy module evaluates, so `xᵀKx = 2E(field(x))` exactly. The
//! vacuum is condensed into one boundary stiffness `c(m,k) ξ(r₀)²`.

mod banded;
mod eigen;
mod operators;
mod residual;
mod solve;
mod vacuum;

pub use banded::{BandCholesky, BandMatrix};
pub use eigen::{
    count_below, dense_pencil, dense_spectrum, eigen_residual, smallest_banded, smallest_dense,
    smallest_eigenpair, Eigenpair, SolverKind, DEGENERACY_TOL, DENSE_THRESHOLD, EIGEN_TOL,
    MAX_TIE_GROUP,
};
pub use operators::{assemble_operators, mesh_with_axis, DiscreteOperatorPair};
pub use residual::{
    interface_residual, nodal_residuals, sausage_eta_from_xi, sausage_system_residuals,
    NodalResiduals,
};
pub use solve::{
    rayleigh_quotient, solve_mode, solve_on_mesh, spectral_result, summarise, sweep_modes,
    RefinementLevel, SolveOptions, SpectralResult, SweepEntry, SweepReport, SYMMETRY_TOL,
};
pub use vacuum::{
    solve_vacuum_fem, vacuum_response, vacuum_response_with, VacuumResponse, VACUUM_ELEMENTS,
};

use crate::energy::ModeIndex;
use crate::equilibrium::EquilibriumState;
use crate::Result;

/// Euler–Lagrange residual `(el_residual, bc_residual)` of a solved mode.
pub fn euler_lagrange_residual(
    eq: &EquilibriumState,
    result: &SpectralResult,
) -> Result<(f64, f64)> {
    let vac = if result.mode.m != 0 {
        Some(vacuum_response(eq, result.mode)?)
    } else {
        None
    };
    let el = nodal_residuals(eq, &result.minimizer, result.lambda).weighted_norm();
    let bc = interface_residual(eq, &result.minimizer, vac.as_ref()).abs();
    Ok((el, bc))
}

/// Convenience: `ModeIndex` list for a rectangular range.
pub fn mode_grid(
    m_range: std::ops::RangeInclusive<i32>,
    k_range: std::ops::RangeInclusive<i64>,
) -> Vec<ModeIndex> {
    m_range
        .flat_map(|m| k_range.clone().map(move |k| ModeIndex::new(m, k)))
        .collect()
}
