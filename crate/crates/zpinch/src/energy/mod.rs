//! Per-mode quadratic energy functionals `E_{m,k}`, the constraint
//! functional `J`, eliminated (reduced) functionals and weighted norms.
//!
//! A perturbation `∝ e^{i(mθ + kz)}` is described by the radial functions
//! `ξ` (radial displacement), `η` (axial), `ζ` (azimuthal) on `(0, r₀]` and,
//! for `m ≠ 0`, the radial vacuum field `Q̂_r` on `[r₀, r_w]`. All integrals
//! carry the common factor `2π²`.

mod field;
mod forms;
mod norms;

pub use field::{
    FieldSample, FnField, KinkEliminated, RadialField, RandomSineField, SausageEliminated,
    TrialField, VacuumField,
};
pub use forms::{
    boundary_coefficient, mass_weight, panel_points, plasma_squares, Form, Square, POINTS_PER_PANEL,
};
pub use norms::{
    coercivity_diagnostic, split_function, weighted_boundary_estimate, weighted_norms,
    CoercivityDiagnostic, WeightedNorms,
};

use serde::{Deserialize, Serialize};

use crate::equilibrium::EquilibriumState;
use crate::quadrature::Rule;
use crate::{Error, Result, TWO_PI_SQ};

/// Fourier pair `(m, k)` of a perturbation `∝ e^{i(mθ + kz)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub m: i32,
    pub k: i64,
}

impl ModeIndex {
    pub fn new(m: i32, k: i64) -> Self {
        ModeIndex { m, k }
    }

    /// `m² + k² r²`.
    pub fn d(&self, r: f64) -> f64 {
        let (m, k) = (self.m as f64, self.k as f64);
        m * m + k * k * r * r
    }
}

/// Energy contributions of one trial field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// Plasma energy `E^p`.
    pub fluid: f64,
    /// Interface energy `E^s = −2π²[B̂² − B²]_{r₀} ξ(r₀)²`.
    pub surface: f64,
    /// Vacuum energy `E^v`.
    pub vacuum: f64,
    /// `E = E^p + E^s + E^v`.
    pub total: f64,
    /// Constraint functional `J`.
    pub constraint: f64,
    /// `E` evaluated through the alternative algebraic arrangement, for
    /// cross-validation.
    pub alternate_total: f64,
}

/// Gauss rule shared by the energy quadratures.
pub(crate) fn energy_rule() -> Rule {
    Rule::gauss_legendre(POINTS_PER_PANEL)
}

/// Tolerance for the `ξ(0) = 0` and interface-coupling checks, relative to
/// the field's scale.
const COUPLING_TOL: f64 = 1e-9;

fn check_axis(field: &dyn RadialField, mode: ModeIndex) -> Result<Vec<f64>> {
    let breaks = field.breakpoints();
    if breaks.len() < 2 || breaks[0] != 0.0 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "field breakpoints must increase from r = 0".into(),
        ));
    }
    let s0 = field.sample(0.0);
    let scale = field.sample(*breaks.last().unwrap()).xi.abs().max(1.0);
    if s0.xi.abs() > COUPLING_TOL * scale || (mode.m != 0 && s0.zeta.abs() > COUPLING_TOL * scale) {
        return Err(Error::QuadratureBlowup);
    }
    Ok(breaks)
}

/// `Σ_panels Σ_points w f(r, field(r))` over the field's panels.
fn integrate_field(
    eq: &EquilibriumState,
    breaks: &[f64],
    field: &dyn RadialField,
    mut f: impl FnMut(&crate::equilibrium::PointState, &[f64; 4]) -> f64,
) -> f64 {
    let rule = energy_rule();
    let mut total = 0.0;
    for w in breaks.windows(2) {
        for (r, wt) in panel_points(eq, &rule, w[0], w[1]) {
            let pt = eq.at(r);
            let v = field.sample(r).as_array();
            total += wt * f(&pt, &v);
        }
    }
    total
}

/// Plasma energy `E^p` (including the boundary term of the expanded form).
pub fn plasma_energy(
    eq: &EquilibriumState,
    mode: ModeIndex,
    field: &dyn RadialField,
    form: Form,
) -> Result<f64> {
    let breaks = check_axis(field, mode)?;
    Ok(plasma_energy_unchecked(eq, mode, &breaks, field, form))
}

fn plasma_energy_unchecked(
    eq: &EquilibriumState,
    mode: ModeIndex,
    breaks: &[f64],
    field: &dyn RadialField,
    form: Form,
) -> f64 {
    let bulk = integrate_field(eq, breaks, field, |pt, v| {
        plasma_squares(form, mode, eq.gamma, pt)
            .iter()
            .map(|s| s.eval(v))
            .sum()
    });
    let xi0 = field.sample(eq.r0).xi;
    TWO_PI_SQ * (bulk + boundary_coefficient(form, mode, eq) * xi0 * xi0)
}

/// `E^s = −2π²[B̂² − B²]_{r₀} ξ(r₀)²`.
pub fn surface_energy(eq: &EquilibriumState, xi_r0: f64) -> f64 {
    let bh = eq.b_hat(eq.r0);
    let b2 = eq.at(eq.r0).b2;
    -TWO_PI_SQ * (bh * bh - b2) * xi_r0 * xi_r0
}

/// `J = 2π² ∫ ρ(ξ² + η² + ζ²) r dr` (the `ζ` term is dropped for `m = 0`).
pub fn assemble_j(eq: &EquilibriumState, mode: ModeIndex, field: &dyn RadialField) -> f64 {
    let breaks = field.breakpoints();
    let with_zeta = if mode.m == 0 { 0.0 } else { 1.0 };
    TWO_PI_SQ
        * integrate_field(eq, &breaks, field, |pt, v| {
            mass_weight(pt) * (v[0] * v[0] + v[2] * v[2] + with_zeta * v[3] * v[3])
        })
}

/// Energy of an `m = 0` field: the completed-square form is the primary value
/// and the expanded form populates `alternate_total`.
pub fn assemble_e0k(
    eq: &EquilibriumState,
    mode: ModeIndex,
    field: &dyn RadialField,
) -> Result<EnergyBreakdown> {
    if mode.m != 0 {
        return Err(Error::InvalidInput(format!(
            "assemble_e0k needs m = 0, got m = {}",
            mode.m
        )));
    }
    let breaks = check_axis(field, mode)?;
    let fluid = plasma_energy_unchecked(eq, mode, &breaks, field, Form::Completed);
    let alt = plasma_energy_unchecked(eq, mode, &breaks, field, Form::Expanded);
    let surface = surface_energy(eq, field.sample(eq.r0).xi);
    Ok(EnergyBreakdown {
        fluid,
        surface,
        vacuum: 0.0,
        total: fluid + surface,
        constraint: assemble_j(eq, mode, field),
        alternate_total: alt + surface,
    })
}

/// Vacuum energy `2π² ∫_{r₀}^{r_w} [Q̂² + ((rQ̂)′)²/(m² + k²r²)] r dr` of a
/// piecewise-linear vacuum field.
pub fn vacuum_energy(mode: ModeIndex, vacuum: &VacuumField) -> f64 {
    let rule = energy_rule();
    let mut total = 0.0;
    for (x, q) in vacuum.mesh.windows(2).zip(vacuum.q.windows(2)) {
        let h = x[1] - x[0];
        let dq = (q[1] - q[0]) / h;
        for (r, w) in rule.points(x[0], x[1]) {
            let t = (r - x[0]) / h;
            let qv = q[0] * (1.0 - t) + q[1] * t;
            let drq = qv + r * dq;
            total += w * (qv * qv + drq * drq / mode.d(r)) * r;
        }
    }
    TWO_PI_SQ * total
}

/// Energy of an `m ≠ 0` field.
///
/// With `vacuum = Some(Q̂)`, the interface coupling `m B̂(r₀) ξ(r₀) = r₀ Q̂(r₀)`
/// and the wall condition `Q̂(r_w) = 0` are checked and `E^v` is integrated
/// directly; with `None`, the minimal vacuum energy `c(m,k) ξ(r₀)²` is used.
/// The four-square form is primary; the `β₀` decomposition populates
/// `alternate_total`.
pub fn assemble_emk(
    eq: &EquilibriumState,
    mode: ModeIndex,
    field: &dyn RadialField,
    vacuum: Option<&VacuumField>,
) -> Result<EnergyBreakdown> {
    if mode.m == 0 {
        return Err(Error::InvalidInput("assemble_emk needs m != 0".into()));
    }
    let breaks = check_axis(field, mode)?;
    let xi0 = field.sample(eq.r0).xi;
    let vac = match vacuum {
        Some(v) => {
            let target = mode.m as f64 * eq.b_hat(eq.r0) * xi0 / eq.r0;
            let scale = target
                .abs()
                .max(v.q.iter().fold(0.0f64, |a, q| a.max(q.abs())))
                .max(1e-300);
            let mismatch = (v.inner() - target).abs().max(v.outer().abs());
            if mismatch > COUPLING_TOL * scale.max(1.0) {
                return Err(Error::ConstraintViolation(mismatch));
            }
            vacuum_energy(mode, v)
        }
        None => crate::spectrum::vacuum_response(eq, mode)?.c * xi0 * xi0,
    };
    let fluid = plasma_energy_unchecked(eq, mode, &breaks, field, Form::Completed);
    let alt = plasma_energy_unchecked(eq, mode, &breaks, field, Form::Expanded);
    let surface = surface_energy(eq, xi0);
    Ok(EnergyBreakdown {
        fluid,
        surface,
        vacuum: vac,
        total: fluid + surface + vac,
        constraint: assemble_j(eq, mode, field),
        alternate_total: alt + surface + vac,
    })
}

/// Energy breakdown for either sign class of `m`; for a [`TrialField`] the
/// attached vacuum field is used.
pub fn assemble(eq: &EquilibriumState, field: &TrialField) -> Result<EnergyBreakdown> {
    if field.mode.m == 0 {
        assemble_e0k(eq, field.mode, field)
    } else {
        assemble_emk(eq, field.mode, field, field.vacuum.as_ref())
    }
}

/// Reduced sausage functional
/// `Ẽ(ξ) = 2π² ∫ [2p′ + 4γpB²/(r(γp + B²))] ξ² dr`, the value of `E_{0,k}`
/// once `η` annihilates the compressional square.
pub fn reduced_sausage_energy(eq: &EquilibriumState, field: &dyn RadialField) -> f64 {
    let breaks = field.breakpoints();
    TWO_PI_SQ
        * integrate_field(eq, &breaks, field, |pt, v| {
            let s = eq.gamma * pt.p + pt.b2;
            let extra = if s > 0.0 {
                4.0 * eq.gamma * pt.p * pt.b2 / (pt.r * s)
            } else {
                0.0
            };
            (2.0 * pt.dp + extra) * v[0] * v[0]
        })
}

/// Value of each square of the primary form, integrated separately
/// (`2π²` included). Useful to confirm that eliminated fields annihilate the
/// intended terms.
pub fn term_energies(eq: &EquilibriumState, mode: ModeIndex, field: &dyn RadialField) -> Vec<f64> {
    let breaks = field.breakpoints();
    let rule = energy_rule();
    let mut totals: Vec<f64> = Vec::new();
    for w in breaks.windows(2) {
        for (r, wt) in panel_points(eq, &rule, w[0], w[1]) {
            let pt = eq.at(r);
            let v = field.sample(r).as_array();
            let sq = plasma_squares(Form::Completed, mode, eq.gamma, &pt);
            if totals.len() < sq.len() {
                totals.resize(sq.len(), 0.0);
            }
            for (t, s) in totals.iter_mut().zip(&sq) {
                *t += wt * s.eval(&v);
            }
        }
    }
    totals.into_iter().map(|t| TWO_PI_SQ * t).collect()
}
