//! Weighted Sobolev norms, the compact-embedding norms and the weighted
//! boundary estimate for `∫(−p′)ξ²`.

use serde::Serialize;

use super::field::RadialField;
use super::forms::panel_points;
use super::{energy_rule, ModeIndex};
use crate::equilibrium::{EquilibriumState, PointState};
use crate::TWO_PI_SQ;

/// Norms of a trial field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedNorms {
    /// `‖(ξ, η)‖_{X_k}` for `m = 0`, `‖(ξ, η, ζ)‖_{Y_{m,k}}` otherwise.
    pub energy_norm: f64,
    /// `‖ξ‖_Z` for `m = 0`, `‖ξ‖_V` otherwise.
    pub embedding_norm: f64,
    /// Split point `s₁` used by the embedding norm.
    pub s1: f64,
}

/// `∫ f(pt, [ξ, ξ′, η, ζ]) dr` over `[a, b]`, split at the field's breakpoints.
fn integrate_between(
    eq: &EquilibriumState,
    field: &dyn RadialField,
    a: f64,
    b: f64,
    mut f: impl FnMut(&PointState, &[f64; 4]) -> f64,
) -> f64 {
    let mut edges = vec![a];
    edges.extend(field.breakpoints().into_iter().filter(|&x| x > a && x < b));
    edges.push(b);
    let rule = energy_rule();
    let mut total = 0.0;
    for w in edges.windows(2) {
        for (r, wt) in panel_points(eq, &rule, w[0], w[1]) {
            total += wt * f(&eq.at(r), &field.sample(r).as_array());
        }
    }
    total
}

fn sq(x: f64) -> f64 {
    x * x
}

/// The weighted norms of `field` for `mode`, with the embedding norm split
/// at `s₁ ∈ (0, r₀)`.
///
/// * `‖(ξ,η)‖²_{X_k} = ∫{p[(rξ)′/r]² + B²[kη − ((rξ)′ − 2ξ)/r]²} r dr
///   + ∫ρ(ξ² + η²) r dr`
/// * `‖(ξ,η,ζ)‖²_{Y_{m,k}} = ∫p[(rξ)′/r + mζ/r]² r dr + ∫B²ξ²/r dr
///   + ∫B²[η/r − k((rξ)′ − 2ξ)/(m²+k²r²)]² r dr + ∫B²(ξ − rξ′)²/r dr
///   + ∫ρ(ξ² + η² + ζ²) r dr`
/// * `‖ξ‖²_Z = ∫₀^{s₁} ξ² dr + ∫_{s₁}^{r₀} (−p′) ξ² dr`
/// * `‖ξ‖²_V = ∫₀^{s₁} B²ξ² dr + ∫_{s₁}^{r₀} (−p′) ξ² dr`
pub fn weighted_norms(
    eq: &EquilibriumState,
    mode: ModeIndex,
    field: &dyn RadialField,
    s1: f64,
) -> WeightedNorms {
    let r0 = eq.r0;
    let k = mode.k as f64;
    let m = mode.m as f64;
    let energy_sq = integrate_between(eq, field, 0.0, r0, |pt, v| {
        let (r, xi, dxi, eta, zeta) = (pt.r, v[0], v[1], v[2], v[3]);
        let div = xi / r + dxi;
        if mode.m == 0 {
            pt.p * sq(div) * r
                + pt.b2 * sq(k * eta + xi / r - dxi) * r
                + pt.rho * (xi * xi + eta * eta) * r
        } else {
            let d = mode.d(r);
            pt.p * sq(div + m * zeta / r) * r
                + pt.b2 * xi * xi / r
                + pt.b2 * sq(eta / r + k * (xi - r * dxi) / d) * r
                + pt.b2 * sq(xi - r * dxi) / r
                + pt.rho * (xi * xi + eta * eta + zeta * zeta) * r
        }
    });
    let inner = integrate_between(eq, field, 0.0, s1, |pt, v| {
        if mode.m == 0 {
            v[0] * v[0]
        } else {
            pt.b2 * v[0] * v[0]
        }
    });
    let outer = integrate_between(eq, field, s1, r0, |pt, v| -pt.dp * v[0] * v[0]);
    WeightedNorms {
        energy_norm: energy_sq.max(0.0).sqrt(),
        embedding_norm: (inner + outer).max(0.0).sqrt(),
        s1,
    }
}

/// Number of uniform samples used to approximate the supremum in
/// [`split_function`].
const SPLIT_SAMPLES: usize = 4096;

/// `g(s₁) = sup_{s₁ ≤ s < r₀} p(s)/(−p′(s))`, approximated on a fine uniform
/// sample plus the grid nodes. Returns `+∞` if `p′ ≥ 0` while `p > 0`.
pub fn split_function(eq: &EquilibriumState, s1: f64) -> f64 {
    let r0 = eq.r0;
    let mut radii: Vec<f64> = (0..SPLIT_SAMPLES)
        .map(|i| s1 + (r0 - s1) * i as f64 / SPLIT_SAMPLES as f64)
        .collect();
    radii.extend(eq.grid.iter().copied().filter(|&r| r >= s1 && r < r0));
    let mut g = 0.0f64;
    for r in radii {
        let s = eq.profile.sample(r);
        if s.p <= 0.0 {
            continue;
        }
        if s.dp >= 0.0 {
            return f64::INFINITY;
        }
        g = g.max(s.p / -s.dp);
    }
    g
}

/// Both sides of the weighted estimate
/// `∫_{s₁}^{r₀} (−p′) ξ² dr ≤ 2 p(s₁) ξ(s₁)² + 4 g(s₁) ∫_{s₁}^{r₀} p ξ′² dr`.
/// Returns `(lhs, rhs)`.
pub fn weighted_boundary_estimate(
    eq: &EquilibriumState,
    field: &dyn RadialField,
    s1: f64,
) -> (f64, f64) {
    let lhs = integrate_between(eq, field, s1, eq.r0, |pt, v| -pt.dp * v[0] * v[0]);
    let grad = integrate_between(eq, field, s1, eq.r0, |pt, v| pt.p * v[1] * v[1]);
    let xi = field.sample(s1).xi;
    let rhs = 2.0 * eq.profile.sample(s1).p * xi * xi + 4.0 * split_function(eq, s1) * grad;
    (lhs, rhs)
}

/// Quantities entering the coercivity bound
/// `‖(ξ,η)‖²_{X_k} ≤ J + C(M + 1) + C ∫(2p′ξ² + γpk²η²r) dr` for `m = 0`.
/// The constant `C` is not known explicitly, so this is a logged diagnostic.
/// `J` and `E` are reported per `2π²` to match the norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoercivityDiagnostic {
    /// `‖(ξ,η)‖²_{X_k}`.
    pub x_norm_sq: f64,
    /// `J(ξ, η)/(2π²)`.
    pub constraint: f64,
    /// `E_{0,k}(ξ, η)/(2π²)`.
    pub energy: f64,
    /// `∫(2p′ξ² + γpk²η²r) dr`.
    pub indefinite_part: f64,
}

/// Evaluate [`CoercivityDiagnostic`] for an `m = 0` field.
pub fn coercivity_diagnostic(
    eq: &EquilibriumState,
    k: i64,
    field: &dyn RadialField,
) -> crate::Result<CoercivityDiagnostic> {
    let mode = ModeIndex::new(0, k);
    let norms = weighted_norms(eq, mode, field, 0.5 * eq.r0);
    let e = super::assemble_e0k(eq, mode, field)?;
    let kf = k as f64;
    let indefinite = integrate_between(eq, field, 0.0, eq.r0, |pt, v| {
        2.0 * pt.dp * v[0] * v[0] + eq.gamma * pt.p * kf * kf * v[2] * v[2] * pt.r
    });
    Ok(CoercivityDiagnostic {
        x_norm_sq: norms.energy_norm * norms.energy_norm,
        constraint: e.constraint / TWO_PI_SQ,
        energy: e.total / TWO_PI_SQ,
        indefinite_part: indefinite,
    })
}
