//! Numerical admissibility test of a pressure profile.

use serde::Serialize;

use super::profile::PressureProfile;
use super::state::EquilibriumState;

/// Findings of [`check_admissibility`].
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    /// `p ≥ 0` on every grid node.
    pub nonnegative: bool,
    /// `p(r₀) = 0`.
    pub vanishes_at_boundary: bool,
    /// `p > 0` on every interior node.
    pub positive_interior: bool,
    /// `p′ ≤ 0` on the sampled boundary neighbourhood.
    pub decreasing_near_boundary: bool,
    /// `(r₀ − r, |p/p′|)` at `r = r₀ − 2^{−j} ε`, `j = 0..=12`.
    pub ratio_samples: Vec<(f64, f64)>,
    /// The ratio decays monotonically to below `1e−3`.
    pub ratio_vanishes: bool,
    /// `−∫₀^r s² p′ ds ≥ 0` at every node.
    pub integral_nonnegative: bool,
    /// Fitted exponent of `p ∼ (r₀ − r)^β` from the boundary samples.
    pub measured_order: Option<f64>,
    /// `(r₀ − r, |p′|/ρ)` at the same sample radii.
    pub dp_over_rho_samples: Vec<(f64, f64)>,
    /// Whether `|p′|/ρ` stays bounded as `r → r₀`.
    pub dp_over_rho_bounded: bool,
    /// All strict conditions hold.
    pub admissible: bool,
    /// All conditions hold except interior positivity (plateau profiles).
    pub relaxed_admissible: bool,
}

impl AdmissibilityReport {
    /// Human-readable list of the conditions that failed.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let checks = [
            (self.nonnegative, "p is negative somewhere"),
            (self.vanishes_at_boundary, "p(r0) != 0"),
            (self.positive_interior, "p vanishes inside the plasma"),
            (self.decreasing_near_boundary, "p' > 0 near r0"),
            (self.ratio_vanishes, "p/p' does not tend to 0 at r0"),
            (
                self.integral_nonnegative,
                "magnetic pressure integral negative",
            ),
        ];
        for (ok, msg) in checks {
            if !ok {
                out.push(msg.to_string());
            }
        }
        out
    }
}

/// Outer width `ε` of the boundary neighbourhood, as a fraction of `r₀`.
const NEIGHBOURHOOD: f64 = 0.1;
/// Number of halvings toward `r₀`.
const LEVELS: i32 = 12;

/// Evaluate the admissibility conditions and the boundedness of `|p′|/ρ`.
pub fn check_admissibility(
    profile: &PressureProfile,
    eq: &EquilibriumState,
) -> AdmissibilityReport {
    let r0 = profile.r0;
    let n = eq.len();
    let pmax =
        eq.p.iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()))
            .max(profile.sample(0.0).p.abs());
    let zero_tol = 1e-14 * pmax.max(f64::MIN_POSITIVE);

    let nonnegative = eq.p.iter().all(|&v| v >= -zero_tol);
    let vanishes_at_boundary = profile.sample(r0).p.abs() <= zero_tol;
    let positive_interior = pmax > 0.0 && eq.p[..n - 1].iter().all(|&v| v > 0.0);

    let eps = NEIGHBOURHOOD * r0;
    let mut decreasing = true;
    let mut ratio_samples = Vec::new();
    let mut rho_samples = Vec::new();
    for j in 0..=LEVELS {
        let d = eps * 0.5f64.powi(j);
        let s = profile.sample(r0 - d);
        if s.dp > 0.0 {
            decreasing = false;
        }
        let ratio = if s.p == 0.0 {
            0.0
        } else if s.dp == 0.0 {
            f64::INFINITY
        } else {
            (s.p / s.dp).abs()
        };
        ratio_samples.push((d, ratio));
        let rho = profile.density(s.p);
        let q = if s.dp == 0.0 {
            0.0
        } else if rho == 0.0 {
            f64::INFINITY
        } else {
            s.dp.abs() / rho
        };
        rho_samples.push((d, q));
    }
    let ratio_vanishes = ratio_samples
        .windows(2)
        .all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-12))
        && ratio_samples.last().map(|x| x.1 < 1e-3).unwrap_or(false);

    let integral_nonnegative = eq.grid.iter().all(|&r| {
        let i = eq.magnetic_integral(r);
        i >= -1e-12 * pmax.max(f64::MIN_POSITIVE) * r0.powi(3)
    });

    let ds: Vec<f64> = ratio_samples.iter().map(|s| s.0).collect();
    let ps: Vec<f64> = ds.iter().map(|&d| profile.sample(r0 - d).p).collect();
    let measured_order = log_slope(&ds, &ps);
    let dp_over_rho_bounded = bounded_as_d_vanishes(&rho_samples);

    let admissible = nonnegative
        && vanishes_at_boundary
        && positive_interior
        && decreasing
        && ratio_vanishes
        && integral_nonnegative;
    let relaxed_admissible =
        nonnegative && vanishes_at_boundary && decreasing && ratio_vanishes && integral_nonnegative;
    AdmissibilityReport {
        nonnegative,
        vanishes_at_boundary,
        positive_interior,
        decreasing_near_boundary: decreasing,
        ratio_samples,
        ratio_vanishes,
        integral_nonnegative,
        measured_order,
        dp_over_rho_samples: rho_samples,
        dp_over_rho_bounded,
        admissible,
        relaxed_admissible,
    }
}

/// Least-squares slope of `log y` against `log d` over the innermost half of
/// the samples; `None` when any sample is nonpositive.
fn log_slope(d: &[f64], y: &[f64]) -> Option<f64> {
    let start = d.len() / 2;
    let pts: Vec<(f64, f64)> = d[start..]
        .iter()
        .zip(&y[start..])
        .map(|(&a, &b)| (a, b))
        .collect();
    if pts
        .iter()
        .any(|&(a, b)| !(a > 0.0 && b > 0.0) || !b.is_finite())
    {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    crate::regression::linear_fit(&xs, &ys)
        .ok()
        .map(|f| f.slope)
}

/// `|p′|/ρ` is bounded near the boundary when it decays or its log-log slope
/// against the distance to `r₀` is (numerically) nonnegative.
fn bounded_as_d_vanishes(samples: &[(f64, f64)]) -> bool {
    if samples.iter().any(|s| !s.1.is_finite()) {
        return false;
    }
    if samples.iter().all(|s| s.1 == 0.0) {
        return true;
    }
    let d: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1).collect();
    match log_slope(&d, &y) {
        Some(slope) => slope >= -0.05,
        // some zero samples (super-exponential decay) — bounded
        None => true,
    }
}
