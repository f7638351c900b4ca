//! Force-balance equilibrium `B_θ(r)` built from the pressure profile.

use serde::Serialize;

use super::admissibility::check_admissibility;
use super::grid::GridSpec;
use super::profile::{PressureProfile, ProfileKind};
use crate::quadrature::Rule;
use crate::{Error, Result};

/// Equilibrium quantities at one radius.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PointState {
    pub r: f64,
    pub p: f64,
    pub dp: f64,
    pub rho: f64,
    /// `B_θ²`
    pub b2: f64,
    pub b: f64,
    /// `B_θ′`
    pub db: f64,
    /// `J_z = (1/r)(r B_θ)′`
    pub jz: f64,
}

/// Options for [`build_equilibrium`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BuildOptions {
    /// Conducting-wall radius; `None` means `2 r₀`.
    pub rw: Option<f64>,
    /// Reject profiles that fail the strict admissibility test.
    pub strict_admissibility: bool,
}

/// Sampled equilibrium on a radial grid plus continuous evaluation.
///
/// `B_θ² = −(2/r²)∫₀^r s² p′(s) ds` is integrated with composite
/// Gauss–Legendre panels whose edges are the grid nodes and the profile's
/// smoothness breakpoints; [`EquilibriumState::at`] evaluates every quantity
/// at arbitrary radii by completing the cumulative integral on the enclosing
/// panel. The state is immutable after construction.
#[derive(Debug, Clone)]
pub struct EquilibriumState {
    pub profile: PressureProfile,
    /// Grid nodes `0 < r_1 < … < r_n = r₀`.
    pub grid: Vec<f64>,
    pub p: Vec<f64>,
    pub dp: Vec<f64>,
    pub rho: Vec<f64>,
    pub b: Vec<f64>,
    pub db: Vec<f64>,
    pub jz: Vec<f64>,
    pub r0: f64,
    pub rw: f64,
    pub gamma: f64,
    pub entropy: f64,
    /// `B_θ(r₀) r₀`, so that `B̂_θ(r) = coefficient / r` in the vacuum.
    pub b_hat_coefficient: f64,
    panels: Vec<f64>,
    cumulative: Vec<f64>,
    rule: Rule,
    rough_boundary: bool,
}

/// Build the equilibrium for `profile` on the grid described by `spec`.
pub fn build_equilibrium(
    profile: &PressureProfile,
    spec: &GridSpec,
    options: &BuildOptions,
) -> Result<EquilibriumState> {
    profile.validate()?;
    let r0 = profile.r0;
    let rw = options.rw.unwrap_or(2.0 * r0);
    if !(rw > r0) {
        return Err(Error::InvalidInput(format!(
            "wall radius {rw} must exceed r0 = {r0}"
        )));
    }
    let grid = spec.nodes(r0)?;

    let mut panels = vec![0.0];
    panels.extend_from_slice(&grid);
    for bp in profile_breakpoints(profile) {
        if bp > 0.0 && bp < r0 {
            panels.push(bp);
        }
    }
    panels.sort_by(f64::total_cmp);
    panels.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * r0);

    let rule = Rule::gauss_legendre(16);
    let rough_boundary = !profile.smooth_at_boundary();
    let integrand = |s: f64| -s * s * profile.sample(s).dp;
    let last = panels.len() - 2;
    let mut cumulative = Vec::with_capacity(panels.len());
    cumulative.push(0.0);
    for (i, w) in panels.windows(2).enumerate() {
        let piece = if i == last && rough_boundary {
            rule.integrate_graded(w[0], w[1], false, true, integrand)
        } else {
            rule.integrate(w[0], w[1], integrand)
        };
        cumulative.push(cumulative[i] + piece);
    }

    let scale = cumulative.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (k, &v) in cumulative.iter().enumerate() {
        if v < -1e-12 * scale.max(f64::MIN_POSITIVE) && v < -1e-300 {
            return Err(Error::NonpositiveIntegrand {
                r: panels[k],
                value: v,
            });
        }
    }

    let mut eq = EquilibriumState {
        profile: profile.clone(),
        grid: grid.clone(),
        p: Vec::new(),
        dp: Vec::new(),
        rho: Vec::new(),
        b: Vec::new(),
        db: Vec::new(),
        jz: Vec::new(),
        r0,
        rw,
        gamma: profile.gamma,
        entropy: profile.entropy,
        b_hat_coefficient: 0.0,
        panels,
        cumulative,
        rule,
        rough_boundary,
    };
    for &r in &grid {
        let s = eq.at(r);
        eq.p.push(s.p);
        eq.dp.push(s.dp);
        eq.rho.push(s.rho);
        eq.b.push(s.b);
        eq.db.push(s.db);
        eq.jz.push(s.jz);
    }
    eq.b_hat_coefficient = eq.b[eq.b.len() - 1] * r0;

    if options.strict_admissibility {
        let report = check_admissibility(profile, &eq);
        if !report.admissible {
            return Err(Error::AdmissibilityViolation(report.failures().join("; ")));
        }
    }
    Ok(eq)
}

/// Radii where the profile's derivatives are only piecewise smooth.
fn profile_breakpoints(profile: &PressureProfile) -> Vec<f64> {
    match &profile.kind {
        ProfileKind::PowerLaw { core, .. } | ProfileKind::Exponential { core, .. } => {
            vec![core * profile.r0]
        }
        ProfileKind::Plateau { inner, outer } => vec![*inner, *outer],
        ProfileKind::Tabulated { r, .. } => r.clone(),
        _ => Vec::new(),
    }
}

impl EquilibriumState {
    /// Number of grid nodes.
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    /// Whether the grid is empty (never true for a built state).
    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `I(r) = −∫₀^r s² p′(s) ds`, so that `B_θ² = 2I/r²`.
    pub fn magnetic_integral(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let n = self.panels.len();
        if r >= self.r0 {
            return self.cumulative[n - 1];
        }
        let i = self
            .panels
            .partition_point(|&x| x <= r)
            .saturating_sub(1)
            .min(n - 2);
        let integrand = |s: f64| -s * s * self.profile.sample(s).dp;
        if i == n - 2 && self.rough_boundary {
            self.cumulative[n - 1]
                - self
                    .rule
                    .integrate_graded(r, self.r0, false, true, integrand)
        } else {
            self.cumulative[i] + self.rule.integrate(self.panels[i], r, integrand)
        }
    }

    /// All equilibrium quantities at radius `r ∈ (0, r₀]`.
    pub fn at(&self, r: f64) -> PointState {
        let s = self.profile.sample(r);
        let rho = self.profile.density(s.p);
        if r <= 0.0 {
            return PointState {
                r,
                p: s.p,
                dp: s.dp,
                rho,
                ..Default::default()
            };
        }
        let b2 = (2.0 * self.magnetic_integral(r) / (r * r)).max(0.0);
        let b = b2.sqrt();
        // J_z = (1/r)(r B)′ = −p′/B by force balance; B′ = J_z − B/r.
        let (jz, db) = if b > 0.0 {
            (-s.dp / b, -s.dp / b - b / r)
        } else {
            (0.0, 0.0)
        };
        PointState {
            r,
            p: s.p,
            dp: s.dp,
            rho,
            b2,
            b,
            db,
            jz,
        }
    }

    /// Whether derivatives of `p` are singular at `r₀`, so integrals over
    /// the last panel need geometric grading.
    pub fn rough_boundary(&self) -> bool {
        self.rough_boundary
    }

    /// Interior radii where the profile is only piecewise smooth.
    pub fn profile_breakpoints(&self) -> Vec<f64> {
        profile_breakpoints(&self.profile)
            .into_iter()
            .filter(|&x| x > 0.0 && x < self.r0)
            .collect()
    }

    /// Vacuum field `B̂_θ(r) = B_θ(r₀) r₀ / r`.
    pub fn b_hat(&self, r: f64) -> f64 {
        self.b_hat_coefficient / r
    }

    /// `B_θ′(0) = √(−p″(0)/2)` from the profile curvature at the axis.
    pub fn axis_field_slope(&self) -> f64 {
        (-self.profile.sample(0.0).d2p / 2.0).max(0.0).sqrt()
    }

    /// Total-pressure jump `p(r₀) + B_θ(r₀)²/2 − B̂_θ(r₀)²/2`.
    pub fn interface_pressure_jump(&self) -> f64 {
        let n = self.len() - 1;
        let bh = self.b_hat(self.r0);
        self.p[n] + 0.5 * self.b[n] * self.b[n] - 0.5 * bh * bh
    }

    /// Cell-averaged force-balance residual
    /// `(1/Δ)∫_{cell}[ (p + B_θ²/2)′ + B_θ²/r ] dr` for every grid cell, with
    /// the total-pressure difference taken from the sampled state and the
    /// curvature term integrated independently.
    pub fn force_balance_residuals(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let mut prev_r = 0.0;
        let mut prev_total = self.profile.sample(0.0).p;
        let breaks: Vec<f64> = profile_breakpoints(&self.profile);
        for (i, &r) in self.grid.iter().enumerate() {
            let total = self.p[i] + 0.5 * self.b[i] * self.b[i];
            let mut edges = vec![prev_r];
            edges.extend(breaks.iter().copied().filter(|&x| x > prev_r && x < r));
            edges.push(r);
            let is_last = i + 1 == self.len();
            let mut curvature = 0.0;
            for (j, w) in edges.windows(2).enumerate() {
                let f = |s: f64| self.at(s).b2 / s;
                curvature += if is_last && self.rough_boundary && j + 2 == edges.len() {
                    self.rule.integrate_graded(w[0], w[1], false, true, f)
                } else {
                    self.rule.integrate(w[0], w[1], f)
                };
            }
            out.push((total - prev_total + curvature) / (r - prev_r));
            prev_r = r;
            prev_total = total;
        }
        out
    }

    /// Sup-norm of [`EquilibriumState::force_balance_residuals`].
    pub fn force_balance_residual(&self) -> f64 {
        self.force_balance_residuals()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Pointwise residual `(p + B_θ²/2)′ + B_θ²/r` at interior nodes, with
    /// the derivative taken by five-point finite differences on the grid
    /// nodes (fourth order on smoothly graded grids). Returns `(r, residual)`.
    pub fn nodal_force_balance_residuals(&self) -> Vec<(f64, f64)> {
        let n = self.len();
        let total: Vec<f64> = (0..n)
            .map(|i| self.p[i] + 0.5 * self.b[i] * self.b[i])
            .collect();
        (2..n.saturating_sub(2))
            .map(|i| {
                let xs = &self.grid[i - 2..=i + 2];
                let w = first_derivative_weights(self.grid[i], xs);
                let d: f64 = w
                    .iter()
                    .zip(&total[i - 2..=i + 2])
                    .map(|(a, b)| a * b)
                    .sum();
                let r = self.grid[i];
                (r, d + self.b[i] * self.b[i] / r)
            })
            .collect()
    }
}

/// Finite-difference weights for the first derivative at `x0` using the
/// stencil `xs` (Fornberg's recursion).
pub(crate) fn first_derivative_weights(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let m = 1;
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_weights_reproduce_quartic_derivative() {
        let xs = [0.0, 0.1, 0.25, 0.3, 0.5];
        let w = first_derivative_weights(0.25, &xs);
        let d: f64 = w.iter().zip(&xs).map(|(a, x)| a * x.powi(4)).sum();
        assert!((d - 4.0 * 0.25f64.powi(3)).abs() < 1e-12);
    }
}
