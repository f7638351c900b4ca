//! Euler–Lagrange and interface-condition residuals of computed minimisers.

use super::vacuum::VacuumResponse;
use crate::energy::{plasma_squares, Form, ModeIndex, TrialField};
use crate::equilibrium::{first_derivative_weights, EquilibriumState, PointState};

/// Pointwise residuals of the Euler–Lagrange system at interior nodes,
/// written per unit `r`:
/// `ξ: Σ w L a − (Σ w L b)′ − λρrξ`, `η: Σ w L c − λρrη`,
/// `ζ: Σ w L d − λρrζ`, each divided by `r`, where the energy density is
/// `Σ w L²` with `L = aξ + bξ′ + cη + dζ`. The flux `Σ w L b` is evaluated at
/// element midpoints and differenced.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalResiduals {
    pub r: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
    /// `ρ(r)` at the nodes (weights of the reported norm).
    pub rho: Vec<f64>,
    /// Dual cell widths `(x_{i+1} − x_{i−1})/2`.
    pub width: Vec<f64>,
}

impl NodalResiduals {
    /// `(Σ_i h_i ρ_i² r_i (R_ξ² + R_η² + R_ζ²))^{1/2}`.
    ///
    /// The factor `r` is the cylindrical volume element and removes the
    /// artificial `1/r` growth of the per-unit-`r` rows near the axis. The
    /// density enters squared: next to `r₀` the cells of a graded mesh are
    /// so small that rounding of the nodal values alone produces strong-form
    /// residuals of order `ε/h²`, and a single power of `ρ` does not suppress
    /// them below the discretisation error.
    pub fn weighted_norm(&self) -> f64 {
        (0..self.r.len())
            .map(|i| {
                self.width[i]
                    * self.rho[i].powi(2)
                    * self.r[i]
                    * (self.xi[i].powi(2) + self.eta[i].powi(2) + self.zeta[i].powi(2))
            })
            .sum::<f64>()
            .sqrt()
    }
}

fn sums(form: Form, mode: ModeIndex, gamma: f64, pt: &PointState, v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for s in plasma_squares(form, mode, gamma, pt) {
        let l = s.coef[0] * v[0] + s.coef[1] * v[1] + s.coef[2] * v[2] + s.coef[3] * v[3];
        for j in 0..4 {
            out[j] += s.weight * l * s.coef[j];
        }
    }
    out
}

/// Euler–Lagrange residuals of a piecewise-linear field for eigenvalue `λ`.
pub fn nodal_residuals(eq: &EquilibriumState, field: &TrialField, lambda: f64) -> NodalResiduals {
    let mode = field.mode;
    let x = &field.mesh;
    let n = x.len();
    let flux: Vec<f64> = (0..n - 1)
        .map(|e| {
            let r = 0.5 * (x[e] + x[e + 1]);
            let v = [
                0.5 * (field.xi[e] + field.xi[e + 1]),
                (field.xi[e + 1] - field.xi[e]) / (x[e + 1] - x[e]),
                0.5 * (field.eta[e] + field.eta[e + 1]),
                0.5 * (field.zeta[e] + field.zeta[e + 1]),
            ];
            sums(Form::Completed, mode, eq.gamma, &eq.at(r), &v)[1]
        })
        .collect();
    let mut out = NodalResiduals {
        r: Vec::new(),
        xi: Vec::new(),
        eta: Vec::new(),
        zeta: Vec::new(),
        rho: Vec::new(),
        width: Vec::new(),
    };
    for i in 1..n - 1 {
        let r = x[i];
        let pt = eq.at(r);
        let v = [
            field.xi[i],
            (field.xi[i + 1] - field.xi[i - 1]) / (x[i + 1] - x[i - 1]),
            field.eta[i],
            field.zeta[i],
        ];
        let s = sums(Form::Completed, mode, eq.gamma, &pt, &v);
        let dual = 0.5 * (x[i + 1] - x[i - 1]);
        let dflux = (flux[i] - flux[i - 1]) / dual;
        let lr = lambda * pt.rho * r;
        out.r.push(r);
        out.xi.push((s[0] - dflux - lr * v[0]) / r);
        out.eta.push((s[2] - lr * v[2]) / r);
        out.zeta.push(if mode.m == 0 {
            0.0
        } else {
            (s[3] - lr * v[3]) / r
        });
        out.rho.push(pt.rho);
        out.width.push(dual);
    }
    out
}

/// The `m = 0` system in its explicit form
/// `−(γp[kη − (rξ)′/r])′ − (B²X)′ − 2B²X/r − 2p′ξ/r + ρλξ` and
/// `−k(γp + B²)[kη − (rξ)′/r + 2B²ξ/(r(γp + B²))] + ρλη`, with
/// `X = kη − ((rξ)′ − 2ξ)/r`, at interior nodes. Returns `(ξ, η)` rows.
pub fn sausage_system_residuals(
    eq: &EquilibriumState,
    field: &TrialField,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let k = field.mode.k as f64;
    let x = &field.mesh;
    let n = x.len();
    let g = eq.gamma;
    // Midpoint flux −γp[kη − (rξ)′/r] − B²X.
    let flux: Vec<f64> = (0..n - 1)
        .map(|e| {
            let r = 0.5 * (x[e] + x[e + 1]);
            let pt = eq.at(r);
            let xi = 0.5 * (field.xi[e] + field.xi[e + 1]);
            let dxi = (field.xi[e + 1] - field.xi[e]) / (x[e + 1] - x[e]);
            let eta = 0.5 * (field.eta[e] + field.eta[e + 1]);
            let comp = k * eta - xi / r - dxi;
            let mag = k * eta - dxi + xi / r;
            -g * pt.p * comp - pt.b2 * mag
        })
        .collect();
    let mut rx = Vec::new();
    let mut re = Vec::new();
    for i in 1..n - 1 {
        let r = x[i];
        let pt = eq.at(r);
        let xi = field.xi[i];
        let dxi = (field.xi[i + 1] - field.xi[i - 1]) / (x[i + 1] - x[i - 1]);
        let eta = field.eta[i];
        let mag = k * eta - dxi + xi / r;
        let dflux = (flux[i] - flux[i - 1]) / (0.5 * (x[i + 1] - x[i - 1]));
        rx.push(dflux - 2.0 * pt.b2 * mag / r - 2.0 * pt.dp * xi / r + pt.rho * lambda * xi);
        let s = g * pt.p + pt.b2;
        let bracket = k * eta - xi / r - dxi
            + if s > 0.0 {
                2.0 * pt.b2 * xi / (r * s)
            } else {
                0.0
            };
        re.push(-k * s * bracket + pt.rho * lambda * eta);
    }
    (rx, re)
}

/// `η` implied pointwise by the second `m = 0` equation:
/// `η = k[(γp + B²)(rξ)′/r − 2B²ξ/r] / (k²(γp + B²) − ρλ)`.
pub fn sausage_eta_from_xi(
    eq: &EquilibriumState,
    k: i64,
    lambda: f64,
    r: f64,
    xi: f64,
    dxi: f64,
) -> f64 {
    let pt = eq.at(r);
    let k = k as f64;
    let s = eq.gamma * pt.p + pt.b2;
    k * (s * (xi / r + dxi) - 2.0 * pt.b2 * xi / r) / (k * k * s - pt.rho * lambda)
}

/// `ξ′(r₀)` from a three-point one-sided stencil.
fn boundary_slope(field: &TrialField) -> f64 {
    let n = field.mesh.len();
    let xs = &field.mesh[n - 3..];
    let w = first_derivative_weights(xs[2], xs);
    w.iter().zip(&field.xi[n - 3..]).map(|(a, b)| a * b).sum()
}

/// Interface residual at `r₀`:
/// `B²[kηr − ξ′r + ξ]` for `m = 0`, and
/// `B²ξ − B²ξ′r + kB²ηr − B̂ Q̂_θ r` for `m ≠ 0`.
pub fn interface_residual(
    eq: &EquilibriumState,
    field: &TrialField,
    vacuum: Option<&VacuumResponse>,
) -> f64 {
    let r0 = eq.r0;
    let n = field.mesh.len();
    let b2 = eq.at(r0).b2;
    let k = field.mode.k as f64;
    let (xi, eta) = (field.xi[n - 1], field.eta[n - 1]);
    let dxi = boundary_slope(field);
    let plasma = b2 * (xi - dxi * r0 + k * eta * r0);
    match (field.mode.m, vacuum) {
        (0, _) | (_, None) => plasma,
        (_, Some(v)) => {
            let q_theta = v.q_theta_at_interface(v.interface_amplitude(xi));
            plasma - eq.b_hat(r0) * q_theta * r0
        }
    }
}
