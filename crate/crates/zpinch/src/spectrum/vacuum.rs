//! Vacuum response: the minimal vacuum energy for a given interface
//! displacement, obtained from the two-point problem
//! `[r (rQ̂)′/(m² + k²r²)]′ − Q̂ = 0` on `[r₀, r_w]`.

use serde::Serialize;

use crate::energy::{ModeIndex, VacuumField};
use crate::equilibrium::EquilibriumState;
use crate::quadrature::Rule;
use crate::{Error, Result, TWO_PI_SQ};

/// Condensed vacuum stiffness and the optimal vacuum field.
#[derive(Debug, Clone, Serialize)]
pub struct VacuumResponse {
    pub mode: ModeIndex,
    /// `c(m,k) ≥ 0` with `min E^v = c ξ(r₀)²` (includes `2π²`).
    pub c: f64,
    /// `∫[q² + ((rq)′)²/(m²+k²r²)] r dr` for the solution `q` with
    /// `q(r₀) = 1`, `q(r_w) = 0` (Richardson-extrapolated).
    pub unit_energy: f64,
    /// `B̂_θ(r₀)`.
    pub b_hat_r0: f64,
    /// Mesh on `[r₀, r_w]`.
    pub mesh: Vec<f64>,
    /// `q` on the mesh (normalised by `q(r₀) = 1`).
    pub q: Vec<f64>,
    /// `q_θ = −m (rq)′/(m² + k²r²)` on the mesh.
    pub q_theta: Vec<f64>,
    /// `q_z = −kr (rq)′/(m² + k²r²)` on the mesh.
    pub q_z: Vec<f64>,
}

impl VacuumResponse {
    /// `(rq)′(r₀)` implied by the extrapolated energy:
    /// `unit_energy = −r₀² (rq)′(r₀) / (m² + k²r₀²)`.
    pub fn boundary_flux(&self) -> f64 {
        let r0 = self.mesh[0];
        -self.unit_energy * self.mode.d(r0) / (r0 * r0)
    }

    /// `Q̂_θ(r₀)` for the field scaled to `Q̂_r(r₀) = amplitude`.
    pub fn q_theta_at_interface(&self, amplitude: f64) -> f64 {
        let r0 = self.mesh[0];
        -(self.mode.m as f64) * self.boundary_flux() / self.mode.d(r0) * amplitude
    }

    /// `Q̂_r(r₀) = m B̂_θ(r₀) ξ(r₀)/r₀` required by the interface coupling.
    pub fn interface_amplitude(&self, xi_r0: f64) -> f64 {
        self.mode.m as f64 * self.b_hat_r0 * xi_r0 / self.mesh[0]
    }

    /// The vacuum field scaled to `Q̂_r(r₀) = amplitude`.
    pub fn field(&self, amplitude: f64) -> VacuumField {
        VacuumField {
            mesh: self.mesh.clone(),
            q: self.q.iter().map(|v| v * amplitude).collect(),
        }
    }
}

/// Elements of the fine vacuum mesh (the coarse Richardson level has half).
pub const VACUUM_ELEMENTS: usize = 8192;

/// Solve the vacuum problem by piecewise-linear finite elements on a uniform
/// mesh and return the discrete energy minimiser and its energy.
pub fn solve_vacuum_fem(
    mode: ModeIndex,
    r0: f64,
    rw: f64,
    elements: usize,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if mode.m == 0 {
        return Err(Error::InvalidInput("vacuum response needs m != 0".into()));
    }
    let n = elements.max(2);
    let h = (rw - r0) / n as f64;
    let mesh: Vec<f64> = (0..=n)
        .map(|i| if i == n { rw } else { r0 + h * i as f64 })
        .collect();
    let rule = Rule::gauss_legendre(4);
    // Tridiagonal stiffness: diag[i], off[i] couples i and i+1.
    let mut diag = vec![0.0; n + 1];
    let mut off = vec![0.0; n];
    for e in 0..n {
        let (a, b) = (mesh[e], mesh[e + 1]);
        let he = b - a;
        let mut k = [[0.0; 2]; 2];
        for (r, w) in rule.points(a, b) {
            let t = (r - a) / he;
            let phi = [1.0 - t, t];
            let dphi = [-1.0 / he, 1.0 / he];
            let d = mode.d(r);
            // (r φ)′ = φ + r φ′
            let g = [phi[0] + r * dphi[0], phi[1] + r * dphi[1]];
            for i in 0..2 {
                for j in 0..2 {
                    k[i][j] += w * r * (phi[i] * phi[j] + g[i] * g[j] / d);
                }
            }
        }
        diag[e] += k[0][0];
        diag[e + 1] += k[1][1];
        off[e] += k[0][1];
    }
    // Unknowns 1..n-1 with q₀ = 1, q_n = 0: rhs = −K[i,0]·1.
    let m = n - 1;
    let mut dd: Vec<f64> = (1..n).map(|i| diag[i]).collect();
    let mut rhs = vec![0.0; m];
    rhs[0] = -off[0];
    let sub: Vec<f64> = (1..m).map(|i| off[i]).collect();
    // Thomas algorithm (matrix is symmetric positive definite).
    for i in 1..m {
        if !(dd[i - 1] > 0.0) {
            return Err(Error::BvpFailure(format!("nonpositive pivot at node {i}")));
        }
        let f = sub[i - 1] / dd[i - 1];
        dd[i] -= f * sub[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    if !(dd[m - 1] > 0.0) {
        return Err(Error::BvpFailure("singular vacuum system".into()));
    }
    let mut x = vec![0.0; m];
    x[m - 1] = rhs[m - 1] / dd[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = (rhs[i] - sub[i] * x[i + 1]) / dd[i];
    }
    let mut q = vec![0.0; n + 1];
    q[0] = 1.0;
    q[1..n].copy_from_slice(&x);
    // Energy as a sum of element squares: `qᵀKq` would cancel terms of size
    // `n/h` down to O(1) and lose about `ε n²` in absolute accuracy.
    let mut energy = 0.0;
    for e in 0..n {
        let (a, b) = (mesh[e], mesh[e + 1]);
        let he = b - a;
        let dq = (q[e + 1] - q[e]) / he;
        for (r, w) in rule.points(a, b) {
            let t = (r - a) / he;
            let qv = q[e] * (1.0 - t) + q[e + 1] * t;
            let drq = qv + r * dq;
            energy += w * r * (qv * qv + drq * drq / mode.d(r));
        }
    }
    Ok((mesh, q, energy))
}

/// Vacuum response `c(m,k)` for the equilibrium's interface and wall radii.
///
/// The energy of the unit problem is computed on `N/2` and `N` elements and
/// Richardson-extrapolated (the piecewise-linear energy error is `O(h²)`);
/// then `c = 2π² · unit_energy · (m B̂_θ(r₀)/r₀)²`.
pub fn vacuum_response(eq: &EquilibriumState, mode: ModeIndex) -> Result<VacuumResponse> {
    vacuum_response_with(mode, eq.r0, eq.rw, eq.b_hat(eq.r0), VACUUM_ELEMENTS)
}

/// [`vacuum_response`] for explicit radii, interface field and resolution.
pub fn vacuum_response_with(
    mode: ModeIndex,
    r0: f64,
    rw: f64,
    b_hat_r0: f64,
    elements: usize,
) -> Result<VacuumResponse> {
    if !(rw > r0 && r0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need 0 < r0 < rw, got r0 = {r0}, rw = {rw}"
        )));
    }
    let (_, _, coarse) = solve_vacuum_fem(mode, r0, rw, elements / 2)?;
    let (mesh, q, fine) = solve_vacuum_fem(mode, r0, rw, elements)?;
    let unit_energy = (4.0 * fine - coarse) / 3.0;
    let m = mode.m as f64;
    let scale = m * b_hat_r0 / r0;
    let c = TWO_PI_SQ * unit_energy * scale * scale;
    let n = mesh.len();
    let mut q_theta = vec![0.0; n];
    let mut q_z = vec![0.0; n];
    for i in 0..n {
        // (rq)′ from adjacent element slopes (averaged at interior nodes).
        let slope = |e: usize| (q[e + 1] - q[e]) / (mesh[e + 1] - mesh[e]);
        let dq = if i == 0 {
            slope(0)
        } else if i == n - 1 {
            slope(n - 2)
        } else {
            0.5 * (slope(i - 1) + slope(i))
        };
        let r = mesh[i];
        let drq = q[i] + r * dq;
        let d = mode.d(r);
        q_theta[i] = -m * drq / d;
        q_z[i] = -(mode.k as f64) * r * drq / d;
    }
    Ok(VacuumResponse {
        mode,
        c,
        unit_energy,
        b_hat_r0,
        mesh,
        q,
        q_theta,
        q_z,
    })
}
