//! Finite-element discretisation of `E_{m,k}` and `J` on a radial mesh.

use super::banded::BandMatrix;
use super::vacuum::{vacuum_response, VacuumResponse};
use crate::energy::{
    boundary_coefficient, mass_weight, panel_points, plasma_squares, Form, ModeIndex, TrialField,
    POINTS_PER_PANEL,
};
use crate::equilibrium::EquilibriumState;
use crate::quadrature::Rule;
use crate::{Error, Result, TWO_PI_SQ};

/// Stiffness `K` (representing `2E`) and mass `M` (representing `2J`) on
/// the continuous piecewise-linear basis.
///
/// Unknowns are interleaved per node `(ξ, η[, ζ])` on the mesh
/// `0 = x₀ < … < x_n = r₀`; `ξ(0)` and `ζ(0)` are pinned to zero and carry
/// no unknown. For `m ≠ 0` the vacuum is condensed into the boundary
/// stiffness `2c(m,k)` on `ξ(r₀)`.
#[derive(Debug, Clone)]
pub struct DiscreteOperatorPair {
    pub mode: ModeIndex,
    pub form: Form,
    /// Mesh including the axis.
    pub mesh: Vec<f64>,
    pub k: BandMatrix,
    pub m: BandMatrix,
    /// Vacuum response used for the condensation (`m ≠ 0`).
    pub vacuum: Option<VacuumResponse>,
    components: usize,
}

impl DiscreteOperatorPair {
    /// Number of unknowns.
    pub fn dim(&self) -> usize {
        self.k.order()
    }

    /// Field components per node (2 for `m = 0`, 3 otherwise).
    pub fn components(&self) -> usize {
        self.components
    }

    /// Index of component `c` at node `i`, or `None` when pinned.
    pub fn dof(&self, node: usize, c: usize) -> Option<usize> {
        dof_index(self.components, node, c)
    }

    /// Index of `ξ(r₀)`.
    pub fn boundary_dof(&self) -> usize {
        self.dof(self.mesh.len() - 1, 0)
            .expect("boundary xi is free")
    }

    /// Trial field with coefficients `x`, including the optimal vacuum field
    /// for `m ≠ 0`.
    pub fn to_field(&self, x: &[f64]) -> TrialField {
        let mut t = TrialField::zeros(self.mode, self.mesh.clone());
        for i in 0..self.mesh.len() {
            let get = |c: usize| self.dof(i, c).map(|d| x[d]).unwrap_or(0.0);
            t.xi[i] = get(0);
            t.eta[i] = get(1);
            if self.components == 3 {
                t.zeta[i] = get(2);
            }
        }
        if let Some(vac) = &self.vacuum {
            t.vacuum = Some(vac.field(vac.interface_amplitude(t.boundary_xi())));
        }
        t
    }

    /// Coefficient vector of a trial field on the same mesh.
    pub fn coefficients(&self, field: &TrialField) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for i in 0..self.mesh.len() {
            for c in 0..self.components {
                if let Some(d) = self.dof(i, c) {
                    x[d] = match c {
                        0 => field.xi[i],
                        1 => field.eta[i],
                        _ => field.zeta[i],
                    };
                }
            }
        }
        x
    }

    /// `max |K_ij − K_ji|` and `max |M_ij − M_ji|` (zero by construction of
    /// the symmetric storage; computed on dense copies).
    pub fn asymmetry(&self) -> (f64, f64) {
        let f = |a: &BandMatrix| {
            let d = a.to_dense();
            (&d - d.transpose()).amax()
        };
        (f(&self.k), f(&self.m))
    }
}

fn dof_index(components: usize, node: usize, c: usize) -> Option<usize> {
    // Node 0 keeps only η.
    if node == 0 {
        return if c == 1 { Some(0) } else { None };
    }
    Some(1 + (node - 1) * components + c)
}

/// Mesh `{0} ∪ grid` on `[0, r₀]`.
pub fn mesh_with_axis(grid: &[f64]) -> Vec<f64> {
    let mut mesh = Vec::with_capacity(grid.len() + 1);
    mesh.push(0.0);
    mesh.extend_from_slice(grid);
    mesh
}

/// Assemble `K` and `M` for `mode` on `mesh` (which must start at the axis
/// and end at `r₀`).
pub fn assemble_operators(
    eq: &EquilibriumState,
    mode: ModeIndex,
    mesh: &[f64],
    form: Form,
) -> Result<DiscreteOperatorPair> {
    if mesh.len() < 3 || mesh[0] != 0.0 || (mesh[mesh.len() - 1] - eq.r0).abs() > 1e-12 * eq.r0 {
        return Err(Error::InvalidInput("mesh must run from 0 to r0".into()));
    }
    if mesh.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "mesh must be strictly increasing".into(),
        ));
    }
    let nc = if mode.m == 0 { 2 } else { 3 };
    let nodes = mesh.len();
    let dim = 1 + (nodes - 1) * nc;
    let kd = 2 * nc - 1;
    let mut kmat = BandMatrix::zeros(dim, kd);
    let mut mmat = BandMatrix::zeros(dim, kd);
    let rule = Rule::gauss_legendre(POINTS_PER_PANEL);
    let scale = 2.0 * TWO_PI_SQ;
    let nloc = 2 * nc;
    for e in 0..nodes - 1 {
        let (a, b) = (mesh[e], mesh[e + 1]);
        let h = b - a;
        let gdof: Vec<Option<usize>> = (0..nloc)
            .map(|l| dof_index(nc, e + l / nc, l % nc))
            .collect();
        let mut kl = vec![0.0; nloc * nloc];
        let mut ml = vec![0.0; nloc * nloc];
        for (r, w) in panel_points(eq, &rule, a, b) {
            let pt = eq.at(r);
            let t = (r - a) / h;
            let phi = [1.0 - t, t];
            let dphi = [-1.0 / h, 1.0 / h];
            for sq in plasma_squares(form, mode, eq.gamma, &pt) {
                let [ca, cb, cc, cd] = sq.coef;
                let mut v = vec![0.0; nloc];
                for j in 0..2 {
                    v[j * nc] = ca * phi[j] + cb * dphi[j];
                    v[j * nc + 1] = cc * phi[j];
                    if nc == 3 {
                        v[j * nc + 2] = cd * phi[j];
                    }
                }
                let wt = w * sq.weight;
                for p in 0..nloc {
                    if v[p] == 0.0 {
                        continue;
                    }
                    for q in 0..nloc {
                        kl[p * nloc + q] += wt * v[p] * v[q];
                    }
                }
            }
            let mw = w * mass_weight(&pt);
            for c in 0..nc {
                for j in 0..2 {
                    for i in 0..2 {
                        ml[(j * nc + c) * nloc + (i * nc + c)] += mw * phi[j] * phi[i];
                    }
                }
            }
        }
        for p in 0..nloc {
            let Some(gp) = gdof[p] else { continue };
            for q in 0..=p {
                let Some(gq) = gdof[q] else { continue };
                // Symmetrise local blocks exactly before scattering.
                let kv = 0.5 * (kl[p * nloc + q] + kl[q * nloc + p]);
                let mv = 0.5 * (ml[p * nloc + q] + ml[q * nloc + p]);
                if gp == gq {
                    kmat.add(gp, gq, scale * kv);
                    mmat.add(gp, gq, scale * mv);
                } else {
                    kmat.add(gp.max(gq), gp.min(gq), scale * kv);
                    mmat.add(gp.max(gq), gp.min(gq), scale * mv);
                }
            }
        }
    }
    let bdof = dof_index(nc, nodes - 1, 0).unwrap();
    let boundary = boundary_coefficient(form, mode, eq);
    kmat.add(bdof, bdof, scale * boundary);
    let vacuum = if mode.m != 0 {
        let v = vacuum_response(eq, mode)?;
        kmat.add(bdof, bdof, 2.0 * v.c);
        Some(v)
    } else {
        None
    };
    Ok(DiscreteOperatorPair {
        mode,
        form,
        mesh: mesh.to_vec(),
        k: kmat,
        m: mmat,
        vacuum,
        components: nc,
    })
}
