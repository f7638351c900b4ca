//! Near-axis Taylor structure of the equilibrium.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::state::EquilibriumState;
use crate::{Error, Result};

/// Axis expansion `B_θ = b₁ r + b₂ r² + …`, `p′ = c₁ r + c₂ r² + …`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AxisExpansion {
    /// Extrapolated `J_z(0)`.
    pub jz0: f64,
    /// Extrapolated `J_z′(0)`.
    pub djz0: f64,
    /// Predicted `B_θ` coefficients `(J_z(0)/2, J_z′(0)/3)`.
    pub b_coefficients: (f64, f64),
    /// Predicted `p′` coefficients `(−J_z(0)²/2, −(5/6) J_z′(0) J_z(0))`.
    pub dp_coefficients: (f64, f64),
    /// `(b₁, b₂)` fitted directly to the sampled `B_θ`.
    pub measured_b: (f64, f64),
    /// `(c₁, c₂)` fitted directly to the sampled `p′`.
    pub measured_dp: (f64, f64),
}

/// Least-squares polynomial fit of degree `deg` to `(x, y)`; returns
/// coefficients in increasing powers.
fn poly_fit(x: &[f64], y: &[f64], deg: usize) -> Vec<f64> {
    let scale = x
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let a = DMatrix::from_fn(x.len(), deg + 1, |i, j| (x[i] / scale).powi(j as i32));
    let b = DVector::from_column_slice(y);
    let sol = a.svd(true, true).solve(&b, 1e-14).expect("SVD solve");
    (0..=deg).map(|j| sol[j] / scale.powi(j as i32)).collect()
}

/// Fit `(f(0), f′(0))` of `f` sampled on the first `count` grid nodes.
fn axis_fit(eq: &EquilibriumState, count: usize, f: impl Fn(usize) -> f64) -> (f64, f64) {
    let x: Vec<f64> = eq.grid[..count].to_vec();
    let y: Vec<f64> = (0..count).map(f).collect();
    let c = poly_fit(&x, &y, 4);
    (c[0], c[1])
}

/// Extrapolate `J_z(0)`, `J_z′(0)` from the grid samples and return the
/// implied Taylor coefficients of `B_θ` and `p′` together with direct fits.
///
/// Two stencils (the first 8 and first 16 nodes) are compared; if the
/// extrapolated `J_z′(0)` disagrees by more than `1e−3` (relative), the axis
/// behaviour is not smooth enough and [`Error::AxisSingularity`] is returned.
pub fn taylor_axis_coefficients(eq: &EquilibriumState) -> Result<AxisExpansion> {
    if eq.len() < 16 {
        return Err(Error::InvalidInput(
            "axis expansion needs at least 16 nodes".into(),
        ));
    }
    let (j0a, j1a) = axis_fit(eq, 8, |i| eq.jz[i]);
    let (j0b, j1b) = axis_fit(eq, 16, |i| eq.jz[i]);
    let scale = j0b.abs().max(1.0);
    if (j0a - j0b).abs() > 1e-3 * scale || (j1a - j1b).abs() > 1e-3 * j1b.abs().max(scale) {
        return Err(Error::AxisSingularity(format!(
            "J_z(0) estimates {j0a:.6e} vs {j0b:.6e}, J_z'(0) estimates {j1a:.6e} vs {j1b:.6e}"
        )));
    }
    let (jz0, djz0) = (j0a, j1a);
    let measured_b = axis_fit(eq, 8, |i| eq.b[i] / eq.grid[i]);
    let measured_dp = axis_fit(eq, 8, |i| eq.dp[i] / eq.grid[i]);
    Ok(AxisExpansion {
        jz0,
        djz0,
        b_coefficients: (jz0 / 2.0, djz0 / 3.0),
        dp_coefficients: (-jz0 * jz0 / 2.0, -5.0 / 6.0 * djz0 * jz0),
        measured_b,
        measured_dp,
    })
}
