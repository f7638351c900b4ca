//! Pointwise energy densities written as weighted sums of squares of linear
//! forms in `[ξ, ξ′, η, ζ]`.
//!
//! Every density is `Σ w (a ξ + b ξ′ + c η + d ζ)²` with respect to `dr`;
//! the spectral assembly builds its matrices from exactly these terms, so the
//! discrete quadratic forms agree with the continuous evaluation.

use super::ModeIndex;
use crate::equilibrium::{EquilibriumState, PointState};
use crate::quadrature::{graded_breakpoints, Rule, GRADING_LEVELS};

/// Which algebraic arrangement of the plasma energy to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Completed-square form: for `m = 0` the `(γp + B²)`-weighted square plus
    /// the sausage-criterion potential; for `m ≠ 0` the four-square form
    /// `(m² + k²r²)|…|² + γp|…|² + m²B²(ξ − rξ′)²/(r(m²+k²r²)) +
    /// (2p′ + m²B²/r)ξ²`.
    Completed,
    /// Expanded form: for `m = 0` the separate magnetic and compressional
    /// squares with the `2p′ξ²` potential; for `m ≠ 0` the decomposition with
    /// the `β₀` potential and the `−2m²B²ξ²/(m²+k²r²)` boundary term at `r₀`.
    Expanded,
}

/// One weighted square `w (c · [ξ, ξ′, η, ζ])²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Square {
    pub weight: f64,
    pub coef: [f64; 4],
}

impl Square {
    fn new(weight: f64, coef: [f64; 4]) -> Self {
        Square { weight, coef }
    }

    /// `w (c · v)²`.
    pub fn eval(&self, v: &[f64; 4]) -> f64 {
        let l =
            self.coef[0] * v[0] + self.coef[1] * v[1] + self.coef[2] * v[2] + self.coef[3] * v[3];
        self.weight * l * l
    }
}

/// Plasma energy density (per `2π²`, w.r.t. `dr`) at one radius.
pub fn plasma_squares(form: Form, mode: ModeIndex, gamma: f64, pt: &PointState) -> Vec<Square> {
    let r = pt.r;
    let k = mode.k as f64;
    let gp = gamma * pt.p;
    let b2 = pt.b2;
    if mode.m == 0 {
        return match form {
            Form::Completed => {
                let s = gp + b2;
                if s > 0.0 {
                    vec![
                        Square::new(2.0 * pt.dp + 4.0 * gp * b2 / (r * s), [1.0, 0.0, 0.0, 0.0]),
                        Square::new(s * r, [-1.0 / r + 2.0 * b2 / (r * s), -1.0, k, 0.0]),
                    ]
                } else {
                    vec![Square::new(2.0 * pt.dp, [1.0, 0.0, 0.0, 0.0])]
                }
            }
            Form::Expanded => vec![
                Square::new(2.0 * pt.dp, [1.0, 0.0, 0.0, 0.0]),
                Square::new(b2 * r, [1.0 / r, -1.0, k, 0.0]),
                Square::new(gp * r, [1.0 / r, 1.0, -k, 0.0]),
            ],
        };
    }
    let m = mode.m as f64;
    let m2 = m * m;
    let d = m2 + k * k * r * r;
    let b = pt.b;
    let t1 = Square::new(d * r, [k * b / d, -k * b * r / d, b / r, 0.0]);
    let t2 = Square::new(gp * r, [1.0 / r, 1.0, -k, m / r]);
    match form {
        Form::Completed => vec![
            t1,
            t2,
            Square::new(m2 * b2 / (r * d), [1.0, -r, 0.0, 0.0]),
            Square::new(2.0 * pt.dp + m2 * b2 / r, [1.0, 0.0, 0.0, 0.0]),
        ],
        Form::Expanded => {
            // β₀ r³ with (B/r)′ = B′/r − B/r².
            let dbr = pt.db / r - b / (r * r);
            let beta0_r3 = m2 * b2 / r + 2.0 * m2 * b * r * dbr / d
                - 4.0 * k * k * m2 * b2 * r / (d * d)
                + 2.0 * k * k * r * r * pt.dp / d;
            vec![
                Square::new(m2 * b2 / (r * d), [1.0, r, 0.0, 0.0]),
                Square::new(beta0_r3, [1.0, 0.0, 0.0, 0.0]),
                t1,
                t2,
            ]
        }
    }
}

/// Coefficient `b` such that the form's boundary contribution is
/// `2π² b ξ(r₀)²` (nonzero only for the expanded `m ≠ 0` arrangement).
pub fn boundary_coefficient(form: Form, mode: ModeIndex, eq: &EquilibriumState) -> f64 {
    if form == Form::Completed || mode.m == 0 {
        return 0.0;
    }
    let m2 = (mode.m as f64).powi(2);
    let k = mode.k as f64;
    let b2 = eq.at(eq.r0).b2;
    -2.0 * m2 * b2 / (m2 + k * k * eq.r0 * eq.r0)
}

/// Constraint density `ρ r` applied to each of `ξ`, `η` and (for `m ≠ 0`) `ζ`.
pub fn mass_weight(pt: &PointState) -> f64 {
    pt.rho * pt.r
}

/// Number of Gauss points per panel used by every energy quadrature.
pub const POINTS_PER_PANEL: usize = 8;

/// Quadrature points `(r, w)` for the panel `[a, b]`. The panel is split at
/// any interior profile breakpoint, and the piece ending at `r₀` is graded
/// geometrically when the profile is rough there.
pub fn panel_points(eq: &EquilibriumState, rule: &Rule, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut edges = vec![a];
    edges.extend(
        eq.profile_breakpoints()
            .into_iter()
            .filter(|&x| x > a && x < b),
    );
    edges.push(b);
    let mut pts = Vec::with_capacity(rule.len() * (edges.len() - 1));
    for w in edges.windows(2) {
        let at_boundary = (w[1] - eq.r0).abs() <= 1e-14 * eq.r0;
        if at_boundary && eq.rough_boundary() {
            for g in graded_breakpoints(w[0], w[1], false, true, GRADING_LEVELS).windows(2) {
                pts.extend(rule.points(g[0], g[1]));
            }
        } else {
            pts.extend(rule.points(w[0], w[1]));
        }
    }
    pts
}
