//! Radial trial fields `(ξ, η, ζ)` on `(0, r₀]` and vacuum fields `Q̂_r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ModeIndex;
use crate::equilibrium::EquilibriumState;

/// Values of a trial field at one radius.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FieldSample {
    pub xi: f64,
    /// `ξ′`
    pub dxi: f64,
    pub eta: f64,
    pub zeta: f64,
}

impl FieldSample {
    /// `[ξ, ξ′, η, ζ]`, the vector the energy densities act on.
    pub fn as_array(&self) -> [f64; 4] {
        [self.xi, self.dxi, self.eta, self.zeta]
    }
}

/// A radial displacement field that can be sampled anywhere in `(0, r₀]`.
///
/// `breakpoints` returns increasing panel edges covering `[0, r₀]` on which
/// the field is smooth; quadratures integrate panel by panel.
pub trait RadialField: Sync {
    fn sample(&self, r: f64) -> FieldSample;
    fn breakpoints(&self) -> Vec<f64>;
}

/// Continuous piecewise-linear field on a mesh `0 = x₀ < x₁ < … < x_n = r₀`.
#[derive(Debug, Clone, Serialize)]
pub struct TrialField {
    pub mode: ModeIndex,
    pub mesh: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    /// Identically zero when `m = 0`.
    pub zeta: Vec<f64>,
    /// Vacuum perturbation for `m ≠ 0`.
    pub vacuum: Option<VacuumField>,
}

impl TrialField {
    /// Zero field on `mesh` (which must start at the axis).
    pub fn zeros(mode: ModeIndex, mesh: Vec<f64>) -> Self {
        let n = mesh.len();
        TrialField {
            mode,
            mesh,
            xi: vec![0.0; n],
            eta: vec![0.0; n],
            zeta: vec![0.0; n],
            vacuum: None,
        }
    }

    /// Interpolate a continuous field at the mesh nodes (`ξ(0)`, `ζ(0)` are
    /// forced to zero).
    pub fn interpolate(mode: ModeIndex, mesh: Vec<f64>, f: &dyn RadialField) -> Self {
        let mut t = TrialField::zeros(mode, mesh);
        for i in 0..t.mesh.len() {
            let s = f.sample(t.mesh[i]);
            t.xi[i] = if i == 0 { 0.0 } else { s.xi };
            t.eta[i] = s.eta;
            t.zeta[i] = if i == 0 || mode.m == 0 { 0.0 } else { s.zeta };
        }
        t
    }

    /// Multiply every component (including the vacuum part) by `a`.
    pub fn scaled(&self, a: f64) -> Self {
        let mut t = self.clone();
        for v in
            t.xi.iter_mut()
                .chain(t.eta.iter_mut())
                .chain(t.zeta.iter_mut())
        {
            *v *= a;
        }
        if let Some(vf) = t.vacuum.as_mut() {
            for q in vf.q.iter_mut() {
                *q *= a;
            }
        }
        t
    }

    /// `ξ(r₀)`.
    pub fn boundary_xi(&self) -> f64 {
        *self.xi.last().unwrap_or(&0.0)
    }
}

impl RadialField for TrialField {
    fn sample(&self, r: f64) -> FieldSample {
        let n = self.mesh.len();
        let e = self
            .mesh
            .partition_point(|&x| x <= r)
            .saturating_sub(1)
            .min(n - 2);
        let (x0, x1) = (self.mesh[e], self.mesh[e + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        let lerp = |v: &[f64]| v[e] * (1.0 - t) + v[e + 1] * t;
        FieldSample {
            xi: lerp(&self.xi),
            dxi: (self.xi[e + 1] - self.xi[e]) / h,
            eta: lerp(&self.eta),
            zeta: lerp(&self.zeta),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.mesh.clone()
    }
}

/// Continuous piecewise-linear vacuum field `Q̂_r` on `[r₀, r_w]`.
#[derive(Debug, Clone, Serialize)]
pub struct VacuumField {
    pub mesh: Vec<f64>,
    pub q: Vec<f64>,
}

impl VacuumField {
    /// `Q̂_r(r₀)`.
    pub fn inner(&self) -> f64 {
        self.q[0]
    }
    /// `Q̂_r(r_w)`.
    pub fn outer(&self) -> f64 {
        *self.q.last().unwrap()
    }
}

/// Random smooth field from truncated sine/cosine series with coefficients
/// decaying like `1/j²`; reproducible from the seed.
///
/// `ξ = Σ a_j sin(jπr/(2r₀))`, `η = Σ b_j cos(jπr/(2r₀))`,
/// `ζ = Σ c_j sin(jπr/(2r₀))` (zero for `m = 0`), so `ξ(0) = ζ(0) = 0`.
#[derive(Debug, Clone)]
pub struct RandomSineField {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    r0: f64,
    panels: usize,
}

impl RandomSineField {
    pub fn new(seed: u64, terms: usize, r0: f64, with_zeta: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |on: bool| -> Vec<f64> {
            (1..=terms)
                .map(|j| {
                    if on {
                        rng.gen_range(-1.0..1.0) / (j * j) as f64
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let a = draw(true);
        let b = draw(true);
        let c = draw(with_zeta);
        RandomSineField {
            a,
            b,
            c,
            r0,
            panels: 256,
        }
    }

    /// Number of uniform quadrature panels reported by `breakpoints`.
    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }
}

impl RadialField for RandomSineField {
    fn sample(&self, r: f64) -> FieldSample {
        let w = std::f64::consts::FRAC_PI_2 / self.r0;
        let mut s = FieldSample::default();
        for j in 0..self.a.len() {
            let kj = (j + 1) as f64 * w;
            let (sn, cs) = (kj * r).sin_cos();
            s.xi += self.a[j] * sn;
            s.dxi += self.a[j] * kj * cs;
            s.eta += self.b[j] * cs;
            s.zeta += self.c[j] * sn;
        }
        s
    }

    fn breakpoints(&self) -> Vec<f64> {
        (0..=self.panels)
            .map(|i| self.r0 * i as f64 / self.panels as f64)
            .collect()
    }
}

/// Wraps a field and replaces `η` by the choice that annihilates the
/// compressional square of `E_{0,k}`:
/// `η = (1/(kr))((rξ)′ − 2B_θ² ξ/(γp + B_θ²))`.
pub struct SausageEliminated<'a, F: RadialField + ?Sized> {
    pub inner: &'a F,
    pub eq: &'a EquilibriumState,
    pub k: f64,
}

impl<F: RadialField + ?Sized> RadialField for SausageEliminated<'_, F> {
    fn sample(&self, r: f64) -> FieldSample {
        let mut s = self.inner.sample(r);
        let pt = self.eq.at(r);
        let denom = self.eq.gamma * pt.p + pt.b2;
        let frac = if denom > 0.0 { pt.b2 / denom } else { 0.0 };
        s.eta = if self.k == 0.0 {
            0.0
        } else if r == 0.0 {
            // Limit with ξ(0) = 0 and B(0) = 0.
            2.0 * s.dxi / self.k
        } else {
            (s.xi + r * s.dxi - 2.0 * frac * s.xi) / (self.k * r)
        };
        s.zeta = 0.0;
        s
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

/// Wraps a field and sets `η = rk((rξ)′ − 2ξ)/(m² + k²r²)`,
/// `ζ = (r/m)(kη − (rξ)′/r)`, which annihilates the first two squares of
/// `E_{m,k}` for `m ≠ 0`.
pub struct KinkEliminated<'a, F: RadialField + ?Sized> {
    pub inner: &'a F,
    pub mode: ModeIndex,
}

impl<F: RadialField + ?Sized> RadialField for KinkEliminated<'_, F> {
    fn sample(&self, r: f64) -> FieldSample {
        let mut s = self.inner.sample(r);
        let (m, k) = (self.mode.m as f64, self.mode.k as f64);
        let d = m * m + k * k * r * r;
        let drxi = s.xi + r * s.dxi;
        s.eta = r * k * (drxi - 2.0 * s.xi) / d;
        // At the axis (rξ)′/r stays finite and the factor r sends ζ to zero.
        s.zeta = if r == 0.0 {
            0.0
        } else {
            (r / m) * (k * s.eta - drxi / r)
        };
        s
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints()
    }
}

/// Closure-backed field, convenient for analytic test functions.
pub struct FnField<F: Fn(f64) -> FieldSample + Sync> {
    pub f: F,
    pub breaks: Vec<f64>,
}

impl<F: Fn(f64) -> FieldSample + Sync> RadialField for FnField<F> {
    fn sample(&self, r: f64) -> FieldSample {
        (self.f)(r)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}
