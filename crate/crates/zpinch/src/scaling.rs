//! Wavenumber scaling of trial-function upper bounds for the sausage mode.
//!
//! For a profile with `p = C (r₀ − r)^β` near the boundary, the family
//! `ξ_k = w(k^α (r − r₀))`, with `η_k` chosen to annihilate the compressional
//! square of `E_{0,k}`, concentrates in a layer of width `k^{−α}` at `r₀`.
//! There `J ∼ k^{−α−αβ/γ}` and `E ∼ −k^{−α−α(β−1)}`, so the upper bound
//! `λ_upper = E/J ∼ −k^{αβ/γ − α(β−1)}` diverges whenever `γ < β/(β−1)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{
    assemble_e0k, assemble_j, FieldSample, ModeIndex, RadialField, SausageEliminated,
};
use crate::equilibrium::EquilibriumState;
use crate::regression::{linear_fit, LinearFit};
use crate::{Error, Result};

/// Smooth bump `A·exp(−1/(1 − u²))`, where `u` maps the support `(a, b)`
/// onto `(−1, 1)`. The standard choice is `A = 1` on `(−1, 0)`, i.e.
/// `exp(−1/(1 − (2s + 1)²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amplitude: f64,
    /// Support `(a, b)` with `a < b ≤ 0`.
    pub support: (f64, f64),
}

impl Default for Bump {
    fn default() -> Self {
        Bump {
            amplitude: 1.0,
            support: (-1.0, 0.0),
        }
    }
}

impl Bump {
    /// `(w(s), w′(s))`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let (a, b) = self.support;
        let half = 0.5 * (b - a);
        let u = (s - 0.5 * (a + b)) / half;
        if !(u > -1.0 && u < 1.0) || self.amplitude == 0.0 {
            return (0.0, 0.0);
        }
        let q = 1.0 - u * u;
        let w = self.amplitude * (-1.0 / q).exp();
        // d/du exp(−1/q) = exp(−1/q)·(−2u/q²).
        let dw = w * (-2.0 * u / (q * q)) / half;
        (w, dw)
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = self.support;
        if !(a < b) || !a.is_finite() || !b.is_finite() || !self.amplitude.is_finite() {
            return Err(Error::InvalidInput(format!(
                "bump support ({a}, {b}) is not a nonempty interval"
            )));
        }
        Ok(())
    }
}

/// Minimum number of quadrature panels across the support of one member.
pub const MIN_SUPPORT_PANELS: usize = 64;

/// One member `(ξ_k, η_k)` of the localized test family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub k: i64,
    pub alpha: f64,
    pub bump: Bump,
    /// Radial support `(r₀ + a k^{−α}, r₀ + b k^{−α})`.
    pub support: (f64, f64),
    r0: f64,
    scale: f64,
    panels: usize,
}

impl FamilyMember {
    /// `ξ_k` and its derivative only (`η = ζ = 0`).
    fn xi(&self, r: f64) -> FieldSample {
        let (w, dw) = self.bump.eval(self.scale * (r - self.r0));
        FieldSample {
            xi: w,
            dxi: self.scale * dw,
            ..Default::default()
        }
    }

    /// Field with `η_k` filled in, bound to `eq`.
    pub fn field<'a>(&'a self, eq: &'a EquilibriumState) -> impl RadialField + 'a {
        SausageEliminated {
            inner: self,
            eq,
            k: self.k as f64,
        }
    }
}

impl RadialField for FamilyMember {
    fn sample(&self, r: f64) -> FieldSample {
        self.xi(r)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support;
        let mut b = vec![0.0];
        b.extend((0..=self.panels).map(|i| lo + (hi - lo) * i as f64 / self.panels as f64));
        if hi < self.r0 {
            b.push(self.r0);
        }
        b
    }
}

/// `ξ_k = w(k^α (r − r₀))` with `η_k` from the compressional elimination.
pub fn build_test_family(
    eq: &EquilibriumState,
    alpha: f64,
    w: &Bump,
    k: i64,
) -> Result<FamilyMember> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if k <= 0 {
        return Err(Error::InvalidInput(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    w.validate()?;
    let scale = (k as f64).powf(alpha);
    let support = (eq.r0 + w.support.0 / scale, eq.r0 + w.support.1 / scale);
    if !(support.0 > 0.0 && support.1 <= eq.r0) {
        return Err(Error::SupportOverflow { k });
    }
    Ok(FamilyMember {
        k,
        alpha,
        bump: *w,
        support,
        r0: eq.r0,
        scale,
        panels: MIN_SUPPORT_PANELS,
    })
}

/// Values of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingSample {
    pub k: i64,
    pub j_value: f64,
    pub e_value: f64,
    pub lambda_upper: f64,
}

/// Whether the fitted `λ_upper` exponent indicates divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingVerdict {
    Divergent,
    Bounded,
}

/// Fitted exponents below this are read as non-divergent: at zero predicted
/// exponent the corrections of relative size `k^{2α−2}` and `k^{−α}` leave a
/// small positive slope over any finite window.
pub const DIVERGENCE_THRESHOLD: f64 = 0.05;

/// Smallest `k` used in the fits by default (the top decade of `16..1024`).
pub const DEFAULT_FIT_MIN_K: i64 = 128;

/// Study of `λ_upper(k)` for one profile and one `α`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub alpha: f64,
    pub bump: Bump,
    /// Boundary exponent `β`, when the profile declares one.
    pub beta: Option<f64>,
    pub gamma: f64,
    pub k_list: Vec<i64>,
    pub samples: Vec<ScalingSample>,
    /// Fits use `k ≥ fit_min_k`.
    pub fit_min_k: i64,
    /// Fit of `ln(−λ_upper)` against `ln k`.
    pub lambda_fit: LinearFit,
    /// Fit of `ln J` against `ln k`.
    pub j_fit: LinearFit,
    /// Fit of `ln(−E)` against `ln k`.
    pub e_fit: LinearFit,
    pub verdict: ScalingVerdict,
}

impl ScalingStudy {
    pub fn fitted_exponent(&self) -> f64 {
        self.lambda_fit.slope
    }

    /// `αβ/γ − α(β − 1)`.
    pub fn predicted_exponent(&self) -> Option<f64> {
        self.beta
            .map(|b| predicted_lambda_exponent(self.alpha, b, self.gamma))
    }

    /// `−α − αβ/γ`.
    pub fn predicted_j_exponent(&self) -> Option<f64> {
        self.beta.map(|b| -self.alpha - self.alpha * b / self.gamma)
    }

    /// `−α − α(β − 1)`.
    pub fn predicted_e_exponent(&self) -> Option<f64> {
        self.beta.map(|b| -self.alpha - self.alpha * (b - 1.0))
    }
}

/// `αβ/γ − α(β − 1)`, the exponent of `−λ_upper` in `k`.
pub fn predicted_lambda_exponent(alpha: f64, beta: f64, gamma: f64) -> f64 {
    alpha * beta / gamma - alpha * (beta - 1.0)
}

/// `k = 2^lo, …, 2^hi`.
pub fn powers_of_two(lo: u32, hi: u32) -> Vec<i64> {
    (lo..=hi).map(|e| 1i64 << e).collect()
}

/// `J`, `E` and `λ_upper = E/J` of the family member at `k`.
pub fn evaluate_member(
    eq: &EquilibriumState,
    alpha: f64,
    w: &Bump,
    k: i64,
) -> Result<ScalingSample> {
    let member = build_test_family(eq, alpha, w, k)?;
    let field = member.field(eq);
    let mode = ModeIndex::new(0, k);
    let e = assemble_e0k(eq, mode, &field)?.total;
    let j = assemble_j(eq, mode, &field);
    Ok(ScalingSample {
        k,
        j_value: j,
        e_value: e,
        lambda_upper: e / j,
    })
}

/// Evaluate the family over `k_list` and fit the exponents over
/// `k ≥ fit_min_k`.
pub fn fit_scaling_exponent(
    eq: &EquilibriumState,
    alpha: f64,
    w: &Bump,
    k_list: &[i64],
    fit_min_k: i64,
) -> Result<ScalingStudy> {
    if k_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidInput(
            "k_list must be strictly increasing".into(),
        ));
    }
    let samples = k_list
        .par_iter()
        .map(|&k| evaluate_member(eq, alpha, w, k))
        .collect::<Result<Vec<_>>>()?;
    let window: Vec<&ScalingSample> = samples.iter().filter(|s| s.k >= fit_min_k).collect();
    if window.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least two wavenumbers with k ≥ {fit_min_k}"
        )));
    }
    if let Some(bad) = window.iter().find(|s| !(s.lambda_upper < 0.0)) {
        return Err(Error::SignFlip {
            k: bad.k,
            lambda: bad.lambda_upper,
        });
    }
    let lk: Vec<f64> = window.iter().map(|s| (s.k as f64).ln()).collect();
    let log_of =
        |f: &dyn Fn(&ScalingSample) -> f64| window.iter().map(|s| f(s).ln()).collect::<Vec<_>>();
    let lambda_fit = linear_fit(&lk, &log_of(&|s| -s.lambda_upper))?;
    let j_fit = linear_fit(&lk, &log_of(&|s| s.j_value))?;
    let e_fit = linear_fit(&lk, &log_of(&|s| -s.e_value))?;
    let verdict = if lambda_fit.slope > DIVERGENCE_THRESHOLD {
        ScalingVerdict::Divergent
    } else {
        ScalingVerdict::Bounded
    };
    Ok(ScalingStudy {
        alpha,
        bump: *w,
        beta: eq.profile.boundary_order(),
        gamma: eq.gamma,
        k_list: k_list.to_vec(),
        samples,
        fit_min_k,
        lambda_fit,
        j_fit,
        e_fit,
        verdict,
    })
}
