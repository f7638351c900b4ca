//! Closed-form and tabulated pressure profiles `p(r)` on `[0, r₀]`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shape of the pressure profile. The amplitude `C` lives on
/// [`PressureProfile`] and multiplies every shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `p ≡ 0`.
    Zero,
    /// `p = C (r₀² − r²)`: uniform axial current `J_z = 2√C`.
    Parabolic,
    /// `p = C Σ c_i rⁱ` (coefficients in increasing powers).
    Polynomial { coeffs: Vec<f64> },
    /// `p = C (r₀ − q(r))^β`, where `q(r) = r` for `r ≥ core·r₀` and `q` is an
    /// even polynomial blend inside the core, so `p = C (r₀ − r)^β` exactly
    /// near the boundary while staying smooth at the axis.
    PowerLaw {
        beta: f64,
        #[serde(default = "default_core")]
        core: f64,
    },
    /// `p = C exp{−(r₀ − q(r))^{−β}}` with the same axis blend as
    /// [`ProfileKind::PowerLaw`]; vanishes to infinite order at `r₀`.
    Exponential {
        beta: f64,
        #[serde(default = "default_core")]
        core: f64,
    },
    /// `p = C` for `r ≤ inner`, `0` for `r ≥ outer`, with a `C³` septic step in
    /// between; the current density is supported in `[inner, outer]`.
    Plateau { inner: f64, outer: f64 },
    /// Natural cubic spline through samples `(r_i, p_i)`, scaled by `C`.
    Tabulated { r: Vec<f64>, p: Vec<f64> },
}

fn default_core() -> f64 {
    0.5
}

/// Value and first two radial derivatives of the pressure at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PressureSample {
    pub p: f64,
    pub dp: f64,
    pub d2p: f64,
}

/// Equilibrium pressure profile together with the adiabatic data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureProfile {
    #[serde(flatten)]
    pub kind: ProfileKind,
    /// Amplitude `C` (pressure units).
    #[serde(rename = "C", default = "one")]
    pub c: f64,
    /// Adiabatic exponent `γ > 1`.
    pub gamma: f64,
    /// Entropy constant `A > 0` in `ρ = (p/A)^{1/γ}`.
    #[serde(rename = "A", default = "one")]
    pub entropy: f64,
    /// Plasma radius `r₀`.
    #[serde(default = "one")]
    pub r0: f64,
}

fn one() -> f64 {
    1.0
}

impl PressureProfile {
    /// Uniform current density `J₀` on `[0, r₀]`: `B_θ = J₀ r/2`,
    /// `p = (J₀²/4)(r₀² − r²)`.
    pub fn uniform_current(j0: f64, r0: f64, gamma: f64) -> Self {
        PressureProfile {
            kind: ProfileKind::Parabolic,
            c: 0.25 * j0 * j0,
            gamma,
            entropy: 1.0,
            r0,
        }
    }

    /// `p = C (r₀ − r)^β` near the boundary with the default axis blend.
    pub fn power_law(c: f64, beta: f64, gamma: f64) -> Self {
        PressureProfile {
            kind: ProfileKind::PowerLaw {
                beta,
                core: default_core(),
            },
            c,
            gamma,
            entropy: 1.0,
            r0: 1.0,
        }
    }

    /// `p = C exp{−(r₀ − r)^{−β}}` near the boundary.
    pub fn exponential(c: f64, beta: f64, gamma: f64) -> Self {
        PressureProfile {
            kind: ProfileKind::Exponential {
                beta,
                core: default_core(),
            },
            c,
            gamma,
            entropy: 1.0,
            r0: 1.0,
        }
    }

    /// `p = C Σ c_i rⁱ` on `[0, 1]`.
    pub fn polynomial(coeffs: Vec<f64>, gamma: f64) -> Self {
        PressureProfile {
            kind: ProfileKind::Polynomial { coeffs },
            c: 1.0,
            gamma,
            entropy: 1.0,
            r0: 1.0,
        }
    }

    /// Flat pressure `C` out to `inner`, falling to zero at `outer ≤ r₀`.
    pub fn plateau(c: f64, inner: f64, outer: f64, gamma: f64) -> Self {
        PressureProfile {
            kind: ProfileKind::Plateau { inner, outer },
            c,
            gamma,
            entropy: 1.0,
            r0: 1.0,
        }
    }

    /// Identically zero pressure.
    pub fn zero(gamma: f64) -> Self {
        PressureProfile {
            kind: ProfileKind::Zero,
            c: 0.0,
            gamma,
            entropy: 1.0,
            r0: 1.0,
        }
    }

    /// Tabulated samples; `r` must be strictly increasing and end at `r₀`.
    pub fn tabulated(r: Vec<f64>, p: Vec<f64>, gamma: f64) -> Self {
        let r0 = r.last().copied().unwrap_or(1.0);
        PressureProfile {
            kind: ProfileKind::Tabulated { r, p },
            c: 1.0,
            gamma,
            entropy: 1.0,
            r0,
        }
    }

    /// Check parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidInput(s));
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return bad(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.entropy > 0.0) {
            return bad(format!(
                "entropy constant A must be positive, got {}",
                self.entropy
            ));
        }
        if !(self.r0 > 0.0) {
            return bad(format!("r0 must be positive, got {}", self.r0));
        }
        if !(self.c >= 0.0) {
            return bad(format!("amplitude C must be nonnegative, got {}", self.c));
        }
        match &self.kind {
            ProfileKind::PowerLaw { beta, core } => {
                if !(*beta >= 1.0) {
                    return bad(format!("power-law order beta must be >= 1, got {beta}"));
                }
                if !(*core > 0.0 && *core < 1.0) {
                    return bad(format!("core fraction must lie in (0,1), got {core}"));
                }
            }
            ProfileKind::Exponential { beta, core } => {
                if !(*beta > 0.0) {
                    return bad(format!(
                        "exponential order beta must be positive, got {beta}"
                    ));
                }
                if !(*core > 0.0 && *core < 1.0) {
                    return bad(format!("core fraction must lie in (0,1), got {core}"));
                }
            }
            ProfileKind::Plateau { inner, outer } => {
                if !(*inner >= 0.0 && inner < outer && *outer <= self.r0) {
                    return bad(format!(
                        "plateau needs 0 <= inner < outer <= r0, got {inner}, {outer}"
                    ));
                }
            }
            ProfileKind::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return bad("polynomial profile needs coefficients".into());
                }
                if coeffs.len() > 1 && coeffs[1] != 0.0 {
                    return bad("polynomial profile needs p'(0) = 0 (no linear term)".into());
                }
            }
            ProfileKind::Tabulated { r, p } => {
                if r.len() != p.len() || r.len() < 4 {
                    return bad("tabulated profile needs >= 4 (r, p) pairs of equal length".into());
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("tabulated radii must be strictly increasing".into());
                }
                if (r[r.len() - 1] - self.r0).abs() > 1e-12 * self.r0 {
                    return bad("tabulated radii must end at r0".into());
                }
            }
            ProfileKind::Zero | ProfileKind::Parabolic => {}
        }
        Ok(())
    }

    /// Boundary-vanishing order `β` when the family defines one.
    pub fn boundary_order(&self) -> Option<f64> {
        match &self.kind {
            ProfileKind::PowerLaw { beta, .. } => Some(*beta),
            ProfileKind::Parabolic => Some(1.0),
            _ => None,
        }
    }

    /// Whether the family is allowed to vanish on an interval inside the
    /// plasma (requires the relaxed admissibility flag).
    pub fn has_plateau_zeros(&self) -> bool {
        matches!(&self.kind, ProfileKind::Plateau { outer, .. } if *outer < self.r0)
    }

    /// Mass density `ρ = (p/A)^{1/γ}`.
    pub fn density(&self, p: f64) -> f64 {
        if p <= 0.0 {
            0.0
        } else {
            (p / self.entropy).powf(1.0 / self.gamma)
        }
    }

    /// `p`, `p′`, `p″` at radius `r` (clamped to `[0, r₀]`).
    pub fn sample(&self, r: f64) -> PressureSample {
        let r = r.clamp(0.0, self.r0);
        let c = self.c;
        let s = match &self.kind {
            ProfileKind::Zero => PressureSample::default(),
            ProfileKind::Parabolic => PressureSample {
                p: self.r0 * self.r0 - r * r,
                dp: -2.0 * r,
                d2p: -2.0,
            },
            ProfileKind::Polynomial { coeffs } => poly_sample(coeffs, r),
            ProfileKind::PowerLaw { beta, core } => {
                let (h, dh, d2h) = boundary_distance(r, self.r0, core * self.r0);
                power_sample(h, dh, d2h, *beta)
            }
            ProfileKind::Exponential { beta, core } => {
                let (h, dh, d2h) = boundary_distance(r, self.r0, core * self.r0);
                exponential_sample(h, dh, d2h, *beta)
            }
            ProfileKind::Plateau { inner, outer } => plateau_sample(r, *inner, *outer),
            ProfileKind::Tabulated { r: rs, p: ps } => spline_sample(rs, ps, r),
        };
        PressureSample {
            p: c * s.p,
            dp: c * s.dp,
            d2p: c * s.d2p,
        }
    }

    /// Whether `p` is analytic up to and including `r₀` (so plain
    /// Gauss–Legendre quadrature converges spectrally on the last panel).
    pub(crate) fn smooth_at_boundary(&self) -> bool {
        match &self.kind {
            ProfileKind::PowerLaw { beta, .. } => beta.fract() == 0.0,
            ProfileKind::Exponential { .. } | ProfileKind::Tabulated { .. } => false,
            _ => true,
        }
    }
}

fn poly_sample(coeffs: &[f64], r: f64) -> PressureSample {
    let mut p = 0.0;
    let mut dp = 0.0;
    let mut d2p = 0.0;
    for &a in coeffs.iter().rev() {
        d2p = d2p * r + 2.0 * dp;
        dp = dp * r + p;
        p = p * r + a;
    }
    PressureSample { p, dp, d2p }
}

/// Distance-like coordinate `h = r₀ − q(r)` with `q(r) = r` outside the core
/// radius `rb` and `q = rb·Q(r/rb)` inside, where
/// `Q″(x) = (630/256)(1 − x²)⁴` so `Q` joins `x` with five matching
/// derivatives at `x = 1` and is even at the axis.
fn boundary_distance(r: f64, r0: f64, rb: f64) -> (f64, f64, f64) {
    if r >= rb {
        return (r0 - r, -1.0, 0.0);
    }
    let x = r / rb;
    let x2 = x * x;
    let q =
        rb * (63.0 + x2 * (315.0 + x2 * (-210.0 + x2 * (126.0 + x2 * (-45.0 + 7.0 * x2))))) / 256.0;
    let dq = x * (630.0 + x2 * (-840.0 + x2 * (756.0 + x2 * (-360.0 + 70.0 * x2)))) / 256.0;
    let one_m = 1.0 - x2;
    let d2q = 630.0 / 256.0 * one_m.powi(4) / rb;
    (r0 - q, -dq, -d2q)
}

fn power_sample(h: f64, dh: f64, d2h: f64, beta: f64) -> PressureSample {
    if h <= 0.0 {
        let dp = if beta == 1.0 { dh } else { 0.0 };
        let d2p = if beta == 1.0 {
            d2h
        } else if beta == 2.0 {
            2.0 * dh * dh
        } else if beta > 2.0 {
            0.0
        } else {
            f64::INFINITY
        };
        return PressureSample { p: 0.0, dp, d2p };
    }
    let p = h.powf(beta);
    let hb1 = h.powf(beta - 1.0);
    let dp = beta * hb1 * dh;
    let curv = if beta == 1.0 {
        0.0
    } else {
        (beta - 1.0) * h.powf(beta - 2.0) * dh * dh
    };
    let d2p = beta * (curv + hb1 * d2h);
    PressureSample { p, dp, d2p }
}

fn exponential_sample(h: f64, dh: f64, d2h: f64, beta: f64) -> PressureSample {
    if h <= 0.0 {
        return PressureSample::default();
    }
    let u = h.powf(-beta);
    let e = (-u).exp();
    if e == 0.0 {
        return PressureSample::default();
    }
    let hb1 = h.powf(-beta - 1.0);
    let dp = beta * e * hb1 * dh;
    // d/dr[β e^{−u} h^{−β−1} h′]
    let du = -beta * hb1 * dh;
    let d2p =
        beta * e * (-du * hb1 * dh + (-beta - 1.0) * h.powf(-beta - 2.0) * dh * dh + hb1 * d2h);
    PressureSample { p: e, dp, d2p }
}

fn plateau_sample(r: f64, inner: f64, outer: f64) -> PressureSample {
    if r <= inner {
        return PressureSample {
            p: 1.0,
            dp: 0.0,
            d2p: 0.0,
        };
    }
    if r >= outer {
        return PressureSample::default();
    }
    let w = outer - inner;
    let t = (r - inner) / w;
    let s = 1.0 - t.powi(4) * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t.powi(3));
    let u = t * (1.0 - t);
    let ds = -140.0 * u.powi(3) / w;
    let d2s = -420.0 * u * u * (1.0 - 2.0 * t) / (w * w);
    PressureSample {
        p: s,
        dp: ds,
        d2p: d2s,
    }
}

/// Natural cubic spline evaluation (second derivatives solved on the fly).
fn spline_sample(rs: &[f64], ps: &[f64], r: f64) -> PressureSample {
    let m = spline_moments(rs, ps);
    let n = rs.len();
    let i = match rs.partition_point(|&x| x <= r) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    };
    let h = rs[i + 1] - rs[i];
    let a = (rs[i + 1] - r) / h;
    let b = (r - rs[i]) / h;
    let p = a * ps[i]
        + b * ps[i + 1]
        + ((a.powi(3) - a) * m[i] + (b.powi(3) - b) * m[i + 1]) * h * h / 6.0;
    let dp = (ps[i + 1] - ps[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m[i]
        + (3.0 * b * b - 1.0) / 6.0 * h * m[i + 1];
    let d2p = a * m[i] + b * m[i + 1];
    PressureSample { p, dp, d2p }
}

fn spline_moments(rs: &[f64], ps: &[f64]) -> Vec<f64> {
    let n = rs.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior system.
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = rs[i] - rs[i - 1];
        let h1 = rs[i + 1] - rs[i];
        let a = h0 / 6.0;
        let b = (h0 + h1) / 3.0;
        let c = h1 / 6.0;
        let d = (ps[i + 1] - ps[i]) / h1 - (ps[i] - ps[i - 1]) / h0;
        let denom = b - a * c_prime[i - 1];
        c_prime[i] = c / denom;
        d_prime[i] = (d - a * d_prime[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(profile: &PressureProfile, r: f64) {
        let h = 1e-5;
        let s = profile.sample(r);
        let sp = profile.sample(r + h);
        let sm = profile.sample(r - h);
        let dp = (sp.p - sm.p) / (2.0 * h);
        let d2p = (sp.dp - sm.dp) / (2.0 * h);
        assert!(
            (dp - s.dp).abs() < 1e-7 * (1.0 + s.dp.abs()),
            "{:?} r={r}: {dp} vs {}",
            profile.kind,
            s.dp
        );
        assert!(
            (d2p - s.d2p).abs() < 1e-6 * (1.0 + s.d2p.abs()),
            "{:?} r={r}: {d2p} vs {}",
            profile.kind,
            s.d2p
        );
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let profiles = [
            PressureProfile::uniform_current(2.0, 1.0, 5.0 / 3.0),
            PressureProfile::power_law(1.0, 2.0, 1.5),
            PressureProfile::power_law(0.7, 1.5, 2.0),
            PressureProfile::exponential(1.0, 1.0, 5.0 / 3.0),
            PressureProfile::plateau(1.0, 0.2, 0.7, 5.0 / 3.0),
            PressureProfile::polynomial(
                vec![19.0 / 36.0, 0.0, -1.0, 5.0 / 9.0, -1.0 / 12.0],
                5.0 / 3.0,
            ),
        ];
        for pr in &profiles {
            pr.validate().unwrap();
            for &r in &[0.1, 0.3, 0.49, 0.51, 0.6, 0.8, 0.95] {
                fd_check(pr, r);
            }
        }
    }

    #[test]
    fn power_law_is_exact_near_boundary_and_flat_at_axis() {
        let pr = PressureProfile::power_law(2.0, 2.5, 1.5);
        for &r in &[0.5, 0.7, 0.99] {
            let expect = 2.0 * (1.0f64 - r).powf(2.5);
            assert!((pr.sample(r).p - expect).abs() < 1e-14);
        }
        assert_eq!(pr.sample(0.0).dp, 0.0);
        // five derivatives of the blend match at the core radius
        let a = pr.sample(0.5 - 1e-9);
        let b = pr.sample(0.5 + 1e-9);
        assert!((a.d2p - b.d2p).abs() < 1e-6);
    }

    #[test]
    fn spline_reproduces_cubic_data_interior() {
        let rs: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let ps: Vec<f64> = rs.iter().map(|r| 1.0 - r * r).collect();
        let pr = PressureProfile::tabulated(rs, ps, 2.0);
        pr.validate().unwrap();
        let s = pr.sample(0.5);
        assert!((s.p - 0.75).abs() < 1e-5);
        assert!((s.dp + 1.0).abs() < 1e-3);
    }
}
