//! Pointwise sausage (`m = 0`) and interchange (`m ≠ 0`) criteria.

use serde::Serialize;

use super::state::EquilibriumState;
use crate::{Error, Result};

/// Outcome of a criterion scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// A radius with a strictly negative criterion value was found.
    UnstableWitnessFound,
    /// The criterion is nonnegative (to tolerance) on every scanned node.
    CriterionNonnegative,
    /// The criterion is degenerate (identically zero data).
    Inconclusive,
}

/// Per-node criterion values and the resulting verdict.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub m: i32,
    pub radii: Vec<f64>,
    pub scan: Vec<f64>,
    pub witness_r: Option<f64>,
    pub verdict: Verdict,
}

/// Relative tolerance below which a criterion value counts as zero.
const SIGN_TOL: f64 = 1e-12;

fn classify(m: i32, radii: Vec<f64>, scan: Vec<f64>, scales: Vec<f64>) -> CriterionReport {
    let mut witness = None;
    let mut best = 0.0;
    for ((&r, &v), &s) in radii.iter().zip(&scan).zip(&scales) {
        if v < -SIGN_TOL * s && v < best {
            best = v;
            witness = Some(r);
        }
    }
    let degenerate = scales.iter().all(|&s| s == 0.0);
    let verdict = if witness.is_some() {
        Verdict::UnstableWitnessFound
    } else if degenerate {
        Verdict::Inconclusive
    } else {
        Verdict::CriterionNonnegative
    };
    CriterionReport {
        m,
        radii,
        scan,
        witness_r: witness,
        verdict,
    }
}

/// Sausage value `p′ + 2γ p B_θ² / (r (γp + B_θ²))` at a single radius.
pub fn sausage_value(eq: &EquilibriumState, r: f64) -> f64 {
    let s = eq.at(r);
    let denom = eq.gamma * s.p + s.b2;
    if denom <= 0.0 {
        return s.dp;
    }
    s.dp + 2.0 * eq.gamma * s.p * s.b2 / (r * denom)
}

/// Scan the sausage criterion over interior nodes. Every admissible profile
/// has a negative value somewhere; a nonzero profile without a witness
/// signals a grid too coarse to resolve it.
pub fn sausage_criterion_scan(eq: &EquilibriumState) -> Result<CriterionReport> {
    let n = eq.len() - 1;
    let mut radii = Vec::with_capacity(n);
    let mut scan = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    for i in 0..n {
        let r = eq.grid[i];
        let denom = eq.gamma * eq.p[i] + eq.b[i] * eq.b[i];
        let term = if denom > 0.0 {
            2.0 * eq.gamma * eq.p[i] * eq.b[i] * eq.b[i] / (r * denom)
        } else {
            0.0
        };
        radii.push(r);
        scan.push(eq.dp[i] + term);
        scales.push(eq.dp[i].abs() + term.abs());
    }
    let report = classify(0, radii, scan, scales);
    if report.verdict == Verdict::CriterionNonnegative {
        return Err(Error::NoWitness { m: 0 });
    }
    Ok(report)
}

/// The radius `r_*` where `q(r) = r^{2γ} p(r)` is stationary (root of
/// `2γp + r p′`), together with the criterion value there and its closed
/// form `−2γ² p² / (r_* (γp + B_θ²))`. `None` when no sign change exists.
pub fn sausage_mean_value_witness(eq: &EquilibriumState) -> Option<(f64, f64, f64)> {
    let g = |r: f64| {
        let s = eq.profile.sample(r);
        2.0 * eq.gamma * s.p + r * s.dp
    };
    // g > 0 near the axis when p(0) > 0; find the first sign change.
    let mut lo = eq.grid[0];
    if !(g(lo) > 0.0) {
        return None;
    }
    let mut hi = None;
    for &r in &eq.grid[1..] {
        if g(r) < 0.0 {
            hi = Some(r);
            break;
        }
        lo = r;
    }
    let mut hi = hi?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let s = eq.at(r);
    let closed = -2.0 * eq.gamma * eq.gamma * s.p * s.p / (r * (eq.gamma * s.p + s.b2));
    Some((r, sausage_value(eq, r), closed))
}

/// Interchange value `2p′ + m² B_θ² / r` at a single radius.
pub fn interchange_value(eq: &EquilibriumState, m: i32, r: f64) -> f64 {
    let s = eq.at(r);
    2.0 * s.dp + (m * m) as f64 * s.b2 / r
}

/// Scan `2p′ + m² B_θ² / r` over interior nodes for `m ≠ 0`.
pub fn interchange_criterion_scan(eq: &EquilibriumState, m: i32) -> Result<CriterionReport> {
    if m == 0 {
        return Err(Error::InvalidInput(
            "interchange criterion needs m != 0".into(),
        ));
    }
    let m2 = (m * m) as f64;
    let n = eq.len() - 1;
    let mut radii = Vec::with_capacity(n);
    let mut scan = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    for i in 0..n {
        let r = eq.grid[i];
        let a = 2.0 * eq.dp[i];
        let b = m2 * eq.b[i] * eq.b[i] / r;
        radii.push(r);
        scan.push(a + b);
        scales.push(a.abs() + b.abs());
    }
    Ok(classify(m, radii, scan, scales))
}
