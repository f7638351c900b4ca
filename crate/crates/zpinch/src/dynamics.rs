//! Time integration of the linearized per-mode system.
//!
//! For a fixed `(m, k)` the linearized equations reduce to `M a_tt = −K a`
//! on the finite-element coefficients, with `K` and `M` the discrete forms of
//! `2E` and `2J` from [`crate::spectrum`]. The integrator is velocity Verlet
//! (leapfrog), which is explicit, time-reversible and conserves the
//! staggered energy
//! `½ v_{n+½}ᵀ M v_{n+½} + ½ a_{n+1}ᵀ K a_n`
//! exactly in exact arithmetic. The ledger records that quantity split into
//! a kinetic part `‖√ρ g_t‖² = J(v)` and a potential part `E`.

use serde::{Deserialize, Serialize};

use crate::energy::{Form, ModeIndex, TrialField};
use crate::equilibrium::EquilibriumState;
use crate::regression::linear_fit;
use crate::spectrum::{assemble_operators, BandCholesky, BandMatrix, DiscreteOperatorPair};
use crate::{Error, Result};

/// Integration controls for [`evolve_mode`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolveOptions {
    pub t_end: f64,
    /// Time step; `None` picks half the explicit stability limit.
    pub dt: Option<f64>,
    /// Keep the state vectors of every `record_every`-th step.
    pub record_every: usize,
    /// Allowed relative drift of the ledger total.
    pub ledger_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            t_end: 10.0,
            dt: None,
            record_every: 1,
            ledger_tol: 1e-6,
        }
    }
}

/// One ledger row, taken at the half step `t` where the staggered velocity
/// lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub t: f64,
    /// `‖√ρ g_t‖² = J(v)`.
    pub kinetic: f64,
    /// `E`, evaluated as `½ a_{n+1}ᵀ K a_n`.
    pub potential: f64,
    pub total: f64,
    /// `ln ‖√ρ g_t‖`.
    pub log_norm: f64,
}

/// Time history of one mode.
#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    pub mode: ModeIndex,
    /// Mesh of the trial space (including the axis).
    pub mesh: Vec<f64>,
    pub dt: f64,
    /// Estimate of the largest eigenvalue of `M⁻¹K` used for the step check.
    pub lambda_max: f64,
    /// Recorded integer-step times.
    pub times: Vec<f64>,
    /// Coefficient vectors `a(t)` at `times`.
    pub displacement: Vec<Vec<f64>>,
    /// Coefficient vectors `a_t(t)` at `times`.
    pub velocity: Vec<Vec<f64>>,
    /// `J(a_t) + E(a)` with both evaluated at `times` (not exactly conserved;
    /// its deviation from the ledger total is `O(dt²)`).
    pub collocated_total: Vec<f64>,
    /// Staggered ledger, one entry per step.
    pub ledger: Vec<LedgerEntry>,
    /// `‖√ρ a‖ = √J(a)` at every step (index 0 is the initial state).
    pub amplitude: Vec<f64>,
}

impl ModeTrajectory {
    /// Largest `|total − total₀|` relative to `|total₀|` (or, when the
    /// conserved total is negligible, relative to the largest term).
    ///
    /// The staggered total is conserved exactly by the scheme, so the drift is
    /// pure rounding. It grows like `ε·e^{2μt}·|total₀|⁻¹·(size of the growing
    /// terms)`: initial data far from an eigenmode, whose total is small
    /// compared with the kinetic and potential terms that later cancel in it,
    /// needs a looser `ledger_tol` over long runs.
    pub fn ledger_drift(&self) -> f64 {
        ledger_drift(&self.ledger)
    }

    /// Final displacement and velocity.
    pub fn final_state(&self) -> (&[f64], &[f64]) {
        (
            self.displacement.last().map(Vec::as_slice).unwrap_or(&[]),
            self.velocity.last().map(Vec::as_slice).unwrap_or(&[]),
        )
    }
}

fn ledger_drift(ledger: &[LedgerEntry]) -> f64 {
    let Some(first) = ledger.first() else {
        return 0.0;
    };
    let scale = ledger.iter().fold(first.total.abs(), |s, e| {
        s.max(e.kinetic.abs()).max(e.potential.abs())
    });
    if scale == 0.0 {
        return 0.0;
    }
    let reference = first.total.abs().max(1e-300);
    let worst = ledger
        .iter()
        .map(|e| (e.total - first.total).abs())
        .fold(0.0, f64::max);
    // Relative to the conserved value when it is not negligible; otherwise
    // relative to the size of the terms that cancel.
    if reference > 1e-12 * scale {
        worst / reference
    } else {
        worst / scale
    }
}

/// Initial displacement and velocity for [`evolve_mode`].
#[derive(Debug, Clone)]
pub struct InitialState {
    pub displacement: TrialField,
    /// `None` means zero velocity.
    pub velocity: Option<TrialField>,
}

impl InitialState {
    /// Displacement `field`, at rest.
    pub fn at_rest(field: TrialField) -> Self {
        InitialState {
            displacement: field,
            velocity: None,
        }
    }
}

/// Operators and factored mass matrix for repeated integration on one mesh.
#[derive(Debug, Clone)]
pub struct Integrator {
    pub ops: DiscreteOperatorPair,
    mass: BandCholesky,
    /// Estimate of the largest eigenvalue of `M⁻¹K`.
    pub lambda_max: f64,
}

/// Power iterations used to estimate the top of the spectrum.
const POWER_ITERATIONS: usize = 300;
/// Safety factor applied to the power-iteration estimate.
const SPECTRAL_SAFETY: f64 = 1.05;

impl Integrator {
    /// Assemble `K`, `M` for `mode` on `mesh` and factor `M`.
    pub fn new(eq: &EquilibriumState, mode: ModeIndex, mesh: &[f64]) -> Result<Self> {
        let ops = assemble_operators(eq, mode, mesh, Form::Completed)?;
        Self::from_operators(ops)
    }

    /// Use an existing operator pair.
    pub fn from_operators(ops: DiscreteOperatorPair) -> Result<Self> {
        let mass = ops
            .m
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("mass matrix is not positive definite".into()))?;
        let lambda_max = SPECTRAL_SAFETY * top_eigenvalue(&ops.k, &ops.m, &mass);
        Ok(Integrator {
            ops,
            mass,
            lambda_max,
        })
    }

    /// Explicit stability limit `2/√λ_max`.
    pub fn stability_limit(&self) -> f64 {
        if self.lambda_max > 0.0 {
            2.0 / self.lambda_max.sqrt()
        } else {
            f64::INFINITY
        }
    }

    fn accel(&self, a: &[f64]) -> Vec<f64> {
        let mut f = self.ops.k.mul_vec(a);
        f.iter_mut().for_each(|v| *v = -*v);
        self.mass.solve(&f)
    }

    /// Integrate from coefficient vectors `(a0, v0)`. A negative `dt` runs
    /// backwards in time.
    pub fn run(
        &self,
        a0: &[f64],
        v0: &[f64],
        t_end: f64,
        dt: f64,
        opts: &EvolveOptions,
    ) -> Result<ModeTrajectory> {
        let n = self.ops.dim();
        if a0.len() != n || v0.len() != n {
            return Err(Error::InvalidInput(
                "initial vectors do not match the operator size".into(),
            ));
        }
        if !(dt != 0.0 && dt.is_finite()) || !(t_end >= 0.0) {
            return Err(Error::InvalidInput(
                "time step must be finite and nonzero, t_end nonnegative".into(),
            ));
        }
        let limit = self.stability_limit();
        if dt.abs() >= limit {
            return Err(Error::StabilityViolation(format!(
                "dt = {:.3e} exceeds the explicit limit {limit:.3e}",
                dt.abs()
            )));
        }
        let steps = (t_end / dt.abs()).round() as usize;
        let stride = opts.record_every.max(1);
        let k = &self.ops.k;
        let m = &self.ops.m;
        let mut a = a0.to_vec();
        let mut v = v0.to_vec();
        let mut acc = self.accel(&a);
        let mut traj = ModeTrajectory {
            mode: self.ops.mode,
            mesh: self.ops.mesh.clone(),
            dt,
            lambda_max: self.lambda_max,
            times: vec![0.0],
            displacement: vec![a.clone()],
            velocity: vec![v.clone()],
            collocated_total: vec![0.5 * m.bilinear(&v, &v) + 0.5 * k.bilinear(&a, &a)],
            ledger: Vec::with_capacity(steps),
            amplitude: vec![(0.5 * m.bilinear(&a, &a)).sqrt()],
        };
        for step in 1..=steps {
            // Half kick, drift, half kick.
            let half: Vec<f64> = v
                .iter()
                .zip(&acc)
                .map(|(vi, ai)| vi + 0.5 * dt * ai)
                .collect();
            let next: Vec<f64> = a.iter().zip(&half).map(|(ai, vi)| ai + dt * vi).collect();
            let kinetic = 0.5 * m.bilinear(&half, &half);
            let potential = 0.5 * k.bilinear(&next, &a);
            let t_half = (step as f64 - 0.5) * dt;
            traj.ledger.push(LedgerEntry {
                t: t_half,
                kinetic,
                potential,
                total: kinetic + potential,
                log_norm: kinetic.sqrt().ln(),
            });
            acc = self.accel(&next);
            v = half
                .iter()
                .zip(&acc)
                .map(|(vi, ai)| vi + 0.5 * dt * ai)
                .collect();
            a = next;
            traj.amplitude.push((0.5 * m.bilinear(&a, &a)).sqrt());
            if step % stride == 0 || step == steps {
                traj.times.push(step as f64 * dt);
                traj.collocated_total
                    .push(0.5 * m.bilinear(&v, &v) + 0.5 * k.bilinear(&a, &a));
                traj.displacement.push(a.clone());
                traj.velocity.push(v.clone());
            }
            if !a.iter().all(|x| x.is_finite()) {
                return Err(Error::StabilityViolation(format!(
                    "state overflowed at step {step}"
                )));
            }
        }
        let drift = traj.ledger_drift();
        if drift > opts.ledger_tol {
            return Err(Error::StabilityViolation(format!(
                "ledger drifted by {drift:.3e} (tolerance {:.1e})",
                opts.ledger_tol
            )));
        }
        Ok(traj)
    }
}

/// Largest eigenvalue of `M⁻¹K` by power iteration in the `M` inner product.
fn top_eigenvalue(k: &BandMatrix, m: &BandMatrix, mass: &BandCholesky) -> f64 {
    let n = k.order();
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.3 * ((i as f64) * 0.618_033_988_7).sin())
        .collect();
    let mut estimate = 0.0f64;
    for _ in 0..POWER_ITERATIONS {
        let nx = m.bilinear(&x, &x).sqrt();
        if !(nx > 0.0) {
            break;
        }
        x.iter_mut().for_each(|v| *v /= nx);
        let kx = k.mul_vec(&x);
        let rq = kx.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        estimate = estimate.max(rq.abs());
        x = mass.solve(&kx);
    }
    estimate
}

/// Integrate `M a_tt = −K a` for the mode of `initial` on the mesh of its
/// displacement field.
pub fn evolve_mode(
    eq: &EquilibriumState,
    initial: &InitialState,
    opts: &EvolveOptions,
) -> Result<ModeTrajectory> {
    let field = &initial.displacement;
    let integrator = Integrator::new(eq, field.mode, &field.mesh)?;
    let a0 = integrator.ops.coefficients(field);
    let v0 = match &initial.velocity {
        Some(v) => {
            if v.mesh != field.mesh || v.mode != field.mode {
                return Err(Error::InvalidInput(
                    "velocity must share the displacement mesh and mode".into(),
                ));
            }
            integrator.ops.coefficients(v)
        }
        None => vec![0.0; a0.len()],
    };
    let dt = opts
        .dt
        .unwrap_or(0.5 * integrator.stability_limit().min(opts.t_end.max(1e-300)));
    integrator.run(&a0, &v0, opts.t_end, dt, opts)
}

/// Fitted growth rate with its 95 % confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub mu: f64,
    pub interval: (f64, f64),
    /// Time window of the fit.
    pub window: (f64, f64),
    pub samples: usize,
    /// `max ‖√ρ a(t)‖ / ‖√ρ a(0)‖`.
    pub amplification: f64,
}

/// Fraction of the trajectory (at its end) used by [`fit_growth_rate`].
pub const FIT_WINDOW: f64 = 0.4;
/// Minimum amplification required by [`fit_growth_rate`].
pub const MIN_AMPLIFICATION: f64 = 10.0;
/// Maximum number of points in the fit window.
const FIT_SAMPLES: usize = 400;

/// Least-squares slope of `ln ‖√ρ g_t‖` over the last [`FIT_WINDOW`] of
/// the trajectory.
pub fn fit_growth_rate(traj: &ModeTrajectory) -> Result<GrowthFit> {
    let reference = traj.amplitude.iter().copied().find(|&a| a > 0.0);
    let peak = traj.amplitude.iter().copied().fold(0.0, f64::max);
    let amplification = match reference {
        Some(r) => peak / r,
        None => 0.0,
    };
    if !(amplification >= MIN_AMPLIFICATION) {
        return Err(Error::InsufficientGrowth { amplification });
    }
    let ledger = &traj.ledger;
    let t_last = ledger.last().map_or(0.0, |e| e.t);
    let t_first = ledger.first().map_or(0.0, |e| e.t);
    let start = t_last - FIT_WINDOW * (t_last - t_first);
    let window: Vec<&LedgerEntry> = ledger
        .iter()
        .filter(|e| e.t.abs() >= start.abs() && e.log_norm.is_finite())
        .collect();
    let stride = (window.len() / FIT_SAMPLES).max(1);
    let picked: Vec<&&LedgerEntry> = window.iter().step_by(stride).collect();
    let xs: Vec<f64> = picked.iter().map(|e| e.t.abs()).collect();
    let ys: Vec<f64> = picked.iter().map(|e| e.log_norm).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(GrowthFit {
        mu: fit.slope,
        interval: fit.slope_interval(0.95),
        window: (
            xs.first().copied().unwrap_or(0.0),
            xs.last().copied().unwrap_or(0.0),
        ),
        samples: xs.len(),
        amplification,
    })
}

/// Discrete growth rate of leapfrog for a mode with continuous rate `μ`:
/// `acosh(1 + μ²dt²/2)/dt`.
pub fn leapfrog_growth_rate(mu: f64, dt: f64) -> f64 {
    (1.0 + 0.5 * mu * mu * dt * dt).acosh() / dt.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{build_equilibrium, BuildOptions, GridSpec, PressureProfile};
    use crate::spectrum::{mesh_with_axis, smallest_dense};

    fn setup(n: usize) -> (EquilibriumState, Vec<f64>) {
        let eq = build_equilibrium(
            &PressureProfile::uniform_current(2.0, 1.0, 5.0 / 3.0),
            &GridSpec::graded(256),
            &BuildOptions::default(),
        )
        .unwrap();
        let mesh = mesh_with_axis(&GridSpec::uniform(n).nodes(1.0).unwrap());
        (eq, mesh)
    }

    #[test]
    fn zero_initial_state_stays_zero() {
        let (eq, mesh) = setup(32);
        let field = TrialField::zeros(ModeIndex::new(0, 1), mesh);
        let traj = evolve_mode(
            &eq,
            &InitialState::at_rest(field),
            &EvolveOptions {
                t_end: 1.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(traj.displacement.iter().flatten().all(|&x| x == 0.0));
        assert!(matches!(
            fit_growth_rate(&traj),
            Err(Error::InsufficientGrowth { .. })
        ));
    }

    #[test]
    fn eigenmode_grows_like_cosh() {
        let (eq, mesh) = setup(48);
        let integ = Integrator::new(&eq, ModeIndex::new(0, 1), &mesh).unwrap();
        let pair = smallest_dense(&integ.ops.k, &integ.ops.m, integ.ops.boundary_dof()).unwrap();
        let mu = (-pair.lambda).sqrt();
        let dt = 0.2 * integ.stability_limit();
        let t_end = 3.0 / mu;
        let traj = integ
            .run(
                &pair.vector,
                &vec![0.0; pair.vector.len()],
                t_end,
                dt,
                &EvolveOptions::default(),
            )
            .unwrap();
        let a0 = traj.amplitude[0];
        let steps = traj.amplitude.len() - 1;
        let mu_d = leapfrog_growth_rate(mu, dt);
        let expected = (mu_d * steps as f64 * dt).cosh() * a0;
        let got = *traj.amplitude.last().unwrap();
        assert!((got / expected - 1.0).abs() < 1e-6, "{got} vs {expected}");
    }

    #[test]
    fn oversized_step_is_rejected() {
        let (eq, mesh) = setup(32);
        let integ = Integrator::new(&eq, ModeIndex::new(0, 1), &mesh).unwrap();
        let n = integ.ops.dim();
        let err = integ.run(
            &vec![1.0; n],
            &vec![0.0; n],
            1.0,
            1.5 * integ.stability_limit(),
            &EvolveOptions::default(),
        );
        assert!(matches!(err, Err(Error::StabilityViolation(_))));
    }
}
