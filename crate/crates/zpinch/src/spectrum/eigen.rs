//! Smallest eigenpair of the symmetric-definite pencil `K x = λ M x`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::banded::BandMatrix;
use crate::{Error, Result};

/// Eigensolver selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Dense below [`DENSE_THRESHOLD`] unknowns, banded otherwise.
    #[default]
    Auto,
    /// Banded bisection on Cholesky definiteness plus shift-invert iteration.
    Banded,
    /// Dense reduction to a standard symmetric eigenproblem.
    Dense,
}

/// Problem size below which [`SolverKind::Auto`] uses the dense solver.
pub const DENSE_THRESHOLD: usize = 200;

/// Smallest eigenvalue, its `M`-normalised eigenvector(s), and solver
/// statistics.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub lambda: f64,
    /// `xᵀ M x = 1`.
    pub vector: Vec<f64>,
    /// Number of eigenvalues within the degeneracy tolerance of `lambda`.
    pub multiplicity: usize,
    pub iterations: usize,
}

/// Relative eigenvalue tolerance.
pub const EIGEN_TOL: f64 = 1e-12;
/// Relative gap below which two eigenvalues are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Shifted inverse-iteration steps applied to the dense eigenvector.
const DENSE_POLISH_STEPS: usize = 2;

/// Largest degenerate group resolved by the tie-break. Larger groups (for
/// example the `η` null space of `m = k = 0`) keep the first Ritz vector.
pub const MAX_TIE_GROUP: usize = 8;
const MAX_ITER: usize = 500;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn m_normalise(m: &BandMatrix, x: &mut [f64]) {
    let n = m.bilinear(x, x).sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Modified Gram–Schmidt in the `M` inner product (two passes). A vector
/// that collapses is replaced by a deterministic probe vector.
fn m_orthonormalise(m: &BandMatrix, vs: &mut [Vec<f64>]) {
    let n = vs.first().map_or(0, |v| v.len());
    for j in 0..vs.len() {
        for attempt in 0..3 {
            let before = m.bilinear(&vs[j], &vs[j]).sqrt();
            for _ in 0..2 {
                for i in 0..j {
                    let mv = m.mul_vec(&vs[i]);
                    let c = dot(&vs[j], &mv);
                    let (head, tail) = vs.split_at_mut(j);
                    for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                        *x -= c * y;
                    }
                }
            }
            let after = m.bilinear(&vs[j], &vs[j]).sqrt();
            if after > 1e-10 * before && after > 0.0 {
                vs[j].iter_mut().for_each(|x| *x /= after);
                break;
            }
            vs[j] = (0..n)
                .map(|i| ((i * (j + 3 + attempt)) as f64 * 1.3247179572).sin())
                .collect();
        }
    }
}

/// `count` M-orthonormal vectors spanning the eigenspace nearest above
/// `sigma` (simultaneous shift-invert iteration with Rayleigh–Ritz).
fn subspace_iteration(
    k: &BandMatrix,
    m: &BandMatrix,
    sigma: f64,
    count: usize,
    tol: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let shifted = k.shifted(sigma, m);
    let chol = shifted
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("shift is not below the spectrum".into()))?;
    let n = k.order();
    let p = (count + 2).min(n);
    let mut basis: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            (0..n)
                .map(|i| 1.0 + 0.5 * ((i * (j + 1)) as f64 * 0.7548776662).sin() + 0.01 * j as f64)
                .collect()
        })
        .collect();
    let mut last = vec![f64::INFINITY; p];
    for it in 1..=MAX_ITER {
        let mut next: Vec<Vec<f64>> = basis.iter().map(|b| chol.solve(&m.mul_vec(b))).collect();
        m_orthonormalise(m, &mut next);
        // Rayleigh–Ritz on span(next).
        let km: Vec<Vec<f64>> = next.iter().map(|v| k.mul_vec(v)).collect();
        let mm: Vec<Vec<f64>> = next.iter().map(|v| m.mul_vec(v)).collect();
        let kr = DMatrix::from_fn(p, p, |i, j| {
            0.5 * (dot(&next[i], &km[j]) + dot(&next[j], &km[i]))
        });
        let mr = DMatrix::from_fn(p, p, |i, j| {
            0.5 * (dot(&next[i], &mm[j]) + dot(&next[j], &mm[i]))
        });
        let (vals, vecs) = dense_pencil(&kr, &mr)?;
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let mut rotated = Vec::with_capacity(p);
        for &c in &order {
            let mut v = vec![0.0; n];
            for (j, nv) in next.iter().enumerate() {
                let s = vecs[(j, c)];
                for (vi, x) in v.iter_mut().zip(nv) {
                    *vi += s * x;
                }
            }
            m_normalise(m, &mut v);
            rotated.push(v);
        }
        next = rotated;
        let cur: Vec<f64> = order.iter().map(|&c| vals[c]).collect();
        // A Ritz value has settled when it moves by less than the relative
        // tolerance or by less than the rounding floor of `xᵀKx`, which on
        // strongly graded meshes sits well above `tol·|λ|`.
        let done = (0..count).all(|i| {
            let floor = f64::EPSILON * k.abs_bilinear(&next[i]) / m.bilinear(&next[i], &next[i]);
            (cur[i] - last[i]).abs() <= (tol * cur[i].abs().max(sigma.abs())).max(floor)
        });
        last = cur.clone();
        basis = next;
        if done && it > 1 {
            return Ok((cur[..count].to_vec(), basis[..count].to_vec(), it));
        }
    }
    Err(Error::SolverStall {
        iterations: MAX_ITER,
    })
}

/// Generalised symmetric-definite eigenproblem `A x = λ B x` (dense):
/// returns eigenvalues and `B`-orthonormal eigenvectors as columns.
pub fn dense_pencil(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("singular mass factor".into()))?;
    let c = &linv * a * linv.transpose();
    let c = 0.5 * (&c + c.transpose());
    let eig = c.symmetric_eigen();
    let vecs = linv.transpose() * eig.eigenvectors;
    Ok((eig.eigenvalues.iter().copied().collect(), vecs))
}

/// Full spectrum of the pencil, ascending (dense oracle).
pub fn dense_spectrum(k: &BandMatrix, m: &BandMatrix) -> Result<Vec<f64>> {
    let (mut vals, _) = dense_pencil(&k.to_dense(), &m.to_dense())?;
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Number of eigenvalues of the pencil strictly below `sigma`.
pub fn count_below(k: &BandMatrix, m: &BandMatrix, sigma: f64) -> usize {
    k.shifted(sigma, m).negative_inertia()
}

/// Smallest eigenpair via the dense solver. Degenerate eigenvectors are
/// combined to maximise `|x[tie_dof]|`.
///
/// When `M` is nearly singular (density vanishing at `r₀`) the transformed
/// matrix `L⁻¹KL⁻ᵀ` loses digits, so a simple eigenvector is polished by
/// dense shifted inverse iteration on `K − λM` and the reported eigenvalue is
/// the Rayleigh quotient of the returned vector.
pub fn smallest_dense(k: &BandMatrix, m: &BandMatrix, tie_dof: usize) -> Result<Eigenpair> {
    let (kd, md) = (k.to_dense(), m.to_dense());
    let (vals, vecs) = dense_pencil(&kd, &md)?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let lambda = vals[order[0]];
    let tol = DEGENERACY_TOL * lambda.abs().max(1e-300);
    let group: Vec<Vec<f64>> = order
        .iter()
        .take_while(|&&i| vals[i] - lambda <= tol)
        .map(|&i| vecs.column(i).iter().copied().collect())
        .collect();
    let multiplicity = group.len();
    let mut vector = tie_break(m, &group[..multiplicity.min(MAX_TIE_GROUP)], tie_dof);
    let mut iterations = 0;
    if multiplicity == 1 {
        let mut rq = k.bilinear(&vector, &vector) / m.bilinear(&vector, &vector);
        for _ in 0..DENSE_POLISH_STEPS {
            let lu = (&kd - rq * &md).lu();
            let Some(y) = lu.solve(&(&md * DVector::from_column_slice(&vector))) else {
                break;
            };
            if !y.iter().all(|v| v.is_finite()) {
                break;
            }
            let sign = if y.dot(&DVector::from_column_slice(&vector)) < 0.0 {
                -1.0
            } else {
                1.0
            };
            vector = y.iter().map(|v| sign * v).collect();
            m_normalise(m, &mut vector);
            rq = k.bilinear(&vector, &vector) / m.bilinear(&vector, &vector);
            iterations += 1;
        }
    }
    let rq = k.bilinear(&vector, &vector) / m.bilinear(&vector, &vector);
    Ok(Eigenpair {
        lambda: rq,
        vector,
        multiplicity,
        iterations,
    })
}

/// Combine `M`-orthonormal degenerate eigenvectors into the unit vector with
/// the largest `|x[dof]|` (and a positive sign there); with a single vector
/// only the sign is normalised.
fn tie_break(m: &BandMatrix, group: &[Vec<f64>], dof: usize) -> Vec<f64> {
    let weights: Vec<f64> = group.iter().map(|v| v[dof]).collect();
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let mut x = if group.len() == 1 || norm == 0.0 {
        group[0].clone()
    } else {
        let mut x = vec![0.0; group[0].len()];
        for (v, w) in group.iter().zip(&weights) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += w / norm * vi;
            }
        }
        x
    };
    m_normalise(m, &mut x);
    let sign_ref = if x[dof] != 0.0 {
        x[dof]
    } else {
        *x.iter()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(&1.0)
    };
    if sign_ref < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}

/// Smallest eigenpair via the banded path.
///
/// A lower bound `σ_lo` is found by doubling a negative shift until
/// `K − σM` is positive definite; `σ_hi = min_i K_ii/M_ii` bounds from above.
/// Bisection on definiteness brackets `λ_min`, the inertia count at the
/// bracket top detects degeneracy, and shift-invert subspace iteration
/// from `σ_lo` converges the eigenpair(s).
pub fn smallest_banded(k: &BandMatrix, m: &BandMatrix, tie_dof: usize) -> Result<Eigenpair> {
    let n = k.order();
    let kd = k.diagonal();
    let md = m.diagonal();
    let mut hi = f64::INFINITY;
    for i in 0..n {
        if md[i] > 0.0 {
            hi = hi.min(kd[i] / md[i]);
        }
    }
    if !hi.is_finite() {
        return Err(Error::InvalidInput(
            "mass matrix has no positive diagonal".into(),
        ));
    }
    let mut step = hi.abs().max(1.0);
    let floor = 1e-13 * step;
    let mut lo = hi - step;
    let mut tries = 0;
    while k.shifted(lo, m).cholesky().is_none() {
        hi = hi.min(lo);
        step *= 2.0;
        lo = hi - step;
        tries += 1;
        if tries > 200 {
            return Err(Error::SolverStall { iterations: tries });
        }
    }
    // Bisection: lo is below λ_min, hi is at or above it.
    let mut iterations = tries;
    while hi - lo > (1e-6 * hi.abs().max(lo.abs())).max(floor) {
        let mid = 0.5 * (lo + hi);
        if k.shifted(mid, m).cholesky().is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > 400 {
            break;
        }
    }
    let (vals, vecs, it) = subspace_iteration(k, m, lo, 1, EIGEN_TOL)?;
    let lambda = vals[0];
    // Degeneracy: count eigenvalues within the tolerance window above λ.
    let window = lambda + DEGENERACY_TOL * lambda.abs().max(1e-300);
    let multiplicity = count_below(k, m, window).max(1);
    let vector = if multiplicity > 1 && multiplicity <= MAX_TIE_GROUP {
        let (_, group, _) = subspace_iteration(k, m, lo, multiplicity, EIGEN_TOL)?;
        tie_break(m, &group, tie_dof)
    } else {
        tie_break(m, &vecs, tie_dof)
    };
    let rq = k.bilinear(&vector, &vector) / m.bilinear(&vector, &vector);
    Ok(Eigenpair {
        lambda: rq,
        vector,
        multiplicity,
        iterations: iterations + it,
    })
}

/// Dispatch on [`SolverKind`].
pub fn smallest_eigenpair(
    k: &BandMatrix,
    m: &BandMatrix,
    tie_dof: usize,
    kind: SolverKind,
) -> Result<Eigenpair> {
    match kind {
        SolverKind::Dense => smallest_dense(k, m, tie_dof),
        SolverKind::Banded => smallest_banded(k, m, tie_dof),
        SolverKind::Auto if k.order() < DENSE_THRESHOLD => smallest_dense(k, m, tie_dof),
        SolverKind::Auto => smallest_banded(k, m, tie_dof),
    }
}

/// Residual `‖K x − λ M x‖ / ‖K x‖` of an eigenpair.
pub fn eigen_residual(k: &BandMatrix, m: &BandMatrix, lambda: f64, x: &[f64]) -> f64 {
    let kx = k.mul_vec(x);
    let mx = m.mul_vec(x);
    let r = DVector::from_iterator(x.len(), kx.iter().zip(&mx).map(|(a, b)| a - lambda * b));
    r.norm() / DVector::from_column_slice(&kx).norm().max(1e-300)
}
