//! Symmetric banded matrices with Cholesky and `LDLᵀ` inertia counting.

use nalgebra::DMatrix;

/// Symmetric matrix stored by its lower band: entry `(i, j)` with
/// `0 ≤ i − j ≤ kd` lives at `data[i (kd + 1) + (i − j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kd: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    /// Zero matrix of order `n` with half-bandwidth `kd`.
    pub fn zeros(n: usize, kd: usize) -> Self {
        BandMatrix {
            n,
            kd,
            data: vec![0.0; n * (kd + 1)],
        }
    }

    /// Order of the matrix.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Half-bandwidth.
    pub fn bandwidth(&self) -> usize {
        self.kd
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kd + 1) + (i - j)
    }

    /// Entry `(i, j)` (either triangle).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.kd {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Add `v` to entry `(i, j)` (and implicitly `(j, i)`).
    ///
    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(
            i - j <= self.kd,
            "entry ({i}, {j}) outside band {}",
            self.kd
        );
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kd);
            let d = self.data[self.idx(i, i)];
            y[i] += d * x[i];
            for j in lo..i {
                let a = self.data[self.idx(i, j)];
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
        }
        y
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `Σ_ij |a_ij| |x_i| |x_j|`: the scale of rounding errors in `xᵀ A x`.
    pub fn abs_bilinear(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kd);
            for j in lo..i {
                sum += 2.0 * (self.data[self.idx(i, j)] * x[i] * x[j]).abs();
            }
            sum += (self.data[self.idx(i, i)] * x[i] * x[i]).abs();
        }
        sum
    }

    /// `self − σ other` (same shape).
    pub fn shifted(&self, sigma: f64, other: &BandMatrix) -> BandMatrix {
        assert_eq!((self.n, self.kd), (other.n, other.kd));
        BandMatrix {
            n: self.n,
            kd: self.kd,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - sigma * b)
                .collect(),
        }
    }

    /// Diagonal entries.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.data[self.idx(i, i)]).collect()
    }

    /// Dense copy.
    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Gershgorin lower bound `min_i (a_ii − Σ_{j≠i} |a_ij|)`.
    pub fn gershgorin_lower(&self) -> f64 {
        let mut off = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.kd)..i {
                let a = self.data[self.idx(i, j)].abs();
                off[i] += a;
                off[j] += a;
            }
        }
        (0..self.n)
            .map(|i| self.data[self.idx(i, i)] - off[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Banded Cholesky factor `A = L Lᵀ`; `None` unless `A` is positive
    /// definite.
    pub fn cholesky(&self) -> Option<BandCholesky> {
        let kd = self.kd;
        let mut l = self.clone();
        for j in 0..self.n {
            let lo = j.saturating_sub(kd);
            let mut d = l.data[l.idx(j, j)];
            for k in lo..j {
                let v = l.data[l.idx(j, k)];
                d -= v * v;
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let d = d.sqrt();
            let jj = l.idx(j, j);
            l.data[jj] = d;
            for i in j + 1..(j + kd + 1).min(self.n) {
                let lo_i = i.saturating_sub(kd);
                let mut s = l.data[l.idx(i, j)];
                for k in lo_i.max(lo)..j {
                    s -= l.data[l.idx(i, k)] * l.data[l.idx(j, k)];
                }
                let ij = l.idx(i, j);
                l.data[ij] = s / d;
            }
        }
        Some(BandCholesky { l })
    }

    /// Number of negative pivots of the unpivoted `LDLᵀ` factorisation, i.e.
    /// (by Sylvester's law of inertia) the number of negative eigenvalues.
    /// Exact-zero pivots are perturbed to a tiny positive value.
    pub fn negative_inertia(&self) -> usize {
        let kd = self.kd;
        let n = self.n;
        // Work on the band of L (unit lower) and D.
        let mut l = self.data.clone();
        let mut dvec = vec![0.0; n];
        let scale = self
            .data
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * scale;
        let mut count = 0;
        for j in 0..n {
            let lo = j.saturating_sub(kd);
            let mut d = l[self.idx(j, j)];
            for k in lo..j {
                let v = l[self.idx(j, k)];
                d -= v * v * dvec[k];
            }
            if d == 0.0 {
                d = tiny;
            }
            if d < 0.0 {
                count += 1;
            }
            dvec[j] = d;
            for i in j + 1..(j + kd + 1).min(n) {
                let lo_i = i.saturating_sub(kd);
                let mut s = l[self.idx(i, j)];
                for k in lo_i.max(lo)..j {
                    s -= l[self.idx(i, k)] * l[self.idx(j, k)] * dvec[k];
                }
                l[self.idx(i, j)] = s / d;
            }
        }
        count
    }
}

/// Banded Cholesky factor.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    l: BandMatrix,
}

impl BandCholesky {
    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let l = &self.l;
        let n = l.n;
        let kd = l.kd;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(kd)..i {
                s -= l.data[l.idx(i, k)] * y[k];
            }
            y[i] = s / l.data[l.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + kd + 1).min(n) {
                s -= l.data[l.idx(k, i)] * y[k];
            }
            y[i] = s / l.data[l.idx(i, i)];
        }
        y
    }
}
