//! Radial node distributions on `(0, r₀]`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Node-placement policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Clustering {
    /// Equally spaced nodes `r_j = j r₀ / n`.
    Uniform,
    /// `r/r₀ = 1 − (1 − t)²` with `t = s − a sin(2πs)/(2π)`, `s = j/n`:
    /// quadratic accumulation at `r₀` (pressure degeneracy) plus a sine
    /// stretch of strength `axis ∈ [0, 1)` that also refines the axis.
    Graded { axis: f64 },
}

impl Default for Clustering {
    fn default() -> Self {
        // a = 0.2 places about one third of the nodes in the outer 10 % of
        // the radius.
        Clustering::Graded { axis: 0.2 }
    }
}

/// Node count plus clustering policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    #[serde(default)]
    pub clustering: Clustering,
}

impl GridSpec {
    /// Smallest node count accepted by the equilibrium builder.
    pub const MIN_NODES: usize = 16;

    pub fn new(n: usize, clustering: Clustering) -> Self {
        GridSpec { n, clustering }
    }

    /// Default graded grid with `n` nodes.
    pub fn graded(n: usize) -> Self {
        GridSpec {
            n,
            clustering: Clustering::default(),
        }
    }

    /// Uniform grid with `n` nodes.
    pub fn uniform(n: usize) -> Self {
        GridSpec {
            n,
            clustering: Clustering::Uniform,
        }
    }

    /// Same policy, twice the nodes.
    pub fn refined(&self) -> Self {
        GridSpec {
            n: 2 * self.n,
            clustering: self.clustering,
        }
    }

    /// Strictly increasing nodes `0 < r_1 < … < r_n = r₀`.
    pub fn nodes(&self, r0: f64) -> Result<Vec<f64>> {
        if self.n < Self::MIN_NODES {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {} nodes, got {}",
                Self::MIN_NODES,
                self.n
            )));
        }
        let n = self.n as f64;
        let map: Box<dyn Fn(f64) -> f64> = match self.clustering {
            Clustering::Uniform => Box::new(|s| s),
            Clustering::Graded { axis } => {
                if !(0.0..1.0).contains(&axis) {
                    return Err(Error::InvalidInput(format!(
                        "axis clustering must lie in [0,1), got {axis}"
                    )));
                }
                Box::new(move |s: f64| {
                    let t = s - axis * (2.0 * std::f64::consts::PI * s).sin()
                        / (2.0 * std::f64::consts::PI);
                    1.0 - (1.0 - t) * (1.0 - t)
                })
            }
        };
        let mut nodes: Vec<f64> = (1..=self.n).map(|j| r0 * map(j as f64 / n)).collect();
        nodes[self.n - 1] = r0;
        if nodes[0] <= 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(
                "grid nodes are not strictly increasing".into(),
            ));
        }
        Ok(nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grading_puts_a_third_of_nodes_near_the_boundary() {
        let nodes = GridSpec::graded(512).nodes(1.0).unwrap();
        let outer = nodes.iter().filter(|&&r| r > 0.9).count() as f64 / nodes.len() as f64;
        assert!((0.30..0.37).contains(&outer), "fraction {outer}");
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(GridSpec::uniform(8).nodes(1.0).is_err());
    }

    #[test]
    fn ends_exactly_at_r0() {
        let nodes = GridSpec::graded(64).nodes(1.5).unwrap();
        assert_eq!(*nodes.last().unwrap(), 1.5);
        assert!(nodes[0] > 0.0);
    }
}
