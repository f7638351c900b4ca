//! Gauss–Legendre rules on arbitrary intervals and composite/graded variants.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// A Gauss–Legendre rule stored on the reference interval `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    /// `n`-point Gauss–Legendre rule (exact for polynomials of degree `2n − 1`).
    pub fn gauss_legendre(n: usize) -> Self {
        let n = NonZeroUsize::new(n.max(1)).expect("n >= 1");
        let rule = GaussLegendre::new(n);
        let mut pairs: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Rule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Whether the rule is empty (never true for constructed rules).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Points and weights mapped to `[a, b]`.
    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (a + h * x, h * w))
    }

    /// `∫_a^b f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.points(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// `∫_a^b f` with geometric panel grading toward the selected endpoints,
    /// for integrands with algebraic endpoint singularities in a derivative.
    pub fn integrate_graded<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        toward_a: bool,
        toward_b: bool,
        mut f: F,
    ) -> f64 {
        graded_breakpoints(a, b, toward_a, toward_b, GRADING_LEVELS)
            .windows(2)
            .map(|w| self.integrate(w[0], w[1], &mut f))
            .sum()
    }
}

/// Number of halvings used by [`Rule::integrate_graded`].
pub const GRADING_LEVELS: usize = 40;

/// Breakpoints on `[a, b]` refined geometrically (factor 2) toward the chosen
/// endpoints, `levels` halvings deep.
pub fn graded_breakpoints(
    a: f64,
    b: f64,
    toward_a: bool,
    toward_b: bool,
    levels: usize,
) -> Vec<f64> {
    let h = b - a;
    let mut pts = Vec::with_capacity(2 * levels + 3);
    match (toward_a, toward_b) {
        (false, false) => {
            pts.push(a);
            pts.push(b);
        }
        (true, false) => {
            pts.push(a);
            for j in (0..levels).rev() {
                pts.push(a + h * 0.5f64.powi(j as i32 + 1));
            }
            pts.push(b);
        }
        (false, true) => {
            pts.push(a);
            for j in 0..levels {
                pts.push(b - h * 0.5f64.powi(j as i32 + 1));
            }
            pts.push(b);
        }
        (true, true) => {
            let mid = a + 0.5 * h;
            let mut left = graded_breakpoints(a, mid, true, false, levels);
            let right = graded_breakpoints(mid, b, false, true, levels);
            left.pop();
            left.extend(right);
            return left;
        }
    }
    pts
}

/// Breakpoints `n` uniform panels on `[a, b]`, with each of the end panels
/// additionally graded geometrically when requested.
pub fn composite_breakpoints(
    a: f64,
    b: f64,
    n: usize,
    grade_a: bool,
    grade_b: bool,
    levels: usize,
) -> Vec<f64> {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut pts = Vec::with_capacity(n + 2 * levels + 1);
    for i in 0..n {
        let lo = a + h * i as f64;
        let hi = if i + 1 == n {
            b
        } else {
            a + h * (i + 1) as f64
        };
        let ga = grade_a && i == 0;
        let gb = grade_b && i + 1 == n;
        let seg = graded_breakpoints(lo, hi, ga, gb, levels);
        if pts.is_empty() {
            pts.extend(seg);
        } else {
            pts.extend(seg.into_iter().skip(1));
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 4, 10, 20] {
            let r = Rule::gauss_legendre(n);
            let s: f64 = r.points(2.0, 5.0).map(|p| p.1).sum();
            assert!((s - 3.0).abs() < 1e-13, "n = {n}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials_of_degree_2n_minus_1() {
        let r = Rule::gauss_legendre(6);
        let v = r.integrate(0.0, 2.0, |x| x.powi(11));
        assert!((v - 2f64.powi(12) / 12.0).abs() < 1e-10);
    }

    #[test]
    fn grading_resolves_square_root_endpoint() {
        let r = Rule::gauss_legendre(10);
        let v = r.integrate_graded(0.0, 1.0, false, true, |x| (1.0 - x).sqrt());
        assert!((v - 2.0 / 3.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn composite_breakpoints_are_increasing() {
        let b = composite_breakpoints(0.0, 1.0, 8, true, true, 5);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), 1.0);
    }
}
