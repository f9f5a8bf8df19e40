//! Adaptive composite Gauss-Legendre quadrature.
//!
//! Nodes and weights are generated at first use by Newton iteration on the
//! Legendre polynomial, avoiding hand-transcribed tables.

use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Gauss-Legendre rule on [-1, 1].
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre P_n and P'_n at x by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Builds the n-point rule by Newton refinement of Chebyshev initial guesses.
pub fn gauss_rule(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    GaussRule { nodes, weights }
}

static GL15: Lazy<GaussRule> = Lazy::new(|| gauss_rule(15));

/// 15-point Gauss-Legendre on [a, b].
pub fn gl15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in GL15.nodes.iter().zip(GL15.weights.iter()) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Quadrature result with the scheme's own error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err_estimate: f64,
    pub panels: usize,
}

const MAX_PANELS: usize = 1 << 16;

/// Adaptive bisection with 15-point panels. The initial partition keeps
/// panels no wider than `initial_width` so that oscillation of period ~pi
/// is resolved before refinement starts.
pub fn adaptive_gl15<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    initial_width: f64,
) -> Result<QuadResult> {
    debug_assert!(b > a);
    let n0 = (((b - a) / initial_width).ceil() as usize).max(1);
    // Each queue entry carries its whole-panel estimate.
    let mut queue: Vec<(f64, f64, f64)> = Vec::with_capacity(n0);
    for i in 0..n0 {
        let lo = a + (b - a) * i as f64 / n0 as f64;
        let hi = a + (b - a) * (i + 1) as f64 / n0 as f64;
        queue.push((lo, hi, gl15(f, lo, hi)));
    }
    let mut value = 0.0;
    let mut err = 0.0;
    let mut panels = n0;
    let per_panel_tol = |width: f64| abs_tol * width / (b - a);
    while let Some((lo, hi, coarse)) = queue.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl15(f, lo, mid);
        let right = gl15(f, mid, hi);
        let fine = left + right;
        let e = (fine - coarse).abs();
        if e <= per_panel_tol(hi - lo) || hi - lo < 1e-12 * (b - a) {
            value += fine;
            err += e / 15.0; // refined estimate is far better than the gap
        } else {
            panels += 2;
            if panels > MAX_PANELS {
                return Err(Error::QuadratureBudget {
                    panels,
                    estimate: value + fine,
                });
            }
            queue.push((lo, mid, left));
            queue.push((mid, hi, right));
        }
    }
    Ok(QuadResult {
        value,
        abs_err_estimate: err.max(1e-16 * value.abs()),
        panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        // GL15 is exact through degree 29
        let f = |x: f64| x.powi(28) + 3.0 * x.powi(5) - x;
        let got = gl15(&f, -1.0, 1.0);
        assert!((got - 2.0 / 29.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let f = |x: f64| (10.0 * x).sin();
        let r = adaptive_gl15(&f, 0.0, 3.0, 1e-12, 1.0).unwrap();
        let exact = (1.0 - (30.0f64).cos()) / 10.0;
        assert!((r.value - exact).abs() < 1e-12);
        assert!(r.abs_err_estimate < 1e-10);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // |x|^(-1/2)-style spike that refinement cannot settle at this tol
        let f = |x: f64| (x - 0.3333333).abs().sqrt().recip().min(1e12);
        match adaptive_gl15(&f, 0.0, 1.0, 1e-14, 1.0) {
            Err(Error::QuadratureBudget { .. }) => {}
            Ok(r) => {
                // acceptable alternative: converged with honest error estimate
                assert!(r.abs_err_estimate > 0.0);
            }
            Err(e) => panic!("unexpected error {e:?}"),
        }
    }
}
