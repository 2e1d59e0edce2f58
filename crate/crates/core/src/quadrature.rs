//! Gauss–Legendre rules and a globally adaptive bisection integrator.

use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(15))
}

const MAX_PANELS: usize = 6000;

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn make_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let rule = panel_rule();
    let m = 0.5 * (a + b);
    let whole = rule.integrate(a, b, &mut *f);
    let halves = rule.integrate(a, m, &mut *f) + rule.integrate(m, b, &mut *f);
    Panel {
        a,
        b,
        value: halves,
        error: (whole - halves).abs(),
    }
}

/// Integrates `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// The worst panel (by the difference between the one-panel and two-panel
/// 15-point Gauss–Legendre estimates) is bisected until the summed error
/// estimate falls below `rel_tol * |integral|`. Bisection clusters panels
/// wherever the integrand is rough, in particular at endpoints.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    let first = make_panel(&mut f, a, b);
    let mut total = first.value;
    let mut err = first.error;
    heap.push(first);
    while err > rel_tol * total.abs() && err > 1e-300 {
        if heap.len() >= MAX_PANELS {
            return Err(Error::Tolerance {
                requested: rel_tol,
                achieved: err / total.abs(),
            });
        }
        let worst = heap.pop().expect("heap is never empty here");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Panel width at machine resolution; keep its estimate.
            return Err(Error::Tolerance {
                requested: rel_tol,
                achieved: err / total.abs(),
            });
        }
        let left = make_panel(&mut f, worst.a, m);
        let right = make_panel(&mut f, m, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len() % 64 == 0 {
            // Resum to keep drift from the running updates out of the estimate.
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

/// Fixed radial rule on `[0, 1]` clustered at 1 through `t = 1 - (1 - s)^3`.
///
/// Returns `(t_i, w_i)` with `Σ w_i g(t_i) ≈ ∫_0^1 g(t) dt`.
pub fn clustered_unit_rule(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(n)
        .mapped(0.0, 1.0)
        .map(|(s, w)| {
            let u = 1.0 - s;
            (1.0 - u * u * u, 3.0 * u * u * w)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(10);
        for k in 0..20 {
            let got = rule.integrate(0.0, 1.0, |x| x.powi(k));
            let want = 1.0 / (k as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 7, 64, 400] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.mapped(-1.0, 1.0).map(|(_, w)| w).sum();
            assert!((s - 2.0).abs() < 1e-12, "n={n}: {s}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let got = adaptive(|x| x.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert!((got - 2.0 / 3.0).abs() < 1e-12);
        let got = adaptive(|x| x.powf(-0.5), 0.0, 1.0, 1e-10).unwrap();
        assert!((got - 2.0).abs() < 1e-8, "{got}");
    }

    #[test]
    fn adaptive_zero_integrand() {
        assert_eq!(adaptive(|_| 0.0, 0.0, 1.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn clustered_rule_integrates_steep_power() {
        let rule = clustered_unit_rule(400);
        let got: f64 = rule.iter().map(|&(t, w)| w * t.powi(300)).sum();
        assert!((got - 1.0 / 301.0).abs() < 1e-14);
    }
}
