//! Composite Gauss–Legendre quadrature.
//!
//! Every integral check in the crate uses the same rule: the interval is
//! cut into panels of length at most one and each panel carries 64
//! Gauss–Legendre nodes.

use std::f64::consts::PI;

/// Nodes per panel of the composite rule.
pub const NODES_PER_PANEL: usize = 64;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights of the `n`-point rule, by Newton iteration on the
    /// three-term Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess for the i-th largest root.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
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
        Self { nodes, weights }
    }

    /// Integral of `f` over `[a, b]` with this rule on a single panel.
    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
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
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule: panels of length ≤ 1, [`NODES_PER_PANEL`] nodes each.
#[derive(Debug, Clone)]
pub struct Composite {
    rule: GaussLegendre,
}

impl Default for Composite {
    fn default() -> Self {
        Self::new()
    }
}

impl Composite {
    pub fn new() -> Self {
        Self {
            rule: GaussLegendre::new(NODES_PER_PANEL),
        }
    }

    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        if a == b {
            return T::default();
        }
        let panels = (b - a).abs().ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        let mut acc = T::default();
        for p in 0..panels {
            let lo = a + h * p as f64;
            let hi = if p + 1 == panels { b } else { lo + h };
            acc = acc + self.rule.integrate(lo, hi, &mut f);
        }
        acc
    }

    /// Absolute nodes and weights of the composite rule on `[a, b]`.
    pub fn points(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let panels = (b - a).abs().ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * NODES_PER_PANEL);
        for p in 0..panels {
            let lo = a + h * p as f64;
            let half = 0.5 * h;
            let mid = lo + half;
            for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                out.push((mid + half * x, w * half));
            }
        }
        out
    }
}
