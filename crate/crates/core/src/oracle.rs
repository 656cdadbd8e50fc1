//! Independent ground truth.
//!
//! In the basis `1/√π, √(2/π) cos 2kx, √(2/π) sin 2kx` (`k ≤ N`) the
//! operator is the matrix `D + α u uᵀ`, with `D` the levels of `L₀` and `u`
//! the coefficients of `v`. Its eigenvalues come from a cyclic Jacobi
//! solver. Separately, real zeros of `Δ(α, ·)` are located by a grid scan.

use crate::charfn::CharfnContext;
use crate::error::{Error, Result};
use crate::potential::{L0Spectrum, OperatorSpec};

/// Off-diagonal Frobenius norm at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;
pub const DEFAULT_CLUSTER_RADIUS: f64 = 1e-6;
/// Neighbourhood of `2ℤ` skipped by the zero scan.
pub const SCAN_EXCLUSION: f64 = 1e-3;

/// `D + α u uᵀ` of dimension `2N + 1`.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub n: usize,
    pub diagonal: Vec<f64>,
    pub rank_one: Vec<f64>,
    pub alpha: f64,
}

impl TruncatedOperator {
    pub fn new(op: &OperatorSpec, n: usize) -> Result<Self> {
        let order = op.potential.order();
        if n < order {
            return Err(Error::TruncationTooSmall { k_comp: n, order });
        }
        let mut diagonal = vec![0.0];
        let mut rank_one = vec![op.potential.c0()];
        for k in 1..=n {
            let (c, s) = op.potential.coefficients(k);
            let z = L0Spectrum::level(k);
            diagonal.extend([z, z]);
            rank_one.extend([c, s]);
        }
        Ok(Self {
            n,
            diagonal,
            rank_one,
            alpha: op.alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Dense row-major matrix.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let diag = if i == j { self.diagonal[i] } else { 0.0 };
                        diag + self.alpha * self.rank_one[i] * self.rank_one[j]
                    })
                    .collect()
            })
            .collect()
    }
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut sweeps = 0;
    while off_diagonal_norm(&a) > JACOBI_TOL {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Sorted values grouped into `(value, multiplicity)` where consecutive
/// members lie within `radius`; the value is the cluster mean.
pub fn cluster(sorted: &[f64], radius: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for &x in sorted {
        match out.last_mut() {
            Some((sum, m)) if x - last <= radius => {
                *sum += x;
                *m += 1;
            }
            _ => out.push((x, 1)),
        }
        last = x;
    }
    out.into_iter().map(|(s, m)| (s / m as f64, m)).collect()
}

/// `oracle_spectrum`: clustered eigenvalues of the truncation at `N`.
pub fn oracle_spectrum(op: &OperatorSpec, n: usize, cluster_radius: f64) -> Result<Vec<(f64, usize)>> {
    let t = TruncatedOperator::new(op, n)?;
    let eig = jacobi_eigenvalues(&t.matrix())?;
    Ok(cluster(&eig, cluster_radius))
}

/// `scan_delta_zeros`: sign changes of `λ ↦ Δ(α, λ)` on `(0, λ_max]`,
/// skipping `1e-3`-neighbourhoods of `2ℤ`, refined by bisection to `1e-10`.
pub fn scan_delta_zeros(op: &OperatorSpec, lambda_max: f64, grid_step: f64) -> Result<Vec<f64>> {
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(Error::InvalidInput(format!(
            "grid step {grid_step} must lie in (0, 0.01]"
        )));
    }
    let ctx = CharfnContext::new(op.clone());
    let f = |l: f64| ctx.delta_real(l);
    let excluded = |l: f64| {
        let r = l - 2.0 * (l / 2.0).round();
        r.abs() < SCAN_EXCLUSION
    };

    let steps = (lambda_max / grid_step).ceil() as usize;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..=steps {
        let l = (i as f64 * grid_step).min(lambda_max);
        if excluded(l) {
            prev = None;
            continue;
        }
        let v = f(l);
        if v == 0.0 {
            roots.push(l);
            prev = None;
            continue;
        }
        if let Some((l0, v0)) = prev {
            if (v0 < 0.0) != (v < 0.0) {
                roots.push(bisect(&f, l0, l, v0));
            }
        }
        prev = Some((l, v));
    }
    Ok(roots)
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_negative = f_lo < 0.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
