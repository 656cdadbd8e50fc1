//! Characteristic functions of `L₀` and `L(α, v)`.
//!
//! Everything is built from two transforms of the potential:
//!
//! * `ṽ(λ) = ∫₀^π e^{−iλx} v(x) dx`,
//! * `Φ(λ) = ∫₀^π e^{−iλx} g(x) dx` with `g(x) = ∫ₓ^π v(t−x) v(t) dt`,
//!
//! and the characteristic function
//!
//! ```text
//! Δ(α, λ) = Δ(0, λ) + α/(2iλ) · (R(λ) − R(−λ)),
//! R(λ)    = (1 − e^{−iλπ}) { Φ(λ)(1 − e^{iλπ}) − ṽ(λ) ṽ*(λ) },
//! Δ(0, λ) = 2(1 − cos λπ),
//! ```
//!
//! where `f*(λ) = conj(f(conj λ))`.
//!
//! With `v = Σ a_m e^{2imx}` every integral reduces to divided differences of
//! the exponential, which are written with `φ₁(z) = (e^z − 1)/z` and
//! `φ₂(z) = (e^z − 1 − z)/z²`. Both have removable singularities at `z = 0`;
//! inside the singularity radius they switch to a truncated Taylor series.
//! The `1/(2iλ)` factor is cancelled exactly by writing
//! `1 − e^{∓iλπ} = ±iλπ φ₁(∓iλπ)`, so `Δ(α, ·)` needs no special case at 0.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::{L0Spectrum, OperatorSpec, PotentialSpec};

pub const DEFAULT_SINGULARITY_RADIUS: f64 = 1e-4;
pub const DEFAULT_SERIES_TERMS: usize = 8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `φ₁` and `φ₂` with a series path near the origin.
///
/// `radius` is measured in the spectral parameter; the kernels are called
/// with `z = iπω`, so the switch happens at `|z| < π·radius`.
#[derive(Debug, Clone, Copy)]
pub struct ExpKernel {
    switch: f64,
    terms: usize,
}

impl Default for ExpKernel {
    fn default() -> Self {
        Self::new(DEFAULT_SINGULARITY_RADIUS, DEFAULT_SERIES_TERMS)
    }
}

impl ExpKernel {
    pub fn new(radius: f64, terms: usize) -> Self {
        Self {
            switch: PI * radius,
            terms,
        }
    }

    pub fn phi1(&self, z: Complex64) -> Complex64 {
        if z.norm() < self.switch {
            self.phi1_series(z)
        } else {
            phi1_closed(z)
        }
    }

    pub fn phi2(&self, z: Complex64) -> Complex64 {
        if z.norm() < self.switch {
            self.phi2_series(z)
        } else {
            phi2_closed(z)
        }
    }

    /// `Σ_{n<terms} zⁿ/(n+1)!`
    pub fn phi1_series(&self, z: Complex64) -> Complex64 {
        series_tail(z, 1, self.terms)
    }

    /// `Σ_{n<terms} zⁿ/(n+2)!`
    pub fn phi2_series(&self, z: Complex64) -> Complex64 {
        series_tail(z, 2, self.terms)
    }
}

fn series_tail(z: Complex64, shift: u32, terms: usize) -> Complex64 {
    // Horner on Σ zⁿ / (n+shift)!
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (0..terms).rev() {
        acc = acc * z / (n as f64 + shift as f64 + 1.0) + 1.0;
    }
    let mut fact = 1.0;
    for j in 1..=shift {
        fact *= j as f64;
    }
    acc / fact
}

/// `e^z − 1` without cancellation for small `|z|`.
pub fn expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    let em1 = z.re.exp_m1();
    Complex64::new(em1 * c - 2.0 * half * half, z.re.exp() * s)
}

pub fn phi1_closed(z: Complex64) -> Complex64 {
    expm1(z) / z
}

pub fn phi2_closed(z: Complex64) -> Complex64 {
    (expm1(z) - z) / (z * z)
}

/// `Δ(0, λ) = 2(1 − cos λπ)`, evaluated as `4 sin²(λπ/2)`.
pub fn delta0(lambda: Complex64) -> Complex64 {
    let s = (lambda * (PI / 2.0)).sin();
    4.0 * s * s
}

/// `f*(λ) = conj(f(conj λ))`.
pub fn star<F: Fn(Complex64) -> Complex64>(f: F, lambda: Complex64) -> Complex64 {
    f(lambda.conj()).conj()
}

/// Transform evaluator for one potential.
#[derive(Debug, Clone)]
pub struct Transforms {
    coeffs: Vec<(i64, Complex64)>,
    kernel: ExpKernel,
}

impl Transforms {
    pub fn new(spec: &PotentialSpec, kernel: ExpKernel) -> Self {
        Self {
            coeffs: spec.exponential_coefficients(),
            kernel,
        }
    }

    /// `ṽ(λ) = Σ_m a_m ∫₀^π e^{i(2m−λ)x} dx`.
    pub fn vtilde(&self, lambda: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|&(m, a)| a * PI * self.kernel.phi1(I * PI * (2.0 * m as f64 - lambda)))
            .sum()
    }

    pub fn vtilde_star(&self, lambda: Complex64) -> Complex64 {
        self.vtilde(lambda.conj()).conj()
    }

    /// `Φ(λ) = Σ_{m,n} a_m a_n ∫₀^π e^{i(2n−λ)x} ∫₀^x e^{i(2m+λ)t} dt dx`.
    ///
    /// The double integral is `π² · exp[0, p, q]` with `p = iπ(2n − λ)` and
    /// `q = 2iπ(m + n)`; `q` never depends on `λ`.
    pub fn phi(&self, lambda: Complex64) -> Complex64 {
        let k = &self.kernel;
        let outer: Vec<_> = self
            .coeffs
            .iter()
            .map(|&(n, _)| {
                let p = I * PI * (2.0 * n as f64 - lambda);
                (p.exp(), k.phi1(p), k.phi2(p))
            })
            .collect();
        let inner: Vec<_> = self
            .coeffs
            .iter()
            .map(|&(m, _)| k.phi1(I * PI * (2.0 * m as f64 + lambda)))
            .collect();

        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &(m, am)) in self.coeffs.iter().enumerate() {
            for (l, &(n, an)) in self.coeffs.iter().enumerate() {
                let s = m + n;
                let (ep, p1, p2) = outer[l];
                let dd = if s == 0 {
                    p2
                } else {
                    let q = I * (2.0 * PI * s as f64);
                    (ep * inner[j] - p1) / q
                };
                acc += am * an * dd;
            }
        }
        acc * (PI * PI)
    }

    pub fn phi_star(&self, lambda: Complex64) -> Complex64 {
        self.phi(lambda.conj()).conj()
    }

    /// `Φ(λ)(1 − e^{iλπ}) − ṽ(λ)ṽ*(λ)`, the braces of `R`.
    fn r_braces(&self, lambda: Complex64) -> Complex64 {
        -self.phi(lambda) * expm1(I * PI * lambda) - self.vtilde(lambda) * self.vtilde_star(lambda)
    }

    /// `R(λ)`.
    pub fn r(&self, lambda: Complex64) -> Complex64 {
        -expm1(-I * PI * lambda) * self.r_braces(lambda)
    }

    /// `(R(λ) − R(−λ)) / (2iλ)`, entire and free of division by `λ`.
    pub fn odd_quotient(&self, lambda: Complex64) -> Complex64 {
        let k = &self.kernel;
        let plus = k.phi1(-I * PI * lambda) * self.r_braces(lambda);
        let minus = k.phi1(I * PI * lambda) * self.r_braces(-lambda);
        (plus + minus) * (PI / 2.0)
    }
}

/// Evaluation context for `Δ(α, ·)` of one operator.
#[derive(Debug, Clone)]
pub struct CharfnContext {
    pub operator: OperatorSpec,
    pub singularity_radius: f64,
    pub series_terms: usize,
    transforms: Transforms,
}

impl CharfnContext {
    pub fn new(operator: OperatorSpec) -> Self {
        Self::with_params(operator, DEFAULT_SINGULARITY_RADIUS, DEFAULT_SERIES_TERMS)
            .expect("default parameters are valid")
    }

    pub fn with_params(operator: OperatorSpec, radius: f64, terms: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("singularity radius {radius} must be positive")));
        }
        if terms < 4 {
            return Err(Error::InvalidInput(format!("series terms {terms} must be at least 4")));
        }
        let transforms = Transforms::new(&operator.potential, ExpKernel::new(radius, terms));
        Ok(Self {
            operator,
            singularity_radius: radius,
            series_terms: terms,
            transforms,
        })
    }

    pub fn transforms(&self) -> &Transforms {
        &self.transforms
    }

    pub fn vtilde(&self, lambda: Complex64) -> Complex64 {
        self.transforms.vtilde(lambda)
    }

    pub fn phi(&self, lambda: Complex64) -> Complex64 {
        self.transforms.phi(lambda)
    }

    pub fn r(&self, lambda: Complex64) -> Complex64 {
        self.transforms.r(lambda)
    }

    /// `Δ(α, λ)`.
    pub fn delta(&self, lambda: Complex64) -> Complex64 {
        delta0(lambda) + self.operator.alpha * self.transforms.odd_quotient(lambda)
    }

    /// `Δ(α, λ)` on the real line, where it is real.
    pub fn delta_real(&self, lambda: f64) -> f64 {
        self.delta(Complex64::new(lambda, 0.0)).re
    }

    /// `Δ(α, √z)` for real `z`, taking `λ = i√|z|` when `z < 0`.
    pub fn delta_at_z(&self, z: f64) -> Complex64 {
        self.delta(sqrt_spectral(z))
    }

    /// `Q(z)` of this operator.
    pub fn q(&self, z: f64) -> Result<f64> {
        q_secular(self.operator.alpha, &level_norms(&self.operator.potential), z)
    }
}

/// Principal square root of a real spectral parameter.
pub fn sqrt_spectral(z: f64) -> Complex64 {
    if z >= 0.0 {
        Complex64::new(z.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-z).sqrt())
    }
}

/// `ṽ(λ)` of a potential with default kernel parameters.
pub fn vtilde(spec: &PotentialSpec, lambda: Complex64) -> Complex64 {
    Transforms::new(spec, ExpKernel::default()).vtilde(lambda)
}

/// `Φ(λ)` of a potential with default kernel parameters.
pub fn phi(spec: &PotentialSpec, lambda: Complex64) -> Complex64 {
    Transforms::new(spec, ExpKernel::default()).phi(lambda)
}

/// `Δ(α, λ)` for a context.
pub fn delta(ctx: &CharfnContext, lambda: Complex64) -> Complex64 {
    ctx.delta(lambda)
}

/// Map `k ↦ ‖v_k‖²` over levels `0..=K` (zeros included).
pub fn level_norms(spec: &PotentialSpec) -> BTreeMap<usize, f64> {
    (0..=spec.order()).map(|k| (k, spec.level_norm_sq(k))).collect()
}

/// `Q(z) = 1 + α Σ ‖v_k‖² / (4k² − z)` over levels with `‖v_k‖² > 0`.
pub fn q_secular(alpha: f64, norms: &BTreeMap<usize, f64>, z: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (&k, &w) in norms {
        if w > 0.0 {
            let d = L0Spectrum::level(k) - z;
            if d == 0.0 {
                return Err(Error::Pole(z));
            }
            acc += w / d;
        }
    }
    Ok(1.0 + alpha * acc)
}
