//! Eigenfunctions of `L(α, v)` per spectral class.
//!
//! A secular root `μ = λ²` off the levels of `L₀` carries
//!
//! ```text
//! u(λ, x) = ∫₀^x cos λ(π/2 − x + t) v(t) dt + ∫ₓ^π cos λ(π/2 − t + x) v(t) dt,
//! ```
//!
//! evaluated here in closed form from the exponential coefficients of `v`.
//! At a coincidence `μ = 4k²` with `v_k = 0` this function vanishes
//! identically, and the extra eigenvector is the resolvent image
//! `Σ_j v_j / (4j² − μ)` over active levels instead.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{classify_spectrum, weight_table, SpectrumEntry, Tag};
use crate::charfn::{sqrt_spectral, ExpKernel};
use crate::error::{Error, Result};
use crate::potential::{L0Spectrum, OperatorSpec, PotentialSpec, Term};
use crate::quadrature::Composite;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    /// Closed-form secular eigenfunction or resolvent image of `v`.
    Secular,
    /// Direction in `G_k` orthogonal to `v_k`.
    Sigma1,
    /// Basis function of an untouched eigenspace `G_k`.
    Sigma0Basis,
}

#[derive(Debug, Clone)]
enum Shape {
    Characteristic {
        lambda: Complex64,
        coeffs: Vec<(i64, Complex64)>,
        kernel: ExpKernel,
    },
    Fourier(PotentialSpec),
}

/// A real eigenfunction on `[0, π]`.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    pub kind: EigenKind,
    pub z: f64,
    scale: f64,
    shape: Shape,
}

impl Eigenfunction {
    fn characteristic(z: f64, v: &PotentialSpec) -> Self {
        Self {
            kind: EigenKind::Secular,
            z,
            scale: 1.0,
            shape: Shape::Characteristic {
                lambda: sqrt_spectral(z),
                coeffs: v.exponential_coefficients(),
                kernel: ExpKernel::default(),
            },
        }
    }

    fn fourier(kind: EigenKind, z: f64, f: PotentialSpec) -> Self {
        Self {
            kind,
            z,
            scale: 1.0,
            shape: Shape::Fourier(f),
        }
    }

    /// `u(x)`; outside `[0, π]` the π-periodic extension.
    pub fn value(&self, x: f64) -> f64 {
        let x = wrap(x);
        self.scale
            * match &self.shape {
                Shape::Characteristic {
                    lambda,
                    coeffs,
                    kernel,
                } => characteristic_parts(*lambda, coeffs, kernel, x).0,
                Shape::Fourier(f) => f.value(x),
            }
    }

    /// `u'(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        let x = wrap(x);
        self.scale
            * match &self.shape {
                Shape::Characteristic {
                    lambda,
                    coeffs,
                    kernel,
                } => characteristic_parts(*lambda, coeffs, kernel, x).1,
                Shape::Fourier(f) => fourier_derivative(f, x),
            }
    }

    /// `‖u‖²` on `L²(0, π)` by composite Gauss–Legendre.
    pub fn norm_sq(&self) -> f64 {
        Composite::new().integrate(0.0, PI, |x| self.value(x).powi(2))
    }

    /// Copy scaled to unit `L²(0, π)` norm.
    pub fn normalized(&self) -> Self {
        let n = self.norm_sq().sqrt();
        let mut out = self.clone();
        if n > 0.0 {
            out.scale /= n;
        }
        out
    }
}

fn wrap(x: f64) -> f64 {
    if (0.0..=PI).contains(&x) {
        x
    } else {
        x.rem_euclid(PI)
    }
}

fn fourier_derivative(f: &PotentialSpec, x: f64) -> f64 {
    let a = (2.0 / PI).sqrt();
    f.terms()
        .iter()
        .map(|t: &Term| {
            let w = 2.0 * t.k as f64;
            let (s, c) = (w * x).sin_cos();
            a * w * (t.s * c - t.c * s)
        })
        .sum()
}

/// `(u(λ, x), u'(λ, x))`, real parts.
fn characteristic_parts(
    lambda: Complex64,
    coeffs: &[(i64, Complex64)],
    kernel: &ExpKernel,
    x: f64,
) -> (f64, f64) {
    let rest = PI - x;
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for &(m, a) in coeffs {
        let two_m = 2.0 * m as f64;
        for sign in [1.0, -1.0] {
            // ∫₀^x e^{±iλ(π/2−x+t)} e^{2imt} dt
            let left = (I * sign * lambda * (PI / 2.0 - x)).exp()
                * x
                * kernel.phi1(I * (two_m + sign * lambda) * x);
            // ∫ₓ^π e^{±iλ(π/2+x−t)} e^{2imt} dt
            let omega = two_m - sign * lambda;
            let right = (I * sign * lambda * (PI / 2.0 + x)).exp()
                * (I * omega * x).exp()
                * rest
                * kernel.phi1(I * omega * rest);
            val += a * 0.5 * (left + right);
            der += a * (sign / (2.0 * I)) * (left - right);
        }
    }
    (val.re, (lambda * der).re)
}

/// Eigenspace attached to one spectrum entry.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub z: f64,
    pub tag: Tag,
    pub functions: Vec<Eigenfunction>,
}

fn g_basis(k: usize) -> Vec<Eigenfunction> {
    let z = L0Spectrum::level(k);
    if k == 0 {
        let f = PotentialSpec::build(1.0, &[], false).expect("valid");
        return vec![Eigenfunction::fourier(EigenKind::Sigma0Basis, z, f)];
    }
    [(1.0, 0.0), (0.0, 1.0)]
        .into_iter()
        .map(|(c, s)| {
            let f = PotentialSpec::build(0.0, &[(k, c, s)], false).expect("valid");
            Eigenfunction::fourier(EigenKind::Sigma0Basis, z, f)
        })
        .collect()
}

/// `Σ_j v_j / (4j² − μ)` over the active levels of `op`.
fn resolvent_image(op: &OperatorSpec, mu: f64) -> Eigenfunction {
    let table = weight_table(op);
    let v = &op.potential;
    let mut c0 = 0.0;
    let mut terms = Vec::new();
    for k in table.active_levels() {
        let f = 1.0 / (L0Spectrum::level(k) - mu);
        let (c, s) = v.coefficients(k);
        if k == 0 {
            c0 = c * f;
        } else {
            terms.push(Term {
                k,
                c: c * f,
                s: s * f,
            });
        }
    }
    let f = PotentialSpec::new(c0, terms).expect("levels are distinct");
    Eigenfunction::fourier(EigenKind::Secular, mu, f)
}

/// `eigenfunction`: eigenspace of `op` at a classified entry.
pub fn eigenfunction(op: &OperatorSpec, entry: &SpectrumEntry) -> Result<Eigenspace> {
    let window = entry.z.max(0.0) + 8.0;
    let spectrum = classify_spectrum(op, window)?;
    let tol = 1e-8 * entry.z.abs().max(1.0);
    let found = spectrum
        .entries
        .iter()
        .find(|e| (e.z - entry.z).abs() <= tol && e.tag == entry.tag)
        .ok_or(Error::NotInSpectrum(entry.z))?;
    let z = found.z;

    let functions = match found.tag {
        Tag::Sigma2 => vec![Eigenfunction::characteristic(z, &op.potential)],
        Tag::Sigma0 => {
            let k = L0Spectrum::level_index(z, 0.0).ok_or(Error::NotInSpectrum(z))?;
            g_basis(k)
        }
        Tag::Sigma0CapSigma2 => {
            let k = L0Spectrum::level_index(z, 0.0).ok_or(Error::NotInSpectrum(z))?;
            let mut fs = g_basis(k);
            fs.push(resolvent_image(op, z));
            fs
        }
        Tag::Sigma1 => {
            let k = L0Spectrum::level_index(z, 0.0).ok_or(Error::NotInSpectrum(z))?;
            let (c, s) = op.potential.coefficients(k);
            let n = (c * c + s * s).sqrt();
            let f = PotentialSpec::build(0.0, &[(k, s / n, -c / n)], false)?;
            vec![Eigenfunction::fourier(EigenKind::Sigma1, z, f)]
        }
    };
    Ok(Eigenspace {
        z,
        tag: found.tag,
        functions,
    })
}
