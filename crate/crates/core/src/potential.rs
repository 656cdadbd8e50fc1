//! Real potentials as finite Fourier series in the eigenbasis of `L₀`.
//!
//! A potential is stored by its coefficients in the orthonormal basis
//!
//! ```text
//! 1/√π,  √(2/π) cos 2kx,  √(2/π) sin 2kx   (k ≥ 1)
//! ```
//!
//! which diagonalizes `L₀ = -d²/dx²` with periodic conditions on `[0, π]`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used to decide whether `‖v‖ = 1`.
const NORMALIZED_TOL: f64 = 1e-12;

/// Coefficients of `√(2/π) cos 2kx` and `√(2/π) sin 2kx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub k: usize,
    pub c: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential", into = "RawPotential")]
pub struct PotentialSpec {
    c0: f64,
    /// Sorted by `k`, all `k` distinct and in `1..=order`.
    terms: Vec<Term>,
    order: usize,
}

#[derive(Serialize, Deserialize)]
struct RawPotential {
    c0: f64,
    #[serde(default)]
    terms: Vec<Term>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
}

impl TryFrom<RawPotential> for PotentialSpec {
    type Error = Error;

    fn try_from(raw: RawPotential) -> Result<Self> {
        let spec = PotentialSpec::new(raw.c0, raw.terms)?;
        match raw.order {
            Some(order) => spec.with_order(order),
            None => Ok(spec),
        }
    }
}

impl From<PotentialSpec> for RawPotential {
    fn from(spec: PotentialSpec) -> Self {
        RawPotential {
            c0: spec.c0,
            terms: spec.terms,
            order: Some(spec.order),
        }
    }
}

impl PotentialSpec {
    /// Builds a potential from its constant coefficient and `(k, c_k, s_k)`
    /// terms. The truncation order is the largest `k` present.
    pub fn new(c0: f64, terms: Vec<Term>) -> Result<Self> {
        let mut terms = terms;
        terms.sort_by_key(|t| t.k);
        for w in terms.windows(2) {
            if w[0].k == w[1].k {
                return Err(Error::DuplicateLevel(w[0].k));
            }
        }
        if let Some(t) = terms.first() {
            if t.k == 0 {
                return Err(Error::LevelOutOfRange(0));
            }
        }
        let all_finite =
            c0.is_finite() && terms.iter().all(|t| t.c.is_finite() && t.s.is_finite());
        if !all_finite {
            return Err(Error::InvalidInput("non-finite Fourier coefficient".into()));
        }
        let order = terms.last().map_or(0, |t| t.k);
        Ok(Self { c0, terms, order })
    }

    /// `build_potential`: optional rescaling to `‖v‖ = 1`.
    pub fn build(c0: f64, pairs: &[(usize, f64, f64)], normalize: bool) -> Result<Self> {
        let terms = pairs.iter().map(|&(k, c, s)| Term { k, c, s }).collect();
        let spec = Self::new(c0, terms)?;
        if normalize {
            spec.normalized()
        } else {
            Ok(spec)
        }
    }

    /// The zero potential with declared order 0.
    pub fn zero() -> Self {
        Self {
            c0: 0.0,
            terms: Vec::new(),
            order: 0,
        }
    }

    /// Raises the declared truncation order. Lower than the largest `k`
    /// present is rejected.
    pub fn with_order(mut self, order: usize) -> Result<Self> {
        if let Some(t) = self.terms.last() {
            if t.k > order {
                return Err(Error::LevelOutOfRange(t.k));
            }
        }
        self.order = order;
        Ok(self)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq().sqrt();
        if n == 0.0 {
            return Err(Error::ZeroPotential);
        }
        Ok(self.scaled(1.0 / n))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            c0: self.c0 * factor,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    k: t.k,
                    c: t.c * factor,
                    s: t.s * factor,
                })
                .collect(),
            order: self.order,
        }
    }

    /// Coefficient-wise sum; the order is the larger of the two.
    pub fn add(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        for t in self.terms.iter().chain(&other.terms) {
            let e = acc.entry(t.k).or_insert((0.0, 0.0));
            e.0 += t.c;
            e.1 += t.s;
        }
        Self {
            c0: self.c0 + other.c0,
            terms: acc.into_iter().map(|(k, (c, s))| Term { k, c, s }).collect(),
            order: self.order.max(other.order),
        }
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `(c_k, s_k)`; zero for levels not present. Level 0 reports `(c0, 0)`.
    pub fn coefficients(&self, k: usize) -> (f64, f64) {
        if k == 0 {
            return (self.c0, 0.0);
        }
        self.terms
            .binary_search_by_key(&k, |t| t.k)
            .map(|i| (self.terms[i].c, self.terms[i].s))
            .unwrap_or((0.0, 0.0))
    }

    /// `‖v_k‖²`, the squared norm of the projection onto level `k`.
    pub fn level_norm_sq(&self, k: usize) -> f64 {
        let (c, s) = self.coefficients(k);
        c * c + s * s
    }

    /// `‖v‖²` from Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.c0 * self.c0 + self.terms.iter().map(|t| t.c * t.c + t.s * t.s).sum::<f64>()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sq() - 1.0).abs() <= NORMALIZED_TOL
    }

    /// `v(x)` for `x ∈ [0, π]`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        Ok(self.value(x))
    }

    /// Evaluation without the domain check (the series is π-periodic).
    pub fn value(&self, x: f64) -> f64 {
        let a = (2.0 / PI).sqrt();
        let mut acc = self.c0 / PI.sqrt();
        for t in &self.terms {
            let (s, c) = (2.0 * t.k as f64 * x).sin_cos();
            acc += a * (t.c * c + t.s * s);
        }
        acc
    }

    /// Second derivative of the series.
    pub fn second_derivative(&self, x: f64) -> f64 {
        let a = (2.0 / PI).sqrt();
        let mut acc = 0.0;
        for t in &self.terms {
            let w = 2.0 * t.k as f64;
            let (s, c) = (w * x).sin_cos();
            acc -= a * w * w * (t.c * c + t.s * s);
        }
        acc
    }

    /// Coefficients `a_m` of `v(x) = Σ a_m e^{2imx}`, `m = -K..=K`, listed
    /// only for nonzero levels.
    pub fn exponential_coefficients(&self) -> Vec<(i64, Complex64)> {
        let mut out = Vec::with_capacity(2 * self.terms.len() + 1);
        if self.c0 != 0.0 {
            out.push((0, Complex64::new(self.c0 / PI.sqrt(), 0.0)));
        }
        let half = 0.5 * (2.0 / PI).sqrt();
        for t in &self.terms {
            if t.c == 0.0 && t.s == 0.0 {
                continue;
            }
            let k = t.k as i64;
            out.push((k, Complex64::new(half * t.c, -half * t.s)));
            out.push((-k, Complex64::new(half * t.c, half * t.s)));
        }
        out
    }

    /// Even part about `π/2`: the cosine content.
    pub fn even_part(&self) -> Self {
        Self {
            c0: self.c0,
            terms: self
                .terms
                .iter()
                .map(|t| Term { k: t.k, c: t.c, s: 0.0 })
                .collect(),
            order: self.order,
        }
    }

    /// Odd part about `π/2`: the sine content.
    pub fn odd_part(&self) -> Self {
        Self {
            c0: 0.0,
            terms: self
                .terms
                .iter()
                .map(|t| Term { k: t.k, c: 0.0, s: t.s })
                .collect(),
            order: self.order,
        }
    }

    /// The companion potentials `w = v + (x − π/2)` and `ŵ = v + (x − π/2)²`,
    /// both truncated at `k_comp`.
    pub fn companions(&self, k_comp: usize) -> Result<(Self, Self)> {
        if k_comp < self.order {
            return Err(Error::TruncationTooSmall {
                k_comp,
                order: self.order,
            });
        }
        let shift = (PI / 2.0).sqrt();
        let mut w_terms = Vec::with_capacity(k_comp);
        let mut wh_terms = Vec::with_capacity(k_comp);
        for k in 1..=k_comp {
            let (c, s) = self.coefficients(k);
            let kf = k as f64;
            w_terms.push(Term {
                k,
                c,
                s: s - shift / kf,
            });
            wh_terms.push(Term {
                k,
                c: c + shift / (kf * kf),
                s,
            });
        }
        let w = Self {
            c0: self.c0,
            terms: w_terms,
            order: k_comp,
        };
        let w_hat = Self {
            c0: self.c0 + PI.powf(2.5) / 12.0,
            terms: wh_terms,
            order: k_comp,
        };
        Ok((w, w_hat))
    }
}

/// The operator `L(α, v) = L₀ + α⟨·, v⟩v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOperator", into = "RawOperator")]
pub struct OperatorSpec {
    pub alpha: f64,
    pub potential: PotentialSpec,
}

#[derive(Serialize, Deserialize)]
struct RawOperator {
    alpha: f64,
    potential: PotentialSpec,
    #[serde(default)]
    normalized: bool,
}

impl TryFrom<RawOperator> for OperatorSpec {
    type Error = Error;

    fn try_from(raw: RawOperator) -> Result<Self> {
        OperatorSpec::new(raw.alpha, raw.potential)
    }
}

impl From<OperatorSpec> for RawOperator {
    fn from(op: OperatorSpec) -> Self {
        let normalized = op.normalized();
        RawOperator {
            alpha: op.alpha,
            potential: op.potential,
            normalized,
        }
    }
}

impl OperatorSpec {
    pub fn new(alpha: f64, potential: PotentialSpec) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("coupling α = {alpha} is not finite")));
        }
        Ok(Self { alpha, potential })
    }

    /// True under the canonical normalization `‖v‖ = 1`.
    pub fn normalized(&self) -> bool {
        self.potential.is_normalized()
    }
}

/// Spectrum of `L₀`: levels `4k²`, multiplicity 1 at `k = 0` and 2 above.
#[derive(Debug, Clone, Copy, Default)]
pub struct L0Spectrum;

impl L0Spectrum {
    pub fn level(k: usize) -> f64 {
        4.0 * (k * k) as f64
    }

    pub fn multiplicity(k: usize) -> usize {
        if k == 0 {
            1
        } else {
            2
        }
    }

    /// Level index of `z` if `z = 4k²` to within `tol`.
    pub fn level_index(z: f64, tol: f64) -> Option<usize> {
        if z < -tol {
            return None;
        }
        let k = (z.max(0.0) / 4.0).sqrt().round() as usize;
        ((Self::level(k) - z).abs() <= tol).then_some(k)
    }

    /// Indices `k` with `4k² ≤ window`.
    pub fn levels_up_to(window: f64) -> impl Iterator<Item = usize> {
        let kmax = if window < 0.0 {
            None
        } else {
            Some((window / 4.0).sqrt().floor() as usize)
        };
        (0..kmax.map_or(0, |k| k + 1)).filter(move |&k| Self::level(k) <= window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Composite;

    #[test]
    fn build_single_coefficient_normalized() {
        let v = PotentialSpec::build(1.0, &[], true).unwrap();
        assert_eq!(v.c0(), 1.0);
        assert_eq!(v.norm_sq(), 1.0);
    }

    #[test]
    fn norm_is_parseval_sum() {
        let v = PotentialSpec::build(0.6, &[(1, 0.64, 0.48)], false).unwrap();
        assert!((v.norm_sq() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalization_scales_by_norm() {
        let v = PotentialSpec::build(3.0, &[(2, 4.0, 0.0)], true).unwrap();
        assert!((v.c0() - 0.6).abs() < 1e-15);
        assert!((v.coefficients(2).0 - 0.8).abs() < 1e-15);
        assert_eq!(v.order(), 2);
    }

    #[test]
    fn rejects_duplicates_and_zero_normalization() {
        assert!(matches!(
            PotentialSpec::build(0.0, &[(1, 1.0, 0.0), (1, 0.0, 1.0)], false),
            Err(Error::DuplicateLevel(1))
        ));
        assert!(matches!(
            PotentialSpec::build(0.0, &[(3, 0.0, 0.0)], true),
            Err(Error::ZeroPotential)
        ));
        assert!(matches!(
            PotentialSpec::build(0.0, &[(0, 1.0, 0.0)], false),
            Err(Error::LevelOutOfRange(0))
        ));
    }

    #[test]
    fn evaluate_basis_functions() {
        let v = PotentialSpec::build(1.0, &[], false).unwrap();
        assert!((v.evaluate(PI / 3.0).unwrap() - 0.5641895835477563).abs() < 1e-12);
        let v = PotentialSpec::build(0.0, &[(1, 1.0, 0.0)], false).unwrap();
        assert!((v.evaluate(0.0).unwrap() - 0.7978845608028654).abs() < 1e-12);
        let v = PotentialSpec::build(0.0, &[(1, 0.0, 1.0)], false).unwrap();
        assert!((v.evaluate(PI / 4.0).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-12);
        assert!(matches!(v.evaluate(-0.1), Err(Error::OutOfDomain(_))));
        assert!(matches!(v.evaluate(3.2), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn companion_shifts() {
        let zero = PotentialSpec::zero();
        let (w, _) = zero.companions(1).unwrap();
        assert!((w.coefficients(1).1 + 1.2533141373155001).abs() < 1e-12);

        let (w, wh) = zero.companions(2).unwrap();
        let r = (PI / 2.0).sqrt();
        assert!((wh.coefficients(1).0 - r).abs() < 1e-15);
        assert!((wh.coefficients(2).0 - r / 4.0).abs() < 1e-15);
        assert!((wh.c0() - PI.powf(2.5) / 12.0).abs() < 1e-15);
        assert_eq!(w.coefficients(2).0, 0.0);
        assert_eq!(wh.coefficients(2).1, 0.0);

        let v = PotentialSpec::build(0.0, &[(1, 0.0, r)], false).unwrap();
        let (w, _) = v.companions(1).unwrap();
        assert_eq!(w.coefficients(1).1, 0.0);

        let v = PotentialSpec::build(0.0, &[(3, 1.0, 0.0)], false).unwrap();
        assert!(matches!(
            v.companions(2),
            Err(Error::TruncationTooSmall { k_comp: 2, order: 3 })
        ));
    }

    #[test]
    fn companion_w_matches_shifted_function() {
        // tail bound Σ_{k>64} (π/2)/k² < 0.025; the pointwise truncation error of
        // the sine series is far smaller away from the endpoints
        let v = PotentialSpec::build(0.3, &[(1, 0.2, -0.4), (2, 0.0, 0.5)], false).unwrap();
        let (w, _) = v.companions(256).unwrap();
        for i in 1..20 {
            let x = PI * i as f64 / 20.0;
            let want = v.value(x) + x - PI / 2.0;
            assert!((w.value(x) - want).abs() < 1e-2, "x={x}");
        }
    }

    #[test]
    fn companion_w_hat_matches_shifted_square() {
        let v = PotentialSpec::build(0.1, &[(2, 0.3, 0.3)], false).unwrap();
        let (_, wh) = v.companions(64).unwrap();
        for i in 0..=20 {
            let x = PI * i as f64 / 20.0;
            let want = v.value(x) + (x - PI / 2.0).powi(2);
            // tail Σ_{k>64} 1/k² bounds the error at the endpoints
            assert!((wh.value(x) - want).abs() < 2e-2, "x={x}");
        }
    }

    #[test]
    fn parseval_against_quadrature() {
        let v = PotentialSpec::build(
            0.3,
            &[(1, 0.1, -0.2), (4, 0.7, 0.05), (9, -0.3, 0.4), (16, 0.25, 0.0)],
            false,
        )
        .unwrap();
        let q = Composite::new();
        let integral: f64 = q.integrate(0.0, PI, |x| v.value(x).powi(2));
        assert!((integral - v.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn exponential_coefficients_reproduce_values() {
        let v = PotentialSpec::build(0.4, &[(1, 0.3, -0.2), (3, 0.1, 0.6)], false).unwrap();
        let a = v.exponential_coefficients();
        for i in 0..10 {
            let x = 0.31 * i as f64;
            let z: Complex64 = a
                .iter()
                .map(|(m, am)| am * Complex64::new(0.0, 2.0 * *m as f64 * x).exp())
                .sum();
            assert!((z.re - v.value(x)).abs() < 1e-14);
            assert!(z.im.abs() < 1e-14);
        }
    }

    #[test]
    fn json_schema_round_trip() {
        let v = PotentialSpec::build(0.6, &[(1, 0.64, 0.48)], false).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"c0":0.6,"terms":[{"k":1,"c":0.64,"s":0.48}],"K":1}"#);
        let back: PotentialSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let bad = r#"{"c0":0.0,"terms":[{"k":2,"c":1,"s":0}],"K":1}"#;
        assert!(serde_json::from_str::<PotentialSpec>(bad).is_err());
    }

    #[test]
    fn l0_levels() {
        let ks: Vec<_> = L0Spectrum::levels_up_to(40.0).collect();
        assert_eq!(ks, vec![0, 1, 2, 3]);
        assert_eq!(L0Spectrum::level_index(16.0 + 1e-12, 1e-9), Some(2));
        assert_eq!(L0Spectrum::level_index(17.0, 1e-9), None);
        for k in 0..50 {
            assert!(L0Spectrum::level(k + 1) - L0Spectrum::level(k) >= 4.0);
        }
        assert_eq!(L0Spectrum::multiplicity(0), 1);
        assert_eq!(L0Spectrum::multiplicity(3), 2);
    }
}
