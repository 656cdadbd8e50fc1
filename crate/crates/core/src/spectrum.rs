//! Spectrum of `L(α, v)` through the secular equation.
//!
//! Levels `4k²` of `L₀` split into
//!
//! * `σ₀`: `v_k = 0`, eigenvalue kept with its multiplicity,
//! * `σ₁`: `v_k ≠ 0`, `k ≥ 1`, multiplicity drops to 1 (level 0 disappears),
//! * `σ₂`: simple roots `μ` of `Q(z) = 1 + Σ X_k/(4k² − z)`, `X_k = α‖v_k‖²`,
//! * `σ₀ ∩ σ₂`: a root landing on an untouched level, multiplicity `m_k + 1`.
//!
//! The roots strictly alternate with the active levels: one per gap, plus
//! one above the top level when `α > 0` or below the bottom one when `α < 0`.

mod eigenfunction;

pub use eigenfunction::{eigenfunction, EigenKind, Eigenfunction, Eigenspace};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{L0Spectrum, OperatorSpec};

/// Levels with `‖v_k‖²` at or below this are treated as untouched.
pub const WEIGHT_FLOOR: f64 = 1e-13;
/// Distance below which a secular root is merged with an untouched level.
pub const COINCIDENCE_TOL: f64 = 1e-9;

const BISECTION_RTOL: f64 = 1e-12;
const MAX_NEWTON: usize = 20;

/// Side of its paired pole on which every secular root sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// `p_j < μ_j < p_{j+1}`, last root above the top pole (`α > 0`).
    Above,
    /// `μ_j < p_j < μ_{j+1}`, first root below the bottom pole (`α < 0`).
    Below,
}

impl Orientation {
    pub fn of_sign(x: f64) -> Option<Self> {
        if x > 0.0 {
            Some(Orientation::Above)
        } else if x < 0.0 {
            Some(Orientation::Below)
        } else {
            None
        }
    }
}

/// Per-level weights `X_k = α‖v_k‖²`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightTable {
    pub weights: BTreeMap<usize, f64>,
    /// Coupling, when known (forward side).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    /// Interlacing pattern the table was recovered from, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orientation: Option<Orientation>,
}

impl WeightTable {
    pub fn from_weights(weights: BTreeMap<usize, f64>) -> Self {
        Self {
            weights,
            alpha: None,
            orientation: None,
        }
    }

    /// `X_k`, zero when absent.
    pub fn get(&self, k: usize) -> f64 {
        self.weights.get(&k).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    /// Levels carrying secular content.
    pub fn active_levels(&self) -> Vec<usize> {
        self.weights
            .iter()
            .filter(|(_, x)| x.abs() > WEIGHT_FLOOR)
            .map(|(&k, _)| k)
            .collect()
    }

    /// `Q(z) = 1 + Σ X_k / (4k² − z)` over active levels.
    pub fn q(&self, z: f64) -> Result<f64> {
        let mut acc = 1.0;
        for k in self.active_levels() {
            let d = L0Spectrum::level(k) - z;
            if d == 0.0 {
                return Err(Error::Pole(z));
            }
            acc += self.get(k) / d;
        }
        Ok(acc)
    }
}

/// `weight_table`: exact weights of an operator.
pub fn weight_table(op: &OperatorSpec) -> WeightTable {
    let v = &op.potential;
    let mut weights = BTreeMap::new();
    if op.alpha != 0.0 {
        for k in 0..=v.order() {
            let n = v.level_norm_sq(k);
            if n > WEIGHT_FLOOR {
                weights.insert(k, op.alpha * n);
            }
        }
    }
    WeightTable {
        weights,
        alpha: Some(op.alpha),
        orientation: Orientation::of_sign(op.alpha),
    }
}

/// Active poles as `(level, X)`, ascending, all `X` of one sign.
fn poles(table: &WeightTable) -> Result<(Vec<(f64, f64)>, Orientation)> {
    let poles: Vec<(f64, f64)> = table
        .active_levels()
        .into_iter()
        .map(|k| (L0Spectrum::level(k), table.get(k)))
        .collect();
    if poles.is_empty() {
        return Err(Error::Degenerate(
            "no active level; the spectrum equals that of L₀".into(),
        ));
    }
    let positive = poles[0].1 > 0.0;
    if poles.iter().any(|&(_, x)| (x > 0.0) != positive) {
        return Err(Error::InvalidInput(
            "weights of mixed sign do not come from a rank-one perturbation".into(),
        ));
    }
    let orientation = if positive {
        Orientation::Above
    } else {
        Orientation::Below
    };
    Ok((poles, orientation))
}

/// `Q` around a shifted origin: `Q(origin + τ)` with pole offsets exact.
struct ShiftedSecular<'a> {
    offsets: Vec<f64>,
    weights: &'a [(f64, f64)],
}

impl<'a> ShiftedSecular<'a> {
    fn new(poles: &'a [(f64, f64)], origin: f64) -> Self {
        Self {
            offsets: poles.iter().map(|&(p, _)| p - origin).collect(),
            weights: poles,
        }
    }

    fn value(&self, tau: f64) -> f64 {
        1.0 + self
            .offsets
            .iter()
            .zip(self.weights)
            .map(|(d, &(_, x))| x / (d - tau))
            .sum::<f64>()
    }

    fn derivative(&self, tau: f64) -> f64 {
        self.offsets
            .iter()
            .zip(self.weights)
            .map(|(d, &(_, x))| {
                let r = d - tau;
                x / (r * r)
            })
            .sum()
    }
}

/// Root of `f` in the open interval `(lo, hi)` given the sign of `f` just
/// inside `lo`. Bisection to `1e-12` relative in `origin + τ`, then
/// safeguarded Newton.
fn solve_bracket(f: &ShiftedSecular<'_>, origin: f64, mut lo: f64, mut hi: f64, lo_negative: bool) -> f64 {
    let below = |v: f64| (v < 0.0) == lo_negative;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let scale = (origin + mid).abs().max(1.0);
        if hi - lo <= BISECTION_RTOL * scale {
            break;
        }
        let v = f.value(mid);
        if v == 0.0 {
            return origin + mid;
        }
        if below(v) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..MAX_NEWTON {
        let v = f.value(tau);
        if v == 0.0 {
            break;
        }
        if below(v) {
            lo = tau;
        } else {
            hi = tau;
        }
        let d = f.derivative(tau);
        let mut next = tau - v / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - tau).abs();
        tau = next;
        if step <= 4.0 * f64::EPSILON * tau.abs() || hi <= lo {
            break;
        }
    }
    origin + tau
}

/// All roots of `Q`, ascending.
pub fn all_secular_roots(table: &WeightTable) -> Result<Vec<f64>> {
    let (poles, orientation) = poles(table)?;
    let mut roots = Vec::with_capacity(poles.len());
    let total: f64 = poles.iter().map(|&(_, x)| x.abs()).sum();

    if orientation == Orientation::Below {
        // Q(p₁⁻) = −∞, Q(−∞) = 1
        let origin = poles[0].0;
        let f = ShiftedSecular::new(&poles, origin);
        let mut width = total.max(1.0);
        while f.value(-width) <= 0.0 {
            width *= 2.0;
        }
        roots.push(solve_bracket(&f, origin, -width, 0.0, false));
    }

    for pair in poles.windows(2) {
        let (a, b) = (pair[0].0, pair[1].0);
        let gap = b - a;
        // just above a: Q → −∞ for positive weights, +∞ for negative
        let lo_negative = orientation == Orientation::Above;
        let f_low = ShiftedSecular::new(&poles, a);
        let at_mid = f_low.value(0.5 * gap);
        let root_in_lower_half = (at_mid < 0.0) != lo_negative || at_mid == 0.0;
        let root = if root_in_lower_half {
            solve_bracket(&f_low, a, 0.0, 0.5 * gap, lo_negative)
        } else {
            let f_high = ShiftedSecular::new(&poles, b);
            solve_bracket(&f_high, b, -0.5 * gap, 0.0, lo_negative)
        };
        roots.push(root);
    }

    if orientation == Orientation::Above {
        // Q(p_n⁺) = −∞, Q(+∞) = 1
        let origin = poles[poles.len() - 1].0;
        let f = ShiftedSecular::new(&poles, origin);
        let mut width = 1.0;
        while f.value(width) <= 0.0 {
            width *= 2.0;
        }
        roots.push(solve_bracket(&f, origin, 0.0, width, true));
    }
    Ok(roots)
}

/// `secular_roots`: roots of `Q` up to `z_window`.
pub fn secular_roots(table: &WeightTable, z_window: f64) -> Result<Vec<f64>> {
    let (poles, _) = poles(table)?;
    let top = poles[poles.len() - 1].0;
    if !(z_window > top) {
        return Err(Error::InvalidInput(format!(
            "window {z_window} must exceed the largest active level {top}"
        )));
    }
    Ok(all_secular_roots(table)?
        .into_iter()
        .filter(|&z| z <= z_window)
        .collect())
}

/// Membership class of an eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    Sigma0,
    Sigma2,
    Sigma0CapSigma2,
    Sigma1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub z: f64,
    pub m: usize,
    pub tag: Tag,
}

/// Eigenvalues with multiplicities and classes, complete up to `window`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedSpectrum {
    pub window: f64,
    pub entries: Vec<SpectrumEntry>,
}

impl ClassifiedSpectrum {
    /// Eigenvalues repeated by multiplicity.
    pub fn flattened(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.z, e.m))
            .collect()
    }

    /// Values of the secular roots (`σ₂`, coincidences included).
    pub fn secular_values(&self) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| matches!(e.tag, Tag::Sigma2 | Tag::Sigma0CapSigma2))
            .map(|e| e.z)
            .collect()
    }

    pub fn find(&self, z: f64, tol: f64) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| (e.z - z).abs() <= tol)
    }
}

/// `classify_spectrum`: every eigenvalue of `L(α, v)` not above `z_window`.
pub fn classify_spectrum(op: &OperatorSpec, z_window: f64) -> Result<ClassifiedSpectrum> {
    if !(z_window >= 4.0) {
        return Err(Error::InvalidInput(format!("window {z_window} must be at least 4")));
    }
    let table = weight_table(op);
    let mut roots = all_secular_roots(&table)?;
    let active: Vec<usize> = table.active_levels();

    let mut entries = Vec::new();
    for k in L0Spectrum::levels_up_to(z_window) {
        let level = L0Spectrum::level(k);
        if active.contains(&k) {
            if k > 0 {
                entries.push(SpectrumEntry {
                    z: level,
                    m: 1,
                    tag: Tag::Sigma1,
                });
            }
            continue;
        }
        let m = L0Spectrum::multiplicity(k);
        let hit = roots.iter().position(|&mu| (mu - level).abs() <= COINCIDENCE_TOL);
        match hit {
            Some(i) => {
                roots.remove(i);
                entries.push(SpectrumEntry {
                    z: level,
                    m: m + 1,
                    tag: Tag::Sigma0CapSigma2,
                });
            }
            None => entries.push(SpectrumEntry {
                z: level,
                m,
                tag: Tag::Sigma0,
            }),
        }
    }
    entries.extend(roots.into_iter().filter(|&mu| mu <= z_window).map(|mu| SpectrumEntry {
        z: mu,
        m: 1,
        tag: Tag::Sigma2,
    }));
    entries.sort_by(|a, b| a.z.total_cmp(&b.z));
    Ok(ClassifiedSpectrum {
        window: z_window,
        entries,
    })
}

/// Interlacing check of sorted roots against sorted poles.
pub fn interlaces(poles: &[f64], roots: &[f64], orientation: Orientation) -> bool {
    if poles.len() != roots.len() || poles.is_empty() {
        return false;
    }
    let n = poles.len();
    (0..n).all(|j| match orientation {
        Orientation::Above => {
            poles[j] < roots[j] && (j + 1 == n || roots[j] < poles[j + 1])
        }
        Orientation::Below => {
            roots[j] < poles[j] && (j == 0 || poles[j - 1] < roots[j])
        }
    })
}
