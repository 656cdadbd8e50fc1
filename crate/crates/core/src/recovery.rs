//! Inverse side: weights from a spectrum, `(α, v)` from three spectra,
//! magnitudes from two spectra, and admissibility of spectral data.
//!
//! Spectral data determine the rational function
//!
//! ```text
//! F(z) = A ∏_j (1 − z/μ_j) / (π² z ∏_{k≠0} (1 − z/z_k)),
//! ```
//!
//! with `A` fixed by `F(iy) → 1`. Its residues are the weights
//! `X_p = α‖v_p‖²`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charfn::CharfnContext;
use crate::error::{Error, Result};
use crate::potential::{L0Spectrum, OperatorSpec, PotentialSpec, Term};
use crate::spectrum::{
    interlaces, ClassifiedSpectrum, Orientation, WeightTable, COINCIDENCE_TOL,
};

/// Height at which `F(iy)` is sampled to fix `A`.
pub const NORMALIZATION_HEIGHT: f64 = 1e8;
/// Step of the central differences for `Δ'`.
pub const DERIVATIVE_STEP: f64 = 1e-6;
/// Per-level tolerance on `c_k² + s_k² = ‖v_k‖²`.
pub const CONSISTENCY_TOL: f64 = 1e-6;

/// Secular content of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    /// Levels `4k²` carrying secular content, ascending.
    pub active_levels: Vec<f64>,
    /// Secular roots, ascending.
    pub mus: Vec<f64>,
    /// Active levels `k ≥ 1` that remain eigenvalues of multiplicity one.
    pub sigma1_levels: Vec<f64>,
    pub window: f64,
}

impl SpectralData {
    pub fn new(active_levels: Vec<f64>, mus: Vec<f64>, window: f64) -> Self {
        let mut active_levels = active_levels;
        let mut mus = mus;
        active_levels.sort_by(f64::total_cmp);
        mus.sort_by(f64::total_cmp);
        let sigma1_levels = active_levels.iter().copied().filter(|&z| z > 0.0).collect();
        Self {
            active_levels,
            mus,
            sigma1_levels,
            window,
        }
    }

    /// Reads secular content off a classified spectrum by multiplicity:
    /// a level seen `m_k − 1` times is active, `m_k` times untouched, and
    /// `m_k + 1` times untouched with a secular root on it.
    pub fn from_classified(spectrum: &ClassifiedSpectrum) -> Result<Self> {
        let mut level_count: BTreeMap<usize, usize> = BTreeMap::new();
        let mut mus = Vec::new();
        for e in &spectrum.entries {
            if !e.z.is_finite() || e.m == 0 {
                return Err(Error::MalformedSpectrum(format!(
                    "entry z = {} with multiplicity {}",
                    e.z, e.m
                )));
            }
            match L0Spectrum::level_index(e.z, COINCIDENCE_TOL) {
                Some(k) => *level_count.entry(k).or_default() += e.m,
                None => mus.extend(std::iter::repeat_n(e.z, e.m)),
            }
        }
        let mut active = Vec::new();
        for k in L0Spectrum::levels_up_to(spectrum.window) {
            let base = L0Spectrum::multiplicity(k);
            let seen = level_count.remove(&k).unwrap_or(0);
            let level = L0Spectrum::level(k);
            if seen + 1 == base {
                active.push(level);
            } else if seen == base + 1 {
                mus.push(level);
            } else if seen != base {
                return Err(Error::MalformedSpectrum(format!(
                    "level {level} has multiplicity {seen}, expected {} to {}",
                    base - 1,
                    base + 1
                )));
            }
        }
        if let Some((k, _)) = level_count.into_iter().next() {
            return Err(Error::MalformedSpectrum(format!(
                "level {} lies above the window {}",
                L0Spectrum::level(k),
                spectrum.window
            )));
        }
        Ok(Self::new(active, mus, spectrum.window))
    }

    /// Nothing to recover: the spectrum of `L₀`.
    pub fn is_empty(&self) -> bool {
        self.active_levels.is_empty() && self.mus.is_empty()
    }

    fn level_indices(&self) -> Result<Vec<usize>> {
        self.active_levels
            .iter()
            .map(|&z| {
                L0Spectrum::level_index(z, COINCIDENCE_TOL).ok_or_else(|| {
                    Error::MalformedSpectrum(format!("{z} is not a level 4k²"))
                })
            })
            .collect()
    }

    /// Orientation implied by the position of the lowest root.
    pub fn orientation(&self) -> Option<Orientation> {
        let (p, mu) = (self.active_levels.first()?, self.mus.first()?);
        Some(if mu < p {
            Orientation::Below
        } else {
            Orientation::Above
        })
    }

    /// Interlacing check; `Err` describes the first violation.
    pub fn check_interlacing(&self) -> Result<Orientation> {
        if self.mus.len() != self.active_levels.len() {
            return Err(Error::MalformedSpectrum(format!(
                "incomplete: {} secular roots against {} active levels",
                self.mus.len(),
                self.active_levels.len()
            )));
        }
        let orientation = self
            .orientation()
            .ok_or_else(|| Error::Degenerate("no secular content".into()))?;
        if !interlaces(&self.active_levels, &self.mus, orientation) {
            return Err(Error::MalformedSpectrum(
                "secular roots do not alternate with the active levels".into(),
            ));
        }
        Ok(orientation)
    }
}

/// The product form with its normalization constant.
struct ProductForm<'a> {
    poles: &'a [f64],
    mus: &'a [f64],
    a: f64,
}

fn g(a: f64, z: Complex64) -> Complex64 {
    1.0 - z / a
}

impl<'a> ProductForm<'a> {
    fn new(poles: &'a [f64], mus: &'a [f64]) -> Self {
        let mut f = Self { poles, mus, a: 1.0 };
        let y = NORMALIZATION_HEIGHT;
        let c1 = f.eval(Complex64::new(0.0, y));
        let c2 = f.eval(Complex64::new(0.0, 2.0 * y));
        f.a = 1.0 / (2.0 * c2 - c1).re;
        f
    }

    /// `F(z)` with paired ratios so that partial products stay `O(1)`.
    fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(self.a, 0.0);
        for (&p, &mu) in self.poles.iter().zip(self.mus) {
            let num = if mu == 0.0 { z } else { g(mu, z) };
            let den = if p == 0.0 { PI * PI * z } else { g(p, z) };
            acc *= num / den;
        }
        acc
    }

    /// `lim_{z→p} (p − z) F(z)` with the vanishing factor cancelled.
    fn residue(&self, index: usize) -> f64 {
        let p = self.poles[index];
        if p == 0.0 {
            // every other factor equals one at z = 0
            if self.mus.contains(&0.0) {
                return 0.0;
            }
            return -self.a / (PI * PI);
        }
        let mut acc = self.a * p;
        for (j, (&q, &mu)) in self.poles.iter().zip(self.mus).enumerate() {
            acc *= if mu == 0.0 { p } else { 1.0 - p / mu };
            if j != index {
                acc /= if q == 0.0 { PI * PI * p } else { 1.0 - p / q };
            }
        }
        acc
    }
}

/// `weights_from_spectrum`: residues `X_p = α‖v_p‖²` of the product form.
pub fn weights_from_spectrum(data: &SpectralData) -> Result<WeightTable> {
    let orientation = data.check_interlacing()?;
    let levels = data.level_indices()?;
    let form = ProductForm::new(&data.active_levels, &data.mus);
    let weights = levels
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, form.residue(i)))
        .collect();
    Ok(WeightTable {
        weights,
        alpha: None,
        orientation: Some(orientation),
    })
}

/// `alpha_and_norms`: `α = Σ X_k` and `‖v_k‖² = X_k/α` under `‖v‖ = 1`.
pub fn alpha_and_norms(table: &WeightTable) -> Result<(f64, BTreeMap<usize, f64>)> {
    let alpha = table.total();
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::Degenerate(format!("Σ X_k = {alpha}")));
    }
    if let Some(o) = table.orientation {
        if Orientation::of_sign(alpha) != Some(o) {
            return Err(Error::Inconsistent(format!(
                "Σ X_k = {alpha} disagrees with the {o:?} interlacing pattern"
            )));
        }
    }
    let norms = table.weights.iter().map(|(&k, &x)| (k, x / alpha)).collect();
    Ok((alpha, norms))
}

/// `weights_via_delta_derivative`: `X_0 = −Δ(α,0)/π²` and
/// `X_p = −(4p/π²) Δ'(α, 2p)`, all levels up to the order of `v`.
pub fn weights_via_delta_derivative(op: &OperatorSpec) -> WeightTable {
    let ctx = CharfnContext::new(op.clone());
    let pi2 = PI * PI;
    let mut weights = BTreeMap::new();
    weights.insert(0, -ctx.delta_real(0.0) / pi2);
    let d = |x: f64, h: f64| (ctx.delta_real(x + h) - ctx.delta_real(x - h)) / (2.0 * h);
    for p in 1..=op.potential.order() {
        let x = 2.0 * p as f64;
        let h = DERIVATIVE_STEP;
        let slope = (4.0 * d(x, 0.5 * h) - d(x, h)) / 3.0;
        weights.insert(p, -(4.0 * p as f64 / pi2) * slope);
    }
    WeightTable {
        weights,
        alpha: Some(op.alpha),
        orientation: Orientation::of_sign(op.alpha),
    }
}

/// Base, shifted and squared spectra with the reconstruction order.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeSpectra {
    pub base: SpectralData,
    pub shifted: SpectralData,
    pub squared: SpectralData,
    pub order: usize,
}

#[derive(Serialize, Deserialize)]
struct RawThreeSpectra {
    base: ClassifiedSpectrum,
    shifted: ClassifiedSpectrum,
    squared: ClassifiedSpectrum,
    #[serde(rename = "K")]
    order: usize,
}

impl ThreeSpectra {
    /// Spectra of `L(α, v)`, `L(α, w)`, `L(α, ŵ)` with companions cut at
    /// `k_comp` and the default window `4(k_comp + 1)²`.
    pub fn from_operator(op: &OperatorSpec, k_comp: usize) -> Result<(Self, [ClassifiedSpectrum; 3])> {
        let window = L0Spectrum::level(k_comp + 1);
        let (w, w_hat) = op.potential.companions(k_comp)?;
        let spectra = [
            crate::spectrum::classify_spectrum(op, window)?,
            crate::spectrum::classify_spectrum(&OperatorSpec::new(op.alpha, w)?, window)?,
            crate::spectrum::classify_spectrum(&OperatorSpec::new(op.alpha, w_hat)?, window)?,
        ];
        let ts = Self {
            base: SpectralData::from_classified(&spectra[0])?,
            shifted: SpectralData::from_classified(&spectra[1])?,
            squared: SpectralData::from_classified(&spectra[2])?,
            order: op.potential.order(),
        };
        Ok((ts, spectra))
    }

    pub fn from_json(text: &str) -> Result<(Self, [ClassifiedSpectrum; 3])> {
        let raw: RawThreeSpectra = serde_json::from_str(text)?;
        let ts = Self {
            base: SpectralData::from_classified(&raw.base)?,
            shifted: SpectralData::from_classified(&raw.shifted)?,
            squared: SpectralData::from_classified(&raw.squared)?,
            order: raw.order,
        };
        Ok((ts, [raw.base, raw.shifted, raw.squared]))
    }

    /// JSON record `{"base", "shifted", "squared", "K"}`.
    pub fn to_json_value(spectra: &[ClassifiedSpectrum; 3], order: usize) -> serde_json::Value {
        serde_json::to_value(RawThreeSpectra {
            base: spectra[0].clone(),
            shifted: spectra[1].clone(),
            squared: spectra[2].clone(),
            order,
        })
        .expect("plain data serializes")
    }
}

/// Result of the three-spectra inversion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inversion {
    pub alpha: f64,
    pub potential: PotentialSpec,
    /// `|c_k² + s_k² − ‖v_k‖²|` per level `k ≥ 1`.
    pub residuals: BTreeMap<usize, f64>,
}

/// `invert_three_spectra`: `α` and the real potential `v` up to order `K`.
pub fn invert_three_spectra(ts: &ThreeSpectra) -> Result<Inversion> {
    let need = L0Spectrum::level(ts.order + 1);
    for (name, d) in [("base", &ts.base), ("shifted", &ts.shifted), ("squared", &ts.squared)] {
        if d.window < need {
            return Err(Error::InvalidInput(format!(
                "{name} window {} is below 4(K+1)² = {need}",
                d.window
            )));
        }
    }
    let base = weights_from_spectrum(&ts.base)?;
    let shifted = weights_from_spectrum(&ts.shifted)?;
    let squared = weights_from_spectrum(&ts.squared)?;
    let (alpha, norms) = alpha_and_norms(&base)?;
    for (name, t) in [("shifted", &shifted), ("squared", &squared)] {
        if t.orientation != base.orientation {
            return Err(Error::Inconsistent(format!(
                "{name} spectrum interlaces with the opposite orientation"
            )));
        }
    }
    let v2 = |k: usize| norms.get(&k).copied().unwrap_or(0.0);
    let w2 = |k: usize| shifted.get(k) / alpha;
    let wh2 = |k: usize| squared.get(k) / alpha;
    let root_2pi = (2.0 * PI).sqrt();

    let c0 = 6.0 / PI.powf(2.5) * (wh2(0) - v2(0) - PI.powi(5) / 144.0);
    let mut terms = Vec::with_capacity(ts.order);
    let mut residuals = BTreeMap::new();
    for k in 1..=ts.order {
        let kf = k as f64;
        let s = kf / root_2pi * (v2(k) - w2(k) + PI / (2.0 * kf * kf));
        let c = kf * kf / root_2pi * (wh2(k) - v2(k) - PI / (2.0 * kf.powi(4)));
        let r = (c * c + s * s - v2(k)).abs();
        if !(r <= CONSISTENCY_TOL) {
            return Err(Error::Inconsistent(format!(
                "level {k}: c² + s² = {} but ‖v_k‖² = {}",
                c * c + s * s,
                v2(k)
            )));
        }
        residuals.insert(k, r);
        terms.push(Term { k, c, s });
    }
    let r0 = (c0 * c0 - v2(0)).abs();
    if !(r0 <= CONSISTENCY_TOL) {
        return Err(Error::Inconsistent(format!(
            "level 0: c0² = {} but ‖v_0‖² = {}",
            c0 * c0,
            v2(0)
        )));
    }
    residuals.insert(0, r0);
    let potential = PotentialSpec::new(c0, terms)?.with_order(ts.order)?;
    Ok(Inversion {
        alpha,
        potential,
        residuals,
    })
}

/// `magnitudes_from_two_spectra`: `(α c_k², α s_k²)` per level from the
/// spectra of the even and odd parts of `v` about `π/2`. A side with no
/// secular content contributes zeros.
pub fn magnitudes_from_two_spectra(
    plus: &SpectralData,
    minus: &SpectralData,
) -> Result<BTreeMap<usize, (f64, f64)>> {
    if plus.is_empty() && minus.is_empty() {
        return Err(Error::Degenerate("both spectra equal that of L₀".into()));
    }
    let side = |d: &SpectralData| -> Result<WeightTable> {
        if d.is_empty() {
            Ok(WeightTable::default())
        } else {
            weights_from_spectrum(d)
        }
    };
    let (p, m) = (side(plus)?, side(minus)?);
    let mut out = BTreeMap::new();
    for &k in p.weights.keys().chain(m.weights.keys()) {
        out.insert(k, (p.get(k), m.get(k)));
    }
    Ok(out)
}

/// Verdicts of the admissibility check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JPReport {
    /// Roots real and finite; exponential type of `F` is assumed.
    pub symmetry: bool,
    pub interlacing: bool,
    /// `A` finite and `F(iy) → 1`.
    pub normalization: bool,
    /// `y |F(iy) − 1|` settles as `y` grows.
    pub boundedness: bool,
    pub same_sign: bool,
    pub accepted: bool,
    pub normalization_constant: Option<f64>,
    /// `(y, y |F(iy) − 1|)` samples.
    pub boundedness_samples: Vec<(f64, f64)>,
    /// Residues `A_k` by level index.
    pub residues: BTreeMap<usize, f64>,
    pub alpha: Option<f64>,
    pub data: SpectralData,
    pub notes: Vec<String>,
}

/// `jp_check`: admissibility of spectral data as the spectrum of some
/// `L(α, v)`.
pub fn jp_check(data: &SpectralData) -> JPReport {
    let mut report = JPReport {
        symmetry: data.mus.iter().chain(&data.active_levels).all(|x| x.is_finite()),
        interlacing: false,
        normalization: false,
        boundedness: false,
        same_sign: false,
        accepted: false,
        normalization_constant: None,
        boundedness_samples: Vec::new(),
        residues: BTreeMap::new(),
        alpha: None,
        data: data.clone(),
        notes: vec!["exponential type is assumed for finite data".into()],
    };
    let levels = match data.check_interlacing().and_then(|_| data.level_indices()) {
        Ok(l) => l,
        Err(e) => {
            report.notes.push(e.to_string());
            return report;
        }
    };
    report.interlacing = true;

    let form = ProductForm::new(&data.active_levels, &data.mus);
    report.normalization_constant = Some(form.a);
    let at = |y: f64| form.eval(Complex64::new(0.0, y));
    report.normalization = form.a.is_finite()
        && form.a != 0.0
        && (at(NORMALIZATION_HEIGHT) - 1.0).norm() <= 1e-6;

    report.boundedness_samples = [1e6, 1e7, 1e8]
        .into_iter()
        .map(|y| (y, y * (at(y) - 1.0).norm()))
        .collect();
    let b: Vec<f64> = report.boundedness_samples.iter().map(|s| s.1).collect();
    report.boundedness =
        b.iter().all(|x| x.is_finite()) && (b[2] - b[1]).abs() <= 1e-3 * b[1].max(1.0);

    report.residues = levels
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, form.residue(i)))
        .collect();
    let signs: Vec<bool> = report.residues.values().map(|&x| x > 0.0).collect();
    report.same_sign = report.residues.values().all(|&x| x != 0.0)
        && signs.iter().all(|&s| s == signs[0]);
    report.alpha = Some(report.residues.values().sum());
    report.accepted = report.symmetry
        && report.interlacing
        && report.normalization
        && report.boundedness
        && report.same_sign;
    report
}

/// `synthesize_from_admissible`: the canonical operator with `α = Σ A_k`
/// and all weight of level `k` on the cosine coefficient.
pub fn synthesize_from_admissible(report: &JPReport) -> Result<OperatorSpec> {
    if !report.accepted {
        return Err(Error::Rejected(
            "spectral data failed the admissibility check".into(),
        ));
    }
    let alpha: f64 = report.residues.values().sum();
    let mut c0 = 0.0;
    let mut terms = Vec::new();
    for (&k, &a) in &report.residues {
        let c = (a / alpha).sqrt();
        if k == 0 {
            c0 = c;
        } else {
            terms.push(Term { k, c, s: 0.0 });
        }
    }
    OperatorSpec::new(alpha, PotentialSpec::new(c0, terms)?)
}
