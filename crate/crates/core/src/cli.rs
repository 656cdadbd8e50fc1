//! Command-line front end.
//!
//! Every subcommand reads one JSON document and writes one JSON document
//! (to `--output` or stdout). Errors produce `{"error", "detail"}` and a
//! nonzero exit status; a failed verdict exits with status 1.

use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::charfn::{delta0, CharfnContext};
use crate::error::{Error, Result};
use crate::oracle::{oracle_spectrum, DEFAULT_CLUSTER_RADIUS};
use crate::potential::{L0Spectrum, OperatorSpec};
use crate::recovery::{
    invert_three_spectra, jp_check, synthesize_from_admissible, SpectralData, ThreeSpectra,
};
use crate::spectrum::{classify_spectrum, weight_table, ClassifiedSpectrum};

/// Tolerance of the identity checks run by `validate`.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Tolerance of `oracle-compare`.
pub const ORACLE_TOL: f64 = 1e-8;
/// Companion truncation when `--order` is not given.
pub const DEFAULT_K_COMP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Classified spectrum of an operator.
    Forward,
    /// Coupling and potential from three spectra.
    Inverse,
    /// Admissibility report and synthesized operator for spectral data.
    Synth,
    /// Residuals of the characteristic-function identities.
    Validate,
    /// Secular spectrum against the dense-matrix oracle.
    OracleCompare,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "nonlocal-periodic", version, about = "Spectra of -y'' + α⟨y,v⟩v with periodic conditions")]
pub struct JobConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Input JSON (stdin when absent).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output JSON (stdout when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Spectral window in z.
    #[arg(long, global = true)]
    pub window: Option<f64>,
    /// Companion truncation for `forward --three-spectra`, reconstruction
    /// order for `inverse`.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Oracle truncation N.
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// CSV of (λ, Δ(α, λ)) samples for `forward`.
    #[arg(long, global = true)]
    pub emit_plot: Option<PathBuf>,
    /// Emit the base, shifted and squared spectra for `forward`.
    #[arg(long, global = true)]
    pub three_spectra: bool,
}

/// Result of a job: the JSON document and whether every verdict passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Value,
    pub ok: bool,
}

impl Outcome {
    fn pass(document: Value) -> Self {
        Self { document, ok: true }
    }
}

/// Machine-readable error record.
pub fn error_document(err: &Error) -> Value {
    let detail = match err {
        Error::Json(e) => json!({
            "message": err.to_string(),
            "line": e.line(),
            "column": e.column(),
        }),
        _ => json!({ "message": err.to_string() }),
    };
    json!({ "error": err.kind(), "detail": detail })
}

fn read_input(config: &JobConfig) -> Result<String> {
    match &config.input {
        Some(p) => Ok(fs::read_to_string(p)?),
        None => Ok(std::io::read_to_string(std::io::stdin())?),
    }
}

fn check_window(w: f64) -> Result<f64> {
    if w.is_finite() && w > 0.0 {
        Ok(w)
    } else {
        Err(Error::InvalidInput(format!("window {w} must be positive")))
    }
}

/// `run`: executes one job and writes its document.
pub fn run(config: &JobConfig) -> Result<Outcome> {
    let text = read_input(config)?;
    let outcome = execute(config, &text)?;
    let rendered = crate::json::to_string(&outcome.document)?;
    match &config.output {
        Some(p) => fs::write(p, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(outcome)
}

/// Executes one job on the given input text without touching the output.
pub fn execute(config: &JobConfig, text: &str) -> Result<Outcome> {
    match config.command {
        Command::Forward => forward(config, text),
        Command::Inverse => inverse(config, text),
        Command::Synth => synth(text),
        Command::Validate => validate(config, text),
        Command::OracleCompare => oracle_compare(config, text),
    }
}

fn default_window(op: &OperatorSpec) -> f64 {
    L0Spectrum::level(op.potential.order() + 1).max(40.0)
}

fn forward(config: &JobConfig, text: &str) -> Result<Outcome> {
    let op: OperatorSpec = serde_json::from_str(text)?;
    if config.three_spectra {
        let k_comp = config.order.unwrap_or(DEFAULT_K_COMP).max(op.potential.order());
        let (_, spectra) = ThreeSpectra::from_operator(&op, k_comp)?;
        return Ok(Outcome::pass(ThreeSpectra::to_json_value(
            &spectra,
            op.potential.order(),
        )));
    }
    let window = check_window(config.window.unwrap_or_else(|| default_window(&op)))?;
    let spectrum = classify_spectrum(&op, window)?;
    if let Some(path) = &config.emit_plot {
        let ctx = CharfnContext::new(op.clone());
        let top = window.sqrt();
        let n = (top / 0.01).ceil() as usize;
        let mut csv = String::from("lambda,delta\n");
        for i in 0..=n {
            let l = (i as f64 * 0.01).min(top);
            csv.push_str(&format!("{l:.16e},{:.16e}\n", ctx.delta_real(l)));
        }
        fs::write(path, csv)?;
    }
    Ok(Outcome::pass(serde_json::to_value(&spectrum)?))
}

fn inverse(config: &JobConfig, text: &str) -> Result<Outcome> {
    let (mut ts, _) = ThreeSpectra::from_json(text)?;
    if let Some(k) = config.order {
        ts.order = k;
    }
    let inv = invert_three_spectra(&ts)?;
    let max_residual = inv.residuals.values().fold(0.0f64, |a, &b| a.max(b));
    Ok(Outcome::pass(json!({
        "alpha": inv.alpha,
        "potential": inv.potential,
        "residuals": inv.residuals,
        "max_residual": max_residual,
    })))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SynthInput {
    Data(SpectralData),
    Spectrum(ClassifiedSpectrum),
}

fn synth(text: &str) -> Result<Outcome> {
    let data = match serde_json::from_str::<SynthInput>(text)? {
        SynthInput::Data(d) => SpectralData::new(d.active_levels, d.mus, d.window),
        SynthInput::Spectrum(s) => SpectralData::from_classified(&s)?,
    };
    let report = jp_check(&data);
    let operator = if report.accepted {
        Some(synthesize_from_admissible(&report)?)
    } else {
        None
    };
    Ok(Outcome {
        ok: report.accepted,
        document: json!({ "report": report, "operator": operator }),
    })
}

/// Residuals of the identities checked by `validate`.
pub fn identity_residuals(op: &OperatorSpec, lambda_max: f64) -> Result<Value> {
    let ctx = CharfnContext::new(op.clone());
    let table = weight_table(op);

    // Δ(α, λ) = Q(λ²) Δ(0, λ) on a real grid away from 2ℤ
    let mut secular = 0.0f64;
    let n = ((lambda_max - 0.05) / 0.01).floor() as usize;
    for i in 0..=n {
        let l = 0.05 + 0.01 * i as f64;
        if (l - 2.0 * (l / 2.0).round()).abs() < 0.05 {
            continue;
        }
        let d = ctx.delta_real(l);
        let q = table.q(l * l)?;
        let r = (d - q * delta0(Complex64::new(l, 0.0)).re).abs() / d.abs().max(1.0);
        secular = secular.max(r);
    }

    let samples = complex_samples(lambda_max.min(20.0));
    // Φ + Φ* = ṽ ṽ*
    let mut lemma = 0.0f64;
    // Δ(λ) = Δ(−λ) and Δ*(λ) = Δ(λ)
    let mut symmetry = 0.0f64;
    let t = ctx.transforms();
    for &l in &samples {
        let lhs = t.phi(l) + t.phi_star(l);
        let rhs = t.vtilde(l) * t.vtilde_star(l);
        lemma = lemma.max((lhs - rhs).norm() / rhs.norm().max(1.0));
        let d = ctx.delta(l);
        let scale = d.norm().max(1.0);
        symmetry = symmetry
            .max((d - ctx.delta(-l)).norm() / scale)
            .max((d - ctx.delta(l.conj()).conj()).norm() / scale);
    }

    let origin = ctx.delta_real(0.0);
    let v0 = ctx.vtilde(Complex64::new(0.0, 0.0)).norm_sqr();
    let expected = -op.alpha * PI * v0;
    let at_zero = (origin - expected).abs() / expected.abs().max(1e-300);

    let checks = [
        ("secular_factorization", secular),
        ("phi_plus_phi_star", lemma),
        ("delta_symmetry", symmetry),
        ("delta_at_zero", if expected == 0.0 { origin.abs() } else { at_zero }),
    ];
    let mut out = serde_json::Map::new();
    let mut all = true;
    for (name, r) in checks {
        let pass = r <= IDENTITY_TOL;
        all &= pass;
        out.insert(name.into(), json!({ "max_residual": r, "pass": pass }));
    }
    out.insert("tolerance".into(), json!(IDENTITY_TOL));
    out.insert("pass".into(), json!(all));
    Ok(Value::Object(out))
}

/// Deterministic complex sample points in `|Im λ| ≤ 1`, `|λ| ≤ r`.
fn complex_samples(r: f64) -> Vec<Complex64> {
    (0..24)
        .map(|i| {
            let t = i as f64 / 23.0;
            let re = r * (0.05 + 0.9 * t);
            let im = (2.0 * PI * t * 3.0).sin();
            Complex64::new(re.min((r * r - im * im).max(0.0).sqrt()), im)
        })
        .collect()
}

fn validate(config: &JobConfig, text: &str) -> Result<Outcome> {
    let op: OperatorSpec = serde_json::from_str(text)?;
    let window = check_window(config.window.unwrap_or(900.0))?;
    let doc = identity_residuals(&op, window.sqrt())?;
    let ok = doc["pass"].as_bool().unwrap_or(false);
    Ok(Outcome { document: doc, ok })
}

fn oracle_compare(config: &JobConfig, text: &str) -> Result<Outcome> {
    let op: OperatorSpec = serde_json::from_str(text)?;
    let window = check_window(config.window.unwrap_or_else(|| default_window(&op)))?;
    let n = config
        .truncation
        .unwrap_or_else(|| (op.potential.order() + 8).max(2 * window.sqrt().ceil() as usize + 16));
    let spectrum = classify_spectrum(&op, window)?;
    let oracle: Vec<(f64, usize)> = oracle_spectrum(&op, n, DEFAULT_CLUSTER_RADIUS)?
        .into_iter()
        .filter(|(z, _)| *z <= window + ORACLE_TOL)
        .collect();

    let mut rows = Vec::new();
    let mut max_dev = 0.0f64;
    let mut matched = spectrum.entries.len() == oracle.len();
    for (i, e) in spectrum.entries.iter().enumerate() {
        let o = oracle.get(i);
        let dev = o.map_or(f64::INFINITY, |(z, _)| (z - e.z).abs());
        let m_ok = o.is_some_and(|&(_, m)| m == e.m);
        matched &= m_ok;
        max_dev = max_dev.max(dev);
        rows.push(json!({
            "secular": e.z,
            "m": e.m,
            "tag": e.tag,
            "oracle": o.map(|p| p.0),
            "oracle_m": o.map(|p| p.1),
            "deviation": dev,
        }));
    }
    let ok = matched && max_dev <= ORACLE_TOL;
    Ok(Outcome {
        ok,
        document: json!({
            "window": window,
            "truncation": n,
            "rows": rows,
            "max_deviation": max_dev,
            "multiplicities_match": matched,
            "pass": ok,
        }),
    })
}
