//! Property-based invariants across modules.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nonlocal_periodic::charfn::{delta0, CharfnContext};
use nonlocal_periodic::oracle::{oracle_spectrum, DEFAULT_CLUSTER_RADIUS};
use nonlocal_periodic::quadrature::Composite;
use nonlocal_periodic::recovery::{
    jp_check, synthesize_from_admissible, weights_from_spectrum, SpectralData,
};
use nonlocal_periodic::spectrum::{
    all_secular_roots, classify_spectrum, eigenfunction, interlaces, weight_table, Orientation,
};
use nonlocal_periodic::{ClassifiedSpectrum, L0Spectrum, OperatorSpec, PotentialSpec, Tag};
use num_complex::Complex64;
use proptest::prelude::*;

use common::complete_window;

fn potential() -> impl Strategy<Value = PotentialSpec> {
    (1usize..=8)
        .prop_flat_map(|k| {
            (
                -1.0f64..1.0,
                prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), k),
            )
        })
        .prop_filter_map("zero potential", |(c0, cs)| {
            let pairs: Vec<(usize, f64, f64)> =
                cs.iter().enumerate().map(|(i, &(c, s))| (i + 1, c, s)).collect();
            PotentialSpec::build(c0, &pairs, true).ok()
        })
}

fn coupling() -> impl Strategy<Value = f64> {
    prop_oneof![-5.0f64..-0.01, 0.01f64..5.0]
}

fn operator() -> impl Strategy<Value = OperatorSpec> {
    (coupling(), potential()).prop_map(|(a, v)| OperatorSpec::new(a, v).unwrap())
}

fn weights() -> impl Strategy<Value = (f64, BTreeMap<usize, f64>)> {
    (
        prop_oneof![Just(1.0), Just(-1.0)],
        prop::collection::btree_map(0usize..12, 1e-6f64..3.0, 1..6),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn secular_roots_interlace((sign, w) in weights()) {
        let table = nonlocal_periodic::WeightTable::from_weights(
            w.iter().map(|(&k, &x)| (k, sign * x)).collect(),
        );
        let poles: Vec<f64> = w.keys().map(|&k| L0Spectrum::level(k)).collect();
        let roots = all_secular_roots(&table).unwrap();
        let o = Orientation::of_sign(sign).unwrap();
        prop_assert!(interlaces(&poles, &roots, o));
        for &mu in &roots {
            let scale: f64 = w.iter().map(|(&k, &x)| x / (L0Spectrum::level(k) - mu).abs()).sum();
            prop_assert!(table.q(mu).unwrap().abs() <= 1e-9 * scale.max(1.0));
        }
    }

    #[test]
    fn delta_factorizes_through_the_secular_function(op in operator(), l in 0.05f64..30.0) {
        prop_assume!((l - 2.0 * (l / 2.0).round()).abs() > 0.05);
        let ctx = CharfnContext::new(op.clone());
        let d = ctx.delta_real(l);
        let q = weight_table(&op).q(l * l).unwrap();
        prop_assert!((d - q * delta0(Complex64::new(l, 0.0)).re).abs() <= 1e-9 * d.abs().max(1.0));
    }

    #[test]
    fn delta_is_even_and_real_on_the_real_axis(op in operator(), re in -15.0f64..15.0, im in -2.0f64..2.0) {
        let ctx = CharfnContext::new(op);
        let l = Complex64::new(re, im);
        let d = ctx.delta(l);
        let scale = d.norm().max(1.0);
        prop_assert!((d - ctx.delta(-l)).norm() <= 1e-10 * scale);
        prop_assert!((d - ctx.delta(l.conj()).conj()).norm() <= 1e-10 * scale);
    }

    #[test]
    fn phi_relation_holds_relative_to_size(op in operator(), r in 0.0f64..20.0, t in 0.0f64..(2.0 * PI)) {
        let tr = CharfnContext::new(op).transforms().clone();
        let l = Complex64::from_polar(r, t);
        let lhs = tr.phi(l) + tr.phi_star(l);
        let rhs = tr.vtilde(l) * tr.vtilde_star(l);
        let scale = lhs.norm().max(rhs.norm()).max(tr.phi(l).norm()).max(1.0);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn weights_survive_the_spectrum(op in operator()) {
        let s = classify_spectrum(&op, complete_window(&op)).unwrap();
        let got = weights_from_spectrum(&SpectralData::from_classified(&s).unwrap()).unwrap();
        let want = weight_table(&op);
        for k in 0..=op.potential.order() {
            prop_assert!((got.get(k) - want.get(k)).abs() <= 1e-9 * want.get(k).abs().max(1.0));
        }
    }

    #[test]
    fn eigenvalue_count_is_stable(op in operator()) {
        let k = op.potential.order();
        let window = L0Spectrum::level(k + 1) - 1.0;
        let s = classify_spectrum(&op, window).unwrap();
        let base: usize = L0Spectrum::levels_up_to(window).map(L0Spectrum::multiplicity).sum();
        prop_assert_eq!(s.flattened().len(), base);
    }

    #[test]
    fn synthesis_fixes_alpha_and_weights(op in operator()) {
        let s = classify_spectrum(&op, complete_window(&op)).unwrap();
        let report = jp_check(&SpectralData::from_classified(&s).unwrap());
        prop_assert!(report.accepted);
        let synth = synthesize_from_admissible(&report).unwrap();
        prop_assert!((synth.alpha - op.alpha).abs() <= 1e-9 * op.alpha.abs().max(1.0));
        let mut a: Vec<f64> = weight_table(&synth).weights.values().copied().collect();
        let mut b: Vec<f64> = weight_table(&op).weights.values().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn permuted_roots_are_rejected(op in operator(), shift in 1usize..4) {
        let s = classify_spectrum(&op, complete_window(&op)).unwrap();
        let data = SpectralData::from_classified(&s).unwrap();
        prop_assume!(data.mus.len() >= 2);
        // move the lowest root into a later gap
        let j = shift.min(data.mus.len() - 1);
        let mut mus = data.mus.clone();
        mus[0] = 0.5 * (data.mus[j] + data.active_levels[j]);
        let mutant = SpectralData::new(data.active_levels.clone(), mus, data.window);
        prop_assert!(!jp_check(&mutant).accepted);
    }

    #[test]
    fn json_records_round_trip(op in operator()) {
        let text = serde_json::to_string(&op).unwrap();
        let back: OperatorSpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &op);
        let s = classify_spectrum(&op, 100.0).unwrap();
        let text = nonlocal_periodic::json::to_string(&s).unwrap();
        let back: ClassifiedSpectrum = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn oracle_matches_the_secular_solver(op in operator()) {
        let s = classify_spectrum(&op, 300.0).unwrap();
        let o: Vec<(f64, usize)> = oracle_spectrum(&op, 30, DEFAULT_CLUSTER_RADIUS)
            .unwrap()
            .into_iter()
            .filter(|(z, _)| *z <= 300.0 + 1e-8)
            .collect();
        prop_assert_eq!(o.len(), s.entries.len());
        for (e, (z, m)) in s.entries.iter().zip(&o) {
            prop_assert!((e.z - z).abs() <= 1e-8);
            prop_assert_eq!(e.m, *m);
        }
    }
}

/// The 5-point residual of the secular eigenfunctions shrinks like `h⁴`
/// and its Richardson combination sits far below it.
#[test]
fn eigenfunction_residual_is_stencil_limited() {
    let op = OperatorSpec::new(
        2.0,
        PotentialSpec::build(0.3, &[(2, 0.5, -0.2), (6, 0.4, 0.6)], true).unwrap(),
    )
    .unwrap();
    let q = Composite::new();
    let s = classify_spectrum(&op, complete_window(&op)).unwrap();
    for e in s.entries.iter().filter(|e| e.tag == Tag::Sigma2) {
        let u = eigenfunction(&op, e).unwrap().functions[0].normalized();
        let uv: f64 = q.integrate(0.0, PI, |t| u.value(t) * op.potential.value(t));
        let d2 = |x: f64, h: f64| {
            (-u.value(x + 2.0 * h) + 16.0 * u.value(x + h) - 30.0 * u.value(x)
                + 16.0 * u.value(x - h)
                - u.value(x - 2.0 * h))
                / (12.0 * h * h)
        };
        let h = PI / 1000.0;
        let (mut coarse, mut fine, mut extrapolated) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..=200 {
            let x = PI * i as f64 / 200.0;
            let rest = op.alpha * uv * op.potential.value(x) - e.z * u.value(x);
            let (a, b) = (d2(x, h), d2(x, 0.5 * h));
            coarse = coarse.max((rest - a).abs());
            fine = fine.max((rest - b).abs());
            extrapolated = extrapolated.max((rest - (16.0 * b - a) / 15.0).abs());
        }
        assert!(extrapolated < 1e-8, "z = {}: {extrapolated:e}", e.z);
        if coarse > 1e-6 {
            let ratio = coarse / fine;
            assert!((ratio - 16.0).abs() < 1.5, "z = {}: ratio {ratio}", e.z);
        }
    }
}
