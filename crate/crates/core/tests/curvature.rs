use proptest::prelude::*;

use warpcurv::genfun::{AnalyticPiece, Continuity, PiecewiseFn};
use warpcurv::multiwarp::{ricci_base, ricci_fiber, riemann_mixed, Fiber, MultiWarpModel};
use warpcurv::verify::textbook_frw_curvature;
use warpcurv::warped::{
    curvature_profile, ricci, riemann_coefficients, scalar_curvature, sectional, FrwModel,
    SectionalReading,
};

fn piece() -> impl Strategy<Value = AnalyticPiece> {
    prop_oneof![
        (0.2f64..3.0, 0.1f64..2.5).prop_map(|(c, p)| AnalyticPiece::power(c, p)),
        (0.2f64..3.0, -0.8f64..0.8).prop_map(|(c, k)| AnalyticPiece::exponential(c, k)),
    ]
}

/// Positive pieces rescaled so that consecutive ones agree in value: a C⁰ glue.
fn continuous_scale_factor() -> impl Strategy<Value = PiecewiseFn> {
    (prop::collection::vec(0.2f64..2.0, 1..=4), prop::collection::vec(piece(), 5)).prop_map(
        |(gaps, raw)| {
            let mut t = 0.3;
            let bps: Vec<f64> = gaps
                .iter()
                .map(|g| {
                    t += g;
                    t
                })
                .collect();
            let mut pieces = vec![raw[0]];
            for (i, &b) in bps.iter().enumerate() {
                let prev = pieces[i].value(b);
                let next = raw[i + 1];
                pieces.push(next.scaled(prev / next.value(b)));
            }
            PiecewiseFn::from_pieces(&pieces, &bps, (0.0, f64::INFINITY)).unwrap()
        },
    )
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

fn sample_points(f: &PiecewiseFn) -> Vec<f64> {
    let end = f.breakpoints().last().copied().unwrap_or(1.0) + 2.0;
    (1..200)
        .map(|j| end * j as f64 / 200.0)
        .filter(|t| !f.is_breakpoint(*t))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn trace_identity_for_every_k(f in continuous_scale_factor(), k in -1i32..=1) {
        let m = FrwModel::new(k, f.clone(), 0.0).unwrap();
        let (uu, sp) = ricci(&m).unwrap();
        let r = scalar_curvature(&m).unwrap();
        for t in sample_points(&f) {
            let (a, b, c) = (uu.eval_regular(t).unwrap(), sp.eval_regular(t).unwrap(), r.eval_regular(t).unwrap());
            prop_assert!(rel(c, 3.0 * b - a, a.abs().max(3.0 * b.abs()).max(c.abs())) <= 1e-12);
        }
        for t in f.breakpoints() {
            prop_assert_eq!(r.atom_at(t), 3.0 * sp.atom_at(t) - uu.atom_at(t));
        }
    }

    #[test]
    fn curvature_atoms_are_scaled_fpp_atoms(f in continuous_scale_factor(), k in -1i32..=1) {
        let m = FrwModel::new(k, f.clone(), 0.0).unwrap();
        let (_, fpp) = m.derivatives().unwrap();
        let (_, b) = riemann_coefficients(&m).unwrap();
        let (uu, sp) = ricci(&m).unwrap();
        let r = scalar_curvature(&m).unwrap();
        for (i, t) in f.breakpoints().into_iter().enumerate() {
            let w = fpp.atom_at(t);
            let ft = f.eval(t).unwrap();
            let (l, rr) = f.limits_at(i, 1);
            let scale = l.abs().max(rr.abs()) / ft;
            for (got, factor) in [(b.atom_at(t), 1.0), (uu.atom_at(t), -3.0), (sp.atom_at(t), 1.0), (r.atom_at(t), 6.0)] {
                prop_assert!(rel(got, factor * w / ft, factor.abs() * scale) <= 1e-14);
            }
        }
        for g in [&b, &uu, &sp, &r] {
            for a in g.atoms() {
                prop_assert!(f.is_breakpoint(a.location));
            }
        }
    }

    #[test]
    fn multiwarp_single_fiber_reduces_to_frw(f in continuous_scale_factor()) {
        let p = f.breakpoints()[0];
        let first = f.segments()[0].law.clone();
        let second = f.segments()[1].law.clone();
        // keep one breakpoint: the model is single-point
        let g = PiecewiseFn::new(vec![
            warpcurv::genfun::Segment::new(first, 0.0, p),
            warpcurv::genfun::Segment::new(second, p, f64::INFINITY),
        ]).unwrap();
        let mw = MultiWarpModel::new(vec![Fiber::flat(3, g.clone())], p).unwrap();
        let base = ricci_base(&mw).unwrap();
        let (uu, _) = ricci(&FrwModel::new(0, g.clone(), 0.0).unwrap()).unwrap();
        prop_assert_eq!(base.atom_at(p), uu.atom_at(p));
        prop_assert_eq!(base.atoms().len(), uu.atoms().len());
        for t in sample_points(&g) {
            let (x, y) = (base.eval_regular(t).unwrap(), uu.eval_regular(t).unwrap());
            prop_assert!(rel(x, y, y.abs()) <= 1e-12);
        }
        for a in base.atoms() {
            prop_assert_eq!(a.location, p);
        }
    }
}

#[test]
fn de_sitter_signs() {
    for k_rate in [-0.7, 0.3, 2.0] {
        let f = PiecewiseFn::single(AnalyticPiece::exponential(1.5, k_rate), 0.0, 10.0).unwrap();
        let m = FrwModel::new(0, f, 0.0).unwrap();
        let (uu, _) = ricci(&m).unwrap();
        let r = scalar_curvature(&m).unwrap();
        for t in [0.5, 3.0, 9.0] {
            let k2: f64 = k_rate * k_rate;
            assert!((uu.eval_regular(t).unwrap() + 3.0 * k2).abs() <= 1e-14 * k2);
            assert!((r.eval_regular(t).unwrap() - 12.0 * k2).abs() <= 1e-14 * k2);
        }
    }
}

#[test]
fn smooth_models_match_textbook_curvature() {
    let laws = [
        AnalyticPiece::power(2.0, 2.0 / 3.0),
        AnalyticPiece::power(0.7, 0.5),
        AnalyticPiece::exponential(1.2, 0.4),
    ];
    for law in laws {
        for k in [-1, 0, 1] {
            let f = PiecewiseFn::single(law, 0.0, 20.0).unwrap();
            let m = FrwModel::new(k, f, 0.0).unwrap();
            let profile = curvature_profile(&m, &[0.7, 2.0, 5.5, 13.0]).unwrap();
            assert!(profile.events.is_empty());
            for s in profile.samples {
                let (a, b, c) = textbook_frw_curvature(|t| law.value(t), k as f64, s.t, 1e-4 * s.t);
                let scale = s.ric_uu.abs().max(s.ric_sp.abs()).max(s.scalar.abs());
                assert!(rel(a, s.ric_uu, scale) < 1e-6, "{law:?} k={k} t={}", s.t);
                assert!(rel(b, s.ric_sp, scale) < 1e-6);
                assert!(rel(c, s.scalar, scale) < 1e-6);
            }
        }
    }
}

#[test]
fn sectional_values() {
    let matter = FrwModel::new(0, PiecewiseFn::single(AnalyticPiece::power(1.0, 2.0 / 3.0), 0.0, 5.0).unwrap(), 0.0).unwrap();
    let s = sectional(&matter, 1.0, 0.0, 1.0, SectionalReading::SquaredSlope).unwrap();
    assert!((s.regular + 2.0 / 9.0).abs() < 1e-15);
    let radiation = FrwModel::new(0, PiecewiseFn::single(AnalyticPiece::power(1.0, 0.5), 0.0, 5.0).unwrap(), 0.0).unwrap();
    let s = sectional(&radiation, 0.0, 1.0, 1.0, SectionalReading::SquaredSlope).unwrap();
    assert!((s.regular - 0.25).abs() < 1e-15);
    let literal = sectional(&radiation, 0.0, 1.0, 1.0, SectionalReading::LinearSlope).unwrap();
    assert!((literal.regular - 0.5).abs() < 1e-15);
    assert!(sectional(&radiation, 1.0, 1.0, 1.0, SectionalReading::SquaredSlope).is_err());
}

fn rd_md_unit() -> PiecewiseFn {
    PiecewiseFn::from_pieces(
        &[AnalyticPiece::power(1.0, 0.5), AnalyticPiece::power(1.0, 2.0 / 3.0)],
        &[1.0],
        (0.0, f64::INFINITY),
    )
    .unwrap()
}

#[test]
fn multiwarp_jump_terms() {
    let flat = PiecewiseFn::single(AnalyticPiece::constant(1.0), 0.0, f64::INFINITY).unwrap();
    let flat = flat.refine(&[1.0]);
    let mw = MultiWarpModel::new(vec![Fiber::flat(3, rd_md_unit()), Fiber::flat(1, flat)], 1.0).unwrap();
    assert_eq!(rd_md_unit().continuity_at(0), Continuity::C0);
    let base = ricci_base(&mw).unwrap();
    assert!((base.atom_at(1.0) + 0.5).abs() < 1e-15);
    let fr = ricci_fiber(&mw, 0).unwrap();
    assert!((fr.coefficient.atom_at(1.0) - 1.0 / 6.0).abs() < 1e-15);
    assert!((fr.point_terms.self_jump - 2.0 / 6.0).abs() < 1e-15);
    assert_eq!(fr.point_terms.cross_jumps, 0.0);

    let line = PiecewiseFn::single(AnalyticPiece::power(1.0, 1.0), 0.0, f64::INFINITY)
        .unwrap()
        .refine(&[1.0]);
    let mixed = MultiWarpModel::new(vec![Fiber::flat(3, rd_md_unit()), Fiber::flat(1, line)], 1.0).unwrap();
    assert!((riemann_mixed(&mixed, 0, 1).unwrap() - 7.0 / 3.0).abs() < 1e-15);
    assert!(riemann_mixed(&mixed, 1, 1).is_err());
}
