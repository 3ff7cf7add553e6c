use proptest::prelude::*;

use warpcurv::genfun::{
    step_reconstruct_fpp, step_reconstruct_fprime, AnalyticPiece, GenFun, Glue, PiecewiseFn,
    Segmentation, Side, ZERO_TOL,
};
use warpcurv::verify::{brute_piecewise_derivative, piece_derivative};

fn piece() -> impl Strategy<Value = AnalyticPiece> {
    prop_oneof![
        (0.2f64..3.0, -2.0f64..3.0).prop_map(|(c, p)| AnalyticPiece::power(c, p)),
        (0.2f64..3.0, -1.0f64..1.0).prop_map(|(c, k)| AnalyticPiece::exponential(c, k)),
        (0.2f64..3.0).prop_map(AnalyticPiece::constant),
    ]
}

/// Up to six breakpoints at least 0.1 apart, starting above 0.3.
fn segmentation() -> impl Strategy<Value = Segmentation> {
    prop::collection::vec(0.1f64..2.0, 1..=6)
        .prop_flat_map(|gaps| {
            let mut t = 0.2;
            let breakpoints: Vec<f64> = gaps
                .iter()
                .map(|g| {
                    t += g;
                    t
                })
                .collect();
            let n = breakpoints.len();
            (Just(breakpoints), prop::collection::vec(piece(), n + 1))
        })
        .prop_map(|(breakpoints, pieces)| {
            Segmentation::new(pieces, breakpoints, (0.0, f64::INFINITY)).unwrap()
        })
}

fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reconstruction_matches_active_piece(seg in segmentation(), us in prop::collection::vec(0.0f64..1.0, 40)) {
        let fp = step_reconstruct_fprime(&seg).unwrap();
        let fpp = step_reconstruct_fpp(&seg, Glue::C0).unwrap();
        let hi = seg.breakpoints().last().unwrap() + 3.0;
        for u in us {
            let t = 0.01 + u * hi;
            if seg.breakpoints().contains(&t) {
                continue;
            }
            for (order, g) in [(1, &fp), (2, &fpp)] {
                let want = brute_piecewise_derivative(seg.pieces(), seg.breakpoints(), order).unwrap().eval(t).unwrap();
                let got = g.eval_regular(t).unwrap();
                prop_assert!(close(got, want, want.abs(), 1e-12), "order {} at t={}: {} vs {}", order, t, got, want);
            }
        }
    }

    #[test]
    fn c0_atoms_are_slope_jumps(seg in segmentation()) {
        let fpp = step_reconstruct_fpp(&seg, Glue::C0).unwrap();
        let p = seg.pieces();
        for (i, &t) in seg.breakpoints().iter().enumerate() {
            let (l, r) = (piece_derivative(&p[i], 1, t), piece_derivative(&p[i + 1], 1, t));
            let jump = r - l;
            let scale = l.abs().max(r.abs());
            if jump.abs() > ZERO_TOL * scale {
                prop_assert!(close(fpp.atom_at(t), jump, scale, 4.0 * f64::EPSILON));
            } else {
                prop_assert_eq!(fpp.atom_at(t), 0.0);
            }
        }
        prop_assert!(step_reconstruct_fpp(&seg, Glue::C1).unwrap().atoms().is_empty());
        prop_assert!(step_reconstruct_fprime(&seg).unwrap().atoms().is_empty());
    }

    #[test]
    fn breakpoint_values_come_from_the_left_piece(seg in segmentation()) {
        let fp = step_reconstruct_fprime(&seg).unwrap();
        for (i, &t) in seg.breakpoints().iter().enumerate() {
            let left = piece_derivative(&seg.pieces()[i], 1, t);
            prop_assert!(close(fp.eval_step_convention(t).unwrap(), left, left.abs(), 1e-12));
        }
    }

    #[test]
    fn derivative_is_linear(
        seg_a in segmentation(),
        others in prop::collection::vec(piece(), 7),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let f = seg_a.to_piecewise();
        let bps = seg_a.breakpoints().to_vec();
        let g = PiecewiseFn::from_pieces(&others[..=bps.len()], &bps, (0.0, f64::INFINITY)).unwrap();
        let (gf, gg) = (GenFun::from(f.clone()), GenFun::from(g.clone()));
        let lhs = gf.scale(a).add(&gg.scale(b)).unwrap().derivative().unwrap();
        let (df, dg) = (gf.derivative().unwrap(), gg.derivative().unwrap());
        let rhs = df.scale(a).add(&dg.scale(b)).unwrap();
        for (i, &t) in bps.iter().enumerate() {
            let (fl, fr) = f.limits_at(i, 0);
            let (gl, gr) = g.limits_at(i, 0);
            let scale = (a * fl).abs() + (a * fr).abs() + (b * gl).abs() + (b * gr).abs();
            prop_assert!(close(lhs.atom_at(t), rhs.atom_at(t), scale, 1e-10),
                "atom at {}: {} vs {}", t, lhs.atom_at(t), rhs.atom_at(t));
            let mid = if i == 0 { t / 2.0 } else { (bps[i - 1] + t) / 2.0 };
            let s = (a * df.eval_regular(mid).unwrap()).abs() + (b * dg.eval_regular(mid).unwrap()).abs();
            prop_assert!(close(lhs.eval_regular(mid).unwrap(), rhs.eval_regular(mid).unwrap(), s, 1e-12));
        }
    }

    #[test]
    fn atoms_appear_exactly_at_value_jumps(seg in segmentation()) {
        // a generic segmentation jumps in value; its derivative has one atom per jump
        let f = seg.to_piecewise();
        let d = GenFun::from(f.clone()).derivative().unwrap();
        for (i, &t) in seg.breakpoints().iter().enumerate() {
            let (l, r) = f.limits_at(i, 0);
            let emitted = d.atom_at(t) != 0.0;
            prop_assert_eq!(emitted, (r - l).abs() > ZERO_TOL * l.abs().max(r.abs()));
            if emitted {
                prop_assert_eq!(d.atom_at(t), r - l);
            }
        }
        for a in d.atoms() {
            prop_assert!(seg.breakpoints().contains(&a.location));
        }
    }
}

#[test]
fn one_sided_limits_at_a_unit_glue() {
    let f = PiecewiseFn::from_pieces(
        &[AnalyticPiece::power(1.0, 0.5), AnalyticPiece::power(1.0, 2.0 / 3.0)],
        &[1.0],
        (0.0, f64::INFINITY),
    )
    .unwrap();
    let fp = GenFun::from(f).derivative().unwrap();
    assert_eq!(fp.eval_one_sided(1.0, Side::Left).unwrap(), 0.5);
    assert!((fp.eval_one_sided(1.0, Side::Right).unwrap() - 2.0 / 3.0).abs() < 1e-16);
    let fpp = fp.derivative().unwrap();
    assert_eq!(fpp.atoms().len(), 1);
    assert!((fpp.atom_at(1.0) - 1.0 / 6.0).abs() < 1e-16);
}

#[test]
fn differentiating_an_atom_is_refused() {
    let f = PiecewiseFn::from_pieces(
        &[AnalyticPiece::constant(1.0), AnalyticPiece::constant(2.0)],
        &[1.0],
        (0.0, 2.0),
    )
    .unwrap();
    let d = GenFun::from(f).derivative().unwrap();
    assert_eq!(d.atom_at(1.0), 1.0);
    assert!(d.derivative().is_err());
}
