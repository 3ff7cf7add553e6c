//! Cross-checks of a model against the oracles, collected into a report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::brute::brute_piecewise_derivative;
use super::mollify::{atom_extraction, centered_bump, initial_spec, random_bumps, weak_convergence};
use crate::cosmo::{
    c1_matching_residual, continuity_check, eos_scaling_exponent, frw_derivatives, CosmologyParams,
};
use crate::error::Result;
use crate::genfun::{step_reconstruct_fpp, step_reconstruct_fprime, AnalyticPiece, Glue, PiecewiseFn, Segmentation};
use crate::warped::{ricci, scalar_curvature, FrwModel};

/// Largest relative disagreement tolerated for quantities computed in closed form.
pub const CLOSED_FORM_TOL: f64 = 1e-12;
/// "Exact" for delta weights: a few roundings of the one-sided slopes.
pub const ATOM_ULPS: f64 = 4.0 * f64::EPSILON;
/// Relative error of the finite-difference curvature oracle.
pub const TEXTBOOK_TOL: f64 = 1e-5;
pub const RATIO_BAND: (f64, f64) = (1.5, 4.0);
pub const ATOM_EXTRACTION_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl Check {
    /// Passes when `measured <= threshold`.
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured <= threshold,
            measured,
            threshold,
        }
    }

    /// Passes when `measured >= threshold`.
    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured >= threshold,
            measured,
            threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random points per segment for the pointwise checks.
    pub samples: usize,
    /// Randomized test functions for the weak-convergence study.
    pub bumps: usize,
    pub halvings: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0x5eed,
            samples: 200,
            bumps: 10,
            halvings: 4,
        }
    }
}

/// `|a - b| / |b|`, or `|a|` when `b` is zero.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

/// `count` random points strictly inside `(lo, hi)`, log-uniform when `lo > 0`.
/// Unbounded ends are cut at `10⁻³ hi` and `max(2 lo, lo + 1)`.
pub fn random_interior_points(lo: f64, hi: f64, count: usize, rng: &mut impl Rng) -> Vec<f64> {
    let hi = if hi.is_finite() { hi } else { (2.0 * lo).max(lo + 1.0) };
    let lo = if lo == 0.0 { hi * 1e-3 } else { lo };
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen_range(0.02..0.98);
            if lo > 0.0 {
                lo * (hi / lo).powf(u)
            } else {
                lo + (hi - lo) * u
            }
        })
        .collect()
}

/// `f'`, `f''` and FRW curvature from central differences of `f`, using the
/// textbook expressions `R₀₀ = -3 f''/f`, `R_ij/g_ij = f''/f + 2(f'² + k)/f²`,
/// `R = 6(f''/f + (f'² + k)/f²)`.
pub fn textbook_frw_curvature(f: impl Fn(f64) -> f64, k: f64, t: f64, h: f64) -> (f64, f64, f64) {
    let (fm, f0, fp) = (f(t - h), f(t), f(t + h));
    let d1 = (fp - fm) / (2.0 * h);
    let d2 = (fp - 2.0 * f0 + fm) / (h * h);
    let accel = d2 / f0;
    let spatial = (d1 * d1 + k) / (f0 * f0);
    (-3.0 * accel, accel + 2.0 * spatial, 6.0 * (accel + spatial))
}

/// The single closed-form piece of each segment, if every segment has one.
fn single_pieces(f: &PiecewiseFn) -> Option<Vec<AnalyticPiece>> {
    f.segments()
        .iter()
        .map(|s| match s.law.as_lin()?.terms() {
            [p] => Some(*p),
            [] => Some(AnalyticPiece::constant(0.0)),
            _ => None,
        })
        .collect()
}

pub fn verify_model(m: &FrwModel, opts: &VerifyOptions) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    let f = m.scale_factor();
    let breakpoints = f.breakpoints();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let points: Vec<f64> = f
        .segments()
        .iter()
        .flat_map(|s| random_interior_points(s.lo, s.hi, opts.samples, &mut rng))
        .collect();

    let (_, fpp) = m.derivatives()?;
    if let Some(pieces) = single_pieces(f) {
        let seg = Segmentation::new(pieces.clone(), breakpoints.clone(), f.domain())?;
        let fp_steps = step_reconstruct_fprime(&seg)?;
        let fpp_steps = step_reconstruct_fpp(&seg, Glue::C0)?;
        for (name, order, g) in [
            ("fprime_reconstruction", 1, &fp_steps),
            ("fpp_reconstruction", 2, &fpp_steps),
        ] {
            let brute = brute_piecewise_derivative(&pieces, &breakpoints, order)?;
            let mut worst = 0.0f64;
            for &t in &points {
                worst = worst.max(rel_err(g.eval_regular(t)?, brute.eval(t)?));
            }
            checks.push(Check::at_most(name, worst, CLOSED_FORM_TOL));
        }
        let brute = brute_piecewise_derivative(&pieces, &breakpoints, 2)?;
        for (i, &t) in breakpoints.iter().enumerate() {
            let (l, r) = f.limits_at(i, 1);
            let scale = l.abs().max(r.abs()).max(f64::MIN_POSITIVE);
            let expected = brute.jump_below(i);
            let worst = (fpp_steps.atom_at(t) - expected)
                .abs()
                .max((fpp.atom_at(t) - expected).abs())
                / scale;
            checks.push(Check::at_most(format!("fpp_atom[t={t:e}]"), worst, ATOM_ULPS));
        }
    }

    let (uu, sp) = ricci(m)?;
    let scalar = scalar_curvature(m)?;
    let mut worst = 0.0f64;
    for &t in &points {
        let (a, b, c) = (uu.eval_regular(t)?, sp.eval_regular(t)?, scalar.eval_regular(t)?);
        let scale = a.abs().max(3.0 * b.abs()).max(c.abs());
        if scale > 0.0 {
            worst = worst.max((c - (-a + 3.0 * b)).abs() / scale);
        }
    }
    checks.push(Check::at_most("trace_identity_regular", worst, CLOSED_FORM_TOL));
    let atom_mismatch = breakpoints
        .iter()
        .map(|&t| (scalar.atom_at(t) - (-uu.atom_at(t) + 3.0 * sp.atom_at(t))).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("trace_identity_atoms", atom_mismatch, 0.0));

    let mut worst = 0.0f64;
    for &t in &points {
        let h = 2e-4 * t.abs().max(1e-3);
        let Ok(i) = f.locate(t) else { continue };
        let crate::genfun::Location::Interior(i) = i else { continue };
        let seg = &f.segments()[i];
        if !(t - h > seg.lo && t + h < seg.hi) {
            continue;
        }
        let (a, b, c) = textbook_frw_curvature(|s| seg.law.value(s), m.k() as f64, t, h);
        let exact = (uu.eval_regular(t)?, sp.eval_regular(t)?, scalar.eval_regular(t)?);
        let scale = exact.0.abs().max(exact.1.abs()).max(exact.2.abs());
        if scale > 0.0 {
            let e = (a - exact.0).abs().max((b - exact.1).abs()).max((c - exact.2).abs());
            worst = worst.max(e / scale);
        }
    }
    checks.push(Check::at_most("textbook_oracle", worst, TEXTBOOK_TOL));

    if !breakpoints.is_empty() && opts.bumps > 0 {
        let (mut lo_ratio, mut hi_ratio, mut growth) = (f64::INFINITY, 0.0f64, 0.0f64);
        for bump in random_bumps(f, opts.bumps, opts.seed)? {
            let study = weak_convergence(f, &bump, initial_spec(&bump)?, opts.halvings)?;
            for r in study.ratios() {
                lo_ratio = lo_ratio.min(r);
                hi_ratio = hi_ratio.max(r);
                growth = growth.max(1.0 / r);
            }
        }
        checks.push(Check::at_most("weak_convergence_monotone", growth, 1.0));
        checks.push(Check::at_least("weak_convergence_ratio_min", lo_ratio, RATIO_BAND.0));
        checks.push(Check::at_most("weak_convergence_ratio_max", hi_ratio, RATIO_BAND.1));

        for (i, &t) in breakpoints.iter().enumerate() {
            let bump = centered_bump(f, t)?;
            let mut spec = initial_spec(&bump)?;
            for _ in 0..opts.halvings {
                spec = spec.halved();
            }
            let estimate = atom_extraction(f, &spec, t, &bump)?;
            let expected = fpp.atom_at(t);
            let (l, r) = f.limits_at(i, 1);
            let err = atom_relative_error(estimate, expected, l.abs().max(r.abs()));
            checks.push(Check::at_most(format!("atom_extraction[t={t:e}]"), err, ATOM_EXTRACTION_TOL));
        }
    }
    Ok(VerificationReport { checks })
}

/// Error relative to the weight, or to the one-sided slope scale when the
/// weight itself is negligible (a C¹ glue).
pub fn atom_relative_error(estimate: f64, expected: f64, slope_scale: f64) -> f64 {
    let err = (estimate - expected).abs();
    if expected.abs() > 1e-8 * slope_scale {
        err / expected.abs()
    } else if slope_scale > 0.0 {
        err / slope_scale
    } else {
        err
    }
}

/// Checks specific to the three-phase cosmology: the closed-form `f'`, `f''`
/// against the generic reconstruction, and (for `Λ = 0`) the fluid
/// equation of state on each phase.
pub fn verify_cosmology(params: &CosmologyParams, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let seg = Segmentation::new(
        params.pieces().to_vec(),
        vec![params.t1(), params.t2()],
        (0.0, f64::INFINITY),
    )?;
    let (fp, fpp) = frw_derivatives(params)?;
    let generic = (step_reconstruct_fprime(&seg)?, step_reconstruct_fpp(&seg, Glue::C0)?);
    let model = params.model();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xc05);
    let mut worst = 0.0f64;
    for s in model.scale_factor().segments() {
        for t in random_interior_points(s.lo, s.hi, opts.samples, &mut rng) {
            worst = worst
                .max(rel_err(fp.eval_regular(t)?, generic.0.eval_regular(t)?))
                .max(rel_err(fpp.eval_regular(t)?, generic.1.eval_regular(t)?));
        }
    }
    checks.push(Check::at_most("closed_form_derivatives_regular", worst, CLOSED_FORM_TOL));
    let f = model.scale_factor();
    let mut worst = 0.0f64;
    for (i, t) in [params.t1(), params.t2()].into_iter().enumerate() {
        let (l, r) = f.limits_at(i, 1);
        worst = worst.max((fpp.atom_at(t) - generic.1.atom_at(t)).abs() / l.abs().max(r.abs()));
    }
    checks.push(Check::at_most("closed_form_derivatives_atoms", worst, ATOM_ULPS));

    let (r1, _) = c1_matching_residual(params);
    checks.push(Check::at_least(
        "c1_mismatch_at_t1",
        r1.abs() / (0.5 * params.c0() * params.t1().powf(-0.5)),
        1e-3,
    ));

    if params.lambda() == 0.0 {
        for (phase, expected) in [(0usize, -4.0), (1, -3.0), (2, 0.0)] {
            let slope = eos_scaling_exponent(&model, phase)?;
            checks.push(Check::at_most(
                format!("eos_exponent[phase={phase}]"),
                (slope - expected).abs(),
                1e-6,
            ));
            let residual = continuity_check(&model, phase)?;
            checks.push(Check::at_most(
                format!("continuity_residual[phase={phase}]"),
                residual.relative,
                1e-8,
            ));
        }
    }
    Ok(checks)
}
