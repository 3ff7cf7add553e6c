//! End-to-end acceptance suite. Runs every criterion, prints one PASS/FAIL
//! line each, and exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use warpcurv::cosmo::{
    build_scale_factor, c1_matching_residual, continuity_check, eos_scaling_exponent, fluid_state,
    frw_derivatives, CosmologyParams,
};
use warpcurv::genfun::{
    step_reconstruct_fpp, step_reconstruct_fprime, AnalyticPiece, GenFun, Glue, PiecewiseFn,
    Segmentation,
};
use warpcurv::multiwarp::{ricci_base, ricci_fiber, Fiber, MultiWarpModel};
use warpcurv::verify::{
    brute_piecewise_derivative, random_interior_points, rel_err, verify_model, VerifyOptions,
    ATOM_ULPS, CLOSED_FORM_TOL,
};
use warpcurv::warped::{ricci, scalar_curvature, FrwModel};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn atom_err(got: f64, expected: f64, scale: f64) -> f64 {
    (got - expected).abs() / scale.max(f64::MIN_POSITIVE)
}

fn slope_scale(f: &PiecewiseFn, i: usize) -> f64 {
    let (l, r) = f.limits_at(i, 1);
    l.abs().max(r.abs())
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| lo * (hi / lo).powf((j as f64 + 0.5) / count as f64))
        .collect()
}

fn random_piece(rng: &mut impl Rng) -> AnalyticPiece {
    let coeff = rng.gen_range(0.5..2.0);
    if rng.gen_bool(0.5) {
        AnalyticPiece::power(coeff, rng.gen_range(-2.0..3.0))
    } else {
        AnalyticPiece::exponential(coeff, rng.gen_range(-1.0..1.0))
    }
}

fn reconstruction_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_regular, mut worst_atom) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let mut breakpoints: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..10.0)).collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let pieces: Vec<AnalyticPiece> = (0..=breakpoints.len()).map(|_| random_piece(&mut rng)).collect();
        let seg = Segmentation::new(pieces.clone(), breakpoints.clone(), (0.0, f64::INFINITY))
            .map_err(|e| e.to_string())?;
        let fp = step_reconstruct_fprime(&seg).map_err(|e| e.to_string())?;
        let fpp = step_reconstruct_fpp(&seg, Glue::C0).map_err(|e| e.to_string())?;
        let points = random_interior_points(0.05, 12.0, 500, &mut rng);
        for (order, g) in [(1, &fp), (2, &fpp)] {
            let brute = brute_piecewise_derivative(&pieces, &breakpoints, order).map_err(|e| e.to_string())?;
            for &t in &points {
                let (Ok(got), Ok(want)) = (g.eval_regular(t), brute.eval(t)) else {
                    continue;
                };
                worst_regular = worst_regular.max(rel_err(got, want));
            }
        }
        let brute = brute_piecewise_derivative(&pieces, &breakpoints, 2).map_err(|e| e.to_string())?;
        let f = seg.to_piecewise();
        for (i, &t) in breakpoints.iter().enumerate() {
            worst_atom = worst_atom.max(atom_err(fpp.atom_at(t), brute.jump_below(i), slope_scale(&f, i)));
        }
    }
    ensure(
        worst_regular <= 1e-12 && worst_atom <= ATOM_ULPS,
        format!("regular rel err {worst_regular:.3e}, atom err {worst_atom:.3e} (slope-relative)"),
    )
}

fn compare_genfun(a: &GenFun, b: &GenFun, f: &PiecewiseFn, points: &[f64]) -> (f64, f64) {
    let mut regular = 0.0f64;
    for &t in points {
        regular = regular.max(rel_err(a.eval_regular(t).unwrap(), b.eval_regular(t).unwrap()));
    }
    let atoms = f
        .breakpoints()
        .iter()
        .enumerate()
        .map(|(i, &t)| atom_err(a.atom_at(t), b.atom_at(t), slope_scale(f, i)))
        .fold(0.0, f64::max);
    (regular, atoms)
}

fn closed_form_specialization() -> Outcome {
    let params = CosmologyParams::standard();
    let f = build_scale_factor(&params);
    let seg = Segmentation::new(params.pieces().to_vec(), f.breakpoints(), f.domain()).map_err(|e| e.to_string())?;
    let (fp, fpp) = frw_derivatives(&params).map_err(|e| e.to_string())?;
    let generic_fp = step_reconstruct_fprime(&seg).map_err(|e| e.to_string())?;
    let generic_fpp = step_reconstruct_fpp(&seg, Glue::C0).map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for s in f.segments() {
        points.extend(random_interior_points(s.lo, s.hi, 300, &mut rng));
    }
    let (r1, a1) = compare_genfun(&fp, &generic_fp, &f, &points);
    let (r2, a2) = compare_genfun(&fpp, &generic_fpp, &f, &points);

    let unit = CosmologyParams::new(1.0, 1.0, 10.0, 2.0 / 30.0, 0.0).map_err(|e| e.to_string())?;
    let (_, unit_fpp) = frw_derivatives(&unit).map_err(|e| e.to_string())?;
    let sixth = unit_fpp.atom_at(1.0);
    let sixth_err = (sixth - 1.0 / 6.0).abs() / (1.0 / 2.0);
    ensure(
        r1.max(r2) <= CLOSED_FORM_TOL && a1.max(a2) <= ATOM_ULPS && sixth_err <= ATOM_ULPS,
        format!(
            "regular rel err {:.3e}, atom err {:.3e}, unit atom {sixth:.17} vs 1/6",
            r1.max(r2),
            a1.max(a2)
        ),
    )
}

fn radiation_flatness() -> Outcome {
    let params = CosmologyParams::standard();
    let scalar = scalar_curvature(&params.model()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for t in log_spaced(1.0, params.t1(), 1000) {
        worst = worst.max(scalar.eval_regular(t).map_err(|e| e.to_string())?.abs());
    }
    ensure(worst <= 1e-12, format!("max |R| on (1, t1) = {worst:.3e}"))
}

fn closed_form_curvature() -> Outcome {
    let params = CosmologyParams::standard();
    let scalar = scalar_curvature(&params.model()).map_err(|e| e.to_string())?;
    let k = params.k_rate();
    let (mut md, mut ld) = (0.0f64, 0.0f64);
    for t in log_spaced(params.t1(), params.t2(), 100) {
        md = md.max(rel_err(scalar.eval_regular(t).unwrap(), 4.0 / (3.0 * t * t)));
    }
    for t in log_spaced(params.t2(), 10.0 * params.t2(), 100) {
        ld = ld.max(rel_err(scalar.eval_regular(t).unwrap(), 12.0 * k * k));
    }
    ensure(md.max(ld) <= 1e-12, format!("MD rel err {md:.3e}, LD rel err {ld:.3e}"))
}

fn fluid_recovery() -> Outcome {
    let params = CosmologyParams::standard();
    let m = params.model();
    let segments = [
        (1.0, params.t1(), 1.0 / 3.0, -4.0),
        (params.t1(), params.t2(), 0.0, -3.0),
        (params.t2(), 10.0 * params.t2(), -1.0, 0.0),
    ];
    let (mut w_err, mut eos_err, mut cont) = (0.0f64, 0.0f64, 0.0f64);
    for (phase, (lo, hi, w, exponent)) in segments.into_iter().enumerate() {
        for t in log_spaced(lo, hi, 200) {
            let s = fluid_state(&m, t).map_err(|e| e.to_string())?;
            w_err = w_err.max((s.pressure - w * s.rho).abs() / s.rho.abs());
        }
        let fitted = eos_scaling_exponent(&m, phase).map_err(|e| e.to_string())?;
        eos_err = eos_err.max((fitted - exponent).abs());
        cont = cont.max(continuity_check(&m, phase).map_err(|e| e.to_string())?.relative);
    }
    ensure(
        w_err <= 1e-12 && eos_err <= 1e-6 && cont <= 1e-8,
        format!("|P - wρ|/ρ {w_err:.3e}, exponent err {eos_err:.3e}, continuity {cont:.3e}"),
    )
}

fn trace_identity() -> Outcome {
    let params = CosmologyParams::standard();
    let f = build_scale_factor(&params);
    let (mut regular, mut atoms) = (0.0f64, 0.0f64);
    for k in [-1, 0, 1] {
        let m = FrwModel::new(k, f.clone(), 0.0).map_err(|e| e.to_string())?;
        let (uu, sp) = ricci(&m).map_err(|e| e.to_string())?;
        let scalar = scalar_curvature(&m).map_err(|e| e.to_string())?;
        for t in log_spaced(1.0, 10.0 * params.t2(), 1000) {
            if f.is_breakpoint(t) {
                continue;
            }
            let (a, b, c) = (uu.eval_regular(t).unwrap(), sp.eval_regular(t).unwrap(), scalar.eval_regular(t).unwrap());
            let scale = a.abs().max(3.0 * b.abs()).max(c.abs());
            regular = regular.max((c - (3.0 * b - a)).abs() / scale);
        }
        for t in f.breakpoints() {
            atoms = atoms.max((scalar.atom_at(t) - (3.0 * sp.atom_at(t) - uu.atom_at(t))).abs());
        }
    }
    ensure(
        regular <= 1e-12 && atoms == 0.0,
        format!("regular rel err {regular:.3e}, atom mismatch {atoms:.3e}"),
    )
}

fn c1_infeasibility() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for c0 in [1e-3, 1.0, 7.5, 1e4] {
        let t2 = 9.8e9;
        let params = CosmologyParams::new(c0, 4.7e4, t2, 2.0 / (3.0 * t2), 0.0).map_err(|e| e.to_string())?;
        let (r1, r2) = c1_matching_residual(&params);
        let floor = 1e-3 * 0.5 * c0 * 4.7e4f64.powf(-0.5);
        ok &= r1.abs() >= floor && r2.abs() <= 1e-12;
        detail.push(format!("c0={c0:e}: |r1|/floor {:.1}, |r2| {:.1e}", r1.abs() / floor, r2.abs()));
    }
    ensure(ok, detail.join("; "))
}

fn mollifier_convergence() -> Outcome {
    let opts = VerifyOptions::default();
    let mut detail = Vec::new();
    let mut ok = true;
    let t2 = 9.8e9;
    let variants = [
        ("default K", CosmologyParams::standard()),
        ("K = 1/t2", CosmologyParams::new(1.0, 4.7e4, t2, 1.0 / t2, 0.0).map_err(|e| e.to_string())?),
    ];
    for (label, params) in variants {
        let report = verify_model(&params.model(), &opts).map_err(|e| e.to_string())?;
        let wanted = report
            .checks
            .iter()
            .filter(|c| c.name.starts_with("weak_convergence") || c.name.starts_with("atom_extraction"));
        let mut parts = Vec::new();
        for c in wanted {
            ok &= c.passed;
            parts.push(format!("{}={:.4e}", c.name, c.measured));
        }
        detail.push(format!("[{label}] {}", parts.join(" ")));
    }
    ensure(ok, detail.join(" "))
}

fn multiwarp_reduction() -> Outcome {
    // C⁰ glue: t^{1/2} into a matched t^{2/3}
    let c0_glue = PiecewiseFn::from_pieces(
        &[AnalyticPiece::power(1.0, 0.5), AnalyticPiece::power(1.0, 2.0 / 3.0)],
        &[1.0],
        (0.0, f64::INFINITY),
    )
    .map_err(|e| e.to_string())?;
    // C¹ glue: t^{2/3} into the exponential matching value and slope at t = 3
    let p = 3.0f64;
    let k = 2.0 / (3.0 * p);
    let c1_glue = PiecewiseFn::from_pieces(
        &[
            AnalyticPiece::power(1.0, 2.0 / 3.0),
            AnalyticPiece::exponential(p.powf(2.0 / 3.0) * (-k * p).exp(), k),
        ],
        &[p],
        (0.0, f64::INFINITY),
    )
    .map_err(|e| e.to_string())?;

    let (mut regular, mut atoms, mut c1_terms) = (0.0f64, 0.0f64, 0.0f64);
    for (f, p) in [(&c0_glue, 1.0), (&c1_glue, 3.0)] {
        let mw = MultiWarpModel::new(vec![Fiber::flat(3, f.clone())], p).map_err(|e| e.to_string())?;
        let base = ricci_base(&mw).map_err(|e| e.to_string())?;
        let (uu, _) = ricci(&FrwModel::new(0, f.clone(), 0.0).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for t in log_spaced(0.01, 100.0, 1000) {
            if f.is_breakpoint(t) {
                continue;
            }
            regular = regular.max(rel_err(base.eval_regular(t).unwrap(), uu.eval_regular(t).unwrap()));
        }
        atoms = atoms.max((base.atom_at(p) - uu.atom_at(p)).abs());
    }
    let two = MultiWarpModel::new(
        vec![Fiber::flat(3, c1_glue.clone()), Fiber::flat(2, c1_glue.clone())],
        p,
    )
    .map_err(|e| e.to_string())?;
    for i in 0..2 {
        let fr = ricci_fiber(&two, i).map_err(|e| e.to_string())?;
        c1_terms = c1_terms
            .max(fr.point_terms.self_jump.abs())
            .max(fr.point_terms.cross_jumps.abs())
            .max(fr.coefficient.atom_at(p).abs());
    }
    c1_terms = c1_terms.max(ricci_base(&two).map_err(|e| e.to_string())?.atom_at(p).abs());
    ensure(
        regular <= 1e-12 && atoms == 0.0 && c1_terms == 0.0,
        format!("regular rel err {regular:.3e}, atom mismatch {atoms:.3e}, C¹ jump terms {c1_terms:.3e}"),
    )
}

const PRESET_SCENARIO: &str = r#"outputs = ["profile", "events", "fluid", "verify"]

[preset]
name = "flat-rd-md-ld"
c0 = 2.5
t1 = 4.7e4
t2 = 9.8e9

[sampling]
t_min = 1.0
t_max = 3.0e10
count = 300
spacing = "log"
"#;

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_warpcurv");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let scenario = dir.path().join("preset.toml");
    std::fs::write(&scenario, PRESET_SCENARIO).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = Command::new(bin)
            .args(["run", scenario.to_str().unwrap(), "--out", out.to_str().unwrap(), "--emit-plot-script"])
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("run {run} exited with {}", status.status));
        }
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
            .map_err(|e| e.to_string())?
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    let identical = outputs[0] == outputs[1] && outputs[0].len() == 5;

    let described = Command::new(bin)
        .args(["describe", scenario.to_str().unwrap()])
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&described.stdout).into_owned();
    let field = |key: &str| -> Option<String> {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .map(|v| v.split_whitespace().next().unwrap_or("").to_string())
    };
    let (c0, t1, t2) = (2.5f64, 4.7e4f64, 9.8e9f64);
    let k = 2.0 / (3.0 * t2);
    let c1 = c0 * t1.powf(-1.0 / 6.0);
    let c2 = c0 * t1.powf(-1.0 / 6.0) * t2.powf(2.0 / 3.0) * (-k * t2).exp();
    let mut constants_ok = true;
    let mut shown = Vec::new();
    for (key, expected) in [("c1", c1), ("c2", c2)] {
        let Some(value) = field(key) else {
            return Err(format!("describe did not print {key}"));
        };
        let mantissa = value.split('e').next().unwrap_or("");
        let digits = mantissa.chars().filter(char::is_ascii_digit).count();
        let parsed: f64 = value.parse().map_err(|_| format!("{key} = {value} is not a float"))?;
        constants_ok &= digits == 17 && rel_err(parsed, expected) <= 4.0 * f64::EPSILON;
        shown.push(format!("{key}={value}"));
    }
    ensure(
        identical && constants_ok,
        format!("reruns identical: {identical}; {}", shown.join(" ")),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 reconstruction equivalence", reconstruction_equivalence),
        ("2 closed-form specialization", closed_form_specialization),
        ("3 radiation-era scalar flatness", radiation_flatness),
        ("4 closed-form curvature values", closed_form_curvature),
        ("5 Friedmann/EOS recovery", fluid_recovery),
        ("6 trace identity", trace_identity),
        ("7 C1 infeasibility", c1_infeasibility),
        ("8 mollifier weak convergence", mollifier_convergence),
        ("9 multiwarp reduction", multiwarp_reduction),
        ("10 CLI determinism and format", cli_determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, check) in criteria {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        10 - failed,
        10,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
