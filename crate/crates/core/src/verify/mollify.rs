//! Mollifier oracle: smooth `f` with a compact bump of width `ε`, take
//! second differences, and pair with a test function. As `ε → 0` the result
//! must approach the weak pairing of the distributional `f''`.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genfun::{GenFun, Location, PiecewiseFn};
use crate::quadrature::{integrate, integrate_split, QuadTol};

/// Default `ε/h`.
pub const GRID_RATIO: f64 = 50.0;
/// Coarsest admissible `ε/h`.
pub const MIN_GRID_RATIO: f64 = 20.0;

fn raw_kernel(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn kernel_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| {
        let tol = QuadTol {
            abs: 0.0,
            rel: 1e-15,
            max_intervals: 4000,
        };
        // the roundoff floor of the error estimate can stop short of 1e-15;
        // the value is still converged to well below 1e-14 by then
        integrate_split(raw_kernel, &[-1.0, -0.5, 0.0, 0.5, 1.0], tol)
            .or_else(|_| integrate_split(raw_kernel, &[-1.0, -0.5, 0.0, 0.5, 1.0], QuadTol::tight()))
            .expect("bump kernel is smooth")
            .value
    })
}

/// `exp(-1/(1-x²))` on `(-1, 1)`, normalized to unit mass.
pub fn kernel(x: f64) -> f64 {
    raw_kernel(x) / kernel_mass()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierSpec {
    eps: f64,
    h: f64,
}

impl MollifierSpec {
    /// Width `eps` with the default grid `h = eps/50`.
    pub fn new(eps: f64) -> Result<Self> {
        MollifierSpec::with_grid(eps, eps / GRID_RATIO)
    }

    pub fn with_grid(eps: f64, h: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite() && h > 0.0) {
            return Err(Error::InvalidMollifier(format!(
                "need eps > 0 and h > 0, got eps = {eps}, h = {h}"
            )));
        }
        let limit = eps / MIN_GRID_RATIO;
        if h > limit {
            return Err(Error::GridTooCoarse { h, limit });
        }
        Ok(MollifierSpec { eps, h })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Both `ε` and `h` halved.
    pub fn halved(&self) -> Self {
        MollifierSpec {
            eps: self.eps / 2.0,
            h: self.h / 2.0,
        }
    }

    /// Checks `ε` against every breakpoint the smoothing of `window` can
    /// reach: `ε` must stay below half the gap to each neighbouring breakpoint
    /// or domain edge, and the smoothed window must stay inside the domain.
    pub fn check_for(&self, f: &PiecewiseFn, window: (f64, f64)) -> Result<()> {
        let (lo, hi) = f.domain();
        let reach = (window.0 - self.eps - self.h, window.1 + self.eps + self.h);
        if !(reach.0 > lo && reach.1 < hi) {
            return Err(Error::InvalidMollifier(format!(
                "smoothing window ({}, {}) leaves the domain ({lo}, {hi})",
                reach.0, reach.1
            )));
        }
        let mut edges = vec![lo];
        edges.extend(f.breakpoints());
        edges.push(hi);
        for i in 1..edges.len() - 1 {
            let b = edges[i];
            if b < reach.0 || b > reach.1 {
                continue;
            }
            let gap = (b - edges[i - 1]).min(edges[i + 1] - b);
            if self.eps >= 0.5 * gap {
                return Err(Error::InvalidMollifier(format!(
                    "eps = {} is not below half the gap {gap} around the breakpoint at {b}",
                    self.eps
                )));
            }
        }
        Ok(())
    }
}

/// `(f ⋆ η_ε)(t) = ∫ f(t - εx) η(x) dx`, integrated piece by piece.
pub fn mollify(f: &PiecewiseFn, eps: f64, t: f64) -> Result<f64> {
    let mut total = 0.0;
    for seg in f.segments() {
        // t - εx ∈ (lo, hi)  ⇔  x ∈ ((t - hi)/ε, (t - lo)/ε)
        let a = ((t - seg.hi) / eps).max(-1.0);
        let b = ((t - seg.lo) / eps).min(1.0);
        if !(b > a) {
            continue;
        }
        let scale = seg.law.value(t - eps * 0.5 * (a + b)).abs();
        let tol = QuadTol {
            abs: 1e-15 * scale,
            rel: 1e-13,
            max_intervals: 4000,
        };
        let r = integrate(|x| seg.law.value(t - eps * x) * kernel(x), a, b, tol)?;
        total += r.value;
    }
    Ok(total)
}

/// Uniform samples `values[j]` at `t0 + j h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    pub t0: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl SampledFn {
    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.h
    }

    /// Trapezoid rule for `∫ g φ dt` over the sampled range.
    pub fn pair(&self, phi: impl Fn(f64) -> f64) -> f64 {
        let n = self.values.len();
        let mut sum = 0.0;
        for (j, v) in self.values.iter().enumerate() {
            let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
            sum += w * v * phi(self.time(j));
        }
        sum * self.h
    }
}

/// Second central differences of `f ⋆ η_ε` on the grid `a, a + h, …` covering `window`.
pub fn mollified_second_derivative(
    f: &PiecewiseFn,
    spec: &MollifierSpec,
    window: (f64, f64),
) -> Result<SampledFn> {
    spec.check_for(f, window)?;
    let (a, b) = window;
    let h = spec.h;
    let n = ((b - a) / h).ceil() as usize;
    let smoothed = (0..n + 3)
        .map(|j| mollify(f, spec.eps, a + (j as f64 - 1.0) * h))
        .collect::<Result<Vec<_>>>()?;
    let values = smoothed
        .windows(3)
        .map(|w| (w[0] - 2.0 * w[1] + w[2]) / (h * h))
        .collect();
    Ok(SampledFn { t0: a, h, values })
}

/// Test function `exp(-σ x²/(1 - x²))` with `x = (t - center)/half_width`:
/// peak 1 at the center, C^∞, supported on `center ± half_width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
    pub sharpness: f64,
}

impl Bump {
    pub fn new(center: f64, half_width: f64, sharpness: f64) -> Self {
        Bump {
            center,
            half_width,
            sharpness,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.half_width;
        if x.abs() >= 1.0 {
            0.0
        } else {
            (-self.sharpness * x * x / (1.0 - x * x)).exp()
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

/// Sharpness of the randomized test functions. Above 2 the fourth derivative
/// at the peak has the opposite sign to the second, which keeps the
/// `O(ε⁴)` correction from pushing halving ratios above 4.
pub const TEST_SHARPNESS: f64 = 4.0;

/// Half-width of test bumps around a breakpoint, as a fraction of the local gap.
pub const BUMP_GAP_FRACTION: f64 = 0.2;

/// Distance from breakpoint `t` to its nearest neighbour or domain edge.
pub fn local_gap(f: &PiecewiseFn, t: f64) -> Result<f64> {
    let i = match f.locate(t)? {
        Location::Breakpoint(i) => i,
        Location::Interior(_) => return Err(Error::InvalidMollifier(format!("t = {t} is not a breakpoint"))),
    };
    let segs = f.segments();
    Ok((t - segs[i].lo).min(segs[i + 1].hi - t))
}

/// Bump centred on breakpoint `t` with the default half-width.
pub fn centered_bump(f: &PiecewiseFn, t: f64) -> Result<Bump> {
    Ok(Bump::new(t, BUMP_GAP_FRACTION * local_gap(f, t)?, TEST_SHARPNESS))
}

/// `count` bumps cycling over the breakpoints of `f`, each with a random
/// width in `[0.6, 1]` of the default and a random offset of up to a quarter
/// width from its breakpoint.
pub fn random_bumps(f: &PiecewiseFn, count: usize, seed: u64) -> Result<Vec<Bump>> {
    let breakpoints = f.breakpoints();
    if breakpoints.is_empty() {
        return Err(Error::InvalidMollifier("function has no breakpoints".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|j| {
            let t = breakpoints[j % breakpoints.len()];
            let w = BUMP_GAP_FRACTION * local_gap(f, t)? * rng.gen_range(0.6..1.0);
            let offset = rng.gen_range(-0.25..0.25) * w;
            Ok(Bump::new(t + offset, w, TEST_SHARPNESS))
        })
        .collect()
}

/// Starting width for a convergence study against `bump`.
pub fn initial_spec(bump: &Bump) -> Result<MollifierSpec> {
    MollifierSpec::new(bump.half_width / 8.0)
}

fn pairing_tol(fpp: &GenFun, bump: &Bump) -> QuadTol {
    // a bound on ∫|f''_reg φ| sets the absolute floor; the pairing itself can cancel
    let (a, b) = bump.support();
    let peak = (1..64)
        .map(|j| a + (b - a) * j as f64 / 64.0)
        .filter_map(|t| fpp.eval_step_convention(t).ok())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    QuadTol {
        abs: 1e-14 * peak * (b - a),
        rel: 1e-13,
        max_intervals: 4000,
    }
}

/// `⟨f'', φ⟩` with `f''` taken distributionally.
pub fn exact_pairing(f: &PiecewiseFn, bump: &Bump) -> Result<f64> {
    let fpp = GenFun::from(f.clone()).derivative()?.derivative()?;
    fpp.weak_pairing(|t| bump.value(t), bump.support(), pairing_tol(&fpp, bump))
}

/// `∫ (f ⋆ η_ε)'' φ dt` on the grid of `spec`.
pub fn mollified_pairing(f: &PiecewiseFn, spec: &MollifierSpec, bump: &Bump) -> Result<f64> {
    let d2 = mollified_second_derivative(f, spec, bump.support())?;
    Ok(d2.pair(|t| bump.value(t)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub eps: Vec<f64>,
    pub errors: Vec<f64>,
}

impl ConvergenceStudy {
    /// `errors[i] / errors[i + 1]`, one per halving.
    pub fn ratios(&self) -> Vec<f64> {
        self.errors.windows(2).map(|w| w[0] / w[1]).collect()
    }

    pub fn non_increasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] <= w[0])
    }
}

/// `|⟨f'', φ⟩ - ∫ (f ⋆ η_ε)'' φ|` for `ε = ε₀, ε₀/2, …` (`halvings + 1` values).
pub fn weak_convergence(
    f: &PiecewiseFn,
    bump: &Bump,
    start: MollifierSpec,
    halvings: usize,
) -> Result<ConvergenceStudy> {
    let exact = exact_pairing(f, bump)?;
    let mut spec = start;
    let (mut eps, mut errors) = (Vec::new(), Vec::new());
    for _ in 0..=halvings {
        eps.push(spec.eps);
        errors.push((mollified_pairing(f, &spec, bump)? - exact).abs());
        spec = spec.halved();
    }
    Ok(ConvergenceStudy { eps, errors })
}

/// δ weight at breakpoint `t` recovered from the mollified second
/// derivative: `(∫ (f ⋆ η_ε)'' φ - ∫ f''_reg φ) / φ(t)`.
pub fn atom_extraction(f: &PiecewiseFn, spec: &MollifierSpec, t: f64, bump: &Bump) -> Result<f64> {
    if !f.is_breakpoint(t) {
        return Err(Error::InvalidMollifier(format!("t = {t} is not a breakpoint")));
    }
    let peak = bump.value(t);
    if !(peak > 0.0) {
        return Err(Error::InvalidMollifier(format!(
            "test function vanishes at the breakpoint {t}"
        )));
    }
    let fpp = GenFun::from(f.clone()).derivative()?.derivative()?;
    let regular = GenFun::regular_only(fpp.regular().clone());
    let smooth_part = regular.weak_pairing(|s| bump.value(s), bump.support(), pairing_tol(&fpp, bump))?;
    Ok((mollified_pairing(f, spec, bump)? - smooth_part) / peak)
}
