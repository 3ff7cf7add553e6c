//! Spatially flat three-phase cosmology: radiation `c₀ t^{1/2}`, matter
//! `c₁ t^{2/3}` and a lambda phase `c₂ e^{Kt}`, glued C⁰ at `t₁ < t₂`.
//!
//! Units are whatever the caller uses for time; `ρ` and `P` come out in
//! 1/time² with `G = c = 1`.

use std::f64::consts::PI;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::genfun::step::{DeltaTerm, StepTerm, Term};
use crate::genfun::{
    AnalyticPiece, Expr, GenFun, Location, PiecewiseFn, Step, StepCombination,
};
use crate::warped::FrwModel;

/// Transition times quoted for our universe, in years.
pub const T1_YEARS: f64 = 4.7e4;
pub const T2_YEARS: f64 = 9.8e9;

#[derive(Debug, Clone, PartialEq)]
pub struct CosmologyParams {
    c0: f64,
    t1: f64,
    t2: f64,
    k_rate: f64,
    lambda: f64,
    time_unit: String,
    c1: f64,
    c2: f64,
}

impl CosmologyParams {
    pub fn new(c0: f64, t1: f64, t2: f64, k_rate: f64, lambda: f64) -> Result<Self> {
        let finite = [c0, t1, t2, k_rate, lambda].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidModel("cosmology parameters must be finite".into()));
        }
        if c0 <= 0.0 {
            return Err(Error::InvalidModel(format!("c0 must be positive, got {c0}")));
        }
        if !(t1 > 0.0 && t2 > t1) {
            return Err(Error::InvalidModel(format!(
                "transition times must satisfy 0 < t1 < t2, got t1 = {t1}, t2 = {t2}"
            )));
        }
        if k_rate <= 0.0 {
            return Err(Error::InvalidModel(format!("K must be positive, got {k_rate}")));
        }
        if lambda < 0.0 {
            return Err(Error::InvalidModel(format!("Lambda must be non-negative, got {lambda}")));
        }
        let c1 = c0 * t1.powf(-1.0 / 6.0);
        let c2 = c1 * t2.powf(2.0 / 3.0) * (-k_rate * t2).exp();
        if !(c2 > 0.0 && c2.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "c2 = {c2} is not representable for K t2 = {}",
                k_rate * t2
            )));
        }
        Ok(CosmologyParams {
            c0,
            t1,
            t2,
            k_rate,
            lambda,
            time_unit: "yr".into(),
            c1,
            c2,
        })
    }

    /// `c₀ = 1`, the quoted transition times in years, `K = 2/(3t₂)`, `Λ = 0`.
    pub fn standard() -> Self {
        CosmologyParams::new(
            1.0,
            T1_YEARS,
            T2_YEARS,
            default_k_rate(T2_YEARS),
            0.0,
        )
        .expect("defaults are valid")
    }

    pub fn with_time_unit(mut self, unit: impl Into<String>) -> Self {
        self.time_unit = unit.into();
        self
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn t1(&self) -> f64 {
        self.t1
    }
    pub fn t2(&self) -> f64 {
        self.t2
    }
    pub fn k_rate(&self) -> f64 {
        self.k_rate
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn time_unit(&self) -> &str {
        &self.time_unit
    }
    /// `c₀ t₁^{-1/6}`
    pub fn c1(&self) -> f64 {
        self.c1
    }
    /// `c₀ t₁^{-1/6} t₂^{2/3} e^{-K t₂}`
    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn pieces(&self) -> [AnalyticPiece; 3] {
        [
            AnalyticPiece::power(self.c0, 0.5),
            AnalyticPiece::power(self.c1, 2.0 / 3.0),
            AnalyticPiece::exponential(self.c2, self.k_rate),
        ]
    }

    /// The flat FRW model with this scale factor and `Λ`.
    pub fn model(&self) -> FrwModel {
        FrwModel::new(0, build_scale_factor(self), self.lambda).expect("scale factor is positive")
    }
}

/// `K = 2/(3t₂)`: the rate that makes `f'` continuous at `t₂`.
pub fn default_k_rate(t2: f64) -> f64 {
    2.0 / (3.0 * t2)
}

pub fn build_scale_factor(params: &CosmologyParams) -> PiecewiseFn {
    PiecewiseFn::from_pieces(
        &params.pieces(),
        &[params.t1, params.t2],
        (0.0, f64::INFINITY),
    )
    .expect("0 < t1 < t2 by construction")
}

/// Slope mismatches `(r₁, r₂)` at `t₁` and `t₂`; both vanish only for a C¹ glue.
pub fn c1_matching_residual(params: &CosmologyParams) -> (f64, f64) {
    let (c0, c1, c2, k) = (params.c0, params.c1, params.c2, params.k_rate);
    let r1 = 0.5 * c0 * params.t1.powf(-0.5) - (2.0 / 3.0) * c1 * params.t1.powf(-1.0 / 3.0);
    let r2 = (2.0 / 3.0) * c1 * params.t2.powf(-1.0 / 3.0) - k * c2 * (k * params.t2).exp();
    (r1, r2)
}

fn r(n: i64, d: i64) -> Ratio<i64> {
    Ratio::new(n, d)
}

/// The closed-form step combinations for `f'` and `f''`, written term by
/// term in the base laws `c₀ t^{-1/2}`, `c₁ t^{-1/3}`, … rather than derived
/// from the pieces.
pub fn frw_combinations(params: &CosmologyParams) -> (StepCombination, StepCombination) {
    let (c0, c1, c2, k) = (params.c0, params.c1, params.c2, params.k_rate);
    let (t1, t2) = (params.t1, params.t2);
    let p0 = AnalyticPiece::power(c0, -0.5);
    let p1 = AnalyticPiece::power(c1, -1.0 / 3.0);
    let e1 = AnalyticPiece::exponential(k * c2, k);
    let q0 = AnalyticPiece::power(c0, -1.5);
    let q1 = AnalyticPiece::power(c1, -4.0 / 3.0);
    let e2 = AnalyticPiece::exponential(k * k * c2, k);
    let term = |parts: &[(Ratio<i64>, AnalyticPiece)]| -> Vec<Term> {
        parts.iter().map(|&(c, p)| Term::new(c, p)).collect()
    };
    let row = |step, parts: &[(Ratio<i64>, AnalyticPiece)]| StepTerm {
        step,
        parts: term(parts),
    };
    let one = r(1, 1);
    let fp = StepCombination::new(
        (0.0, f64::INFINITY),
        vec![t1, t2],
        vec![
            row(Step::After(t2), &[(r(1, 4), p0), (r(-1, 3), p1), (one, e1)]),
            row(Step::After(t1), &[(r(-1, 4), p0), (r(1, 3), p1)]),
            row(Step::Before(t2), &[(r(1, 4), p0), (r(1, 3), p1)]),
            row(Step::Before(t1), &[(r(1, 4), p0), (r(-1, 3), p1)]),
        ],
        Vec::new(),
    );
    let fpp = StepCombination::new(
        (0.0, f64::INFINITY),
        vec![t1, t2],
        vec![
            row(Step::After(t2), &[(r(-1, 8), q0), (r(1, 9), q1), (one, e2)]),
            row(Step::After(t1), &[(r(1, 8), q0), (r(-1, 9), q1)]),
            row(Step::Before(t2), &[(r(-1, 8), q0), (r(-1, 9), q1)]),
            row(Step::Before(t1), &[(r(-1, 8), q0), (r(1, 9), q1)]),
        ],
        vec![
            DeltaTerm {
                location: t2,
                parts: term(&[(r(-2, 3), p1), (one, e1)]),
            },
            DeltaTerm {
                location: t1,
                parts: term(&[(r(-1, 2), p0), (r(2, 3), p1)]),
            },
        ],
    );
    (fp, fpp)
}

/// `(f', f'')` from the closed-form combinations. An atom whose weight
/// cancels (e.g. at `t₂` for `K = 2/(3t₂)`) is dropped.
pub fn frw_derivatives(params: &CosmologyParams) -> Result<(GenFun, GenFun)> {
    let (fp, fpp) = frw_combinations(params);
    Ok((fp.to_genfun()?, fpp.to_genfun()?))
}

/// Density, pressure and `w = P/ρ` at one regular time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidState {
    pub t: f64,
    pub rho: f64,
    pub pressure: f64,
    /// `None` when `ρ` vanishes to roundoff.
    pub w: Option<f64>,
}

/// `(f, f', f'')` of the active law; breakpoints are refused.
fn regular_jet(m: &FrwModel, t: f64) -> Result<(f64, f64, f64)> {
    let f = m.scale_factor();
    match f.locate(t)? {
        Location::Breakpoint(_) => Err(Error::AmbiguousPoint { t }),
        Location::Interior(i) => {
            let law = &f.segments()[i].law;
            let d1 = law.derivative();
            Ok((law.value(t), d1.value(t), d1.derivative().value(t)))
        }
    }
}

/// `ρ = (3f'²/f² - Λ)/(8π)`
pub fn friedmann_density(m: &FrwModel, t: f64) -> Result<f64> {
    let (f, fp, _) = regular_jet(m, t)?;
    let h = fp / f;
    Ok((3.0 * h * h - m.lambda()) / (8.0 * PI))
}

/// `P = [(Λ - 3f''/f)/(4π) - ρ]/3`
pub fn friedmann_pressure(m: &FrwModel, t: f64) -> Result<f64> {
    let (f, _, fpp) = regular_jet(m, t)?;
    let rho = friedmann_density(m, t)?;
    Ok(((m.lambda() - 3.0 * fpp / f) / (4.0 * PI) - rho) / 3.0)
}

pub fn fluid_state(m: &FrwModel, t: f64) -> Result<FluidState> {
    let (f, fp, _) = regular_jet(m, t)?;
    let rho = friedmann_density(m, t)?;
    let pressure = friedmann_pressure(m, t)?;
    let scale = (3.0 * (fp / f).powi(2) + m.lambda().abs()) / (8.0 * PI);
    let w = (rho.abs() > 1e-12 * scale).then(|| pressure / rho);
    Ok(FluidState {
        t,
        rho,
        pressure,
        w,
    })
}

/// Number of interior samples used by the segment-wise checks.
pub const SEGMENT_SAMPLES: usize = 50;

/// Log-spaced interior samples of segment `phase`. A segment starting at 0
/// is sampled on `(10⁻³ hi, hi)`, an unbounded one on `(lo, 2 lo)`.
pub fn segment_samples(m: &FrwModel, phase: usize, count: usize) -> Result<Vec<f64>> {
    let segs = m.scale_factor().segments();
    let seg = segs.get(phase).ok_or(Error::SegmentIndex {
        index: phase,
        count: segs.len(),
    })?;
    let (lo, hi) = match (seg.lo > 0.0, seg.hi.is_finite()) {
        (true, true) => (seg.lo, seg.hi),
        (false, true) => (seg.hi * 1e-3, seg.hi),
        (true, false) => (seg.lo, 2.0 * seg.lo),
        (false, false) => (1.0, 2.0),
    };
    let ratio = hi / lo;
    Ok((0..count)
        .map(|j| lo * ratio.powf((j as f64 + 0.5) / count as f64))
        .collect())
}

/// Least-squares slope of `log ρ` against `log f` over the interior of a segment.
pub fn eos_scaling_exponent(m: &FrwModel, phase: usize) -> Result<f64> {
    let times = segment_samples(m, phase, SEGMENT_SAMPLES)?;
    let mut xs = Vec::with_capacity(times.len());
    let mut ys = Vec::with_capacity(times.len());
    for &t in &times {
        let rho = friedmann_density(m, t)?;
        if !(rho > 0.0) {
            return Err(Error::DegenerateFit(format!(
                "density {rho} at t = {t} is not positive"
            )));
        }
        xs.push(m.scale_factor().eval(t)?.ln());
        ys.push(rho.ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 1e-24 * mx.abs().max(1.0).powi(2) * n {
        return Err(Error::DegenerateFit(format!(
            "scale factor is constant on segment {phase}"
        )));
    }
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityResidual {
    /// `max |d(ρf³)/dt + P d(f³)/dt|`
    pub absolute: f64,
    /// `absolute` over `max ρ |d(f³)/dt|`, the size of either side for a
    /// barotropic fluid; equals `absolute` when that scale vanishes.
    pub relative: f64,
}

/// Residual of `d(ρf³) = -P d(f³)` on a smooth segment, with symbolic derivatives.
pub fn continuity_check(m: &FrwModel, phase: usize) -> Result<ContinuityResidual> {
    let times = segment_samples(m, phase, SEGMENT_SAMPLES)?;
    let law = m.scale_factor().segments()[phase].law.clone();
    let fp = law.derivative();
    let fpp = fp.derivative();
    let cube = law.clone() * law.square();
    let lambda = m.lambda();
    // 8π ρ f³ = 3 f'² f - Λ f³
    let rho_f3 = (Expr::constant(3.0) * fp.square() * law.clone() - cube.scaled(lambda))
        .scaled(1.0 / (8.0 * PI));
    let d_rho_f3 = rho_f3.derivative();
    let d_cube = cube.derivative();
    let (mut absolute, mut scale) = (0.0f64, 0.0f64);
    for &t in &times {
        let (f, v, a) = (law.value(t), fp.value(t), fpp.value(t));
        let rho = (3.0 * (v / f).powi(2) - lambda) / (8.0 * PI);
        let p = ((lambda - 3.0 * a / f) / (4.0 * PI) - rho) / 3.0;
        let (lhs, rhs) = (d_rho_f3.value(t), p * d_cube.value(t));
        absolute = absolute.max((lhs + rhs).abs());
        scale = scale.max((rho * d_cube.value(t)).abs());
    }
    let relative = if scale == 0.0 { absolute } else { absolute / scale };
    Ok(ContinuityResidual { absolute, relative })
}
