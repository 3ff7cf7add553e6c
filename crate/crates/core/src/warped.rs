//! Curvature of the single-fiber warped product `M = M₀ ×_f H` with metric
//! `-dt² + f(t)² g_H`, where `H` has constant curvature sign `k`.
//!
//! Every curvature component is determined by two coefficient functions:
//!
//! * `A = (f'² + k)/f²`, the spatial sectional coefficient in `R_{XY}Z`,
//! * `B = f''/f`, the coefficient in `R_{XU}U` and `R_{XU}Y`,
//!
//! with `Ric(U,U) = -3B`, `Ric(X,Y) = (2A + B)⟨X,Y⟩` and scalar curvature
//! `6(A + B)`. When `f` is only C⁰ at a breakpoint, `f''` carries a delta
//! atom there and so does every coefficient built from `B`.
//!
//! `ric_sp` is the coefficient of `⟨X,Y⟩` for unit spatial vectors, so the
//! trace reads `scalar = -ric_uu + 3 ric_sp`.

use crate::error::{Error, Result};
use crate::genfun::{Expr, GenFun, PiecewiseFn, Side};

#[derive(Debug, Clone, PartialEq)]
pub struct FrwModel {
    k: i8,
    scale_factor: PiecewiseFn,
    lambda: f64,
}

/// Samples per segment used when positivity cannot be read off the law.
const POSITIVITY_SAMPLES: usize = 256;

fn segment_is_positive(law: &Expr, lo: f64, hi: f64) -> bool {
    use crate::genfun::AnalyticPiece;
    if let Some(sum) = law.as_lin() {
        if let [piece] = sum.terms() {
            // single laws are monotone or constant on t > 0
            return match piece {
                AnalyticPiece::PowerLaw { coeff, .. }
                | AnalyticPiece::Exponential { coeff, .. }
                | AnalyticPiece::Constant(coeff) => *coeff > 0.0,
            };
        }
    }
    let hi = if hi.is_finite() { hi } else { lo.abs().max(1.0) * 4.0 + lo };
    (1..POSITIVITY_SAMPLES).all(|j| {
        let t = lo + (hi - lo) * j as f64 / POSITIVITY_SAMPLES as f64;
        law.value(t) > 0.0
    })
}

impl FrwModel {
    pub fn new(k: i32, scale_factor: PiecewiseFn, lambda: f64) -> Result<Self> {
        if !(-1..=1).contains(&k) {
            return Err(Error::InvalidModel(format!("k must be -1, 0 or 1, got {k}")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidModel("cosmological constant must be finite".into()));
        }
        for (i, s) in scale_factor.segments().iter().enumerate() {
            if !segment_is_positive(&s.law, s.lo, s.hi) {
                return Err(Error::InvalidModel(format!(
                    "scale factor is not positive on segment {i} ({}, {})",
                    s.lo, s.hi
                )));
            }
        }
        Ok(FrwModel {
            k: k as i8,
            scale_factor,
            lambda,
        })
    }

    pub fn k(&self) -> i32 {
        self.k as i32
    }

    pub fn scale_factor(&self) -> &PiecewiseFn {
        &self.scale_factor
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.scale_factor.breakpoints()
    }

    /// `(f', f'')` as generalized functions.
    pub fn derivatives(&self) -> Result<(GenFun, GenFun)> {
        let fp = GenFun::from(self.scale_factor.clone()).derivative()?;
        let fpp = fp.derivative()?;
        Ok((fp, fpp))
    }

    fn constant(&self, c: f64) -> PiecewiseFn {
        let (lo, hi) = self.scale_factor.domain();
        PiecewiseFn::single(Expr::constant(c), lo, hi).expect("domain already validated")
    }

    /// `f'² + k`, regular only.
    fn slope_sq_plus_k(&self, fp: &GenFun) -> Result<GenFun> {
        fp.square()?.add_regular(&self.constant(self.k as f64))
    }
}

/// `(A, B) = ((f'² + k)/f², f''/f)`.
pub fn riemann_coefficients(m: &FrwModel) -> Result<(GenFun, GenFun)> {
    let (fp, fpp) = m.derivatives()?;
    let f = m.scale_factor();
    let f_sq = f.map(Expr::square);
    let a = m.slope_sq_plus_k(&fp)?.div_continuous(&f_sq)?;
    let b = fpp.div_continuous(f)?;
    Ok((a, b))
}

/// `(Ric(U,U), ric_sp)` where `Ric(X,Y) = ric_sp ⟨X,Y⟩` for spatial X, Y.
/// `Ric(U,X)` vanishes identically.
pub fn ricci(m: &FrwModel) -> Result<(GenFun, GenFun)> {
    let (a, b) = riemann_coefficients(m)?;
    Ok((b.scale(-3.0), a.scale(2.0).add(&b)?))
}

pub fn scalar_curvature(m: &FrwModel) -> Result<GenFun> {
    let (a, b) = riemann_coefficients(m)?;
    Ok(a.add(&b)?.scale(6.0))
}

/// Which numerator to use for planes containing the flow vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SectionalReading {
    /// `-α² f'' + β² (f'² + k)`, consistent with `R_{XY}Z`.
    #[default]
    SquaredSlope,
    /// `-α² f'' + β² (f' + k)`, linear in the slope; kept for comparison.
    LinearSlope,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionalValue {
    /// Regular part (left piece at a breakpoint).
    pub regular: f64,
    /// Weight of the delta contributed through the `-α² f''` term at `t`.
    pub atom_weight: f64,
}

/// Sectional curvature of the plane spanned by `W = αU + βY` and `X`, as a
/// generalized function of time:
///
/// `K = (-α² f'' + β² (f'² + k)) / ((β² - α²) f²)`.
///
/// X and Y are taken as they enter the formula; no fiber normalization is applied.
pub fn sectional_genfun(
    m: &FrwModel,
    alpha: f64,
    beta: f64,
    reading: SectionalReading,
) -> Result<GenFun> {
    let (a2, b2) = (alpha * alpha, beta * beta);
    let denom = b2 - a2;
    if denom.abs() <= 1e-12 * a2.max(b2) || denom == 0.0 {
        return Err(Error::DegeneratePlane {
            alpha_sq: a2,
            beta_sq: b2,
        });
    }
    let (fp, fpp) = m.derivatives()?;
    let spatial = match reading {
        SectionalReading::SquaredSlope => m.slope_sq_plus_k(&fp)?,
        SectionalReading::LinearSlope => {
            if !fp.atoms().is_empty() {
                return Err(Error::UnsupportedDistribution(
                    "scale factor jumps; f' carries atoms".into(),
                ));
            }
            fp.add_regular(&m.constant(m.k as f64))?
        }
    };
    let f_sq = m.scale_factor().map(Expr::square);
    fpp.scale(-a2)
        .add(&spatial.scale(b2))?
        .div_continuous(&f_sq)
        .map(|g| g.scale(1.0 / denom))
}

pub fn sectional(
    m: &FrwModel,
    alpha: f64,
    beta: f64,
    t: f64,
    reading: SectionalReading,
) -> Result<SectionalValue> {
    let g = sectional_genfun(m, alpha, beta, reading)?;
    Ok(SectionalValue {
        regular: g.eval_one_sided(t, Side::Left)?,
        atom_weight: g.atom_at(t),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub t: f64,
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
    pub ric_uu: f64,
    pub ric_sp: f64,
    pub scalar: f64,
}

/// Delta weights at one breakpoint of the scale factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureEvent {
    pub t: f64,
    pub fpp_atom: f64,
    pub ric_uu_atom: f64,
    pub ric_sp_atom: f64,
    pub scalar_atom: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    pub samples: Vec<ProfileSample>,
    pub events: Vec<CurvatureEvent>,
}

/// Samples the regular parts at `times` and tabulates the atoms at every
/// breakpoint of `f` (zero weights included).
pub fn curvature_profile(m: &FrwModel, times: &[f64]) -> Result<CurvatureProfile> {
    let (fp, fpp) = m.derivatives()?;
    let (ric_uu, ric_sp) = ricci(m)?;
    let scalar = scalar_curvature(m)?;
    let f = m.scale_factor();
    let samples = times
        .iter()
        .map(|&t| {
            Ok(ProfileSample {
                t,
                f: f.eval(t)?,
                fp: fp.eval_regular(t)?,
                fpp: fpp.eval_regular(t)?,
                ric_uu: ric_uu.eval_regular(t)?,
                ric_sp: ric_sp.eval_regular(t)?,
                scalar: scalar.eval_regular(t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let events = m
        .breakpoints()
        .into_iter()
        .map(|t| CurvatureEvent {
            t,
            fpp_atom: fpp.atom_at(t),
            ric_uu_atom: ric_uu.atom_at(t),
            ric_sp_atom: ric_sp.atom_at(t),
            scalar_atom: scalar.atom_at(t),
        })
        .collect();
    Ok(CurvatureProfile { samples, events })
}
