//! Multiply warped products `M₀ ×_{f₁} F₁ × ⋯ ×_{f_n} F_n` with metric
//! `-dt² + Σ f_i² g_i`, where every warping function is C⁰ at one shared time `p`.
//!
//! Jump terms are written with one-sided slopes at `p`:
//! `J_i = f_i'⁺ - f_i'⁻` and `S_i = f_i'⁺ + f_i'⁻`. Delta atoms carry the
//! `J_i` contributions of `f_i''`; products of jumps (or sums) evaluated at `p`
//! have no distributional carrier and are reported as [`PointTerms`].

use crate::error::{Error, Result};
use crate::genfun::{
    AnalyticPiece, Expr, GenFun, PiecewiseFn, Segment, Step, StepCombination, ZERO_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub dim: u32,
    pub warp: PiecewiseFn,
    /// Einstein constant `λ` of the fiber metric (`Ric_F = λ g_F`); `None` if unknown.
    pub fiber_ricci: Option<f64>,
}

impl Fiber {
    /// A Ricci-flat fiber.
    pub fn flat(dim: u32, warp: PiecewiseFn) -> Self {
        Fiber {
            dim,
            warp,
            fiber_ricci: Some(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiWarpModel {
    fibers: Vec<Fiber>,
    p: f64,
}

/// One-sided data of a warping function at `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeData {
    pub value: f64,
    pub slope_minus: f64,
    pub slope_plus: f64,
}

impl SlopeData {
    /// `f'⁺ - f'⁻`; a difference that is roundoff against the slopes
    /// (a C¹ glue) is reported as exactly zero.
    pub fn jump(&self) -> f64 {
        let j = self.slope_plus - self.slope_minus;
        if j.abs() <= ZERO_TOL * self.slope_minus.abs().max(self.slope_plus.abs()) {
            0.0
        } else {
            j
        }
    }
}

/// Terms of `Ric(U_i, V_i)` that are products of one-sided data at `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointTerms {
    /// `(d_i - 1) J_i / f_i(p)²`
    pub self_jump: f64,
    /// `Σ_{j≠i} d_j J_i J_j / (f_i(p) f_j(p))`
    pub cross_jumps: f64,
}

impl PointTerms {
    pub fn total(&self) -> f64 {
        self.self_jump + self.cross_jumps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberRicci {
    /// `λ_i/f_i² + f_i''/f_i`, with the `J_i/f_i(p)` atom at `p`.
    pub coefficient: GenFun,
    pub point_terms: PointTerms,
}

impl MultiWarpModel {
    pub fn new(fibers: Vec<Fiber>, p: f64) -> Result<Self> {
        if fibers.is_empty() {
            return Err(Error::InvalidModel("at least one fiber is required".into()));
        }
        let domain = fibers[0].warp.domain();
        let mut refined = Vec::with_capacity(fibers.len());
        for (i, fiber) in fibers.into_iter().enumerate() {
            if fiber.dim == 0 {
                return Err(Error::InvalidModel(format!("fiber {i} has dimension 0")));
            }
            if fiber.warp.domain() != domain {
                return Err(Error::InvalidModel(format!(
                    "fiber {i} has domain {:?}, fiber 0 has {domain:?}",
                    fiber.warp.domain()
                )));
            }
            if !(p > domain.0 && p < domain.1) {
                return Err(Error::InvalidModel(format!("p = {p} is outside the domain")));
            }
            if fiber.warp.breakpoints().iter().any(|&b| b != p) {
                return Err(Error::InvalidModel(format!(
                    "fiber {i} has a breakpoint other than p = {p}"
                )));
            }
            let warp = fiber.warp.refine(&[p]);
            for (j, s) in warp.segments().iter().enumerate() {
                for t in probe_points(s) {
                    if s.law.value(t) <= 0.0 {
                        return Err(Error::InvalidModel(format!(
                            "warping function {i} is not positive on segment {j}"
                        )));
                    }
                }
            }
            if warp.eval(p).is_err() {
                return Err(Error::InvalidModel(format!(
                    "warping function {i} is not continuous at p"
                )));
            }
            refined.push(Fiber { warp, ..fiber });
        }
        Ok(MultiWarpModel { fibers: refined, p })
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn fiber(&self, i: usize) -> Result<&Fiber> {
        self.fibers.get(i).ok_or(Error::FiberIndex {
            index: i,
            count: self.fibers.len(),
        })
    }

    pub fn slope_data(&self, i: usize) -> Result<SlopeData> {
        let w = &self.fiber(i)?.warp;
        let (minus, plus) = w.limits_at(0, 1);
        Ok(SlopeData {
            value: w.eval(self.p)?,
            slope_minus: minus,
            slope_plus: plus,
        })
    }

    /// `f_i''/f_i` with the `J_i/f_i(p)` atom; the `R_{U_i X}Y` coefficient.
    pub fn base_fiber_curvature(&self, i: usize) -> Result<GenFun> {
        let w = &self.fiber(i)?.warp;
        GenFun::from(w.clone())
            .derivative()?
            .derivative()?
            .div_continuous(w)
    }
}

fn probe_points(s: &Segment) -> Vec<f64> {
    let hi = if s.hi.is_finite() { s.hi } else { s.lo.abs().max(1.0) * 4.0 + s.lo };
    (1..64).map(|j| s.lo + (hi - s.lo) * j as f64 / 64.0).collect()
}

/// Coefficient of `X¹Y¹` in `Ric(X,Y)` for base vectors:
/// `-Σ d_i f_i''/f_i`, with atom `-Σ d_i J_i/f_i(p)` at `p`.
pub fn ricci_base(m: &MultiWarpModel) -> Result<GenFun> {
    let mut acc: Option<GenFun> = None;
    for (i, fiber) in m.fibers.iter().enumerate() {
        let term = m.base_fiber_curvature(i)?.scale(-(fiber.dim as f64));
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    Ok(acc.expect("at least one fiber"))
}

/// Coefficient of `⟨U_i, V_i⟩` in `Ric(U_i, V_i)`.
pub fn ricci_fiber(m: &MultiWarpModel, i: usize) -> Result<FiberRicci> {
    let fiber = m.fiber(i)?;
    let lambda = fiber.fiber_ricci.ok_or(Error::MissingFiberRicci(i))?;
    let w = &fiber.warp;
    let intrinsic = w.map(|law| Expr::constant(lambda) / law.square());
    let coefficient = m.base_fiber_curvature(i)?.add_regular(&intrinsic)?;

    let own = m.slope_data(i)?;
    let self_jump = (fiber.dim as f64 - 1.0) * own.jump() / (own.value * own.value);
    let mut cross_jumps = 0.0;
    for (j, other) in m.fibers.iter().enumerate() {
        if j == i {
            continue;
        }
        let s = m.slope_data(j)?;
        cross_jumps += other.dim as f64 * own.jump() * s.jump() / (own.value * s.value);
    }
    Ok(FiberRicci {
        coefficient,
        point_terms: PointTerms {
            self_jump,
            cross_jumps,
        },
    })
}

/// `(f_i'⁺ + f_i'⁻)(f_j'⁺ + f_j'⁻) / (f_i(p) f_j(p))`, the coefficient of
/// `R_{U_i U_j} V_j = U_i ⟨U_j, V_j⟩ · (…)` for `i ≠ j`.
pub fn riemann_mixed(m: &MultiWarpModel, i: usize, j: usize) -> Result<f64> {
    if i == j {
        return Err(Error::SameFiber(i));
    }
    let (a, b) = (m.slope_data(i)?, m.slope_data(j)?);
    Ok((a.slope_plus + a.slope_minus) * (b.slope_plus + b.slope_minus) / (a.value * b.value))
}

/// `(f_i'⁺ μ(t-p) + f_i'⁻ μ(p-t)) / f_i²`, the time factor multiplying
/// `⟨U,W⟩V - ⟨V,W⟩U` in `R_{U_i V_i} W_i`. Each branch is the derivative of
/// the warping function on its side of `p`.
pub fn fiber_step_term(m: &MultiWarpModel, i: usize) -> Result<GenFun> {
    let w = &m.fiber(i)?.warp;
    let laws: Vec<&Expr> = w.segments().iter().map(|s| &s.law).collect();
    let (left, right) = (laws[0], laws[laws.len() - 1]);
    let steps = match (left.as_lin(), right.as_lin()) {
        (Some(l), Some(r)) if l.terms().len() <= 1 && r.terms().len() <= 1 => {
            let one = num_rational::Ratio::from_integer(1);
            let first = |s: &crate::genfun::PieceSum| {
                s.terms().first().copied().unwrap_or(AnalyticPiece::Constant(0.0)).derivative()
            };
            StepCombination::new(
                w.domain(),
                vec![m.p],
                vec![
                    crate::genfun::step::StepTerm {
                        step: Step::After(m.p),
                        parts: vec![crate::genfun::step::Term::new(one, first(r))],
                    },
                    crate::genfun::step::StepTerm {
                        step: Step::Before(m.p),
                        parts: vec![crate::genfun::step::Term::new(one, first(l))],
                    },
                ],
                Vec::new(),
            )
            .collect()?
        }
        _ => w.derivative(),
    };
    GenFun::from(steps).div_continuous(&w.map(Expr::square))
}
