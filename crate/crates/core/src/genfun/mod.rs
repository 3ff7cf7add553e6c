//! Generalized functions over piecewise closed-form laws.
//!
//! A [`GenFun`] is a piecewise regular part plus finitely many Dirac atoms.
//! Differentiating a function that jumps at a breakpoint produces an atom
//! there whose weight is the jump, right limit minus left limit.

pub mod expr;
pub mod piece;
pub mod piecewise;
pub mod step;

pub use expr::Expr;
pub use piece::{AnalyticPiece, PieceSum};
pub use piecewise::{Continuity, Location, PiecewiseFn, Segment, Side, ZERO_TOL};
pub use step::{
    step_reconstruct_fpp, step_reconstruct_fprime, Glue, Segmentation, Step, StepCombination,
};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_split, QuadTol};

/// `weight * δ(t - location)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaAtom {
    pub location: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenFun {
    regular: PiecewiseFn,
    atoms: Vec<DeltaAtom>,
}

/// Sorts by location and merges coincident atoms; sums that cancel to
/// roundoff are dropped.
fn normalize_atoms(mut atoms: Vec<DeltaAtom>) -> Vec<DeltaAtom> {
    atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
    let mut out: Vec<(DeltaAtom, f64)> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some((last, scale)) if last.location == a.location => {
                last.weight += a.weight;
                *scale = scale.max(a.weight.abs());
            }
            _ => out.push((a, a.weight.abs())),
        }
    }
    out.into_iter()
        .filter(|(a, scale)| a.weight != 0.0 && a.weight.abs() > ZERO_TOL * scale)
        .map(|(a, _)| a)
        .collect()
}

impl GenFun {
    pub fn new(regular: PiecewiseFn, atoms: Vec<DeltaAtom>) -> Result<Self> {
        for a in &atoms {
            if !regular.is_breakpoint(a.location) {
                return Err(Error::UnsupportedDistribution(format!(
                    "atom at t = {} is not at a breakpoint of the regular part",
                    a.location
                )));
            }
        }
        Ok(GenFun {
            regular,
            atoms: normalize_atoms(atoms),
        })
    }

    pub fn regular_only(regular: PiecewiseFn) -> Self {
        GenFun {
            regular,
            atoms: Vec::new(),
        }
    }

    pub fn regular(&self) -> &PiecewiseFn {
        &self.regular
    }

    pub fn atoms(&self) -> &[DeltaAtom] {
        &self.atoms
    }

    /// Weight of the atom at `t`, zero if there is none.
    pub fn atom_at(&self, t: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.location == t)
            .map_or(0.0, |a| a.weight)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.regular.domain()
    }

    pub fn eval_regular(&self, t: f64) -> Result<f64> {
        self.regular.eval(t)
    }

    pub fn eval_one_sided(&self, t: f64, side: Side) -> Result<f64> {
        self.regular.eval_one_sided(t, side)
    }

    /// Regular part with `μ(0) = 0`: a breakpoint takes the left piece.
    pub fn eval_step_convention(&self, t: f64) -> Result<f64> {
        self.regular.eval_step_convention(t)
    }

    /// Distributional derivative. Jumps of the regular part become atoms.
    pub fn derivative(&self) -> Result<GenFun> {
        if !self.atoms.is_empty() {
            return Err(Error::UnsupportedDistribution(
                "derivative of a delta atom".into(),
            ));
        }
        let regular = self.regular.derivative();
        let atoms = (0..self.regular.segments().len() - 1)
            .filter_map(|i| {
                let (l, r) = self.regular.limits_at(i, 0);
                let jump = r - l;
                (jump.abs() > ZERO_TOL * l.abs().max(r.abs())).then(|| DeltaAtom {
                    location: self.regular.segments()[i].hi,
                    weight: jump,
                })
            })
            .collect();
        GenFun::new(regular, atoms)
    }

    pub fn scale(&self, c: f64) -> GenFun {
        GenFun {
            regular: self.regular.map(|e| e.scaled(c)),
            atoms: normalize_atoms(
                self.atoms
                    .iter()
                    .map(|a| DeltaAtom {
                        location: a.location,
                        weight: c * a.weight,
                    })
                    .collect(),
            ),
        }
    }

    pub fn add(&self, other: &GenFun) -> Result<GenFun> {
        let regular = self
            .regular
            .zip_with(&other.regular, |a, b| a.clone() + b.clone())?;
        let atoms = self.atoms.iter().chain(&other.atoms).copied().collect();
        GenFun::new(regular, atoms)
    }

    /// Adds a regular piecewise function.
    pub fn add_regular(&self, h: &PiecewiseFn) -> Result<GenFun> {
        self.add(&GenFun::regular_only(h.clone()))
    }

    /// Multiplies by a piecewise function that is continuous at every atom.
    ///
    /// Atoms scale by the value of `h` at their location.
    pub fn mul_continuous(&self, h: &PiecewiseFn) -> Result<GenFun> {
        self.combine_continuous(h, |a, b| a.clone() * b.clone(), |w, v| w * v)
    }

    /// Divides by a piecewise function that is continuous at every atom.
    pub fn div_continuous(&self, h: &PiecewiseFn) -> Result<GenFun> {
        self.combine_continuous(h, |a, b| a.clone() / b.clone(), |w, v| w / v)
    }

    fn combine_continuous(
        &self,
        h: &PiecewiseFn,
        law: impl Fn(&Expr, &Expr) -> Expr,
        weight: impl Fn(f64, f64) -> f64,
    ) -> Result<GenFun> {
        let regular = self.regular.zip_with(h, law)?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| match h.eval(a.location) {
                Ok(v) => Ok(DeltaAtom {
                    location: a.location,
                    weight: weight(a.weight, v),
                }),
                Err(Error::AmbiguousPoint { .. }) => Err(Error::UnsupportedDistribution(format!(
                    "product of a delta atom with a function that jumps at t = {}",
                    a.location
                ))),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?;
        GenFun::new(regular, atoms)
    }

    /// Pointwise square of the regular part; δ² is not representable.
    pub fn square(&self) -> Result<GenFun> {
        if !self.atoms.is_empty() {
            return Err(Error::UnsupportedDistribution(
                "square of a function with delta atoms".into(),
            ));
        }
        Ok(GenFun::regular_only(self.regular.map(Expr::square)))
    }

    /// `∫ regular·φ dt + Σ w_i φ(t_i)` over `interval`, which must contain the
    /// support of `phi` and lie in the closed domain.
    pub fn weak_pairing(
        &self,
        phi: impl Fn(f64) -> f64,
        interval: (f64, f64),
        tol: QuadTol,
    ) -> Result<f64> {
        let (a, b) = interval;
        let (lo, hi) = self.domain();
        if !(a >= lo && b <= hi && a < b) {
            return Err(Error::Domain {
                t: if a < lo { a } else { b },
                lo,
                hi,
            });
        }
        let mut points = vec![a];
        points.extend(self.regular.breakpoints().into_iter().filter(|&t| t > a && t < b));
        points.push(b);
        let integrand = |t: f64| {
            let v = match self.regular.locate(t) {
                Ok(Location::Interior(i)) => self.regular.segments()[i].law.value(t),
                Ok(Location::Breakpoint(_)) => self.regular.eval_step_convention(t).unwrap_or(f64::NAN),
                Err(_) => f64::NAN,
            };
            v * phi(t)
        };
        let regular = integrate_split(integrand, &points, tol)?;
        if !regular.value.is_finite() {
            return Err(Error::QuadratureFailure {
                a,
                b,
                error: f64::INFINITY,
            });
        }
        let singular: f64 = self
            .atoms
            .iter()
            .filter(|d| d.location >= a && d.location <= b)
            .map(|d| d.weight * phi(d.location))
            .sum();
        Ok(regular.value + singular)
    }
}

impl From<PiecewiseFn> for GenFun {
    fn from(f: PiecewiseFn) -> Self {
        GenFun::regular_only(f)
    }
}
