//! Unit-step reconstruction of piecewise derivatives.
//!
//! Given pieces `f^(0), …, f^(n)` glued at `t_1 < … < t_n`, the derivative of
//! order `m` is written as a single combination of unit steps with the mean
//! `A = (1/n) Σ_{k<n} f^(k)` of the first `n` pieces:
//!
//! ```text
//!   (f^(n) - f^(n-1) + A) μ(t - t_n) + Σ_{l=1}^{n-1} (-f^(l-1) + A) μ(t - t_l)
//! + A μ(t_n - t)                      + Σ_{l=1}^{n-1} (-f^(l)   + A) μ(t_l - t)
//! ```
//!
//! For C⁰ glues the second derivative additionally carries
//! `(f^(l)' - f^(l-1)')(t_l) δ(t - t_l)` at every breakpoint.
//!
//! Coefficients are exact rationals. [`StepCombination::collect`] sums them
//! per interval before touching floating point, so the symbolic
//! reconstruction is exact whenever the combination is algebraically right.

use num_rational::Ratio;

use super::piece::{AnalyticPiece, PieceSum};
use super::piecewise::{PiecewiseFn, Segment, ZERO_TOL};
use super::{DeltaAtom, GenFun};
use crate::error::{Error, Result};

pub type Coeff = Ratio<i64>;

/// Unit step with `μ(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    /// `μ(t - t_l)`: one strictly after `t_l`.
    After(f64),
    /// `μ(t_l - t)`: one strictly before `t_l`.
    Before(f64),
    /// No step (single-segment functions).
    Always,
}

impl Step {
    pub fn value(&self, t: f64) -> f64 {
        let on = match *self {
            Step::After(tl) => t > tl,
            Step::Before(tl) => t < tl,
            Step::Always => true,
        };
        if on {
            1.0
        } else {
            0.0
        }
    }

    /// Whether the step is one on the open interval `(lo, hi)`.
    fn active_on(&self, lo: f64, hi: f64) -> bool {
        match *self {
            Step::After(tl) => lo >= tl,
            Step::Before(tl) => hi <= tl,
            Step::Always => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: Coeff,
    pub piece: AnalyticPiece,
}

impl Term {
    pub fn new(coeff: Coeff, piece: AnalyticPiece) -> Self {
        Term { coeff, piece }
    }

    fn value(&self, t: f64) -> f64 {
        ratio_to_f64(self.coeff) * self.piece.value(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepTerm {
    pub step: Step,
    pub parts: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTerm {
    pub location: f64,
    pub parts: Vec<Term>,
}

fn ratio_to_f64(r: Coeff) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Adds `coeff * piece` into an accumulator keyed by piece identity.
fn accumulate(acc: &mut Vec<(AnalyticPiece, Coeff)>, term: &Term) {
    match acc.iter_mut().find(|(p, _)| *p == term.piece) {
        Some((_, c)) => *c += term.coeff,
        None => acc.push((term.piece, term.coeff)),
    }
}

/// A literal combination of step-weighted terms and delta rows.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCombination {
    domain: (f64, f64),
    breakpoints: Vec<f64>,
    steps: Vec<StepTerm>,
    deltas: Vec<DeltaTerm>,
}

impl StepCombination {
    pub fn new(
        domain: (f64, f64),
        breakpoints: Vec<f64>,
        steps: Vec<StepTerm>,
        deltas: Vec<DeltaTerm>,
    ) -> Self {
        StepCombination {
            domain,
            breakpoints,
            steps,
            deltas,
        }
    }

    pub fn steps(&self) -> &[StepTerm] {
        &self.steps
    }

    pub fn deltas(&self) -> &[DeltaTerm] {
        &self.deltas
    }

    /// Pointwise evaluation of the literal sum, in floating point, with `μ(0) = 0`.
    pub fn eval_literal(&self, t: f64) -> f64 {
        self.steps
            .iter()
            .map(|s| s.step.value(t) * s.parts.iter().map(|p| p.value(t)).sum::<f64>())
            .sum()
    }

    /// The rational coefficient of each distinct piece under `step`, summed over
    /// every term carrying that step.
    pub fn coefficients_of(&self, step: Step) -> Vec<(AnalyticPiece, Coeff)> {
        let mut acc = Vec::new();
        for s in self.steps.iter().filter(|s| s.step == step) {
            for term in &s.parts {
                accumulate(&mut acc, term);
            }
        }
        acc.retain(|(_, c)| *c != Coeff::from_integer(0));
        acc
    }

    /// Collects the active terms on each interval into one segment law.
    pub fn collect(&self) -> Result<PiecewiseFn> {
        let mut edges = Vec::with_capacity(self.breakpoints.len() + 2);
        edges.push(self.domain.0);
        edges.extend_from_slice(&self.breakpoints);
        edges.push(self.domain.1);
        let mut segments = Vec::with_capacity(edges.len() - 1);
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut acc = Vec::new();
            for s in self.steps.iter().filter(|s| s.step.active_on(lo, hi)) {
                for term in &s.parts {
                    accumulate(&mut acc, term);
                }
            }
            let law = PieceSum::from_pieces(
                acc.iter()
                    .filter(|(_, c)| *c != Coeff::from_integer(0))
                    .map(|(p, c)| p.scaled(ratio_to_f64(*c))),
            );
            segments.push(Segment::new(law, lo, hi));
        }
        PiecewiseFn::new(segments)
    }

    /// Delta weights, with sums that cancel to roundoff dropped.
    pub fn delta_atoms(&self) -> Vec<DeltaAtom> {
        self.deltas
            .iter()
            .filter_map(|d| {
                let values: Vec<f64> = d.parts.iter().map(|p| p.value(d.location)).collect();
                let weight: f64 = values.iter().sum();
                let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                (weight.abs() > ZERO_TOL * scale).then_some(DeltaAtom {
                    location: d.location,
                    weight,
                })
            })
            .collect()
    }

    pub fn to_genfun(&self) -> Result<GenFun> {
        GenFun::new(self.collect()?, self.delta_atoms())
    }
}

/// Pieces glued at strictly increasing breakpoints on an open domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pieces: Vec<AnalyticPiece>,
    breakpoints: Vec<f64>,
    domain: (f64, f64),
}

impl Segmentation {
    pub fn new(pieces: Vec<AnalyticPiece>, breakpoints: Vec<f64>, domain: (f64, f64)) -> Result<Self> {
        // validation is shared with PiecewiseFn
        PiecewiseFn::from_pieces(&pieces, &breakpoints, domain)?;
        Ok(Segmentation {
            pieces,
            breakpoints,
            domain,
        })
    }

    pub fn pieces(&self) -> &[AnalyticPiece] {
        &self.pieces
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn to_piecewise(&self) -> PiecewiseFn {
        PiecewiseFn::from_pieces(&self.pieces, &self.breakpoints, self.domain)
            .expect("validated on construction")
    }

    fn derived_pieces(&self, order: usize) -> Vec<AnalyticPiece> {
        self.pieces.iter().map(|p| p.nth_derivative(order)).collect()
    }
}

/// The step combination for pieces `g_0..=g_n` at `breakpoints` (`n` of them).
pub fn step_terms(pieces: &[AnalyticPiece], breakpoints: &[f64]) -> Result<Vec<StepTerm>> {
    let n = breakpoints.len();
    if pieces.len() != n + 1 {
        return Err(Error::ArityMismatch {
            expected: n + 1,
            breakpoints: n,
            pieces: pieces.len(),
        });
    }
    let one = Coeff::from_integer(1);
    if n == 0 {
        return Ok(vec![StepTerm {
            step: Step::Always,
            parts: vec![Term::new(one, pieces[0])],
        }]);
    }
    let inv_n = Coeff::new(1, n as i64);
    let mean: Vec<Term> = pieces[..n].iter().map(|p| Term::new(inv_n, *p)).collect();
    let with_mean = |mut head: Vec<Term>| {
        head.extend_from_slice(&mean);
        head
    };
    let t = |l: usize| breakpoints[l - 1];

    let mut terms = Vec::with_capacity(2 * n);
    terms.push(StepTerm {
        step: Step::After(t(n)),
        parts: with_mean(vec![Term::new(one, pieces[n]), Term::new(-one, pieces[n - 1])]),
    });
    for l in 1..n {
        terms.push(StepTerm {
            step: Step::After(t(l)),
            parts: with_mean(vec![Term::new(-one, pieces[l - 1])]),
        });
    }
    terms.push(StepTerm {
        step: Step::Before(t(n)),
        parts: mean.clone(),
    });
    for l in 1..n {
        terms.push(StepTerm {
            step: Step::Before(t(l)),
            parts: with_mean(vec![Term::new(-one, pieces[l])]),
        });
    }
    Ok(terms)
}

/// Regularity assumed at every breakpoint when reconstructing `f''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Glue {
    /// `f` and `f'` continuous: no delta rows.
    C1,
    /// Only `f` continuous: `f'` jumps emit delta rows.
    C0,
}

pub fn fprime_combination(seg: &Segmentation) -> Result<StepCombination> {
    let steps = step_terms(&seg.derived_pieces(1), &seg.breakpoints)?;
    Ok(StepCombination::new(
        seg.domain,
        seg.breakpoints.clone(),
        steps,
        Vec::new(),
    ))
}

pub fn fpp_combination(seg: &Segmentation, glue: Glue) -> Result<StepCombination> {
    let steps = step_terms(&seg.derived_pieces(2), &seg.breakpoints)?;
    let deltas = match glue {
        Glue::C1 => Vec::new(),
        Glue::C0 => {
            let fp = seg.derived_pieces(1);
            let one = Coeff::from_integer(1);
            seg.breakpoints
                .iter()
                .enumerate()
                .map(|(i, &tl)| DeltaTerm {
                    location: tl,
                    parts: vec![Term::new(one, fp[i + 1]), Term::new(-one, fp[i])],
                })
                .collect()
        }
    };
    Ok(StepCombination::new(
        seg.domain,
        seg.breakpoints.clone(),
        steps,
        deltas,
    ))
}

/// `f'` as the step combination of the pieces' first derivatives; no atoms.
pub fn step_reconstruct_fprime(seg: &Segmentation) -> Result<GenFun> {
    fprime_combination(seg)?.to_genfun()
}

/// `f''` as the step combination of the pieces' second derivatives, with
/// delta rows at each breakpoint in [`Glue::C0`] mode.
pub fn step_reconstruct_fpp(seg: &Segmentation, glue: Glue) -> Result<GenFun> {
    fpp_combination(seg, glue)?.to_genfun()
}
