use std::fmt;

use super::expr::Expr;
use super::piece::AnalyticPiece;
use crate::error::{Error, Result};

/// Relative tolerance under which two one-sided limits count as equal and a
/// delta weight counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Highest derivative order inspected when classifying a breakpoint.
pub const MAX_CONTINUITY_ORDER: usize = 6;

/// `|a - b|` is negligible against the larger of the two magnitudes.
pub fn same_within_tol(a: f64, b: f64) -> bool {
    (b - a).abs() <= ZERO_TOL * a.abs().max(b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Regularity class at a breakpoint, measured from one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Continuity {
    /// The values themselves jump.
    Jump,
    /// Values agree, first derivatives do not.
    C0,
    /// Values and first derivatives agree, some higher derivative jumps.
    C1,
    /// All derivatives up to [`MAX_CONTINUITY_ORDER`] agree.
    Smooth,
}

impl fmt::Display for Continuity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Continuity::Jump => "discontinuous",
            Continuity::C0 => "C0-only",
            Continuity::C1 => "C1",
            Continuity::Smooth => "C-infinity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub law: Expr,
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    pub fn new(law: impl Into<Expr>, lo: f64, hi: f64) -> Self {
        Segment {
            law: law.into(),
            lo,
            hi,
        }
    }
}

/// Where a time falls relative to the segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Strictly inside segment `i`.
    Interior(usize),
    /// Exactly on the boundary between segments `i` and `i + 1`.
    Breakpoint(usize),
}

/// A function on an open interval `(t0, t_inf)` given by closed-form laws on
/// contiguous segments.
///
/// A breakpoint belongs to neither segment; `eval` resolves it only when the
/// one-sided values agree.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn {
    segments: Vec<Segment>,
}

impl PiecewiseFn {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSegmentation("no segments".into()));
        }
        let last = segments.len() - 1;
        for (i, s) in segments.iter().enumerate() {
            if s.lo.is_nan() || s.hi.is_nan() || !s.lo.is_finite() {
                return Err(Error::InvalidSegmentation(format!(
                    "segment {i} has a non-finite lower bound or NaN bound"
                )));
            }
            if s.hi.is_infinite() && i != last {
                return Err(Error::InvalidSegmentation(format!(
                    "segment {i} is unbounded but is not the last segment"
                )));
            }
            if s.lo >= s.hi {
                return Err(Error::InvalidSegmentation(format!(
                    "segment {i} has t_lo = {} >= t_hi = {}",
                    s.lo, s.hi
                )));
            }
            if s.law.needs_positive_time() && s.lo < 0.0 {
                return Err(Error::InvalidSegmentation(format!(
                    "segment {i} contains a power law but starts at t = {} < 0",
                    s.lo
                )));
            }
        }
        for (i, w) in segments.windows(2).enumerate() {
            if w[0].hi > w[1].lo {
                return Err(Error::InvalidSegmentation(format!(
                    "segments {i} and {} overlap on [{}, {}]",
                    i + 1,
                    w[1].lo,
                    w[0].hi
                )));
            }
            if w[0].hi < w[1].lo {
                return Err(Error::InvalidSegmentation(format!(
                    "gap between segments {i} and {} on ({}, {})",
                    i + 1,
                    w[0].hi,
                    w[1].lo
                )));
            }
        }
        Ok(PiecewiseFn { segments })
    }

    pub fn single(law: impl Into<Expr>, lo: f64, hi: f64) -> Result<Self> {
        PiecewiseFn::new(vec![Segment::new(law, lo, hi)])
    }

    /// One piece per interval, `pieces.len() == breakpoints.len() + 1`.
    pub fn from_pieces(
        pieces: &[AnalyticPiece],
        breakpoints: &[f64],
        domain: (f64, f64),
    ) -> Result<Self> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::ArityMismatch {
                expected: breakpoints.len() + 1,
                breakpoints: breakpoints.len(),
                pieces: pieces.len(),
            });
        }
        let mut edges = Vec::with_capacity(breakpoints.len() + 2);
        edges.push(domain.0);
        edges.extend_from_slice(breakpoints);
        edges.push(domain.1);
        let segments = pieces
            .iter()
            .zip(edges.windows(2))
            .map(|(p, e)| Segment::new(*p, e[0], e[1]))
            .collect();
        PiecewiseFn::new(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.segments[0].lo, self.segments[self.segments.len() - 1].hi)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments[1..].iter().map(|s| s.lo).collect()
    }

    pub fn locate(&self, t: f64) -> Result<Location> {
        let (lo, hi) = self.domain();
        if !(t > lo && t < hi) {
            return Err(Error::Domain { t, lo, hi });
        }
        // number of segments whose upper bound is below t
        let i = self.segments.partition_point(|s| s.hi < t);
        if self.segments[i].hi == t {
            Ok(Location::Breakpoint(i))
        } else {
            Ok(Location::Interior(i))
        }
    }

    /// Value at `t`; refuses breakpoints where the value jumps.
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self.locate(t)? {
            Location::Interior(i) => Ok(self.segments[i].law.value(t)),
            Location::Breakpoint(i) => {
                let (l, r) = self.limits_at(i, 0);
                if same_within_tol(l, r) {
                    Ok(l)
                } else {
                    Err(Error::AmbiguousPoint { t })
                }
            }
        }
    }

    pub fn eval_one_sided(&self, t: f64, side: Side) -> Result<f64> {
        match self.locate(t)? {
            Location::Interior(i) => Ok(self.segments[i].law.value(t)),
            Location::Breakpoint(i) => {
                let (l, r) = self.limits_at(i, 0);
                Ok(match side {
                    Side::Left => l,
                    Side::Right => r,
                })
            }
        }
    }

    /// Step-function convention `mu(0) = 0`: a breakpoint takes the left piece.
    pub fn eval_step_convention(&self, t: f64) -> Result<f64> {
        self.eval_one_sided(t, Side::Left)
    }

    /// `(left, right)` limits of the `order`-th derivative at breakpoint `i`.
    pub fn limits_at(&self, i: usize, order: usize) -> (f64, f64) {
        let (left, right) = (&self.segments[i], &self.segments[i + 1]);
        let t = left.hi;
        if order == 0 {
            (left.law.value(t), right.law.value(t))
        } else {
            (
                left.law.nth_derivative(order).value(t),
                right.law.nth_derivative(order).value(t),
            )
        }
    }

    /// Right limit minus left limit of the `order`-th derivative at breakpoint `i`.
    pub fn jump_at(&self, i: usize, order: usize) -> f64 {
        let (l, r) = self.limits_at(i, order);
        r - l
    }

    pub fn continuity_at(&self, i: usize) -> Continuity {
        let (mut left, mut right) = (
            self.segments[i].law.clone(),
            self.segments[i + 1].law.clone(),
        );
        let t = self.segments[i].hi;
        for order in 0..=MAX_CONTINUITY_ORDER {
            if !same_within_tol(left.value(t), right.value(t)) {
                return match order {
                    0 => Continuity::Jump,
                    1 => Continuity::C0,
                    _ => Continuity::C1,
                };
            }
            if order < MAX_CONTINUITY_ORDER {
                left = left.derivative();
                right = right.derivative();
            }
        }
        Continuity::Smooth
    }

    pub fn continuity_classes(&self) -> Vec<(f64, Continuity)> {
        (0..self.segments.len() - 1)
            .map(|i| (self.segments[i].hi, self.continuity_at(i)))
            .collect()
    }

    /// Segmentwise closed-form derivative; jumps are not tracked here.
    pub fn derivative(&self) -> PiecewiseFn {
        self.map(Expr::derivative)
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> PiecewiseFn {
        PiecewiseFn {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    law: f(&s.law),
                    lo: s.lo,
                    hi: s.hi,
                })
                .collect(),
        }
    }

    /// Splits segments at every point of `points` that lies strictly inside one.
    pub fn refine(&self, points: &[f64]) -> PiecewiseFn {
        let mut segments = Vec::with_capacity(self.segments.len() + points.len());
        for s in &self.segments {
            let mut cuts: Vec<f64> = points
                .iter()
                .copied()
                .filter(|&p| p > s.lo && p < s.hi)
                .collect();
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let mut lo = s.lo;
            for c in cuts {
                segments.push(Segment {
                    law: s.law.clone(),
                    lo,
                    hi: c,
                });
                lo = c;
            }
            segments.push(Segment {
                law: s.law.clone(),
                lo,
                hi: s.hi,
            });
        }
        PiecewiseFn { segments }
    }

    /// Combines two functions on the same domain over the union of their breakpoints.
    pub fn zip_with(
        &self,
        other: &PiecewiseFn,
        f: impl Fn(&Expr, &Expr) -> Expr,
    ) -> Result<PiecewiseFn> {
        if self.domain() != other.domain() {
            return Err(Error::InvalidSegmentation(format!(
                "domains differ: {:?} vs {:?}",
                self.domain(),
                other.domain()
            )));
        }
        let a = self.refine(&other.breakpoints());
        let b = other.refine(&self.breakpoints());
        debug_assert_eq!(a.segments.len(), b.segments.len());
        let segments = a
            .segments
            .iter()
            .zip(&b.segments)
            .map(|(x, y)| Segment {
                law: f(&x.law, &y.law),
                lo: x.lo,
                hi: x.hi,
            })
            .collect();
        PiecewiseFn::new(segments)
    }

    pub fn is_breakpoint(&self, t: f64) -> bool {
        self.segments[1..].iter().any(|s| s.lo == t)
    }
}
