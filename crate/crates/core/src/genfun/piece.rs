//! Closed-form segment laws.
//!
//! The vocabulary is deliberately small: power laws `c t^p`, exponentials
//! `c e^{Kt}` and constants. All three are closed under differentiation, so
//! derivatives of any order stay exact.

use std::fmt;

/// A single closed-form law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticPiece {
    /// `coeff * t^exponent`, defined for `t > 0`.
    PowerLaw { coeff: f64, exponent: f64 },
    /// `coeff * exp(rate * t)`.
    Exponential { coeff: f64, rate: f64 },
    Constant(f64),
}

impl AnalyticPiece {
    pub fn power(coeff: f64, exponent: f64) -> Self {
        AnalyticPiece::PowerLaw { coeff, exponent }
    }

    pub fn exponential(coeff: f64, rate: f64) -> Self {
        AnalyticPiece::Exponential { coeff, rate }
    }

    pub fn constant(c: f64) -> Self {
        AnalyticPiece::Constant(c)
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            AnalyticPiece::PowerLaw { coeff, exponent } => {
                if coeff == 0.0 {
                    0.0
                } else {
                    coeff * t.powf(exponent)
                }
            }
            AnalyticPiece::Exponential { coeff, rate } => {
                if coeff == 0.0 {
                    0.0
                } else {
                    coeff * (rate * t).exp()
                }
            }
            AnalyticPiece::Constant(c) => c,
        }
    }

    /// First derivative, in closed form.
    pub fn derivative(&self) -> Self {
        match *self {
            AnalyticPiece::PowerLaw { coeff, exponent } => {
                if exponent == 0.0 || coeff == 0.0 {
                    AnalyticPiece::Constant(0.0)
                } else {
                    AnalyticPiece::PowerLaw {
                        coeff: coeff * exponent,
                        exponent: exponent - 1.0,
                    }
                    .normalized()
                }
            }
            AnalyticPiece::Exponential { coeff, rate } => {
                if rate == 0.0 || coeff == 0.0 {
                    AnalyticPiece::Constant(0.0)
                } else {
                    AnalyticPiece::Exponential {
                        coeff: coeff * rate,
                        rate,
                    }
                }
            }
            AnalyticPiece::Constant(_) => AnalyticPiece::Constant(0.0),
        }
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(*self, |p, _| p.derivative())
    }

    pub fn derivative_value(&self, t: f64, order: usize) -> f64 {
        self.nth_derivative(order).value(t)
    }

    pub fn scaled(&self, s: f64) -> Self {
        match *self {
            AnalyticPiece::PowerLaw { coeff, exponent } => AnalyticPiece::PowerLaw {
                coeff: coeff * s,
                exponent,
            },
            AnalyticPiece::Exponential { coeff, rate } => AnalyticPiece::Exponential {
                coeff: coeff * s,
                rate,
            },
            AnalyticPiece::Constant(c) => AnalyticPiece::Constant(c * s),
        }
    }

    pub fn coeff(&self) -> f64 {
        match *self {
            AnalyticPiece::PowerLaw { coeff, .. } | AnalyticPiece::Exponential { coeff, .. } => {
                coeff
            }
            AnalyticPiece::Constant(c) => c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff() == 0.0
    }

    /// Power laws are only evaluated on `t > 0`.
    pub fn needs_positive_time(&self) -> bool {
        matches!(self, AnalyticPiece::PowerLaw { exponent, coeff } if *exponent != 0.0 && *coeff != 0.0)
    }

    /// Rewrites degenerate power laws and exponentials (`t^0`, `e^{0t}`) as constants.
    fn normalized(self) -> Self {
        match self {
            AnalyticPiece::PowerLaw { coeff, exponent } if exponent == 0.0 => {
                AnalyticPiece::Constant(coeff)
            }
            AnalyticPiece::Exponential { coeff, rate } if rate == 0.0 => {
                AnalyticPiece::Constant(coeff)
            }
            p => p,
        }
    }

    /// True when the two pieces differ only in their coefficient.
    fn like(&self, other: &Self) -> bool {
        match (self, other) {
            (
                AnalyticPiece::PowerLaw { exponent: a, .. },
                AnalyticPiece::PowerLaw { exponent: b, .. },
            ) => a.to_bits() == b.to_bits(),
            (
                AnalyticPiece::Exponential { rate: a, .. },
                AnalyticPiece::Exponential { rate: b, .. },
            ) => a.to_bits() == b.to_bits(),
            (AnalyticPiece::Constant(_), AnalyticPiece::Constant(_)) => true,
            _ => false,
        }
    }

    fn with_coeff(&self, c: f64) -> Self {
        match *self {
            AnalyticPiece::PowerLaw { exponent, .. } => AnalyticPiece::PowerLaw { coeff: c, exponent },
            AnalyticPiece::Exponential { rate, .. } => AnalyticPiece::Exponential { coeff: c, rate },
            AnalyticPiece::Constant(_) => AnalyticPiece::Constant(c),
        }
    }
}

impl fmt::Display for AnalyticPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticPiece::PowerLaw { coeff, exponent } => write!(f, "{coeff}*t^{exponent}"),
            AnalyticPiece::Exponential { coeff, rate } => write!(f, "{coeff}*exp({rate}*t)"),
            AnalyticPiece::Constant(c) => write!(f, "{c}"),
        }
    }
}

/// A linear combination of [`AnalyticPiece`]s with like terms merged.
///
/// Closed under addition, scaling and differentiation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PieceSum {
    terms: Vec<AnalyticPiece>,
}

impl PieceSum {
    pub fn zero() -> Self {
        PieceSum { terms: Vec::new() }
    }

    pub fn from_pieces<I: IntoIterator<Item = AnalyticPiece>>(pieces: I) -> Self {
        let mut sum = PieceSum::zero();
        for p in pieces {
            sum.push(p);
        }
        sum
    }

    pub fn push(&mut self, piece: AnalyticPiece) {
        let piece = piece.normalized();
        if piece.is_zero() {
            return;
        }
        match self.terms.iter().position(|t| t.like(&piece)) {
            Some(i) => {
                let c = self.terms[i].coeff() + piece.coeff();
                if c == 0.0 {
                    self.terms.remove(i);
                } else {
                    self.terms[i] = self.terms[i].with_coeff(c);
                }
            }
            None => self.terms.push(piece),
        }
    }

    pub fn terms(&self) -> &[AnalyticPiece] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn value(&self, t: f64) -> f64 {
        self.terms.iter().map(|p| p.value(t)).sum()
    }

    pub fn derivative(&self) -> Self {
        PieceSum::from_pieces(self.terms.iter().map(AnalyticPiece::derivative))
    }

    pub fn scaled(&self, s: f64) -> Self {
        PieceSum::from_pieces(self.terms.iter().map(|p| p.scaled(s)))
    }

    pub fn plus(&self, other: &PieceSum) -> Self {
        let mut out = self.clone();
        for p in &other.terms {
            out.push(*p);
        }
        out
    }

    pub fn needs_positive_time(&self) -> bool {
        self.terms.iter().any(AnalyticPiece::needs_positive_time)
    }

    /// The constant value, if the sum has no time dependence.
    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.as_slice() {
            [] => Some(0.0),
            [AnalyticPiece::Constant(c)] => Some(*c),
            _ => None,
        }
    }
}

impl From<AnalyticPiece> for PieceSum {
    fn from(p: AnalyticPiece) -> Self {
        PieceSum::from_pieces([p])
    }
}

impl fmt::Display for PieceSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, p) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
