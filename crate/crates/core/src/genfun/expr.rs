//! Segment laws built from [`PieceSum`]s with sums, products and quotients.
//!
//! Curvature coefficients such as `(f'^2 + k)/f^2` leave the linear vocabulary,
//! so segments carry a small expression tree. Differentiation applies the
//! product and quotient rules symbolically; nothing is simplified beyond
//! folding linear combinations and constants.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::piece::{AnalyticPiece, PieceSum};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lin(PieceSum),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Self {
        Expr::Lin(PieceSum::from(AnalyticPiece::Constant(c)))
    }

    pub fn zero() -> Self {
        Expr::Lin(PieceSum::zero())
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Expr::Lin(s) => s.value(t),
            Expr::Add(a, b) => a.value(t) + b.value(t),
            Expr::Mul(a, b) => a.value(t) * b.value(t),
            Expr::Div(a, b) => a.value(t) / b.value(t),
        }
    }

    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Lin(s) => Expr::Lin(s.derivative()),
            Expr::Add(a, b) => a.derivative() + b.derivative(),
            Expr::Mul(a, b) => a.derivative() * (**b).clone() + (**a).clone() * b.derivative(),
            Expr::Div(a, b) => {
                let num = a.derivative() * (**b).clone() - (**a).clone() * b.derivative();
                num / ((**b).clone() * (**b).clone())
            }
        }
    }

    pub fn nth_derivative(&self, order: usize) -> Expr {
        (0..order).fold(self.clone(), |e, _| e.derivative())
    }

    pub fn as_lin(&self) -> Option<&PieceSum> {
        match self {
            Expr::Lin(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.as_lin().and_then(PieceSum::as_constant)
    }

    pub fn scaled(&self, s: f64) -> Expr {
        match self {
            Expr::Lin(p) => Expr::Lin(p.scaled(s)),
            _ if s == 0.0 => Expr::zero(),
            _ if s == 1.0 => self.clone(),
            _ => Expr::Mul(Box::new(Expr::constant(s)), Box::new(self.clone())),
        }
    }

    pub fn square(&self) -> Expr {
        self.clone() * self.clone()
    }

    pub fn needs_positive_time(&self) -> bool {
        match self {
            Expr::Lin(s) => s.needs_positive_time(),
            Expr::Add(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.needs_positive_time() || b.needs_positive_time()
            }
        }
    }
}

impl From<PieceSum> for Expr {
    fn from(s: PieceSum) -> Self {
        Expr::Lin(s)
    }
}

impl From<AnalyticPiece> for Expr {
    fn from(p: AnalyticPiece) -> Self {
        Expr::Lin(PieceSum::from(p))
    }
}

impl Add for Expr {
    type Output = Expr;

    fn add(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Lin(a), Expr::Lin(b)) => Expr::Lin(a.plus(&b)),
            (Expr::Lin(a), b) if a.is_zero() => b,
            (a, Expr::Lin(b)) if b.is_zero() => a,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        self.scaled(-1.0)
    }
}

impl Sub for Expr {
    type Output = Expr;

    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Mul for Expr {
    type Output = Expr;

    fn mul(self, rhs: Expr) -> Expr {
        match (self.as_constant(), rhs.as_constant()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            (Some(a), None) => rhs.scaled(a),
            (None, Some(b)) => self.scaled(b),
            _ => Expr::Mul(Box::new(self), Box::new(rhs)),
        }
    }
}

impl Div for Expr {
    type Output = Expr;

    fn div(self, rhs: Expr) -> Expr {
        match rhs.as_constant() {
            Some(c) if c != 0.0 => self.scaled(1.0 / c),
            _ if self.as_constant() == Some(0.0) => Expr::zero(),
            _ => Expr::Div(Box::new(self), Box::new(rhs)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lin(s) => write!(f, "{s}"),
            Expr::Add(a, b) => write!(f, "({a}) + ({b})"),
            Expr::Mul(a, b) => write!(f, "({a})*({b})"),
            Expr::Div(a, b) => write!(f, "({a})/({b})"),
        }
    }
}
