//! The naive oracle: find the active piece, differentiate it by hand.
//!
//! Nothing here goes through [`AnalyticPiece::derivative`]; the falling
//! factorials and rate powers are spelled out so that a bug in the symbolic
//! path cannot hide behind the same bug in its reference.

use crate::error::{Error, Result};
use crate::genfun::AnalyticPiece;

/// `d^order/dt^order` of a single piece at `t`, written out longhand.
pub fn piece_derivative(piece: &AnalyticPiece, order: usize, t: f64) -> f64 {
    match *piece {
        AnalyticPiece::PowerLaw { coeff, exponent } => {
            let mut factor = coeff;
            for j in 0..order {
                factor *= exponent - j as f64;
            }
            if factor == 0.0 {
                0.0
            } else {
                factor * t.powf(exponent - order as f64)
            }
        }
        AnalyticPiece::Exponential { coeff, rate } => {
            coeff * rate.powi(order as i32) * (rate * t).exp()
        }
        AnalyticPiece::Constant(c) => {
            if order == 0 {
                c
            } else {
                0.0
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteDerivative {
    pieces: Vec<AnalyticPiece>,
    breakpoints: Vec<f64>,
    order: usize,
}

/// Piecewise derivative by direct lookup. The segmentation is not validated
/// beyond arity; callers pass the same data they gave the code under test.
pub fn brute_piecewise_derivative(
    pieces: &[AnalyticPiece],
    breakpoints: &[f64],
    order: usize,
) -> Result<BruteDerivative> {
    if pieces.len() != breakpoints.len() + 1 {
        return Err(Error::ArityMismatch {
            expected: breakpoints.len() + 1,
            breakpoints: breakpoints.len(),
            pieces: pieces.len(),
        });
    }
    Ok(BruteDerivative {
        pieces: pieces.to_vec(),
        breakpoints: breakpoints.to_vec(),
        order,
    })
}

impl BruteDerivative {
    pub fn eval(&self, t: f64) -> Result<f64> {
        let mut active = 0;
        for &b in &self.breakpoints {
            if t == b {
                return Err(Error::BreakpointQuery { t });
            }
            if t > b {
                active += 1;
            }
        }
        Ok(piece_derivative(&self.pieces[active], self.order, t))
    }

    /// `g_{i+1}(t_i) - g_i(t_i)` for the derivative one order below this one;
    /// the δ weight at breakpoint `i` when the lower derivative jumps.
    pub fn jump_below(&self, i: usize) -> f64 {
        let t = self.breakpoints[i];
        let order = self.order.saturating_sub(1);
        piece_derivative(&self.pieces[i + 1], order, t) - piece_derivative(&self.pieces[i], order, t)
    }
}
