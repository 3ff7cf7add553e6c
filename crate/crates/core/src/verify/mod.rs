//! Independent oracles for the distributional formulas.

pub mod brute;
pub mod mollify;
pub mod report;

pub use brute::{brute_piecewise_derivative, piece_derivative, BruteDerivative};
pub use mollify::{
    atom_extraction, centered_bump, exact_pairing, initial_spec, kernel, mollified_pairing,
    mollified_second_derivative, mollify, random_bumps, weak_convergence, Bump, ConvergenceStudy,
    MollifierSpec, SampledFn,
};
pub use report::{
    atom_relative_error, random_interior_points, rel_err, textbook_frw_curvature, verify_cosmology,
    verify_model, Check, VerificationReport, VerifyOptions, ATOM_EXTRACTION_TOL, ATOM_ULPS,
    CLOSED_FORM_TOL, RATIO_BAND, TEXTBOOK_TOL,
};
