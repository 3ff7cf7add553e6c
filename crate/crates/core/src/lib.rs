//! Distributional curvature of warped-product FRW spacetimes whose scale
//! factor is only C⁰ or C¹ across finitely many transition times.

pub mod cosmo;
pub mod error;
pub mod genfun;
pub mod multiwarp;
pub mod quadrature;
pub mod verify;
pub mod warped;

pub use error::{Error, Result};
