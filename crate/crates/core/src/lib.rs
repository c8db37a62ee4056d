//! Numerical verification of the spectral theory of Koch maps `F_{k,m}` and
//! `G_{k,m}` attached to post-critically finite unicritical polynomials
//! `t^d + c`.

pub mod error;
pub mod fixed_points;
pub mod numeric;
pub mod quad_diff;
pub mod space;
pub mod spectral;
pub mod suites;

pub use error::{KochError, Result};
