pub mod battery;
pub mod budget;
pub mod error;
pub mod fool;
pub mod krand;
pub mod moments;
pub mod mollify;
pub mod poly;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod structure;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

/// Floating-point multilinear polynomial.
pub type Poly = poly::MultilinearPolynomial<f64>;
/// Exact rational multilinear polynomial.
pub type ExactPoly = poly::MultilinearPolynomial<Rational>;
/// Floating-point decomposition.
pub type Decomp = structure::Decomposition<f64>;
/// Exact rational decomposition.
pub type ExactDecomp = structure::Decomposition<Rational>;
