//! Sparse polynomials, their text and JSON formats, symmetric forms and the
//! reduction from general to multilinear polynomials.

mod compiled;
mod format;
mod general;
mod monomial;
mod multilinear;
mod multilinearize;
mod tensor;

pub use compiled::CompiledPoly;
pub use format::{CoeffLiteral, PolyJson, TermJson};
pub use general::{GeneralPolynomial, PowerProduct};
pub use monomial::Monomial;
pub use multilinear::MultilinearPolynomial;
pub use multilinearize::{multilinearize, SplitPolynomial};
pub use tensor::{tensorize, SymmetricForm};
