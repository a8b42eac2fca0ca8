//! Decomposition of a multilinear polynomial into outer polynomials of
//! moment-controlled parts, and its verifier.

mod decompose;
mod json;
mod verify;

pub use decompose::{decompose, default_schedule, Class, DecomposeOptions, Decomposition, HTerm, LoopRecord, Part};
pub use json::{ClassJson, DecompositionJson, HTermJson, PartJson};
pub use verify::{
    verify_decomposition, CheckRow, VerifyConstants, VerifyReport, RECONSTRUCTION_POINTS, RECONSTRUCTION_TOL,
    UNIT_NORM_TOL, VERIFY_CSV_HEADER,
};
