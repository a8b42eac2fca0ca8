//! Experiment harness: sign expectations, fooling-error curves,
//! anticoncentration curves, the expectation-error bound and the
//! sign-versus-Gaussian moment comparison.

mod anticoncentration;
mod bernoulli;
mod config;
mod curve;
mod expectation;
mod sign;

pub use anticoncentration::{
    anticoncentration_curve, log_grid, AntiRow, AnticoncentrationReport, ANTI_CSV_HEADER, CW_CONSTANT, EXPONENT_SLACK,
};
pub use bernoulli::{
    bernoulli_comparison_study, BernoulliRow, BernoulliStudy, BERNOULLI_CSV_HEADER, STUDY_MAX_K, STUDY_MAX_VARS,
};
pub use config::{hard_product, ExperimentConfig, Generator, NamedPoly, PolySource, SamplerTemplate, MIN_SAMPLES};
pub use curve::{
    fooling_curve, fooling_curve_with, poly_seed, CurveRow, ExperimentReport, PolyCurve, FOOL_CSV_HEADER,
};
pub use expectation::{expectation_error_bound, ExpectationErrorReport, EXPECTATION_K};
pub use sign::sign_expectation;
