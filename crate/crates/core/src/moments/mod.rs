//! Gaussian and sign moments, `M_ell` and the moment sandwich.

mod bernoulli;
mod empirical;
mod m_ell;
mod sandwich;
mod wick;

pub use bernoulli::{bernoulli_moment, bernoulli_moment_with, MAX_BERNOULLI_VARS};
pub use empirical::{empirical_moment, MIN_SAMPLES};
pub use m_ell::{
    m_ell, m_ell_form, FormMEll, MEllEstimate, SearchMode, SearchOptions, Witness, CERTIFY_RESTARTS, CERTIFY_TOL,
    EXHAUSTIVE_MAX_DEGREE, EXHAUSTIVE_MAX_VARS,
};
pub use sandwich::{
    moment_sandwich_report, sandwich_battery, sandwich_battery_spec, sandwich_window, BatterySpec, SandwichReport,
    SandwichRow, SANDWICH_CSV_HEADER,
};
pub use wick::{wick_moment, wick_moment_expanded, wick_moment_with};
