//! Fourier-transform mollifiers, mollified signs, Taylor bounds and
//! parameter schedules.

mod kernel;
mod sampler;
mod schedule;
mod sign;
mod taylor;
mod verify;

pub use kernel::{
    g_derivs, rho2_derivs, rho_1d, rho_1d_deriv, rho_radial, sphere_area, Profile, RadialKernel, RadialTable,
    RHO2_AT_ZERO, STANDARD_R_MAX, TABLE_KNOTS,
};
pub use sampler::RadialSampler;
pub use schedule::{parameter_schedule, ClassParams, ParameterSchedule, ScheduleMode};
pub use sign::{mollified_sign, sign, Mollifier, MIN_MC_SAMPLES};
pub use taylor::{mollified_sign_1d, taylor_1d, taylor_remainder_bound};
pub use verify::{
    chebyshev_tail_constant, derivative_l1, rho2_second_moment, tail_mass, verify_mollifier, MollifierReport,
    PropertyRow, DERIVATIVE_SLACK, MOLLIFIER_CSV_HEADER,
};
