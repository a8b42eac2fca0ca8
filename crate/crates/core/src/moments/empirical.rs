use crate::error::{invalid, Error, Result};
use crate::krand::Sampler;
use crate::poly::CompiledPoly;
use crate::stats::{par_mean, Estimate};

/// Fewest samples [`empirical_moment`] accepts.
pub const MIN_SAMPLES: u64 = 1000;

/// Mean and standard error of `p(X)^k` over samples `0..n_samples` of `sampler`.
pub fn empirical_moment(p: &CompiledPoly, sampler: &impl Sampler, k: u32, n_samples: u64) -> Result<Estimate> {
    if n_samples < MIN_SAMPLES {
        return Err(invalid(format!("need at least {MIN_SAMPLES} samples, got {n_samples}")));
    }
    if sampler.dim() != p.nvars() {
        return Err(Error::DimensionMismatch { expected: p.nvars(), got: sampler.dim() });
    }
    let k = k as i32;
    Ok(par_mean(n_samples, sampler.dim(), |i, x| {
        sampler.sample_into(i, x);
        p.eval(x).powi(k)
    })
    .into())
}
