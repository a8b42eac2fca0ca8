//! `k`-wise independent Gaussian and sign families from polynomial hashing
//! over finite fields, the independent baseline, and the correlated
//! expansion used by the multilinear reduction.

mod batch;
mod enumerate;
mod expand;
mod field;
mod quantile;
mod sampler;

pub use batch::{sample_iid, sample_iid_batch, sample_kwise, sample_kwise_batch, Provenance, SampleBatch};
pub use enumerate::{enumerate_joint_counts, is_exactly_uniform};
pub use expand::{correlated_expand, expand_coordinate, multilinearization_exceedance};
pub use field::{Field, FieldSpec};
pub use quantile::{ks_distance, normal_cdf, normal_quantile};
pub use sampler::{IidSampler, KWiseSampler, KWiseSpec, Sampler, Target, GAUSSIAN_MIN_FIELD};
