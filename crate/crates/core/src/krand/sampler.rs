use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::krand::field::{Field, FieldSpec};
use crate::krand::quantile::normal_quantile;
use crate::rng::{domain, substream};

/// Minimum field size for Gaussian marginals.
pub const GAUSSIAN_MIN_FIELD: u64 = 1 << 12;

/// Largest field for which the quantile table is precomputed.
const TABLE_LIMIT: u64 = 1 << 20;

/// A stateless source of samples: sample `index` is a pure function of the
/// sampler's parameters and `index`.
pub trait Sampler: Sync {
    fn dim(&self) -> usize;

    fn sample_into(&self, index: u64, out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Gaussian,
    Sign,
}

/// `k`-wise independent family over a finite field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KWiseSpec {
    pub k: usize,
    pub field: FieldSpec,
    pub n: usize,
    pub target: Target,
}

impl KWiseSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        Field::new(self.field)?;
        let q = self.field.size();
        if q < self.n as u64 {
            return Err(invalid(format!("field of size {q} is too small for {} coordinates", self.n)));
        }
        match self.target {
            Target::Gaussian if q < GAUSSIAN_MIN_FIELD => Err(invalid(format!(
                "gaussian target needs a field of size at least {GAUSSIAN_MIN_FIELD}, got {q}"
            ))),
            Target::Sign if !matches!(self.field, FieldSpec::Binary(_)) => {
                Err(invalid("sign target requires a binary field GF(2^b)"))
            }
            _ => Ok(()),
        }
    }
}

/// Fully independent standard Gaussians.
#[derive(Debug, Clone)]
pub struct IidSampler {
    n: usize,
    seed: u64,
    batch: u64,
}

impl IidSampler {
    pub fn new(n: usize, seed: u64, batch: u64) -> Self {
        Self { n, seed, batch }
    }
}

pub(crate) fn stream_domain(base: u64, batch: u64) -> u64 {
    (batch << 8) | base
}

impl Sampler for IidSampler {
    fn dim(&self) -> usize {
        self.n
    }

    fn sample_into(&self, index: u64, out: &mut [f64]) {
        let mut rng = substream(self.seed, stream_domain(domain::IID, self.batch), index);
        for v in out.iter_mut().take(self.n) {
            *v = rng.sample(StandardNormal);
        }
    }
}

/// Random degree-`(k-1)` polynomial over the field, evaluated at the points
/// `0, 1, ..., n-1`; any `k` coordinates are jointly uniform.
#[derive(Debug, Clone)]
pub struct KWiseSampler {
    spec: KWiseSpec,
    field: Field,
    seed: u64,
    batch: u64,
    table: Option<Vec<f64>>,
}

impl KWiseSampler {
    pub fn new(spec: KWiseSpec, seed: u64, batch: u64) -> Result<Self> {
        spec.validate()?;
        let field = Field::new(spec.field)?;
        let q = field.size();
        let table = (spec.target == Target::Gaussian && q <= TABLE_LIMIT)
            .then(|| (0..q).map(|u| normal_quantile((u as f64 + 0.5) / q as f64)).collect());
        Ok(Self { spec, field, seed, batch, table })
    }

    pub fn spec(&self) -> &KWiseSpec {
        &self.spec
    }

    /// Field values `h(0), ..., h(n-1)` for sample `index`.
    pub fn field_values(&self, index: u64, out: &mut [u32]) {
        let mut rng = substream(self.seed, stream_domain(domain::KWISE, self.batch), index);
        let q = self.field.size() as u32;
        let coeffs: smallvec::SmallVec<[u32; 32]> = (0..self.spec.k).map(|_| rng.random_range(0..q)).collect();
        for (i, v) in out.iter_mut().take(self.spec.n).enumerate() {
            *v = self.field.eval_poly(&coeffs, i as u32);
        }
    }

    fn map(&self, u: u32) -> f64 {
        match self.spec.target {
            Target::Gaussian => match &self.table {
                Some(t) => t[u as usize],
                None => normal_quantile((u as f64 + 0.5) / self.field.size() as f64),
            },
            Target::Sign => {
                let bits = self.field.bits().unwrap_or(1);
                if (u >> (bits - 1)) & 1 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

impl Sampler for KWiseSampler {
    fn dim(&self) -> usize {
        self.spec.n
    }

    fn sample_into(&self, index: u64, out: &mut [f64]) {
        let mut vals: smallvec::SmallVec<[u32; 64]> = smallvec::smallvec![0; self.spec.n];
        self.field_values(index, &mut vals);
        for (o, &u) in out.iter_mut().zip(vals.iter()) {
            *o = self.map(u);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        let ok = KWiseSpec { k: 4, field: FieldSpec::Prime(65537), n: 10, target: Target::Gaussian };
        assert!(ok.validate().is_ok());
        assert!(KWiseSpec { k: 0, ..ok }.validate().is_err());
        assert!(KWiseSpec { field: FieldSpec::Prime(1009), ..ok }.validate().is_err());
        assert!(KWiseSpec { target: Target::Sign, ..ok }.validate().is_err());
        assert!(KWiseSpec { field: FieldSpec::Binary(3), n: 9, target: Target::Sign, ..ok }.validate().is_err());
        assert!(KWiseSpec { field: FieldSpec::Binary(3), n: 8, target: Target::Sign, ..ok }.validate().is_ok());
    }

    #[test]
    fn samples_are_reproducible() {
        let spec = KWiseSpec { k: 3, field: FieldSpec::Binary(16), n: 6, target: Target::Gaussian };
        let s = KWiseSampler::new(spec, 11, 0).unwrap();
        let mut a = [0.0; 6];
        let mut b = [0.0; 6];
        s.sample_into(99, &mut a);
        s.sample_into(99, &mut b);
        assert_eq!(a, b);
        s.sample_into(100, &mut b);
        assert_ne!(a, b);
    }

    #[test]
    fn full_degree_is_uniform_pairwise_sign() {
        let spec = KWiseSpec { k: 2, field: FieldSpec::Binary(4), n: 3, target: Target::Sign };
        let s = KWiseSampler::new(spec, 5, 0).unwrap();
        let mut out = [0.0; 3];
        s.sample_into(0, &mut out);
        assert!(out.iter().all(|v| v.abs() == 1.0));
    }
}
