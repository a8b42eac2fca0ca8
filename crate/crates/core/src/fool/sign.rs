use crate::error::{Error, Result};
use crate::krand::Sampler;
use crate::poly::CompiledPoly;
use crate::stats::{par_chunks, Estimate};

/// Mean of `sgn(p(x))` over samples `0..n_samples` of `sampler`, with
/// `sgn(0) = +1` and the binomial standard error `sqrt((1 - mean^2) / n)`.
/// Positives are counted in integers, so the result does not depend on
/// how the work is split.
pub fn sign_expectation(p: &CompiledPoly, sampler: &impl Sampler, n_samples: u64) -> Result<Estimate> {
    if sampler.dim() != p.nvars() {
        return Err(Error::DimensionMismatch { expected: p.nvars(), got: sampler.dim() });
    }
    if n_samples == 0 {
        return Err(crate::error::invalid("need at least one sample"));
    }
    let width = sampler.dim();
    let positives: u64 = par_chunks(n_samples, |start, end| {
        let mut x = vec![0.0; width];
        let mut pos = 0u64;
        for i in start..end {
            sampler.sample_into(i, &mut x);
            if p.eval(&x) >= 0.0 {
                pos += 1;
            }
        }
        pos
    })
    .into_iter()
    .sum();
    Ok(from_counts(positives, n_samples))
}

pub(crate) fn from_counts(positives: u64, n: u64) -> Estimate {
    let frac = positives as f64 / n as f64;
    let mean = 2.0 * frac - 1.0;
    Estimate { estimate: mean, std_error: ((1.0 - mean * mean).max(0.0) / n as f64).sqrt(), samples: n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krand::{FieldSpec, IidSampler, KWiseSampler, KWiseSpec, Target};
    use crate::poly::{GeneralPolynomial, MultilinearPolynomial, PowerProduct};

    #[test]
    fn linear_is_symmetric() {
        let p = MultilinearPolynomial::<f64>::var(3, 0).compile();
        let e = sign_expectation(&p, &IidSampler::new(3, 1, 0), 100_000).unwrap();
        assert!(e.estimate.abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn shifted_square_is_negative() {
        let p = GeneralPolynomial::from_terms(
            1,
            [(PowerProduct::new([(0, 2)]), 1.0), (PowerProduct::constant(), -1.0e6)],
        )
        .unwrap()
        .compile();
        let e = sign_expectation(&p, &IidSampler::new(1, 2, 0), 10_000).unwrap();
        assert_eq!(e.estimate, -1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn product_is_symmetric_under_kwise() {
        let p = MultilinearPolynomial::from_index_terms(2, [(vec![0, 1], 1.0)]).unwrap().compile();
        let spec = KWiseSpec { k: 2, field: FieldSpec::Prime(65537), n: 2, target: Target::Gaussian };
        let s = KWiseSampler::new(spec, 3, 0).unwrap();
        let e = sign_expectation(&p, &s, 100_000).unwrap();
        assert!(e.estimate.abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn stays_in_range() {
        let p = MultilinearPolynomial::from_index_terms(3, [(vec![0, 1], 1.0), (vec![2], 0.3), (vec![], 0.5)])
            .unwrap()
            .compile();
        let e = sign_expectation(&p, &IidSampler::new(3, 4, 0), 20_000).unwrap();
        assert!((-1.0..=1.0).contains(&e.estimate));
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let p = MultilinearPolynomial::<f64>::var(3, 0).compile();
        assert!(sign_expectation(&p, &IidSampler::new(2, 1, 0), 10).is_err());
    }
}
