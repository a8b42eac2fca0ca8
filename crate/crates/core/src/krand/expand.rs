use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::krand::batch::{Provenance, SampleBatch};
use crate::krand::sampler::{IidSampler, Sampler};
use crate::poly::{multilinearize, GeneralPolynomial};
use crate::rng::{domain, substream};
use crate::scalar::Scalar;
use crate::stats::{par_mean, Estimate};

/// Splits one coordinate into `g.len()` copies:
/// `X_j = G_j + (x - N^{-1/2} sum G) / sqrt(N)`, so `N^{-1/2} sum_j X_j = x`.
/// `root` is `sqrt(N)`.
pub fn expand_coordinate<S: Scalar>(x: &S, g: &[S], root: &S) -> Vec<S> {
    let sum = g.iter().fold(S::zero(), |a, v| a + v.clone());
    let shift = (x.clone() - sum / root.clone()) / root.clone();
    g.iter().map(|v| v.clone() + shift.clone()).collect()
}

/// Correlated expansion of every row: column `i * N + j` holds `X_{i,j}`.
pub fn correlated_expand(batch: &SampleBatch, copies: usize, seed: u64) -> Result<SampleBatch> {
    if copies < 2 {
        return Err(invalid("N must be at least 2"));
    }
    let n = batch.cols;
    let cols = n * copies;
    let mut data = vec![0.0; batch.rows * cols];
    if cols > 0 {
        data.par_chunks_mut(cols).enumerate().for_each(|(r, out)| {
            let mut g = vec![0.0; copies];
            expand_row(batch.row(r), copies, seed, r as u64, &mut g, out);
        });
    }
    Ok(SampleBatch {
        rows: batch.rows,
        cols,
        data,
        provenance: Provenance::Expanded { base: Box::new(batch.provenance.clone()), copies, seed },
    })
}

fn expand_row(row: &[f64], copies: usize, seed: u64, index: u64, g: &mut [f64], out: &mut [f64]) {
    let root = (copies as f64).sqrt();
    let mut rng = substream(seed, domain::EXPAND, index);
    for (i, &x) in row.iter().enumerate() {
        for v in g.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let sum: f64 = g.iter().sum();
        let shift = (x - sum / root) / root;
        for (o, v) in out[i * copies..(i + 1) * copies].iter_mut().zip(g.iter()) {
            *o = v + shift;
        }
    }
}

/// `Pr(|p(X) - p_delta(X~)| > delta)` for iid Gaussian `X` (seed `seed`,
/// batch 0) and its correlated expansion `X~` with `copies` copies, where
/// `p_delta` is the multilinear replacement of `p`. Rows are generated on
/// the fly; row `i` equals row `i` of `correlated_expand(sample_iid(n, seed, _), copies, seed)`.
pub fn multilinearization_exceedance(
    p: &GeneralPolynomial<f64>,
    copies: usize,
    delta: f64,
    n_samples: u64,
    seed: u64,
) -> Result<Estimate> {
    if copies < 2 {
        return Err(invalid("N must be at least 2"));
    }
    if !(delta > 0.0) || n_samples == 0 {
        return Err(invalid("need delta > 0 and at least one sample"));
    }
    let split = multilinearize(p, copies)?;
    let base = p.compile();
    let n = p.nvars();
    let iid = IidSampler::new(n, seed, 0);
    let width = n + n * copies + copies;
    Ok(par_mean(n_samples, width, |i, buf| {
        let (x, rest) = buf.split_at_mut(n);
        let (expanded, g) = rest.split_at_mut(n * copies);
        iid.sample_into(i, x);
        expand_row(x, copies, seed, i, g, expanded);
        let mut scratch = Vec::new();
        let gap = base.eval(x) - split.evaluate_f64(expanded, &mut scratch);
        (gap.abs() > delta) as u8 as f64
    })
    .into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krand::sample_iid;
    use crate::scalar::Rational;

    #[test]
    fn reconstruction_is_exact_in_rationals() {
        let g: Vec<Rational> = [3, -1, 7, 2].iter().map(|&v| Rational::from_ratio(v, 5)).collect();
        let x = Rational::from_ratio(-11, 3);
        let root = Rational::from_int(2);
        let out = expand_coordinate(&x, &g, &root);
        let sum = out.iter().fold(Rational::from_int(0), |a, v| a + v.clone());
        assert_eq!(sum / root, x);
    }

    #[test]
    fn reconstruction_in_floats() {
        let b = sample_iid(3, 1, 200);
        let e = correlated_expand(&b, 7, 2).unwrap();
        for r in 0..b.rows {
            for i in 0..3 {
                let s: f64 = e.row(r)[i * 7..(i + 1) * 7].iter().sum::<f64>() / 7f64.sqrt();
                assert!((s - b.row(r)[i]).abs() < 1e-12);
            }
        }
        assert!(correlated_expand(&b, 1, 2).is_err());
    }

    #[test]
    fn streaming_rows_match_batch_expansion() {
        use crate::poly::PowerProduct;
        // p = x0^2 x1 at N = 4 against the batch path and an explicit expansion.
        let p = GeneralPolynomial::from_terms(2, [(PowerProduct::new([(0, 2), (1, 1)]), 1.0)]).unwrap();
        let split = multilinearize(&p, 4).unwrap();
        let b = sample_iid(2, 9, 300);
        let e = correlated_expand(&b, 4, 9).unwrap();
        let mut scratch = Vec::new();
        let exceed = (0..300)
            .filter(|&r| (p.evaluate(b.row(r)).unwrap() - split.evaluate_f64(e.row(r), &mut scratch)).abs() > 0.3)
            .count();
        let est = multilinearization_exceedance(&p, 4, 0.3, 300, 9).unwrap();
        assert!((est.estimate - exceed as f64 / 300.0).abs() < 1e-12);
    }

    #[test]
    fn linear_is_exact() {
        use crate::poly::PowerProduct;
        let p = GeneralPolynomial::from_terms(2, [(PowerProduct::new([(0, 1)]), 0.7), (PowerProduct::new([(1, 1)]), -1.2)])
            .unwrap();
        let est = multilinearization_exceedance(&p, 50, 1e-9, 2000, 3).unwrap();
        assert_eq!(est.estimate, 0.0);
    }
}
