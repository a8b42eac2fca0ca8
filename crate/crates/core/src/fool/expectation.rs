use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::krand::Sampler;
use crate::mollify::{mollified_sign, sign, Mollifier};
use crate::poly::{CompiledPoly, MultilinearPolynomial};
use crate::rng::mix;
use crate::scalar::Scalar;
use crate::stats::{par_chunks, Estimate, RunningStats, Z99};
use crate::structure::Decomposition;

/// Pinned constant `K` in `measured <= K * (tail + M + small)`.
pub const EXPECTATION_K: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationErrorReport {
    /// `M = sum_i n_i^2 B_i^{i-1} / C_i` over nonempty classes.
    pub m: f64,
    /// `Pr(exists i, j: |P_{i,j}(Z)| > B_i)`.
    pub tail: Estimate,
    /// `Pr(|p(Z)| <= sqrt(M))`.
    pub small: Estimate,
    pub bound_sum: f64,
    /// `E[F(Z)] - E[F~(Z)]` with `F = sgn p` and `F~` the mollified sign of `h`.
    pub gap: Estimate,
    /// `|gap| / bound_sum`.
    pub fitted_k: f64,
    pub k_constant: f64,
    pub holds: bool,
}

impl ExpectationErrorReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("term,value,stderr\n");
        for (name, v, se) in [
            ("tail", self.tail.estimate, self.tail.std_error),
            ("m", self.m, 0.0),
            ("small", self.small.estimate, self.small.std_error),
            ("bound_sum", self.bound_sum, 0.0),
            ("gap", self.gap.estimate, self.gap.std_error),
            ("fitted_k", self.fitted_k, 0.0),
        ] {
            out.push_str(&format!("{name},{v},{se}\n"));
        }
        out
    }
}

struct Block {
    parts: Vec<CompiledPoly>,
    /// `(part indices, coefficient on unit parts)`.
    terms: Vec<(Vec<usize>, f64)>,
}

/// Three-term bound on `|E[F(Z)] - E[F~(Z)]|` and the directly measured gap.
/// `b` and the mollifier blocks run over the classes with at least one part;
/// class `i` uses `B_i^{i-1}` in `M`. Each `Z` gets its own `n_mc` mollifier
/// draws.
#[allow(clippy::too_many_arguments)]
pub fn expectation_error_bound<S: Scalar>(
    p: &MultilinearPolynomial<S>,
    dec: &Decomposition<S>,
    m: &Mollifier,
    b: &[f64],
    sampler: &impl Sampler,
    n_samples: u64,
    n_mc: u64,
    seed: u64,
) -> Result<ExpectationErrorReport> {
    if sampler.dim() != p.nvars() || dec.nvars != p.nvars() {
        return Err(Error::DimensionMismatch { expected: p.nvars(), got: sampler.dim() });
    }
    let classes: Vec<_> = dec.classes.iter().filter(|c| !c.parts.is_empty()).collect();
    if m.dims().len() != classes.len() || b.len() != classes.len() {
        return Err(invalid(format!("need one mollifier block and one B per nonempty class ({})", classes.len())));
    }
    for (c, &n) in classes.iter().zip(m.dims()) {
        if c.parts.len() != n {
            return Err(Error::DimensionMismatch { expected: c.parts.len(), got: n });
        }
    }
    if n_samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let m_value: f64 = classes
        .iter()
        .zip(b)
        .zip(m.c())
        .map(|((cl, &bi), &ci)| (cl.parts.len() as f64).powi(2) * bi.powi(cl.degree as i32 - 1) / ci)
        .sum();
    let blocks: Vec<Block> = classes
        .iter()
        .map(|cl| Block {
            parts: cl.parts.iter().map(|pt| pt.unit().compile()).collect(),
            terms: cl
                .terms
                .iter()
                .map(|t| (t.parts.clone(), cl.unit_coeff_sq(t).approx().sqrt() * t.coeff.approx().signum()))
                .collect(),
        })
        .collect();
    let constant = dec.constant.approx();
    let h = |y: &[f64]| {
        let mut acc = constant;
        let mut at = 0;
        for bl in &blocks {
            let ys = &y[at..at + bl.parts.len()];
            for (idx, c) in &bl.terms {
                acc += idx.iter().fold(*c, |a, &j| a * ys[j]);
            }
            at += bl.parts.len();
        }
        acc
    };
    let compiled = p.to_f64().compile();
    let sqrt_m = m_value.sqrt();
    let total_dim = m.total_dim();
    let parts = par_chunks(n_samples, |start, end| {
        let mut x = vec![0.0; sampler.dim()];
        let mut y = vec![0.0; total_dim];
        let mut stats = [RunningStats::default(); 3];
        for i in start..end {
            sampler.sample_into(i, &mut x);
            let mut at = 0;
            let mut beyond = false;
            for (bl, &bi) in blocks.iter().zip(b) {
                for pt in &bl.parts {
                    y[at] = pt.eval(&x);
                    beyond |= y[at].abs() > bi;
                    at += 1;
                }
            }
            let px = compiled.eval(&x);
            let smoothed = mollified_sign(h, m, &y, n_mc, mix(seed, i)).map(|e| e.estimate).unwrap_or(f64::NAN);
            stats[0].push(beyond as u8 as f64);
            stats[1].push((px.abs() <= sqrt_m) as u8 as f64);
            stats[2].push(sign(px) - smoothed);
        }
        stats
    });
    let mut tot = [RunningStats::default(); 3];
    for s in &parts {
        for (t, v) in tot.iter_mut().zip(s) {
            t.merge(v);
        }
    }
    let [tail, small, gap] = tot.map(Estimate::from);
    if gap.estimate.is_nan() {
        return Err(invalid(format!("mollified sign needs at least {} draws", crate::mollify::MIN_MC_SAMPLES)));
    }
    let bound_sum = tail.estimate + m_value + small.estimate;
    let fitted_k = gap.estimate.abs() / bound_sum;
    let holds = gap.estimate.abs() <= EXPECTATION_K * bound_sum + Z99 * gap.std_error;
    Ok(ExpectationErrorReport {
        m: m_value,
        tail,
        small,
        bound_sum,
        gap,
        fitted_k,
        k_constant: EXPECTATION_K,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krand::{normal_cdf, IidSampler};

    fn linear() -> (MultilinearPolynomial<f64>, Decomposition<f64>) {
        let p = MultilinearPolynomial::var(1, 0);
        let dec = Decomposition::trivial(&p, &[4]).unwrap();
        (p, dec)
    }

    #[test]
    fn linear_terms_match_normal_cdf() {
        let (p, dec) = linear();
        let c = 20.0;
        let b = 1.5;
        let m = Mollifier::single(c, 1).unwrap();
        let rep = expectation_error_bound(&p, &dec, &m, &[b], &IidSampler::new(1, 3, 0), 4000, 1000, 4).unwrap();
        assert!((rep.m - 1.0 / c).abs() < 1e-15);
        let tail = 2.0 * (1.0 - normal_cdf(b));
        assert!((rep.tail.estimate - tail).abs() < 4.0 * rep.tail.std_error, "{rep:?}");
        let small = 2.0 * normal_cdf(rep.m.sqrt()) - 1.0;
        assert!((rep.small.estimate - small).abs() < 4.0 * rep.small.std_error, "{rep:?}");
        // Both E[F] and E[F~] vanish by symmetry.
        assert!(rep.gap.estimate.abs() < 4.0 * rep.gap.std_error + 1e-3, "{rep:?}");
        assert!(rep.holds);
    }

    #[test]
    fn large_c_closes_the_gap() {
        let p = MultilinearPolynomial::from_index_terms(2, [(vec![0, 1], 0.8), (vec![0], 0.6), (vec![], 0.2)]).unwrap();
        let dec = Decomposition::trivial(&p, &[4, 16]).unwrap();
        let counts: Vec<usize> = dec.classes.iter().map(|c| c.parts.len()).filter(|&n| n > 0).collect();
        let m = Mollifier::new(vec![1e4; counts.len()], counts.clone()).unwrap();
        let b = vec![4.0; counts.len()];
        let rep = expectation_error_bound(&p, &dec, &m, &b, &IidSampler::new(2, 5, 0), 1000, 1000, 6).unwrap();
        assert!(rep.gap.estimate.abs() <= 3.0 * rep.gap.std_error + 2e-3, "{rep:?}");
        assert!(rep.holds);
    }

    #[test]
    fn small_b_makes_tail_dominate() {
        let (p, dec) = linear();
        let m = Mollifier::single(2.0, 1).unwrap();
        let rep = expectation_error_bound(&p, &dec, &m, &[0.05], &IidSampler::new(1, 7, 0), 2000, 1000, 8).unwrap();
        assert!(rep.tail.estimate > 0.9);
        assert!(rep.tail.estimate > rep.small.estimate);
        assert!(rep.holds);
    }

    #[test]
    fn rejects_mismatched_blocks() {
        let (p, dec) = linear();
        let m = Mollifier::single(2.0, 2).unwrap();
        assert!(expectation_error_bound(&p, &dec, &m, &[1.0], &IidSampler::new(1, 0, 0), 10, 1000, 0).is_err());
        let m = Mollifier::single(2.0, 1).unwrap();
        assert!(expectation_error_bound(&p, &dec, &m, &[1.0], &IidSampler::new(1, 0, 0), 10, 10, 0).is_err());
    }
}
