use serde::Serialize;

use crate::error::{invalid, Result};
use crate::krand::{IidSampler, Sampler};
use crate::moments::wick_moment;
use crate::poly::MultilinearPolynomial;
use crate::scalar::Scalar;
use crate::stats::{linear_fit, par_chunks};

pub const ANTI_CSV_HEADER: &str = "eps,probability,stderr,bound";

/// Constant `K` in the reference curve `K d eps^{1/d}`.
pub const CW_CONSTANT: f64 = 1.0;

/// A fitted exponent below `(1 - EXPONENT_SLACK) / d` is flagged.
pub const EXPONENT_SLACK: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AntiRow {
    pub eps: f64,
    pub probability: f64,
    pub stderr: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnticoncentrationReport {
    pub degree: usize,
    pub samples: u64,
    /// Factor applied to `p` to reach `E[p^2] = 1`.
    pub scale: f64,
    pub rows: Vec<AntiRow>,
    /// Slope of `log Pr` against `log eps` over rows with nonzero probability.
    pub exponent: f64,
    pub flagged: bool,
    pub warning: Option<String>,
}

impl AnticoncentrationReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{ANTI_CSV_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.eps, r.probability, r.stderr, r.bound));
        }
        out
    }
}

/// Empirical `Pr(|p(Y)| < eps)` over `eps_grid` for iid Gaussian `Y`, after
/// rescaling `p` to unit second moment (computed exactly).
pub fn anticoncentration_curve<S: Scalar>(
    p: &MultilinearPolynomial<S>,
    eps_grid: &[f64],
    n_samples: u64,
    seed: u64,
) -> Result<AnticoncentrationReport> {
    if eps_grid.is_empty() || eps_grid.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(invalid("eps grid must be nonempty and positive"));
    }
    if n_samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let second = wick_moment(p, 2)?.approx();
    if !(second > 0.0) {
        return Err(invalid("polynomial has zero second moment"));
    }
    let scale = 1.0 / second.sqrt();
    let warning = ((second - 1.0).abs() > 1e-12).then(|| format!("E[p^2] = {second}; rescaled to unit second moment"));
    let d = p.degree().max(1);
    let compiled = p.to_f64().scale(&scale).compile();
    let sampler = IidSampler::new(p.nvars(), seed, 0);
    let mut grid: Vec<(usize, f64)> = eps_grid.iter().copied().enumerate().collect();
    grid.sort_by(|a, b| a.1.total_cmp(&b.1));
    let counts = par_chunks(n_samples, |start, end| {
        let mut x = vec![0.0; sampler.dim()];
        let mut c = vec![0u64; grid.len()];
        for i in start..end {
            sampler.sample_into(i, &mut x);
            let v = compiled.eval(&x).abs();
            // Smallest grid entry strictly above |p|; every larger one counts too.
            let j = grid.partition_point(|&(_, e)| e <= v);
            if j < grid.len() {
                c[j] += 1;
            }
        }
        c
    });
    let mut totals = vec![0u64; grid.len()];
    for c in &counts {
        for (t, v) in totals.iter_mut().zip(c) {
            *t += v;
        }
    }
    let mut cumulative = vec![0u64; grid.len()];
    let mut acc = 0;
    for (j, t) in totals.iter().enumerate() {
        acc += t;
        cumulative[grid[j].0] = acc;
    }
    let n = n_samples as f64;
    let rows: Vec<AntiRow> = eps_grid
        .iter()
        .zip(&cumulative)
        .map(|(&eps, &c)| {
            let prob = c as f64 / n;
            AntiRow {
                eps,
                probability: prob,
                stderr: (prob * (1.0 - prob) / n).sqrt(),
                bound: CW_CONSTANT * d as f64 * eps.powf(1.0 / d as f64),
            }
        })
        .collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) =
        rows.iter().filter(|r| r.probability > 0.0).map(|r| (r.eps.ln(), r.probability.ln())).unzip();
    let exponent = if lx.len() >= 2 { linear_fit(&lx, &ly).0 } else { f64::NAN };
    let flagged = !(exponent >= (1.0 - EXPONENT_SLACK) / d as f64);
    Ok(AnticoncentrationReport { degree: d, samples: n_samples, scale, rows, exponent, flagged, warning })
}

/// `n` log-spaced points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krand::normal_cdf;

    #[test]
    fn linear_matches_normal_cdf() {
        let p = MultilinearPolynomial::<f64>::var(1, 0);
        let grid = log_grid(1e-3, 1e-1, 7);
        let rep = anticoncentration_curve(&p, &grid, 2_000_000, 5).unwrap();
        for r in &rep.rows {
            let exact = 2.0 * normal_cdf(r.eps) - 1.0;
            assert!((r.probability - exact).abs() <= 4.0 * r.stderr + 1e-12, "{r:?} vs {exact}");
        }
        assert!((rep.exponent - 1.0).abs() < 0.1, "{}", rep.exponent);
        assert!(!rep.flagged);
        assert!(rep.warning.is_none());
    }

    #[test]
    fn product_exponent_is_at_least_one_over_d() {
        let p = MultilinearPolynomial::from_index_terms(2, [(vec![0, 1], 1.0)]).unwrap();
        let rep = anticoncentration_curve(&p, &log_grid(1e-3, 1e-1, 5), 1_000_000, 6).unwrap();
        assert!(rep.exponent >= 0.5 * (1.0 - EXPONENT_SLACK));
        assert!(!rep.flagged);
        assert!(rep.rows.iter().all(|r| r.probability <= r.bound));
    }

    #[test]
    fn monotone_and_saturates() {
        let p = MultilinearPolynomial::from_index_terms(3, [(vec![0, 1], 2.0), (vec![2], 1.0)]).unwrap();
        let grid = [0.5, 0.01, 100.0, 0.1];
        let rep = anticoncentration_curve(&p, &grid, 50_000, 7).unwrap();
        assert!(rep.warning.is_some());
        assert!((rep.scale - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        let mut sorted = rep.rows.clone();
        sorted.sort_by(|a, b| a.eps.total_cmp(&b.eps));
        assert!(sorted.windows(2).all(|w| w[0].probability <= w[1].probability));
        assert_eq!(rep.rows[2].probability, 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        let p = MultilinearPolynomial::<f64>::var(1, 0);
        assert!(anticoncentration_curve(&p, &[], 10, 0).is_err());
        assert!(anticoncentration_curve(&p, &[-1.0], 10, 0).is_err());
        assert!(anticoncentration_curve(&MultilinearPolynomial::<f64>::zero(1), &[0.1], 10, 0).is_err());
    }
}
