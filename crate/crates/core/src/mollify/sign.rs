use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::mollify::sampler::RadialSampler;
use crate::rng::{domain, substream};
use crate::stats::{par_mean, Estimate};

/// Fewest Monte Carlo samples [`mollified_sign`] accepts.
pub const MIN_MC_SAMPLES: u64 = 1000;

/// Product mollifier `rho_{C_1}(P_1) ... rho_{C_d}(P_d)` over blocks of
/// dimensions `n_1..n_d`.
#[derive(Debug, Clone)]
pub struct Mollifier {
    c: Vec<f64>,
    dims: Vec<usize>,
    samplers: Vec<Arc<RadialSampler>>,
}

impl Mollifier {
    pub fn new(c: Vec<f64>, dims: Vec<usize>) -> Result<Self> {
        if c.len() != dims.len() || c.is_empty() {
            return Err(invalid("need one C per block"));
        }
        if c.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("every C must be positive"));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(invalid("every block needs dimension at least 1"));
        }
        let samplers = dims.iter().map(|&n| RadialSampler::shared(n)).collect::<Result<_>>()?;
        Ok(Self { c, dims, samplers })
    }

    pub fn single(c: f64, n: usize) -> Result<Self> {
        Self::new(vec![c], vec![n])
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Offset `z` number `index` of the stream `seed`.
    pub fn sample_offset(&self, seed: u64, index: u64, out: &mut [f64]) {
        let mut rng = substream(seed, domain::MOLLIFIER, index);
        let mut at = 0;
        for ((s, &c), &n) in self.samplers.iter().zip(&self.c).zip(&self.dims) {
            s.sample(c, &mut rng, &mut out[at..at + n]);
            at += n;
        }
    }
}

/// `sgn` with `sgn(0) = +1`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `f~(x) = E_z[sgn(h(x - z))]` with `z` drawn blockwise from the
/// mollifier. Offsets depend only on `(seed, index)`, so two calls with the
/// same seed are coupled.
pub fn mollified_sign(
    h: impl Fn(&[f64]) -> f64 + Sync,
    m: &Mollifier,
    point: &[f64],
    n_mc: u64,
    seed: u64,
) -> Result<Estimate> {
    if point.len() != m.total_dim() {
        return Err(Error::DimensionMismatch { expected: m.total_dim(), got: point.len() });
    }
    if n_mc < MIN_MC_SAMPLES {
        return Err(invalid(format!("need at least {MIN_MC_SAMPLES} samples")));
    }
    let width = 2 * point.len();
    Ok(par_mean(n_mc, width, |i, buf| {
        let (z, y) = buf.split_at_mut(point.len());
        m.sample_offset(seed, i, z);
        for ((yi, xi), zi) in y.iter_mut().zip(point).zip(z.iter()) {
            *yi = xi - zi;
        }
        sign(h(y))
    })
    .into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollify::verify::chebyshev_tail_constant;

    #[test]
    fn constant_sign() {
        let m = Mollifier::single(2.0, 1).unwrap();
        let e = mollified_sign(|_| 1.0, &m, &[0.3], 5000, 1).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn large_c_recovers_sign() {
        let m = Mollifier::single(400.0, 1).unwrap();
        for x in [-2.0, -1.0, 1.0, 3.0] {
            let e = mollified_sign(|y| y[0], &m, &[x], 20_000, 2).unwrap();
            assert!((e.estimate - sign(x)).abs() <= 3.0 * e.std_error + 1e-3, "x={x} {e:?}");
        }
    }

    #[test]
    fn linear_h_obeys_tail_bound() {
        // h(y) = y1 + y2 on two 1-d blocks keeps its sign on the box of
        // half-width D n_i sqrt(d) / C_i around x when |x1 + x2| is large.
        let c = vec![4.0, 4.0];
        let m = Mollifier::new(c.clone(), vec![1, 1]).unwrap();
        for d_mult in [2.0, 4.0] {
            let half = d_mult * 2f64.sqrt() / 4.0;
            let x = [2.0 * half + 0.01, 0.0];
            let e = mollified_sign(|y| y[0] + y[1], &m, &x, 50_000, 3).unwrap();
            let bound = 2f64.min(2.0 * chebyshev_tail_constant(1) * (1.0 / (4.0 * d_mult)).powi(2));
            assert!((1.0 - e.estimate) <= bound + 3.0 * e.std_error, "D={d_mult} {e:?} bound {bound}");
        }
    }

    #[test]
    fn monotone_in_h() {
        let m = Mollifier::new(vec![3.0, 2.0], vec![2, 1]).unwrap();
        let x = [0.1, -0.2, 0.05];
        let low = mollified_sign(|y| y[0] * y[1] + y[2], &m, &x, 4000, 9).unwrap();
        let high = mollified_sign(|y| y[0] * y[1] + y[2] + 0.3, &m, &x, 4000, 9).unwrap();
        assert!(high.estimate >= low.estimate);
        assert!(low.estimate >= -1.0 && high.estimate <= 1.0);
    }

    #[test]
    fn validation() {
        assert!(Mollifier::new(vec![1.0], vec![1, 2]).is_err());
        assert!(Mollifier::new(vec![0.0], vec![1]).is_err());
        let m = Mollifier::single(1.0, 2).unwrap();
        assert!(mollified_sign(|_| 1.0, &m, &[0.0], 5000, 0).is_err());
        assert!(mollified_sign(|_| 1.0, &m, &[0.0, 0.0], 10, 0).is_err());
    }
}
