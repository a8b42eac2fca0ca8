use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::mollify::kernel::{sphere_area, RadialTable, TABLE_KNOTS};

/// Draws from `rho_2` in `R^n`: a radius from a 4096-knot inverse-CDF table
/// on `[0, 200]` (linear between knots, `r^{-3}` survival beyond) and a
/// uniform direction.
#[derive(Debug)]
pub struct RadialSampler {
    n: usize,
    knots: Vec<f64>,
    cdf: Vec<f64>,
    tail: f64,
    r_max: f64,
}

impl RadialSampler {
    pub fn new(n: usize) -> Result<Self> {
        let table = RadialTable::standard(n)?;
        let a = sphere_area(n);
        let per_panel = table.order;
        let mut cdf = Vec::with_capacity(TABLE_KNOTS);
        let mut knots = Vec::with_capacity(TABLE_KNOTS);
        let h = table.r_max / table.panels as f64;
        let mut acc = 0.0;
        cdf.push(0.0);
        knots.push(0.0);
        for p in 0..table.panels {
            for i in p * per_panel..(p + 1) * per_panel {
                acc += a * table.weights[i] * table.nodes[i].powi(n as i32 - 1) * table.values[i][0];
            }
            cdf.push(acc);
            knots.push((p + 1) as f64 * h);
        }
        let tail = a * table.tail_constant / (3.0 * table.r_max.powi(3));
        let total = acc + tail;
        cdf.iter_mut().for_each(|v| *v /= total);
        Ok(Self { n, knots, cdf, tail: tail / total, r_max: table.r_max })
    }

    /// Process-wide sampler for dimension `n`.
    pub fn shared(n: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<Vec<(usize, Arc<RadialSampler>)>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        if let Some((_, s)) = cache.lock().unwrap().iter().find(|(m, _)| *m == n) {
            return Ok(s.clone());
        }
        let s = Arc::new(Self::new(n)?);
        cache.lock().unwrap().push((n, s.clone()));
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn knots(&self) -> usize {
        self.knots.len()
    }

    /// Radial CDF of `rho_2`.
    pub fn cdf(&self, r: f64) -> f64 {
        if r >= self.r_max {
            return 1.0 - self.tail * (self.r_max / r).powi(3);
        }
        let j = self.knots.partition_point(|&k| k <= r).clamp(1, self.knots.len() - 1);
        let (k0, k1) = (self.knots[j - 1], self.knots[j]);
        let t = (r - k0) / (k1 - k0);
        self.cdf[j - 1] + t * (self.cdf[j] - self.cdf[j - 1])
    }

    /// Inverse of [`Self::cdf`] at `u` in `[0, 1)`.
    pub fn radius(&self, u: f64) -> f64 {
        let body = 1.0 - self.tail;
        if u >= body {
            let remaining = (1.0 - u).max(f64::MIN_POSITIVE);
            return self.r_max * (self.tail / remaining).cbrt();
        }
        let j = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[j - 1], self.cdf[j]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.knots[j - 1] + t * (self.knots[j] - self.knots[j - 1])
    }

    /// Writes a draw from `rho_C` into `out` (length `n`).
    pub fn sample(&self, c: f64, rng: &mut impl Rng, out: &mut [f64]) {
        let r = self.radius(rng.random::<f64>()) * 2.0 / c;
        if self.n == 1 {
            out[0] = if rng.random::<bool>() { r } else { -r };
            return;
        }
        let mut norm = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            norm += *v * *v;
        }
        let scale = r / norm.sqrt();
        out.iter_mut().for_each(|v| *v *= scale);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krand::ks_distance;
    use crate::mollify::kernel::Profile;
    use crate::quad::GaussLegendre;
    use crate::rng::{domain, substream};

    #[test]
    fn table_shape() {
        let s = RadialSampler::shared(1).unwrap();
        assert_eq!(s.knots(), TABLE_KNOTS);
        assert!(s.cdf.windows(2).all(|w| w[0] <= w[1]));
        assert!((s.radius(s.cdf(3.7)) - 3.7).abs() < 1e-9);
    }

    #[test]
    fn table_cdf_matches_quadrature() {
        // Independent oracle: fine Gauss-Legendre panels of 2 rho_2 on [0, r].
        // At knots only quadrature error remains; between knots the linear
        // interpolation error is at most h^2 max|rho_2'| / 4.
        let s = RadialSampler::shared(1).unwrap();
        let p = Profile::new(1).unwrap();
        let gl = GaussLegendre::new(16);
        let h = s.knots[1];
        for j in [10, 20, 41, 102, 409] {
            let r = s.knots[j];
            let exact = 2.0 * gl.integrate_panels(|x| p.eval(x)[0], 0.0, r, 64);
            assert!((s.cdf(r) - exact).abs() < 1e-6, "knot r={r}");
        }
        for r in [0.5, 1.0, 2.0, 5.0, 20.0] {
            let exact = 2.0 * gl.integrate_panels(|x| p.eval(x)[0], 0.0, r, 64);
            assert!((s.cdf(r) - exact).abs() < h * h * 0.1 / 4.0, "r={r}");
        }
    }

    #[test]
    fn samples_follow_the_radial_law() {
        for n in [1, 3] {
            let s = RadialSampler::shared(n).unwrap();
            let mut rng = substream(1, domain::MOLLIFIER, 0);
            let mut buf = vec![0.0; n];
            let mut radii: Vec<f64> = (0..20_000)
                .map(|_| {
                    s.sample(2.0, &mut rng, &mut buf);
                    buf.iter().map(|x| x * x).sum::<f64>().sqrt()
                })
                .collect();
            let ks = ks_distance(&mut radii, |r| s.cdf(r));
            assert!(ks < 1.63 / (20_000f64).sqrt(), "n={n} ks={ks}");
        }
    }

    #[test]
    fn scaling_by_c() {
        let s = RadialSampler::shared(1).unwrap();
        let mut a = substream(2, domain::MOLLIFIER, 0);
        let mut b = substream(2, domain::MOLLIFIER, 0);
        let (mut x, mut y) = ([0.0], [0.0]);
        s.sample(2.0, &mut a, &mut x);
        s.sample(8.0, &mut b, &mut y);
        assert!((x[0] - 4.0 * y[0]).abs() < 1e-12);
    }
}
