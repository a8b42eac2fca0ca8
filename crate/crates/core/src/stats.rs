//! Streaming statistics and the deterministic chunked Monte Carlo driver.

use rayon::prelude::*;

/// Samples per parallel task. Results are merged in chunk order, so the
/// output does not depend on the number of threads.
pub const CHUNK: u64 = 4096;

/// Mean and centered second moment (Welford / Chan).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl From<RunningStats> for Estimate {
    fn from(s: RunningStats) -> Self {
        Self { estimate: s.mean, std_error: s.std_error(), samples: s.n }
    }
}

/// Runs `f(start, end)` on `[0, n)` in chunks of [`CHUNK`] and returns the
/// per-chunk results in chunk order.
pub fn par_chunks<T: Send>(n: u64, f: impl Fn(u64, u64) -> T + Sync) -> Vec<T> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            f(start, (start + CHUNK).min(n))
        })
        .collect()
}

/// Mean and standard error of `value(index, scratch)` over `n` indices.
/// `scratch` is a per-chunk buffer of length `width`.
pub fn par_mean(n: u64, width: usize, value: impl Fn(u64, &mut [f64]) -> f64 + Sync) -> RunningStats {
    let parts = par_chunks(n, |start, end| {
        let mut buf = vec![0.0; width];
        let mut s = RunningStats::default();
        for i in start..end {
            s.push(value(i, &mut buf));
        }
        s
    });
    let mut total = RunningStats::default();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Normal quantile for the two-sided 99% level.
pub const Z99: f64 = 2.576;

/// Ordinary least squares slope and intercept of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
