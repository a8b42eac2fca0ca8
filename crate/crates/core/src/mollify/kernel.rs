//! The bump-function mollifier `rho_2 = |B^|^2 / |B|_2^2` with
//! `B(xi) = (1 - |xi|^2)_+` and the unitary Fourier transform, and its
//! scaling `rho_C(x) = (C/2)^n rho_2(C x / 2)`.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::quad::GaussLegendre;

/// `rho_2(0)` in one dimension.
pub const RHO2_AT_ZERO: f64 = 5.0 / (6.0 * PI);

const SERIES_TERMS: usize = 14;

/// Area of the unit sphere `S^{m-1}` in `R^m` (`A_1 = 2`).
pub fn sphere_area(m: usize) -> f64 {
    2.0 * PI.powf(m as f64 / 2.0) / libm::tgamma(m as f64 / 2.0)
}

/// `g(x) = (sin x - x cos x) / x^3` and its first three derivatives.
pub fn g_derivs(x: f64) -> [f64; 4] {
    if x.abs() < 1.0 {
        // g(x) = sum_{k>=1} (-1)^{k+1} 2k x^{2k-2} / (2k+1)!
        let mut out = [0.0; 4];
        let mut fact = 6.0; // (2k+1)! at k = 1
        for k in 1..=SERIES_TERMS {
            let a = if k % 2 == 1 { 1.0 } else { -1.0 } * 2.0 * k as f64 / fact;
            let p = 2 * k - 2;
            for (j, slot) in out.iter_mut().enumerate() {
                if p >= j {
                    let falling: f64 = (0..j).map(|i| (p - i) as f64).product();
                    *slot += a * falling * x.powi((p - j) as i32);
                }
            }
            fact *= ((2 * k + 2) * (2 * k + 3)) as f64;
        }
        return out;
    }
    let (sn, cs) = x.sin_cos();
    let s0 = sn - x * cs;
    let s1 = x * sn;
    let s2 = sn + x * cs;
    let s3 = 2.0 * cs - x * sn;
    let i = 1.0 / x;
    let (i3, i4, i5, i6) = (i.powi(3), i.powi(4), i.powi(5), i.powi(6));
    [
        s0 * i3,
        s1 * i3 - 3.0 * s0 * i4,
        s2 * i3 - 6.0 * s1 * i4 + 12.0 * s0 * i5,
        s3 * i3 - 9.0 * s2 * i4 + 36.0 * s1 * i5 - 60.0 * s0 * i6,
    ]
}

/// `rho_2` in one dimension and its first three derivatives.
pub fn rho2_derivs(x: f64) -> [f64; 4] {
    let [g, g1, g2, g3] = g_derivs(x);
    let k = 15.0 / (2.0 * PI);
    [k * g * g, k * 2.0 * g * g1, k * 2.0 * (g1 * g1 + g * g2), k * 2.0 * (3.0 * g1 * g2 + g * g3)]
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("C must be positive, got {c}")))
    }
}

/// `rho_C(x)` on the line.
pub fn rho_1d(c: f64, x: f64) -> Result<f64> {
    check_c(c)?;
    Ok(0.5 * c * rho2_derivs(0.5 * c * x)[0])
}

/// `k`-th derivative of `rho_C` on the line, `k <= 3`.
pub fn rho_1d_deriv(c: f64, x: f64, k: usize) -> Result<f64> {
    check_c(c)?;
    if k > 3 {
        return Err(invalid("derivatives up to order 3 are available"));
    }
    Ok((0.5 * c).powi(k as i32 + 1) * rho2_derivs(0.5 * c * x)[k])
}

/// Radial profile of `rho_2` in `R^n` by quadrature of
/// `B^(r) = (2 pi)^{-n/2} c_n 2 int_0^{pi/2} cos^{n+2} t cos(r sin t) dt`.
#[derive(Debug, Clone)]
pub struct RadialKernel {
    n: usize,
    gl: GaussLegendre,
    scale: f64,
    b_norm_sq: f64,
}

impl RadialKernel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let c_n = if n == 1 { 1.0 } else { sphere_area(n - 1) * 2.0 / (n * n - 1) as f64 };
        let b_norm_sq = sphere_area(n) * 8.0 / (n * (n + 2) * (n + 4)) as f64;
        Ok(Self { n, gl: GaussLegendre::new(16), scale: (2.0 * PI).powf(-(n as f64) / 2.0) * c_n, b_norm_sq })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `|B|_2^2`.
    pub fn b_norm_sq(&self) -> f64 {
        self.b_norm_sq
    }

    /// `B^` and its first three radial derivatives at `r >= 0`.
    pub fn bhat(&self, r: f64) -> [f64; 4] {
        let panels = 4 + (r / 4.0).ceil() as usize;
        let h = 0.5 * PI / panels as f64;
        let mut acc = [0.0; 4];
        let e = self.n as i32 + 2;
        for p in 0..panels {
            for (t, w) in self.gl.points(p as f64 * h, (p + 1) as f64 * h) {
                let (s, c) = t.sin_cos();
                let (sr, cr) = (r * s).sin_cos();
                let base = 2.0 * w * c.powi(e);
                acc[0] += base * cr;
                acc[1] -= base * s * sr;
                acc[2] -= base * s * s * cr;
                acc[3] += base * s * s * s * sr;
            }
        }
        acc.map(|v| v * self.scale)
    }

    /// `rho_2(r)` and its first three radial derivatives.
    pub fn rho2(&self, r: f64) -> [f64; 4] {
        let [b, b1, b2, b3] = self.bhat(r);
        let k = 1.0 / self.b_norm_sq;
        [k * b * b, k * 2.0 * b * b1, k * 2.0 * (b1 * b1 + b * b2), k * 2.0 * (3.0 * b1 * b2 + b * b3)]
    }

    /// `K_n` in the averaged tail `rho_2(r) ~ K_n r^{-(n+3)}`.
    pub fn tail_constant(&self) -> f64 {
        let n = self.n as f64;
        let c_n = self.scale * (2.0 * PI).powf(n / 2.0);
        let alpha = (n + 1.0) / 2.0;
        (2.0 * PI).powf(-n) * c_n * c_n * libm::tgamma(alpha + 1.0).powi(2) * 2f64.powf(n + 2.0) / self.b_norm_sq
    }
}

/// `rho_C(x)` for `|x| = r` in `R^n`, via the radial quadrature.
pub fn rho_radial(c: f64, n: usize, r: f64) -> Result<f64> {
    check_c(c)?;
    let k = RadialKernel::new(n)?;
    Ok((0.5 * c).powi(n as i32) * k.rho2(0.5 * c * r)[0])
}

/// `rho_2` profile and derivatives: closed form on the line, quadrature otherwise.
#[derive(Debug, Clone)]
pub struct Profile {
    kernel: RadialKernel,
}

impl Profile {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { kernel: RadialKernel::new(n)? })
    }

    pub fn dim(&self) -> usize {
        self.kernel.n
    }

    pub fn eval(&self, r: f64) -> [f64; 4] {
        if self.kernel.n == 1 {
            rho2_derivs(r)
        } else {
            self.kernel.rho2(r)
        }
    }

    pub fn tail_constant(&self) -> f64 {
        self.kernel.tail_constant()
    }
}

/// Profile values on Gauss-Legendre nodes over `[0, r_max]`.
#[derive(Debug, Clone)]
pub struct RadialTable {
    pub n: usize,
    pub r_max: f64,
    pub panels: usize,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<[f64; 4]>,
    pub tail_constant: f64,
}

impl RadialTable {
    pub fn build(n: usize, r_max: f64, panels: usize, order: usize) -> Result<Self> {
        let profile = Profile::new(n)?;
        let gl = GaussLegendre::new(order);
        let h = r_max / panels as f64;
        let pts: Vec<(f64, f64)> =
            (0..panels).flat_map(|p| gl.points(p as f64 * h, (p + 1) as f64 * h).collect::<Vec<_>>()).collect();
        let values = pts.par_iter().map(|&(r, _)| profile.eval(r)).collect();
        Ok(Self {
            n,
            r_max,
            panels,
            order,
            nodes: pts.iter().map(|p| p.0).collect(),
            weights: pts.iter().map(|p| p.1).collect(),
            values,
            tail_constant: profile.tail_constant(),
        })
    }

    /// Shared table used by integrals and the sampler (`r_max = 200`,
    /// 4095 panels so that panel edges are the 4096 sampler knots).
    pub fn standard(n: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<Vec<(usize, Arc<RadialTable>)>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        if let Some((_, t)) = cache.lock().unwrap().iter().find(|(m, _)| *m == n) {
            return Ok(t.clone());
        }
        let t = Arc::new(Self::build(n, STANDARD_R_MAX, TABLE_KNOTS - 1, 4)?);
        cache.lock().unwrap().push((n, t.clone()));
        Ok(t)
    }

    /// `A_n int_0^{r_max} r^{n-1+power} rho_2(r) dr` plus the analytic tail.
    pub fn radial_moment(&self, power: i32) -> f64 {
        let n = self.n as i32;
        let a = sphere_area(self.n);
        let body: f64 =
            self.nodes.iter().zip(&self.weights).zip(&self.values).map(|((r, w), v)| w * r.powi(n - 1 + power) * v[0]).sum();
        // int_R^inf r^{power - 4} dr
        let tail = if power < 3 { self.tail_constant * self.r_max.powi(power - 3) / (3 - power) as f64 } else { f64::INFINITY };
        a * (body + tail)
    }
}

/// Radius of the sampler table and of the standard integration range.
pub const STANDARD_R_MAX: f64 = 200.0;
/// Knots of the inverse-CDF table.
pub const TABLE_KNOTS: usize = 4096;
