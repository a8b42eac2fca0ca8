use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::mollify::kernel::{sphere_area, Profile, RadialTable};
use crate::quad::GaussLegendre;

pub const MOLLIFIER_CSV_HEADER: &str = "property,measured,bound,pass";

/// Slack on the derivative bound `int |D_v^k rho_C| <= C^k`.
pub const DERIVATIVE_SLACK: f64 = 1.05;

/// Chebyshev constant for the tail: `int_{|x|>D} rho_C <= K (n/(CD))^2`
/// with `K = 2(n+4)/n`, from `int |x|^2 rho_2 = n(n+4)/2`.
pub fn chebyshev_tail_constant(n: usize) -> f64 {
    2.0 * (n as f64 + 4.0) / n as f64
}

/// `int |x|^2 rho_2` over `R^n`.
pub fn rho2_second_moment(n: usize) -> f64 {
    (n * (n + 4)) as f64 / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyRow {
    pub property: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MollifierReport {
    pub c: f64,
    pub n: usize,
    pub rows: Vec<PropertyRow>,
}

impl MollifierReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&PropertyRow> {
        self.rows.iter().find(|r| r.property == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{MOLLIFIER_CSV_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.10e},{:.10e},{}\n", r.property, r.measured, r.bound, r.pass));
        }
        out
    }
}

fn row(property: String, measured: f64, bound: f64) -> PropertyRow {
    PropertyRow { property, measured, bound, pass: measured <= bound }
}

/// `int_{R^n} |D_v^k rho_2|` for a unit vector `v`. The density is radial,
/// so the value does not depend on `v`; the integral is taken in polar
/// coordinates around `v` with `c = cos(phi)`:
/// `D f = f' c`, `D^2 f = f'' c^2 + f' s^2 / r`,
/// `D^3 f = f''' c^3 + 3 f'' c s^2 / r - 3 f' c s^2 / r^2`.
pub fn derivative_l1(table: &RadialTable, k: usize) -> f64 {
    let n = table.n;
    let envelope_tail = sphere_area(n) * table.tail_constant * 2f64.powi(k as i32) * (2.0 / PI) / (3.0 * table.r_max.powi(3));
    if n == 1 {
        let body: f64 = table.weights.iter().zip(&table.values).map(|(w, v)| w * v[k].abs()).sum();
        return 2.0 * body + envelope_tail;
    }
    let gl = GaussLegendre::new(8);
    let phis: Vec<(f64, f64)> = (0..32)
        .flat_map(|p| gl.points(p as f64 * PI / 32.0, (p + 1) as f64 * PI / 32.0).collect::<Vec<_>>())
        .collect();
    let ring = sphere_area(n - 1);
    let mut total = 0.0;
    for ((r, w), v) in table.nodes.iter().zip(&table.weights).zip(&table.values) {
        let [_, f1, f2, f3] = *v;
        let mut ang = 0.0;
        for &(phi, wp) in &phis {
            let (s, c) = phi.sin_cos();
            let s2 = s * s;
            let d = match k {
                0 => v[0],
                1 => f1 * c,
                2 => f2 * c * c + f1 * s2 / r,
                _ => f3 * c * c * c + 3.0 * f2 * c * s2 / r - 3.0 * f1 * c * s2 / (r * r),
            };
            ang += wp * s.powi(n as i32 - 2) * d.abs();
        }
        total += w * r.powi(n as i32 - 1) * ring * ang;
    }
    total + envelope_tail
}

/// `int_{|y| > radius} rho_2` over `R^n`.
pub fn tail_mass(profile: &Profile, table: &RadialTable, radius: f64) -> f64 {
    let n = profile.dim();
    let a = sphere_area(n);
    let analytic = |from: f64| a * table.tail_constant / (3.0 * from.powi(3));
    if radius >= table.r_max {
        return analytic(radius);
    }
    let gl = GaussLegendre::new(8);
    let panels = ((table.r_max - radius) / 0.25).ceil().max(1.0) as usize;
    let body =
        gl.integrate_panels(|r| r.powi(n as i32 - 1) * profile.eval(r)[0], radius, table.r_max, panels);
    a * body + analytic(table.r_max)
}

/// Checks the mollifier properties for `rho_C` in `R^n`: unit mass,
/// nonnegativity, `int |D_v^k rho_C| <= C^k` for `k <= k_max`, the tail
/// bound at each `D`, and the second moment.
pub fn verify_mollifier(c: f64, n: usize, k_max: usize, d_list: &[f64]) -> Result<MollifierReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid(format!("C must be positive, got {c}")));
    }
    if n == 0 || n > 3 {
        return Err(invalid("verify_mollifier supports 1 <= n <= 3"));
    }
    if k_max > 3 {
        return Err(invalid("derivative order at most 3"));
    }
    let table = RadialTable::standard(n)?;
    let profile = Profile::new(n)?;
    let mut rows = Vec::new();
    let mass_tol = if n == 1 { 1e-6 } else { 1e-4 };
    rows.push(row("mass_error".into(), (table.radial_moment(0) - 1.0).abs(), mass_tol));
    let min = table.values.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
    rows.push(row("negative_density".into(), (-min).max(0.0), 0.0));
    for k in 1..=k_max {
        let l1 = (0.5 * c).powi(k as i32) * derivative_l1(&table, k);
        rows.push(row(format!("derivative_l1_k{k}"), l1, c.powi(k as i32) * DERIVATIVE_SLACK));
    }
    let kc = chebyshev_tail_constant(n);
    for &d in d_list {
        let mass = tail_mass(&profile, &table, 0.5 * c * d);
        let scale = (n as f64 / (c * d)).powi(2);
        rows.push(row(format!("tail_mass_D{d}"), mass, kc * scale));
        rows.push(row(format!("tail_constant_D{d}"), mass / scale, kc));
    }
    let second = table.radial_moment(2) * (2.0 / c).powi(2);
    let expect = rho2_second_moment(n) * (2.0 / c).powi(2);
    rows.push(row("second_moment_error".into(), (second - expect).abs(), 1e-3 * expect.max(1.0)));
    Ok(MollifierReport { c, n, rows })
}
