use crate::error::{invalid, Error, Result};
use crate::mollify::kernel::{rho2_derivs, RHO2_AT_ZERO};
use crate::mollify::Mollifier;
use crate::quad::GaussLegendre;

/// `prod_i (1 + C_i^{m_i} |P_i|^{m_i} / m_i!) - 1`, accumulated in log space.
pub fn taylor_remainder_bound(m: &Mollifier, orders: &[u32], norms: &[f64]) -> Result<f64> {
    let d = m.c().len();
    if orders.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: orders.len() });
    }
    if norms.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: norms.len() });
    }
    if orders.iter().any(|&k| k == 0) || norms.iter().any(|&x| !(x >= 0.0)) {
        return Err(invalid("orders must be >= 1 and norms >= 0"));
    }
    let mut log_total = 0.0;
    for ((&c, &k), &p) in m.c().iter().zip(orders).zip(norms) {
        if p == 0.0 {
            continue;
        }
        let log_term = k as f64 * (c * p).ln() - libm::lgamma(k as f64 + 1.0);
        // ln(1 + e^t) without overflow.
        log_total += if log_term > 0.0 { log_term + (-log_term).exp().ln_1p() } else { log_term.exp().ln_1p() };
    }
    Ok(log_total.exp_m1())
}

/// Explicit Taylor polynomial of `f~ = sgn * rho_C` at 0 on the line,
/// keeping degrees below `m` (`m <= 5`): `T(y) = 2 rho_C(0) y + rho_C''(0) y^3 / 3`.
pub fn taylor_1d(c: f64, m: u32, y: f64) -> Result<f64> {
    if m > 5 {
        return Err(invalid("the explicit Taylor polynomial is available for m <= 5"));
    }
    let h = 0.5 * c;
    let rho0 = h * RHO2_AT_ZERO;
    let rho2 = h.powi(3) * rho2_derivs(0.0)[2];
    let mut t = 0.0;
    if m >= 2 {
        t += 2.0 * rho0 * y;
    }
    if m >= 4 {
        t += 2.0 * rho2 * y.powi(3) / 6.0;
    }
    Ok(t)
}

/// `f~(y) = 2 int_0^y rho_C` on the line, by quadrature.
pub fn mollified_sign_1d(c: f64, y: f64) -> f64 {
    let gl = GaussLegendre::new(16);
    let panels = 8 + (c * y.abs()) as usize;
    2.0 * gl.integrate_panels(|z| 0.5 * c * rho2_derivs(0.5 * c * z)[0], 0.0, y, panels)
}
