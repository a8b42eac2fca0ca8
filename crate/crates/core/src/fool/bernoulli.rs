use serde::Serialize;

use crate::budget::Budget;
use crate::error::{invalid, Result};
use crate::moments::{bernoulli_moment_with, wick_moment_with};
use crate::poly::MultilinearPolynomial;
use crate::scalar::{pi_lower_bound, powi, Rational, Scalar};

pub const BERNOULLI_CSV_HEADER: &str = "index,degree,nvars,k,bernoulli,gaussian,ratio,ratio_upper,certified";

/// Largest variable count accepted by the study.
pub const STUDY_MAX_VARS: usize = 14;
/// Largest moment order accepted by the study.
pub const STUDY_MAX_K: u32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernoulliRow {
    pub index: usize,
    pub degree: usize,
    pub nvars: usize,
    pub k: u32,
    /// `E_sigma[p^k]`, as a rational literal.
    pub bernoulli: String,
    /// `E_G[p^k]`, as a rational literal.
    pub gaussian: String,
    /// `E_sigma[p^k] / ((pi/2)^{dk/2} E_G[p^k])` in floating point.
    pub ratio: f64,
    /// The same ratio with `pi` replaced by a rational lower bound, so it is
    /// an upper bound on the true ratio; as a rational literal.
    pub ratio_upper: String,
    /// `ratio_upper <= 1`, decided in exact arithmetic.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernoulliStudy {
    pub rows: Vec<BernoulliRow>,
    pub max_ratio: f64,
    pub all_certified: bool,
}

impl BernoulliStudy {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{BERNOULLI_CSV_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.index, r.degree, r.nvars, r.k, r.bernoulli, r.gaussian, r.ratio, r.ratio_upper, r.certified
            ));
        }
        out
    }
}

/// Compares sign and Gaussian moments of each homogeneous battery member
/// at every even `k` in `k_list`, exactly.
pub fn bernoulli_comparison_study(
    battery: &[MultilinearPolynomial<Rational>],
    k_list: &[u32],
    budget: Budget,
) -> Result<BernoulliStudy> {
    if k_list.iter().any(|&k| k == 0 || k % 2 == 1 || k > STUDY_MAX_K) {
        return Err(invalid(format!("k must be even and in 2..={STUDY_MAX_K}")));
    }
    let half_pi_lo = pi_lower_bound() / Rational::from_int(2);
    let mut rows = Vec::new();
    for (index, p) in battery.iter().enumerate() {
        if p.nvars() > STUDY_MAX_VARS {
            return Err(invalid(format!("member {index} has {} variables (limit {STUDY_MAX_VARS})", p.nvars())));
        }
        if !p.is_homogeneous() || p.is_zero() {
            return Err(invalid(format!("member {index} is not a nonzero homogeneous polynomial")));
        }
        let d = p.degree();
        for &k in k_list {
            let bern = bernoulli_moment_with(p, k, budget)?;
            let gauss = wick_moment_with(p, k, budget)?;
            let e = (d as u32 * k) / 2;
            let upper = bern.clone() / (powi(&half_pi_lo, e) * gauss.clone());
            let ratio = bern.approx() / (std::f64::consts::FRAC_PI_2.powi(e as i32) * gauss.approx());
            rows.push(BernoulliRow {
                index,
                degree: d,
                nvars: p.nvars(),
                k,
                bernoulli: bern.to_literal(),
                gaussian: gauss.to_literal(),
                ratio,
                certified: upper <= Rational::from_int(1),
                ratio_upper: upper.to_literal(),
            });
        }
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let all_certified = rows.iter().all(|r| r.certified);
    Ok(BernoulliStudy { rows, max_ratio, all_certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::battery::{unit_battery, BatteryOptions};

    #[test]
    fn x0x1_at_k2() {
        let p = MultilinearPolynomial::from_index_terms(2, [(vec![0, 1], Rational::from_int(1))]).unwrap();
        let s = bernoulli_comparison_study(&[p], &[2], Budget::default()).unwrap();
        let r = &s.rows[0];
        assert_eq!(r.bernoulli, "1");
        assert_eq!(r.gaussian, "1");
        assert!((r.ratio - 1.0 / std::f64::consts::FRAC_PI_2.powi(2)).abs() < 1e-15);
        assert!(r.certified);
    }

    #[test]
    fn x0_at_k2() {
        let p = MultilinearPolynomial::<Rational>::var(1, 0);
        let s = bernoulli_comparison_study(&[p], &[2], Budget::default()).unwrap();
        assert!((s.rows[0].ratio - 1.0 / std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(s.all_certified);
    }

    #[test]
    fn small_battery_is_certified() {
        let battery = unit_battery(&BatteryOptions { size: 20, max_vars: 8, max_degree: 3, ..Default::default() });
        let s = bernoulli_comparison_study(&battery, &[2, 4, 6], Budget::default()).unwrap();
        assert_eq!(s.rows.len(), 60);
        assert!(s.all_certified);
        assert!(s.max_ratio <= 1.0);
        assert!(s.to_csv().starts_with(BERNOULLI_CSV_HEADER));
    }

    #[test]
    fn rejects_bad_input() {
        let p = MultilinearPolynomial::<Rational>::var(1, 0);
        assert!(bernoulli_comparison_study(&[p.clone()], &[3], Budget::default()).is_err());
        let q = p.add(&MultilinearPolynomial::constant(1, Rational::from_int(1))).unwrap();
        assert!(bernoulli_comparison_study(&[q], &[2], Budget::default()).is_err());
    }
}
