use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::budget::Budget;
use crate::moments::wick_moment_with;
use crate::poly::MultilinearPolynomial;
use crate::rng::{domain, substream};
use crate::scalar::Scalar;
use crate::structure::Decomposition;

pub const VERIFY_CSV_HEADER: &str = "conclusion,measured,bound,pass";

/// Points used for the float-mode reconstruction check.
pub const RECONSTRUCTION_POINTS: u64 = 10_000;
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
pub const UNIT_NORM_TOL: f64 = 1e-12;
const RECONSTRUCTION_SEED: u64 = 0x5EED_0007;

/// Constants the verifier checks against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConstants {
    /// Bound on the sum of squared `h_i` coefficients.
    pub k_d: f64,
    /// `n_i <= k_prime_d * m_1 ... m_{i-1}`.
    pub k_prime_d: f64,
    /// `E[P^k]^{1/k} <= k_moment * sqrt(k)` for even `k <= m_i`.
    pub k_moment: f64,
}

impl VerifyConstants {
    /// Pinned defaults: `K_d = 2^{d(d+1)/2}`, `K'_d = d 2^d`, `K_moment = 2`.
    pub fn for_degree(d: usize) -> Self {
        let d = d.max(1) as i32;
        Self { k_d: 2f64.powi(d * (d + 1) / 2), k_prime_d: d as f64 * 2f64.powi(d), k_moment: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub conclusion: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub constants: VerifyConstants,
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.conclusion == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{VERIFY_CSV_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:e},{:e},{}\n", r.conclusion, r.measured, r.bound, r.pass));
        }
        out
    }
}

fn row(name: &str, measured: f64, bound: f64) -> CheckRow {
    CheckRow { conclusion: name.to_string(), measured, bound, pass: measured <= bound }
}

/// Checks the seven conclusions plus the bookkeeping bounds. Never fails;
/// problems show up as failing rows.
pub fn verify_decomposition<S: Scalar>(
    dec: &Decomposition<S>,
    p: &MultilinearPolynomial<S>,
    consts: VerifyConstants,
    budget: Budget,
) -> VerifyReport {
    let mut rows = Vec::new();

    // 1. h_i has degree i (every monomial has exactly i parts).
    let bad = dec.classes.iter().flat_map(|c| c.terms.iter().filter(move |t| t.parts.len() != c.degree)).count();
    rows.push(row("1_h_degree", bad as f64, 0.0));

    // 2. part degrees add up to the source degree; parts are homogeneous and non-constant.
    let mut bad = 0;
    for c in &dec.classes {
        for t in &c.terms {
            let sum: usize = t.parts.iter().map(|&j| c.parts[j].degree()).sum();
            let shape_ok = t.parts.iter().all(|&j| {
                let q = &c.parts[j].poly;
                q.is_homogeneous() && !q.is_zero() && q.degree() >= 1
            });
            if sum != t.source_degree || !shape_ok {
                bad += 1;
            }
        }
    }
    rows.push(row("2_degree_sum", bad as f64, 0.0));

    // 3. squared h_i coefficients (unit parts).
    let coeff = dec.classes.iter().map(|c| c.coeff_sum_sq().approx()).fold(0.0, f64::max);
    rows.push(row("3_h_coeff_sq", coeff, consts.k_d));

    // 4. parts have unit norm: |Q|^2 = s.
    let mut dev = 0.0f64;
    for c in &dec.classes {
        for part in &c.parts {
            let actual = part.poly.norm_sq();
            if S::EXACT {
                if actual != part.norm_sq {
                    dev = dev.max(((actual - part.norm_sq.clone()) / part.norm_sq.clone()).approx().abs().max(f64::MIN_POSITIVE));
                }
            } else {
                dev = dev.max(((actual.approx() - part.norm_sq.approx()) / part.norm_sq.approx()).abs());
            }
        }
    }
    rows.push(row("4_unit_norm", dev, if S::EXACT { 0.0 } else { UNIT_NORM_TOL }));

    // 5. each part index is used by exactly one monomial.
    let mut bad = 0;
    for c in &dec.classes {
        let mut uses = vec![0usize; c.parts.len()];
        for t in &c.terms {
            for &j in &t.parts {
                if j < uses.len() {
                    uses[j] += 1;
                } else {
                    bad += 1;
                }
            }
        }
        bad += uses.iter().filter(|&&u| u > 1).count();
    }
    rows.push(row("5_disjoint_monomials", bad as f64, 0.0));

    // 6. E[P^k]^{1/k} / sqrt(k) for even k <= m_i.
    let mut worst = 0.0f64;
    for c in &dec.classes {
        for part in &c.parts {
            let s = part.norm_sq.approx();
            for k in (2..=c.m).step_by(2) {
                let v = match wick_moment_with(&part.poly, k, budget) {
                    Ok(e) => (e.approx() / s.powi(k as i32 / 2)).powf(1.0 / k as f64) / (k as f64).sqrt(),
                    Err(_) => f64::INFINITY,
                };
                worst = worst.max(v);
            }
        }
    }
    rows.push(row("6_moments", worst, consts.k_moment));

    // 7. reconstruction.
    let err = if S::EXACT {
        match dec.reconstruct().and_then(|q| q.sub(p)) {
            Ok(diff) => diff.terms().map(|(_, c)| c.approx().abs()).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    } else {
        reconstruction_error(dec, p)
    };
    rows.push(row("7_reconstruction", err, if S::EXACT { 0.0 } else { RECONSTRUCTION_TOL }));

    // n_i <= K'_d m_1 ... m_{i-1}.
    let mut ratio = 0.0f64;
    let mut prod = 1.0;
    for c in &dec.classes {
        ratio = ratio.max(c.parts.len() as f64 / prod);
        prod *= c.m as f64;
    }
    rows.push(row("part_count", ratio, consts.k_prime_d));

    // splits per loop <= m^{e-1}, and their squared coefficients sum to <= 1.
    let splits = dec.loops.iter().map(|l| l.splits as f64 / (l.m as f64).powi(l.degree as i32 - 1)).fold(0.0, f64::max);
    rows.push(row("split_count", splits, 1.0));
    let sum = dec.loops.iter().map(|l| l.coeff_sum_sq).fold(0.0, f64::max);
    rows.push(row("split_coeff_sum", sum, 1.0 + 1e-9));

    VerifyReport { constants: consts, rows }
}

/// Root-mean-square relative error at seeded Gaussian points.
fn reconstruction_error<S: Scalar>(dec: &Decomposition<S>, p: &MultilinearPolynomial<S>) -> f64 {
    let mut rng = substream(RECONSTRUCTION_SEED, domain::CELL, 0);
    let pf = p.to_f64();
    let mut x = vec![0.0; p.nvars()];
    let (mut num, mut den) = (0.0, 0.0);
    for _ in 0..RECONSTRUCTION_POINTS {
        x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        let Ok(a) = dec.evaluate_f64(&x) else { return f64::INFINITY };
        let b = pf.evaluate(&x).unwrap();
        num += (a - b) * (a - b);
        den += b * b;
    }
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}


#[cfg(test)]
mod battery_tests {
    use super::*;
    use crate::battery::{unit_battery, unit_vector, BatteryOptions};
    use crate::scalar::Rational;
    use crate::structure::{decompose, DecomposeOptions};
    use proptest::prelude::*;

    #[test]
    fn small_battery_passes() {
        let opts = BatteryOptions { size: 12, max_vars: 6, seed: 11, ..Default::default() };
        for p in unit_battery(&opts) {
            let dec = decompose(&p, &DecomposeOptions::new(vec![4, 16, 16])).unwrap();
            assert_eq!(dec.reconstruct().unwrap(), p);
            let rep = verify_decomposition(&dec, &p, VerifyConstants::for_degree(3), Budget::default());
            assert!(rep.passed(), "{p}\n{}", rep.to_csv());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn reconstruction_is_exact(
            picks in proptest::collection::btree_set(0usize..20, 1..5),
            ts in proptest::collection::vec((-4i64..=4, 1i64..=3), 4),
        ) {
            let all = crate::battery::monomials_of_degree(6, 3);
            let monos: Vec<_> = picks.into_iter().map(|i| all[i].clone()).collect();
            let t: Vec<Rational> = ts[..monos.len() - 1].iter().map(|&(a, b)| Rational::from_ratio(a, b)).collect();
            let p = MultilinearPolynomial::from_terms(6, monos.into_iter().zip(unit_vector(&t))).unwrap();
            prop_assume!(!p.is_zero());
            let dec = decompose(&p, &DecomposeOptions::new(vec![4, 16, 16])).unwrap();
            prop_assert_eq!(dec.reconstruct().unwrap(), p.clone());
            for l in &dec.loops {
                prop_assert!(l.splits <= (l.m as u64).pow(l.degree as u32 - 1));
                prop_assert!(l.coeff_sum_sq <= 1.0 + 1e-12);
            }
        }
    }
}
