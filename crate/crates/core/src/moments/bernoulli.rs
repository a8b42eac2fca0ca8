//! Exact moments under uniform random signs.

use std::collections::BTreeMap;

use crate::budget::Budget;
use crate::error::{invalid, Result};
use crate::poly::MultilinearPolynomial;
use crate::scalar::Scalar;

/// Largest variable count accepted by [`bernoulli_moment`].
pub const MAX_BERNOULLI_VARS: usize = 22;

/// `E_sigma[p(sigma)^k]` over uniform `sigma in {-1,1}^n`, `k` even.
///
/// Uses `sigma_i^2 = 1`: monomials multiply by symmetric difference and are
/// orthonormal, so the moment is the squared norm of `p^{k/2}` in that ring.
pub fn bernoulli_moment<S: Scalar>(p: &MultilinearPolynomial<S>, k: u32) -> Result<S> {
    bernoulli_moment_with(p, k, Budget::from_env())
}

pub fn bernoulli_moment_with<S: Scalar>(p: &MultilinearPolynomial<S>, k: u32, budget: Budget) -> Result<S> {
    if k == 0 || k % 2 == 1 {
        return Err(invalid("bernoulli_moment needs an even k >= 2"));
    }
    if p.nvars() > MAX_BERNOULLI_VARS {
        return Err(invalid(format!("{} variables exceed the limit {MAX_BERNOULLI_VARS}", p.nvars())));
    }
    let terms: Vec<(u32, S)> = p
        .terms()
        .map(|(m, c)| (m.vars().iter().fold(0u32, |acc, &v| acc | (1 << v)), c.clone()))
        .collect();
    let mut acc: BTreeMap<u32, S> = BTreeMap::from([(0, S::one())]);
    let mut ops = 0u128;
    for _ in 0..k / 2 {
        ops += acc.len() as u128 * terms.len() as u128;
        budget.check(ops)?;
        let mut next: BTreeMap<u32, S> = BTreeMap::new();
        for (&mask, a) in &acc {
            for (m, c) in &terms {
                let e = next.entry(mask ^ m).or_insert_with(S::zero);
                *e = e.clone() + a.clone() * c.clone();
            }
        }
        next.retain(|_, v| !v.is_zero());
        acc = next;
    }
    Ok(acc.values().fold(S::zero(), |s, c| s + c.clone() * c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{powi, Rational};

    fn brute<S: Scalar>(p: &MultilinearPolynomial<S>, k: u32) -> S {
        let n = p.nvars();
        let mut total = S::zero();
        for mask in 0u32..(1 << n) {
            let x: Vec<S> = (0..n).map(|i| if mask >> i & 1 == 1 { S::one() } else { -S::one() }).collect();
            total = total + powi(&p.evaluate(&x).unwrap(), k);
        }
        total / S::from_int(1 << n)
    }

    #[test]
    fn examples() {
        let x1 = MultilinearPolynomial::from_index_terms(1, [(vec![0], Rational::from_int(1))]).unwrap();
        assert_eq!(bernoulli_moment(&x1, 2).unwrap(), Rational::from_int(1));
        let x12 = MultilinearPolynomial::from_index_terms(2, [(vec![0, 1], Rational::from_int(1))]).unwrap();
        assert_eq!(bernoulli_moment(&x12, 4).unwrap(), Rational::from_int(1));
        assert!(bernoulli_moment(&x1, 3).is_err());
    }

    #[test]
    fn matches_enumeration() {
        let p = MultilinearPolynomial::from_index_terms(
            5,
            [
                (vec![0, 1], Rational::from_ratio(1, 2)),
                (vec![1, 2, 3], Rational::from_ratio(-2, 3)),
                (vec![4], Rational::from_int(1)),
                (vec![0, 4], Rational::from_ratio(1, 7)),
            ],
        )
        .unwrap();
        for k in [2, 4, 6] {
            assert_eq!(bernoulli_moment(&p, k).unwrap(), brute(&p, k));
        }
    }

    #[test]
    fn rejects_too_many_variables() {
        let p = MultilinearPolynomial::<f64>::zero(23);
        assert!(bernoulli_moment(&p, 2).is_err());
    }
}
