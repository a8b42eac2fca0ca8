//! Reduction of a general polynomial to a multilinear one in `n * N`
//! variables.
//!
//! Each variable `x_i` is split into `N` copies `X_{i,1..N}` with
//! `x_i = N^{-1/2} sum_j X_{i,j}`. The power `x_i^a` is then
//! `N^{-a/2} (sum_j X_{i,j})^a`; expanding, replacing every square
//! `X_{i,j}^2` by its mean 1 and dropping every monomial with an exponent of
//! 3 or more leaves
//!
//! ```text
//! x_i^a  ->  sum_{s=0}^{a/2} w(a, s, N) e_{a-2s}(X_{i,1}, ..., X_{i,N})
//! w(a, s, N) = a! / 2^s * C(N - a + 2s, s) * N^{-a/2}
//! ```
//!
//! where `e_m` is the elementary symmetric polynomial. `C(N-a+2s, s)` counts
//! the ways to pick `s` squared copies outside a fixed set of `a - 2s`
//! singletons; as `N` grows `w` tends to `a! / (s! 2^s) N^{-(a-2s)/2}`.
//! The weights are checked against a brute-force symbolic expansion in the
//! tests below.

use std::collections::BTreeMap;

use crate::budget::{Budget, DEFAULT_MAX_DEGREE};
use crate::error::{invalid, Error, Result};
use crate::poly::{GeneralPolynomial, Monomial, MultilinearPolynomial};
use crate::scalar::{powi, Scalar};

/// `sum_t coeff_t * prod_i e_{m_{t,i}}(X_{i,1..N})`: a multilinear polynomial
/// in the `n * N` split variables (index `i * N + j`), kept in the
/// elementary-symmetric basis because the explicit monomial list has
/// `C(N, m)` entries per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPolynomial<S> {
    nvars: usize,
    copies: usize,
    terms: BTreeMap<Vec<(u32, u32)>, S>,
}

fn binomial<S: Scalar>(n: i64, k: i64) -> S {
    if k < 0 || k > n {
        return S::zero();
    }
    let mut acc = S::one();
    for j in 0..k {
        acc = acc * S::from_int(n - j) / S::from_int(j + 1);
    }
    acc
}

fn factorial<S: Scalar>(a: u32) -> S {
    (1..=a as i64).fold(S::one(), |acc, k| acc * S::from_int(k))
}

/// Weights `(m, w)` of `x^a -> sum w e_m`, omitting the `N^{-a/2}` factor.
fn power_weights<S: Scalar>(a: u32, copies: usize) -> Vec<(u32, S)> {
    (0..=a / 2)
        .map(|s| {
            let m = a - 2 * s;
            let w = factorial::<S>(a) / powi(&S::from_int(2), s)
                * binomial::<S>(copies as i64 - a as i64 + 2 * s as i64, s as i64);
            (m, w)
        })
        .filter(|(_, w)| !w.is_zero())
        .collect()
}

/// `N^{-deg/2}`; exact types need `N` to be a perfect square when `deg` is odd.
fn inverse_root_power<S: Scalar>(copies: usize, deg: u32) -> Result<S> {
    let n = S::from_int(copies as i64);
    let half = powi(&n, deg / 2);
    let mut out = S::one() / half;
    if deg % 2 == 1 {
        let root = n
            .sqrt_exact()
            .ok_or_else(|| Error::Inexact(format!("sqrt({copies}) is irrational; use a perfect-square N in exact mode")))?;
        out = out / root;
    }
    Ok(out)
}

/// Builds the multilinear replacement of `p` with `copies = N` copies per variable.
pub fn multilinearize<S: Scalar>(p: &GeneralPolynomial<S>, copies: usize) -> Result<SplitPolynomial<S>> {
    if copies == 0 {
        return Err(invalid("N must be positive"));
    }
    let max_exp = p.max_exponent();
    if copies < max_exp as usize {
        return Err(invalid(format!("N = {copies} is smaller than the largest exponent {max_exp}")));
    }
    if p.degree() > DEFAULT_MAX_DEGREE {
        return Err(Error::DegreeOverflow { degree: p.degree(), max: DEFAULT_MAX_DEGREE });
    }
    let mut terms: BTreeMap<Vec<(u32, u32)>, S> = BTreeMap::new();
    for (pp, c) in p.terms() {
        let scale = c.clone() * inverse_root_power::<S>(copies, pp.degree() as u32)?;
        // Cartesian product of per-variable replacements.
        let mut partial: Vec<(Vec<(u32, u32)>, S)> = vec![(Vec::new(), scale)];
        for &(var, a) in pp.factors() {
            let ws = power_weights::<S>(a, copies);
            let mut next = Vec::with_capacity(partial.len() * ws.len());
            for (key, coef) in &partial {
                for (m, w) in &ws {
                    let mut k = key.clone();
                    if *m > 0 {
                        k.push((var, *m));
                    }
                    next.push((k, coef.clone() * w.clone()));
                }
            }
            partial = next;
        }
        for (k, coef) in partial {
            let e = terms.entry(k).or_insert_with(S::zero);
            *e = e.clone() + coef;
        }
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(SplitPolynomial { nvars: p.nvars(), copies, terms })
}

impl<S: Scalar> SplitPolynomial<S> {
    /// Number of original variables `n`.
    pub fn base_nvars(&self) -> usize {
        self.nvars
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Number of split variables, `n * N`.
    pub fn nvars(&self) -> usize {
        self.nvars * self.copies
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|k| k.iter().map(|&(_, m)| m as usize).sum()).max().unwrap_or(0)
    }

    /// Terms in the elementary-symmetric basis: `(coeff, [(variable, m)])`.
    pub fn basis_terms(&self) -> impl Iterator<Item = (&S, &[(u32, u32)])> {
        self.terms.iter().map(|(k, c)| (c, k.as_slice()))
    }

    fn max_order(&self) -> usize {
        self.terms.keys().flat_map(|k| k.iter().map(|&(_, m)| m as usize)).max().unwrap_or(0)
    }

    /// Evaluates at a split point (length `n * N`).
    pub fn evaluate(&self, x: &[S]) -> Result<S> {
        if x.len() != self.nvars() {
            return Err(Error::DimensionMismatch { expected: self.nvars(), got: x.len() });
        }
        let top = self.max_order();
        // e[i][m] for each original variable.
        let esym: Vec<Vec<S>> = (0..self.nvars)
            .map(|i| {
                let mut e = vec![S::zero(); top + 1];
                e[0] = S::one();
                for xj in &x[i * self.copies..(i + 1) * self.copies] {
                    for m in (1..=top).rev() {
                        e[m] = e[m].clone() + e[m - 1].clone() * xj.clone();
                    }
                }
                e
            })
            .collect();
        let mut acc = S::zero();
        for (key, c) in &self.terms {
            let mut t = c.clone();
            for &(v, m) in key {
                t = t * esym[v as usize][m as usize].clone();
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// `f64` evaluation with a caller-provided scratch buffer.
    pub fn evaluate_f64(&self, x: &[f64], scratch: &mut Vec<f64>) -> f64 {
        let top = self.max_order();
        scratch.clear();
        scratch.resize(self.nvars * (top + 1), 0.0);
        for i in 0..self.nvars {
            let e = &mut scratch[i * (top + 1)..(i + 1) * (top + 1)];
            e[0] = 1.0;
            for &xj in &x[i * self.copies..(i + 1) * self.copies] {
                for m in (1..=top).rev() {
                    e[m] += e[m - 1] * xj;
                }
            }
        }
        let mut acc = 0.0;
        for (key, c) in &self.terms {
            let mut t = c.approx();
            for &(v, m) in key {
                t *= scratch[v as usize * (top + 1) + m as usize];
            }
            acc += t;
        }
        acc
    }

    /// Explicit monomial expansion; the term count is checked against `budget`.
    pub fn expand(&self, budget: Budget) -> Result<MultilinearPolynomial<S>> {
        let needed: u128 = self
            .terms
            .keys()
            .map(|k| k.iter().map(|&(_, m)| binomial::<f64>(self.copies as i64, m as i64) as u128).product::<u128>())
            .sum();
        budget.check(needed)?;
        let mut out = MultilinearPolynomial::zero(self.nvars());
        for (key, c) in &self.terms {
            let mut partial: Vec<Vec<u32>> = vec![Vec::new()];
            for &(v, m) in key {
                let base = v * self.copies as u32;
                let subsets = combinations(self.copies as u32, m as usize);
                let mut next = Vec::with_capacity(partial.len() * subsets.len());
                for p in &partial {
                    for s in &subsets {
                        let mut q = p.clone();
                        q.extend(s.iter().map(|j| base + j));
                        next.push(q);
                    }
                }
                partial = next;
            }
            for vars in partial {
                out.add_term(Monomial::new(vars)?, c.clone());
            }
        }
        Ok(out)
    }
}

fn combinations(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: u32, n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PowerProduct;
    use crate::scalar::Rational;

    /// Brute force: expand `(sum_j x_j)^a` over exponent vectors, map
    /// `x_j^2 -> 1`, drop exponents >= 3. Returns multilinear coefficients
    /// without the `N^{-a/2}` factor.
    fn oracle(a: u32, copies: usize) -> BTreeMap<Vec<u32>, Rational> {
        let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        acc.insert(vec![0; copies], Rational::from_int(1));
        for _ in 0..a {
            let mut next: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
            for (e, c) in &acc {
                for j in 0..copies {
                    let mut f = e.clone();
                    f[j] += 1;
                    *next.entry(f).or_insert_with(|| Rational::from_int(0)) += c.clone();
                }
            }
            acc = next;
        }
        let mut out: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e, c) in acc {
            if e.iter().any(|&x| x >= 3) {
                continue;
            }
            let key: Vec<u32> = e.iter().enumerate().filter(|(_, &x)| x == 1).map(|(j, _)| j as u32).collect();
            *out.entry(key).or_insert_with(|| Rational::from_int(0)) += c;
        }
        out.retain(|_, c| *c != Rational::from_int(0));
        out
    }

    #[test]
    fn weights_match_symbolic_oracle() {
        for copies in [4usize, 6, 7] {
            for a in 1..=6u32 {
                if (copies as u32) < a {
                    continue;
                }
                let want = oracle(a, copies);
                let p = GeneralPolynomial::from_terms(1, [(PowerProduct::new([(0, a)]), Rational::from_int(1))])
                    .unwrap();
                // Compare without the N^{-a/2} factor so every N stays exact.
                let ws = power_weights::<Rational>(a, copies);
                let mut got: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
                for (m, w) in ws {
                    for s in combinations(copies as u32, m as usize) {
                        got.insert(s, w.clone());
                    }
                }
                assert_eq!(got, want, "a = {a}, N = {copies}");
                if copies == 4 {
                    // Perfect square: the full construction is exact too.
                    let split = multilinearize(&p, copies).unwrap().expand(Budget::new(1 << 20)).unwrap();
                    let scale = inverse_root_power::<Rational>(copies, a).unwrap();
                    for (m, c) in split.terms() {
                        let key: Vec<u32> = m.vars().to_vec();
                        assert_eq!(c.clone(), want[&key].clone() * scale.clone());
                    }
                }
            }
        }
    }

    #[test]
    fn square_with_two_copies() {
        let p = GeneralPolynomial::from_terms(1, [(PowerProduct::new([(0, 2)]), Rational::from_int(1))]).unwrap();
        let ml = multilinearize(&p, 2).unwrap().expand(Budget::new(100)).unwrap();
        let want = MultilinearPolynomial::from_index_terms(
            2,
            [(vec![0, 1], Rational::from_int(1)), (vec![], Rational::from_int(1))],
        )
        .unwrap();
        assert_eq!(ml, want);
    }

    #[test]
    fn linear_is_scaled_sum() {
        let p = GeneralPolynomial::from_terms(2, [(PowerProduct::new([(1, 1)]), 1.0)]).unwrap();
        let split = multilinearize(&p, 9).unwrap();
        let ml = split.expand(Budget::new(100)).unwrap();
        assert_eq!(ml.num_terms(), 9);
        for (m, c) in ml.terms() {
            assert!(m.vars()[0] >= 9);
            assert!((c - 1.0f64 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn evaluation_matches_expansion() {
        let p = GeneralPolynomial::from_terms(
            2,
            [
                (PowerProduct::new([(0, 3)]), 1.0),
                (PowerProduct::new([(0, 1), (1, 2)]), -2.0),
                (PowerProduct::constant(), 0.5),
            ],
        )
        .unwrap();
        let split = multilinearize(&p, 5).unwrap();
        let ml = split.expand(Budget::new(10_000)).unwrap();
        let x: Vec<f64> = (0..10).map(|k| ((k * 7 % 11) as f64 - 5.0) / 3.0).collect();
        let a = split.evaluate(&x).unwrap();
        let b = ml.evaluate(&x).unwrap();
        let mut scratch = Vec::new();
        let c = split.evaluate_f64(&x, &mut scratch);
        assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let p = GeneralPolynomial::from_terms(1, [(PowerProduct::new([(0, 3)]), 1.0)]).unwrap();
        assert!(multilinearize(&p, 2).is_err());
        let q = GeneralPolynomial::from_terms(1, [(PowerProduct::new([(0, 3)]), Rational::from_int(1))]).unwrap();
        assert!(matches!(multilinearize(&q, 5), Err(Error::Inexact(_))));
        let big = GeneralPolynomial::from_terms(1, [(PowerProduct::new([(0, 9)]), 1.0)]).unwrap();
        assert!(matches!(multilinearize(&big, 20), Err(Error::DegreeOverflow { .. })));
        assert!(matches!(
            multilinearize(&p, 50).unwrap().expand(Budget::new(10)),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
