//! Exact Gaussian moments `E[p(Y)^k]` by the Wick rule.

use std::collections::BTreeMap;

use smallvec::SmallVec;

use crate::budget::Budget;
use crate::error::{invalid, Result};
use crate::poly::{Monomial, MultilinearPolynomial};
use crate::scalar::{gaussian_moment, powi, Scalar};

type Exps = SmallVec<[(u32, u32); 8]>;

/// `E[p(Y)^k]` with the budget from the environment.
pub fn wick_moment<S: Scalar>(p: &MultilinearPolynomial<S>, k: u32) -> Result<S> {
    wick_moment_with(p, k, Budget::from_env())
}

/// `E[p(Y)^k]`; linear and quadratic forms take closed-form paths.
pub fn wick_moment_with<S: Scalar>(p: &MultilinearPolynomial<S>, k: u32, budget: Budget) -> Result<S> {
    if k == 0 {
        return Err(invalid("moment order k must be at least 1"));
    }
    if p.is_zero() {
        return Ok(S::zero());
    }
    if p.is_homogeneous() {
        match p.degree() {
            1 => return Ok(linear_moment(p, k)),
            2 => return quadratic_moment(p, k, budget),
            _ => {}
        }
    }
    wick_moment_expanded(p, k, budget)
}

/// `(k-1)!! |a|^k` for `p = a . x`, zero for odd `k`.
fn linear_moment<S: Scalar>(p: &MultilinearPolynomial<S>, k: u32) -> S {
    if k % 2 == 1 {
        return S::zero();
    }
    gaussian_moment::<S>(k) * powi(&p.norm_sq(), k / 2)
}

/// Moments of `x^T A x` (zero diagonal) from the cumulants
/// `kappa_r = 2^{r-1} (r-1)! tr(A^r)`.
fn quadratic_moment<S: Scalar>(p: &MultilinearPolynomial<S>, k: u32, budget: Budget) -> Result<S> {
    let support: Vec<u32> = p.support().into_iter().collect();
    let m = support.len();
    budget.check(k as u128 * (m as u128).pow(3))?;
    let pos = |v: u32| support.binary_search(&v).unwrap();
    let half = S::one() / S::from_int(2);
    let mut a = vec![S::zero(); m * m];
    for (mono, c) in p.terms() {
        let (i, j) = (pos(mono.vars()[0]), pos(mono.vars()[1]));
        a[i * m + j] = c.clone() * half.clone();
        a[j * m + i] = c.clone() * half.clone();
    }
    let mut traces = vec![S::zero(); k as usize + 1];
    let mut power = a.clone();
    for r in 1..=k as usize {
        if r > 1 {
            power = matmul(&power, &a, m);
        }
        traces[r] = (0..m).fold(S::zero(), |acc, i| acc + power[i * m + i].clone());
    }
    let mut kappa = vec![S::zero(); k as usize + 1];
    let mut fact = S::one();
    for r in 1..=k as usize {
        if r > 1 {
            fact = fact * S::from_int(r as i64 - 1);
        }
        kappa[r] = powi(&S::from_int(2), r as u32 - 1) * fact.clone() * traces[r].clone();
    }
    let mut mom = vec![S::one()];
    for j in 1..=k as usize {
        let mut acc = S::zero();
        let mut binom = S::one();
        for i in 1..=j {
            if i > 1 {
                binom = binom * S::from_int((j - i + 1) as i64) / S::from_int(i as i64 - 1);
            }
            acc = acc + binom.clone() * kappa[i].clone() * mom[j - i].clone();
        }
        mom.push(acc);
    }
    Ok(mom.pop().unwrap())
}

fn matmul<S: Scalar>(x: &[S], y: &[S], m: usize) -> Vec<S> {
    let mut out = vec![S::zero(); m * m];
    for i in 0..m {
        for l in 0..m {
            let xil = &x[i * m + l];
            if xil.is_zero() {
                continue;
            }
            for j in 0..m {
                if !y[l * m + j].is_zero() {
                    out[i * m + j] = out[i * m + j].clone() + xil.clone() * y[l * m + j].clone();
                }
            }
        }
    }
    out
}

fn mul_exps(e: &Exps, m: &Monomial) -> Exps {
    let mut out = Exps::with_capacity(e.len() + m.degree());
    let (mut i, mut j) = (0, 0);
    let vars = m.vars();
    while i < e.len() || j < vars.len() {
        if j == vars.len() || (i < e.len() && e[i].0 < vars[j]) {
            out.push(e[i]);
            i += 1;
        } else if i == e.len() || vars[j] < e[i].0 {
            out.push((vars[j], 1));
            j += 1;
        } else {
            out.push((e[i].0, e[i].1 + 1));
            i += 1;
            j += 1;
        }
    }
    out
}

/// `p^j` in the exponent-vector basis.
fn power<S: Scalar>(p: &MultilinearPolynomial<S>, j: u32, ops: &mut u128, budget: Budget) -> Result<BTreeMap<Exps, S>> {
    let mut acc: BTreeMap<Exps, S> = BTreeMap::new();
    acc.insert(Exps::new(), S::one());
    for _ in 0..j {
        *ops += acc.len() as u128 * p.num_terms() as u128;
        budget.check(*ops)?;
        let mut next: BTreeMap<Exps, S> = BTreeMap::new();
        for (e, a) in &acc {
            for (m, c) in p.terms() {
                let key = mul_exps(e, m);
                let v = a.clone() * c.clone();
                match next.get_mut(&key) {
                    Some(slot) => *slot = slot.clone() + v,
                    None => {
                        next.insert(key, v);
                    }
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        acc = next;
    }
    Ok(acc)
}

fn parity(e: &Exps) -> SmallVec<[u32; 8]> {
    e.iter().filter(|(_, a)| a % 2 == 1).map(|&(v, _)| v).collect()
}

/// General engine: expands `p^{ceil(k/2)}` and `p^{floor(k/2)}` and pairs
/// terms of equal exponent parity, applying `E[Y^a] = (a-1)!!`.
pub fn wick_moment_expanded<S: Scalar>(p: &MultilinearPolynomial<S>, k: u32, budget: Budget) -> Result<S> {
    if k == 0 {
        return Err(invalid("moment order k must be at least 1"));
    }
    let mut ops = 0u128;
    let a = power(p, k.div_ceil(2), &mut ops, budget)?;
    let b = if k % 2 == 0 { a.clone() } else { power(p, k / 2, &mut ops, budget)? };
    let mut groups: BTreeMap<SmallVec<[u32; 8]>, Vec<(&Exps, &S)>> = BTreeMap::new();
    for (e, c) in &b {
        groups.entry(parity(e)).or_default().push((e, c));
    }
    let mut pairs = 0u128;
    for e in a.keys() {
        pairs += groups.get(&parity(e)).map_or(0, |g| g.len() as u128);
    }
    budget.check(ops + pairs)?;
    let max_exp = k as usize;
    let table: Vec<S> = (0..=max_exp as u32).map(gaussian_moment::<S>).collect();
    let mut total = S::zero();
    for (ea, ca) in &a {
        let Some(group) = groups.get(&parity(ea)) else { continue };
        for (eb, cb) in group {
            let mut t = ca.clone() * (*cb).clone();
            let (mut i, mut j) = (0, 0);
            while i < ea.len() || j < eb.len() {
                let exp = if j == eb.len() || (i < ea.len() && ea[i].0 < eb[j].0) {
                    i += 1;
                    ea[i - 1].1
                } else if i == ea.len() || eb[j].0 < ea[i].0 {
                    j += 1;
                    eb[j - 1].1
                } else {
                    i += 1;
                    j += 1;
                    ea[i - 1].1 + eb[j - 1].1
                };
                t = t * table[exp as usize].clone();
            }
            total = total + t;
        }
    }
    Ok(total)
}
