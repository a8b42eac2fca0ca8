//! Seeded polynomial batteries with exactly unit norm.

use num_traits::One;
use rand::seq::index::sample;
use rand::Rng;

use crate::poly::{Monomial, MultilinearPolynomial};
use crate::rng::{domain, substream};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryOptions {
    pub size: usize,
    pub max_vars: usize,
    pub max_degree: usize,
    pub max_terms: usize,
    pub homogeneous: bool,
    pub seed: u64,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        Self { size: 50, max_vars: 6, max_degree: 3, max_terms: 6, homogeneous: true, seed: 1 }
    }
}

/// Rational point on the unit sphere in `R^m` from `t in Q^{m-1}`
/// (inverse stereographic projection).
pub fn unit_vector(t: &[Rational]) -> Vec<Rational> {
    let one = Rational::one();
    let s = t.iter().fold(Rational::from_int(0), |a, x| a + x * x);
    let den = s.clone() + one.clone();
    let mut out: Vec<Rational> = t.iter().map(|x| Rational::from_int(2) * x / &den).collect();
    out.push((s - one) / den);
    out
}

/// Battery of `size` polynomials with `|p|^2 = 1` exactly. Members 0..3 are
/// `x0 x1`, `x0 x1 x2` and `(3/5) x0 x1 + (4/5) x2 x3` when the options allow them.
pub fn unit_battery(opts: &BatteryOptions) -> Vec<MultilinearPolynomial<Rational>> {
    let n = opts.max_vars;
    let r = Rational::from_ratio;
    let mut fixed = Vec::new();
    if n >= 2 && opts.max_degree >= 2 {
        fixed.push(MultilinearPolynomial::from_index_terms(n, [(vec![0, 1], r(1, 1))]).unwrap());
    }
    if n >= 3 && opts.max_degree >= 3 {
        fixed.push(MultilinearPolynomial::from_index_terms(n, [(vec![0, 1, 2], r(1, 1))]).unwrap());
    }
    if n >= 4 && opts.max_degree >= 2 {
        fixed.push(MultilinearPolynomial::from_index_terms(n, [(vec![0, 1], r(3, 5)), (vec![2, 3], r(4, 5))]).unwrap());
    }
    fixed.truncate(opts.size);
    let mut out = fixed;
    let mut b = 0u64;
    while out.len() < opts.size {
        let mut rng = substream(opts.seed, domain::BATTERY, b);
        b += 1;
        let d = rng.random_range(1..=opts.max_degree.min(n));
        let monos: Vec<Monomial> = if opts.homogeneous {
            let all = monomials_of_degree(n, d);
            let m = rng.random_range(1..=opts.max_terms.min(all.len()));
            sample(&mut rng, all.len(), m).into_iter().map(|i| all[i].clone()).collect()
        } else {
            let mut set = std::collections::BTreeSet::new();
            for _ in 0..rng.random_range(1..=opts.max_terms) {
                let e = rng.random_range(1..=d);
                set.insert(Monomial::new(sample(&mut rng, n, e).into_iter().map(|v| v as u32)).unwrap());
            }
            set.into_iter().collect()
        };
        let t: Vec<Rational> =
            (1..monos.len()).map(|_| r(rng.random_range(-4..=4), rng.random_range(1..=3))).collect();
        let coeffs = unit_vector(&t);
        let p = MultilinearPolynomial::from_terms(n, monos.into_iter().zip(coeffs)).unwrap();
        if !p.is_zero() && (!opts.homogeneous || p.is_homogeneous()) {
            out.push(p);
        }
    }
    out
}

pub fn monomials_of_degree(n: usize, d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut idx: Vec<u32> = (0..d as u32).collect();
    if d > n {
        return out;
    }
    loop {
        out.push(Monomial::new(idx.iter().copied()).unwrap());
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if (idx[i] as usize) < n - d + i {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
