//! Exact moment engines against brute-force expansions written here.

use std::collections::BTreeMap;

use proptest::prelude::*;
use ptf_fool::moments::{bernoulli_moment, wick_moment};
use ptf_fool::poly::Monomial;
use ptf_fool::{ExactPoly, Rational, Scalar};

fn poly_strategy() -> impl Strategy<Value = ExactPoly> {
    (1usize..=5).prop_flat_map(|n| {
        proptest::collection::vec((1u32..(1 << n), -5i64..=5, 1i64..=4), 1..=4).prop_map(move |terms| {
            let mut p = ExactPoly::zero(n);
            for (mask, num, den) in terms {
                let m = Monomial::new((0..n as u32).filter(|b| mask >> b & 1 == 1)).unwrap();
                p.add_term(m, Rational::from_ratio(num, den));
            }
            p
        })
    })
}

type Expanded = BTreeMap<Vec<u32>, Rational>;

/// `p^k` as a map from exponent vectors to coefficients.
fn power(p: &ExactPoly, k: u32) -> Expanded {
    let n = p.nvars();
    let mut acc: Expanded = BTreeMap::from([(vec![0; n], Rational::from_int(1))]);
    for _ in 0..k {
        let mut next = Expanded::new();
        for (e, c) in &acc {
            for (m, d) in p.terms() {
                let mut e2 = e.clone();
                for &v in m.vars() {
                    e2[v as usize] += 1;
                }
                let slot = next.entry(e2).or_insert_with(|| Rational::from_int(0));
                *slot = slot.clone() + c.clone() * d.clone();
            }
        }
        acc = next;
    }
    acc
}

fn double_factorial_odd(a: u32) -> i64 {
    (1..a as i64).step_by(2).product()
}

fn gaussian_expectation(p: &ExactPoly, k: u32) -> Rational {
    power(p, k)
        .into_iter()
        .filter(|(e, _)| e.iter().all(|a| a % 2 == 0))
        .map(|(e, c)| c * Rational::from_int(e.iter().map(|&a| double_factorial_odd(a)).product()))
        .fold(Rational::from_int(0), |a, b| a + b)
}

fn sign_expectation_by_enumeration(p: &ExactPoly, k: u32) -> Rational {
    let n = p.nvars();
    let mut total = Rational::from_int(0);
    for s in 0u32..(1 << n) {
        let x: Vec<Rational> = (0..n).map(|i| Rational::from_int(if s >> i & 1 == 1 { -1 } else { 1 })).collect();
        let v = p.evaluate(&x).unwrap();
        total = total + (0..k).fold(Rational::from_int(1), |a, _| a * v.clone());
    }
    total / Rational::from_int(1 << n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wick_matches_expansion(p in poly_strategy(), k in 1u32..=4) {
        prop_assert_eq!(wick_moment(&p, k).unwrap(), gaussian_expectation(&p, k));
    }

    #[test]
    fn bernoulli_matches_enumeration(p in poly_strategy(), half in 1u32..=2) {
        let k = 2 * half;
        prop_assert_eq!(bernoulli_moment(&p, k).unwrap(), sign_expectation_by_enumeration(&p, k));
    }

    #[test]
    fn second_moment_is_coefficient_norm(p in poly_strategy()) {
        prop_assert_eq!(wick_moment(&p, 2).unwrap(), p.norm_sq());
        prop_assert_eq!(bernoulli_moment(&p, 2).unwrap(), p.norm_sq());
    }
}

#[test]
fn fourth_moment_of_product() {
    // E[(x0 x1)^4] = 3 * 3.
    let p = ExactPoly::from_index_terms(2, [(vec![0, 1], Rational::from_int(1))]).unwrap();
    assert_eq!(wick_moment(&p, 4).unwrap(), Rational::from_int(9));
    assert_eq!(bernoulli_moment(&p, 4).unwrap(), Rational::from_int(1));
}

#[test]
fn float_engine_agrees_with_exact() {
    let p = ExactPoly::from_index_terms(
        4,
        [(vec![0, 1], Rational::from_ratio(1, 3)), (vec![2], Rational::from_ratio(-2, 5)), (vec![1, 2, 3], Rational::from_int(1))],
    )
    .unwrap();
    for k in [2, 3, 4, 6] {
        let exact = wick_moment(&p, k).unwrap().approx();
        let float = wick_moment(&p.to_f64(), k).unwrap();
        assert!((exact - float).abs() <= 1e-12 * exact.abs().max(1.0), "k={k}: {exact} vs {float}");
    }
}
