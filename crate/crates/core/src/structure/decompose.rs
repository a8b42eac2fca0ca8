use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{invalid, Error, Result};
use crate::moments::{m_ell, SearchOptions};
use crate::poly::MultilinearPolynomial;
use crate::scalar::{powi, Scalar};

/// An inner polynomial `P = poly / sqrt(norm_sq)`. Keeping the raw
/// polynomial and its squared norm lets the exact mode stay rational.
#[derive(Debug, Clone, PartialEq)]
pub struct Part<S: Scalar> {
    pub poly: MultilinearPolynomial<S>,
    pub norm_sq: S,
}

impl<S: Scalar> Part<S> {
    pub fn new(poly: MultilinearPolynomial<S>) -> Self {
        let norm_sq = poly.norm_sq();
        Self { poly, norm_sq }
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// The unit-norm polynomial in `f64`.
    pub fn unit(&self) -> MultilinearPolynomial<f64> {
        self.poly.to_f64().scale(&(1.0 / self.norm_sq.approx().sqrt()))
    }
}

/// A monomial `coeff * prod parts[j].poly` of an outer polynomial `h_i`.
/// In terms of unit parts its coefficient is `coeff * sqrt(prod norm_sq)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HTerm<S> {
    pub parts: Vec<usize>,
    pub coeff: S,
    /// Degree of the homogeneous component of `p` this term came from.
    pub source_degree: usize,
}

/// `h_i` and its parts `P_{i,1..n_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Class<S: Scalar> {
    pub degree: usize,
    pub m: u32,
    pub parts: Vec<Part<S>>,
    pub terms: Vec<HTerm<S>>,
}

impl<S: Scalar> Class<S> {
    /// Squared coefficient of a term with respect to unit parts.
    pub fn unit_coeff_sq(&self, t: &HTerm<S>) -> S {
        t.parts.iter().fold(t.coeff.clone() * t.coeff.clone(), |a, &j| a * self.parts[j].norm_sq.clone())
    }

    /// `sum` of squared unit coefficients of `h_i`.
    pub fn coeff_sum_sq(&self) -> S {
        self.terms.iter().fold(S::zero(), |a, t| a + self.unit_coeff_sq(t))
    }
}

/// One run of the split-off loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopRecord {
    /// Class whose moment budget set the threshold.
    pub class: usize,
    pub degree: usize,
    pub m: u32,
    pub splits: u64,
    /// Sum of squared split coefficients relative to the starting norm.
    pub coeff_sum_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<S: Scalar> {
    pub nvars: usize,
    pub constant: S,
    /// `classes[i - 1]` is `h_i`.
    pub classes: Vec<Class<S>>,
    pub loops: Vec<LoopRecord>,
    pub original_norm: f64,
}

impl<S: Scalar> Decomposition<S> {
    pub fn schedule(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c.m).collect()
    }

    pub fn part_counts(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.parts.len()).collect()
    }

    /// `constant + sum_i h_i(P_i)` as an explicit polynomial.
    pub fn reconstruct(&self) -> Result<MultilinearPolynomial<S>> {
        let mut out = MultilinearPolynomial::constant(self.nvars, self.constant.clone());
        for class in &self.classes {
            for t in &class.terms {
                let mut prod = MultilinearPolynomial::constant(self.nvars, t.coeff.clone());
                for &j in &t.parts {
                    prod = prod.mul_disjoint(&class.parts[j].poly)?;
                }
                out = out.add(&prod)?;
            }
        }
        Ok(out)
    }

    /// Evaluates the decomposition at `x` without expanding it.
    pub fn evaluate_f64(&self, x: &[f64]) -> Result<f64> {
        let mut acc = self.constant.approx();
        for class in &self.classes {
            let vals: Result<Vec<f64>> = class.parts.iter().map(|p| p.poly.to_f64().evaluate(x)).collect();
            let vals = vals?;
            for t in &class.terms {
                acc += t.parts.iter().fold(t.coeff.approx(), |a, &j| a * vals[j]);
            }
        }
        Ok(acc)
    }

    /// `P_{1,1} = p`, `h_1` the identity (per homogeneous component).
    pub fn trivial(p: &MultilinearPolynomial<S>, schedule: &[u32]) -> Result<Self> {
        let d = p.degree();
        check_schedule(schedule, d)?;
        let mut dec = Self::empty(p, schedule);
        for (e, q) in p.homogeneous_parts() {
            if e > 0 {
                push_term(&mut dec.classes[0], S::one(), vec![Part::new(q)], e);
            }
        }
        Ok(dec)
    }

    /// Builds a decomposition from parts that are declared unit norm without
    /// checking. Used to feed the verifier hand-made inputs.
    pub fn from_unit_parts(
        nvars: usize,
        constant: S,
        classes: Vec<(u32, Vec<MultilinearPolynomial<S>>, Vec<(Vec<usize>, S, usize)>)>,
    ) -> Self {
        let classes = classes
            .into_iter()
            .enumerate()
            .map(|(i, (m, parts, terms))| Class {
                degree: i + 1,
                m,
                parts: parts.into_iter().map(|poly| Part { poly, norm_sq: S::one() }).collect(),
                terms: terms
                    .into_iter()
                    .map(|(parts, coeff, source_degree)| HTerm { parts, coeff, source_degree })
                    .collect(),
            })
            .collect();
        Self { nvars, constant, classes, loops: Vec::new(), original_norm: f64::NAN }
    }

    fn empty(p: &MultilinearPolynomial<S>, schedule: &[u32]) -> Self {
        let d = p.degree();
        let constant = p.terms().find(|(m, _)| m.is_constant()).map_or(S::zero(), |(_, c)| c.clone());
        Self {
            nvars: p.nvars(),
            constant,
            classes: (1..=d.max(1))
                .map(|i| Class { degree: i, m: schedule.get(i - 1).copied().unwrap_or(2), parts: vec![], terms: vec![] })
                .collect(),
            loops: Vec::new(),
            original_norm: p.norm_sq().approx().sqrt(),
        }
    }
}

fn push_term<S: Scalar>(class: &mut Class<S>, coeff: S, parts: Vec<Part<S>>, source_degree: usize) {
    let base = class.parts.len();
    let idx = (base..base + parts.len()).collect();
    class.parts.extend(parts);
    class.terms.push(HTerm { parts: idx, coeff, source_degree });
}

/// `m_i = min(max(16, m_1), m_1^{3^{i-1}})`.
pub fn default_schedule(m1: u32, d: usize) -> Vec<u32> {
    let cap = 16.max(m1) as u64;
    (0..d)
        .map(|i| {
            let mut m = m1 as u64;
            for _ in 0..i {
                m = m.saturating_pow(3).min(cap);
            }
            m.min(cap) as u32
        })
        .collect()
}

fn check_schedule(schedule: &[u32], d: usize) -> Result<()> {
    if schedule.len() < d {
        return Err(invalid(format!("schedule has {} entries, degree is {d}", schedule.len())));
    }
    if schedule.iter().any(|&m| m < 2 || m % 2 == 1) {
        return Err(invalid("schedule entries must be even and at least 2"));
    }
    if schedule.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("schedule must be nondecreasing"));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DecomposeOptions {
    pub schedule: Vec<u32>,
    pub search: SearchOptions,
    /// Cap on the total number of parts.
    pub budget: Budget,
}

impl DecomposeOptions {
    pub fn new(schedule: Vec<u32>) -> Self {
        Self { schedule, search: SearchOptions { restarts: 8, ..Default::default() }, budget: Budget::from_env() }
    }
}

type Product<S> = (S, Vec<Part<S>>);

/// Splits `q` (scale `sigma2`, degree `e`) until no product of `ell >= 2`
/// unit factors has correlation `c >= m^{(1-ell)/2}`. Returns the split
/// products and, last, the residual.
fn split_off<S: Scalar>(
    mut q: MultilinearPolynomial<S>,
    sigma2: &S,
    m: u32,
    class: usize,
    opts: &DecomposeOptions,
    loops: &mut Vec<LoopRecord>,
) -> Result<Vec<Product<S>>> {
    let e = q.degree();
    let mut out = Vec::new();
    if e < 2 {
        out.push((S::one(), vec![Part::new(q)]));
        return Ok(out);
    }
    let guard = (m as u64).saturating_pow(e as u32 - 1);
    let mut record = LoopRecord { class, degree: e, m, splits: 0, coeff_sum_sq: 0.0 };
    let mut best_seen = 0.0f64;
    while !q.is_zero() {
        let mut best: Option<(S, usize, Vec<MultilinearPolynomial<S>>, MultilinearPolynomial<S>, S, S)> = None;
        for ell in 2..=e {
            let est = m_ell(&q, ell, &opts.search)?;
            if est.witness.factors.len() != ell {
                continue;
            }
            let factors: Vec<MultilinearPolynomial<S>> =
                est.witness.factors.iter().map(MultilinearPolynomial::from_f64_poly).collect();
            let mut r = MultilinearPolynomial::constant(q.nvars(), S::one());
            for f in &factors {
                r = r.mul_disjoint(f)?;
            }
            let rr = r.norm_sq();
            if rr.is_zero() {
                continue;
            }
            let ip = q.inner_product(&r)?;
            let cor2 = ip.clone() * ip.clone() / (sigma2.clone() * rr.clone());
            best_seen = best_seen.max(cor2.approx().sqrt());
            let threshold = S::one() / powi(&S::from_int(m as i64), ell as u32 - 1);
            if cor2 >= threshold && best.as_ref().is_none_or(|b| cor2 > b.0) {
                best = Some((cor2, ell, factors, r, ip, rr));
            }
        }
        let Some((cor2, _, factors, r, ip, rr)) = best else { break };
        record.splits += 1;
        if record.splits > guard {
            return Err(Error::SearchExhausted { best_correlation: best_seen });
        }
        record.coeff_sum_sq += cor2.approx();
        let c = ip / rr;
        q = q.add_scaled(&r, &(-c.clone()))?;
        out.push((c, factors.into_iter().map(Part::new).collect()));
    }
    loops.push(record);
    if !q.is_zero() {
        out.push((S::one(), vec![Part::new(q)]));
    }
    Ok(out)
}

/// Writes `p` as `constant + sum_i h_i(P_{i,1}, ..., P_{i,n_i})`.
///
/// Class 1 comes from splitting each homogeneous component at `m_1`. For
/// `s = 2..d` every part of a class-`s` monomial is split again at `m_s`;
/// the product of the resulting expansions stays in class `s` when every
/// factor is a residual and otherwise lands in the class given by its
/// factor count. Parts are cloned per monomial.
pub fn decompose<S: Scalar>(p: &MultilinearPolynomial<S>, opts: &DecomposeOptions) -> Result<Decomposition<S>> {
    let d = p.degree();
    check_schedule(&opts.schedule, d)?;
    let norm = p.norm_sq();
    let over = if S::EXACT { norm > S::one() } else { norm.approx() > 1.0 + 1e-12 };
    if over {
        return Err(invalid(format!("decompose needs |p|^2 <= 1, got {}", norm.approx())));
    }
    let mut dec = Decomposition::empty(p, &opts.schedule);
    // (coeff, parts, source degree)
    let mut work: Vec<(S, Vec<Part<S>>, usize)> = Vec::new();
    for (e, q) in p.homogeneous_parts() {
        if e == 0 {
            continue;
        }
        for (c, parts) in split_off(q, &S::one(), opts.schedule[0], 1, opts, &mut dec.loops)? {
            work.push((c, parts, e));
        }
    }
    for s in 2..=d {
        let m = opts.schedule[s - 1];
        let mut next = Vec::with_capacity(work.len());
        for (coeff, parts, src) in work {
            if parts.len() != s {
                next.push((coeff, parts, src));
                continue;
            }
            let mut expanded: Vec<Product<S>> = vec![(coeff, Vec::new())];
            for part in parts {
                let pieces = split_off(part.poly, &part.norm_sq, m, s, opts, &mut dec.loops)?;
                let mut grown = Vec::with_capacity(expanded.len() * pieces.len());
                for (c0, f0) in &expanded {
                    for (c1, f1) in &pieces {
                        let mut f = f0.clone();
                        f.extend(f1.iter().cloned());
                        grown.push((c0.clone() * c1.clone(), f));
                    }
                }
                expanded = grown;
            }
            next.extend(expanded.into_iter().map(|(c, f)| (c, f, src)));
        }
        let total: usize = next.iter().map(|w| w.1.len()).sum();
        opts.budget.check(total as u128)?;
        work = next;
    }
    for (c, parts, src) in work {
        let class = parts.len();
        push_term(&mut dec.classes[class - 1], c, parts, src);
    }
    Ok(dec)
}
