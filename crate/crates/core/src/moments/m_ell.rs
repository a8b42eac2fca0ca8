//! `M_ell(p)`: square root of the best correlation of `p` with a product of
//! `ell` unit-norm factors on disjoint variable sets.

use std::collections::BTreeSet;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};
use crate::poly::{Monomial, MultilinearPolynomial, SymmetricForm};
use crate::rng::{domain, mix, substream};
use crate::scalar::Scalar;

/// Largest support size for exhaustive search.
pub const EXHAUSTIVE_MAX_VARS: usize = 10;
/// Largest degree for exhaustive search.
pub const EXHAUSTIVE_MAX_DEGREE: usize = 4;
/// Restart count and tolerance at which `ell = d` results are certified.
pub const CERTIFY_RESTARTS: usize = 50;
pub const CERTIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    #[default]
    Exhaustive,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub mode: SearchMode,
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Cap on enumerated (partition, composition) pairs.
    pub max_candidates: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            mode: SearchMode::Exhaustive,
            restarts: CERTIFY_RESTARTS,
            tol: CERTIFY_TOL,
            max_iter: 1000,
            seed: 0,
            max_candidates: 2_000_000,
        }
    }
}

/// Variable sets, degrees and unit-norm factors attaining an `M_ell` value.
#[derive(Debug, Clone)]
pub struct Witness {
    pub sets: Vec<Vec<u32>>,
    pub degrees: Vec<usize>,
    pub factors: Vec<MultilinearPolynomial<f64>>,
}

#[derive(Debug, Clone)]
pub struct MEllEstimate {
    pub ell: usize,
    /// `sqrt(correlation)`.
    pub value: f64,
    /// `<p, prod p_i>` for the witness factors.
    pub correlation: f64,
    pub witness: Witness,
    pub certified: bool,
}

/// Sparse order-`ell` tensor; entry indices point into per-slot dictionaries.
struct Tensor {
    dims: Vec<usize>,
    entries: Vec<(SmallVec<[u32; 4]>, f64)>,
}

impl Tensor {
    fn frob(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c * c).sum::<f64>().sqrt()
    }

    /// Contraction with every factor except slot `j`.
    fn contract(&self, f: &[Vec<f64>], j: usize) -> Vec<f64> {
        let mut g = vec![0.0; self.dims[j]];
        for (idx, c) in &self.entries {
            let mut v = *c;
            for (s, &i) in idx.iter().enumerate() {
                if s != j {
                    v *= f[s][i as usize];
                }
            }
            g[idx[j] as usize] += v;
        }
        g
    }

    fn one_hot_start(&self) -> Vec<Vec<f64>> {
        let mut best = 0;
        for (e, (_, c)) in self.entries.iter().enumerate() {
            if c.abs() > self.entries[best].1.abs() {
                best = e;
            }
        }
        let idx = &self.entries[best].0;
        self.dims
            .iter()
            .enumerate()
            .map(|(s, &n)| {
                let mut v = vec![0.0; n];
                v[idx[s] as usize] = 1.0;
                v
            })
            .collect()
    }

    fn random_start(&self, seed: u64, key: u64, restart: u64) -> Vec<Vec<f64>> {
        let mut rng = substream(seed, domain::SEARCH, mix(key, restart));
        self.dims
            .iter()
            .map(|&n| {
                let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter_mut().for_each(|x| *x /= norm);
                v
            })
            .collect()
    }

    /// Block-coordinate ascent; each step sets a factor to its normalized
    /// contraction, which makes the objective equal the contraction norm.
    fn ascend(&self, mut f: Vec<Vec<f64>>, tol: f64, max_iter: usize) -> (f64, Vec<Vec<f64>>) {
        let mut value = f64::NEG_INFINITY;
        for _ in 0..max_iter.max(1) {
            let mut v = 0.0;
            for j in 0..self.dims.len() {
                let g = self.contract(&f, j);
                let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return (0.0, f);
                }
                f[j] = g.into_iter().map(|x| x / norm).collect();
                v = norm;
            }
            let done = v - value <= tol * v.max(1.0);
            value = v;
            if done {
                break;
            }
        }
        (value, f)
    }

    /// Best of `restarts` starts (restart 0 is one-hot on the largest
    /// entry); ties go to the lowest restart index.
    fn best(&self, opts: &SearchOptions, key: u64) -> (f64, Vec<Vec<f64>>) {
        let runs: Vec<(f64, Vec<Vec<f64>>)> = (0..opts.restarts.max(1) as u64)
            .into_par_iter()
            .map(|r| {
                let start = if r == 0 { self.one_hot_start() } else { self.random_start(opts.seed, key, r) };
                self.ascend(start, opts.tol, opts.max_iter)
            })
            .collect();
        let mut best = 0;
        for (r, run) in runs.iter().enumerate() {
            if run.0 > runs[best].0 {
                best = r;
            }
        }
        runs.into_iter().nth(best).unwrap()
    }
}

/// Restricted growth strings of length `n` using exactly `blocks` labels.
fn set_partitions(n: usize, blocks: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, max: usize, cur: &mut Vec<usize>, n: usize, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if pos == n {
            if max == blocks {
                out.push(cur.clone());
            }
            return;
        }
        // Not enough positions left to open the remaining blocks.
        if blocks - max > n - pos {
            return;
        }
        for label in 0..=max.min(blocks - 1) {
            cur.push(label);
            rec(pos + 1, max.max(label + 1), cur, n, blocks, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if blocks == 0 || blocks > n {
        return out;
    }
    rec(0, 0, &mut Vec::with_capacity(n), n, blocks, &mut out);
    out
}

/// Ordered compositions of `d` into `parts` positive integers.
fn compositions(d: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if d >= 1 { vec![vec![d]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..d {
        for mut rest in compositions(d - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn stirling2(n: usize, k: usize) -> u128 {
    let mut s = vec![vec![0u128; k + 1]; n + 1];
    s[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            s[i][j] = j as u128 * s[i - 1][j] + s[i - 1][j - 1];
        }
    }
    s[n][k]
}

/// Splits every term by block label; `None` if some term does not match
/// the degree composition.
struct Candidate {
    tensor: Tensor,
    dicts: Vec<Vec<Monomial>>,
}

fn build_candidate(terms: &[(Monomial, f64)], label: impl Fn(u32) -> usize, comp: &[usize]) -> Option<Candidate> {
    let ell = comp.len();
    let mut split: Vec<(Vec<Monomial>, f64)> = Vec::with_capacity(terms.len());
    let mut seen: Vec<BTreeSet<Monomial>> = vec![BTreeSet::new(); ell];
    for (m, c) in terms {
        let mut parts: Vec<Vec<u32>> = vec![Vec::new(); ell];
        for &v in m.vars() {
            parts[label(v)].push(v);
        }
        if parts.iter().zip(comp).any(|(p, &d)| p.len() != d) {
            continue;
        }
        let monos: Vec<Monomial> = parts.into_iter().map(|p| Monomial::new(p).unwrap()).collect();
        for (s, mono) in monos.iter().enumerate() {
            seen[s].insert(mono.clone());
        }
        split.push((monos, *c));
    }
    if split.is_empty() {
        return None;
    }
    let dicts: Vec<Vec<Monomial>> = seen.into_iter().map(|s| s.into_iter().collect()).collect();
    let entries = split
        .into_iter()
        .map(|(monos, c)| {
            let idx = monos
                .iter()
                .enumerate()
                .map(|(s, mono)| dicts[s].binary_search(mono).unwrap() as u32)
                .collect();
            (idx, c)
        })
        .collect();
    Some(Candidate { tensor: Tensor { dims: dicts.iter().map(Vec::len).collect(), entries }, dicts })
}

fn frob_for(terms: &[(Monomial, f64)], label: impl Fn(u32) -> usize, comp: &[usize]) -> f64 {
    let mut counts = vec![0usize; comp.len()];
    let mut total = 0.0;
    for (m, c) in terms {
        counts.iter_mut().for_each(|x| *x = 0);
        for &v in m.vars() {
            counts[label(v)] += 1;
        }
        if counts.iter().zip(comp).all(|(a, b)| a == b) {
            total += c * c;
        }
    }
    total.sqrt()
}

fn witness(nvars: usize, cand: &Candidate, factors: &[Vec<f64>], comp: &[usize]) -> Witness {
    let mut sets = Vec::new();
    let mut polys = Vec::new();
    for (dict, f) in cand.dicts.iter().zip(factors) {
        let vars: BTreeSet<u32> = dict.iter().flat_map(|m| m.vars().iter().copied()).collect();
        sets.push(vars.into_iter().collect());
        let mut q = MultilinearPolynomial::zero(nvars);
        for (m, &c) in dict.iter().zip(f) {
            q.add_term(m.clone(), c);
        }
        polys.push(q);
    }
    Witness { sets, degrees: comp.to_vec(), factors: polys }
}

/// `M_ell(p)` for homogeneous multilinear `p`.
pub fn m_ell<S: Scalar>(p: &MultilinearPolynomial<S>, ell: usize, opts: &SearchOptions) -> Result<MEllEstimate> {
    if p.is_zero() {
        return Err(invalid("M_ell of the zero polynomial"));
    }
    if !p.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    let d = p.degree();
    if ell == 0 || ell > d {
        return Err(invalid(format!("ell must be in [1, {d}], got {ell}")));
    }
    let terms: Vec<(Monomial, f64)> = p.terms().map(|(m, c)| (m.clone(), c.approx())).collect();
    let support: Vec<u32> = p.support().into_iter().collect();
    let (value, cand, factors, comp) = match opts.mode {
        SearchMode::Exhaustive => exhaustive(&terms, &support, d, ell, opts)?,
        SearchMode::Alternating => alternating(&terms, &support, d, ell, opts),
    };
    let certified = ell == 1
        || (ell == d
            && opts.mode == SearchMode::Exhaustive
            && opts.restarts >= CERTIFY_RESTARTS
            && opts.tol <= CERTIFY_TOL);
    Ok(MEllEstimate {
        ell,
        value: value.max(0.0).sqrt(),
        correlation: value,
        witness: witness(p.nvars(), &cand, &factors, &comp),
        certified,
    })
}

type Best = (f64, Candidate, Vec<Vec<f64>>, Vec<usize>);

fn exhaustive(terms: &[(Monomial, f64)], support: &[u32], d: usize, ell: usize, opts: &SearchOptions) -> Result<Best> {
    if support.len() > EXHAUSTIVE_MAX_VARS || d > EXHAUSTIVE_MAX_DEGREE {
        return Err(invalid(format!(
            "exhaustive search needs at most {EXHAUSTIVE_MAX_VARS} variables and degree {EXHAUSTIVE_MAX_DEGREE}"
        )));
    }
    let comps = compositions(d, ell);
    let needed = stirling2(support.len(), ell) * comps.len() as u128;
    if needed > opts.max_candidates as u128 {
        return Err(Error::BudgetExceeded { needed, budget: opts.max_candidates as u128 });
    }
    let parts = set_partitions(support.len(), ell);
    let pos = |v: u32| support.binary_search(&v).unwrap();
    let mut order: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, rgs) in parts.iter().enumerate() {
        for (ci, comp) in comps.iter().enumerate() {
            let f = frob_for(terms, |v| rgs[pos(v)], comp);
            if f > 0.0 {
                order.push((f, pi, ci));
            }
        }
    }
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: Option<Best> = None;
    for (key, &(frob, pi, ci)) in order.iter().enumerate() {
        let current = best.as_ref().map_or(-1.0, |b| b.0);
        if frob <= current {
            break;
        }
        let rgs = &parts[pi];
        let cand = build_candidate(terms, |v| rgs[pos(v)], &comps[ci]).unwrap();
        let (value, factors) = cand.tensor.best(opts, key as u64);
        if value > current {
            best = Some((value, cand, factors, comps[ci].clone()));
        }
    }
    best.ok_or_else(|| invalid("no partition splits the polynomial"))
}

/// Random variable assignments improved by single-variable moves.
fn alternating(terms: &[(Monomial, f64)], support: &[u32], d: usize, ell: usize, opts: &SearchOptions) -> Best {
    let comps = compositions(d, ell);
    let pos = |v: u32| support.binary_search(&v).unwrap();
    let quick = SearchOptions { restarts: 1, ..*opts };
    let score = |labels: &[usize], comp: &[usize]| -> f64 {
        match build_candidate(terms, |v| labels[pos(v)], comp) {
            Some(c) => c.tensor.best(&quick, 0).0,
            None => 0.0,
        }
    };
    let outer: Vec<(f64, Vec<usize>, usize)> = (0..opts.restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| {
            let (mut labels, mut ci) = if r == 0 {
                // Spread the largest monomial over the blocks.
                let top = terms.iter().fold(&terms[0], |a, b| if b.1.abs() > a.1.abs() { b } else { a });
                let mut labels: Vec<usize> = (0..support.len()).map(|i| i % ell).collect();
                for (j, &v) in top.0.vars().iter().enumerate() {
                    labels[pos(v)] = j.min(ell - 1);
                }
                let ci = comps.iter().position(|c| c[..ell - 1].iter().all(|&x| x == 1)).unwrap_or(0);
                (labels, ci)
            } else {
                let mut rng = substream(opts.seed, domain::SEARCH, mix(u64::MAX, r));
                let labels = (0..support.len()).map(|_| rng.random_range(0..ell)).collect();
                (labels, rng.random_range(0..comps.len()))
            };
            let mut value = score(&labels, &comps[ci]);
            for _pass in 0..20 {
                let mut improved = false;
                for i in 0..support.len() {
                    for l in 0..ell {
                        for (cj, comp) in comps.iter().enumerate() {
                            if l == labels[i] && cj == ci {
                                continue;
                            }
                            let old = labels[i];
                            labels[i] = l;
                            let v = score(&labels, comp);
                            if v > value * (1.0 + 1e-12) {
                                value = v;
                                ci = cj;
                                improved = true;
                            } else {
                                labels[i] = old;
                            }
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            (value, labels, ci)
        })
        .collect();
    let mut bi = 0;
    for (r, o) in outer.iter().enumerate() {
        if o.0 > outer[bi].0 {
            bi = r;
        }
    }
    let (_, labels, ci) = &outer[bi];
    let cand = build_candidate(terms, |v| labels[pos(v)], &comps[*ci])
        .unwrap_or_else(|| build_candidate(terms, |_| 0, &[d]).unwrap());
    let comp = if cand.dicts.len() == ell { comps[*ci].clone() } else { vec![d] };
    let (value, factors) = cand.tensor.best(opts, 0);
    (value, cand, factors, comp)
}

/// `M_ell` of a multilinear form: slots are grouped instead of variables.
#[derive(Debug, Clone)]
pub struct FormMEll {
    pub ell: usize,
    pub value: f64,
    pub correlation: f64,
    /// Slot groups of the best partition.
    pub groups: Vec<Vec<usize>>,
}

pub fn m_ell_form(q: &SymmetricForm<f64>, ell: usize, opts: &SearchOptions) -> Result<FormMEll> {
    let d = q.order();
    if ell == 0 || ell > d {
        return Err(invalid(format!("ell must be in [1, {d}], got {ell}")));
    }
    let n = q.n();
    let mut best: Option<FormMEll> = None;
    for (key, rgs) in set_partitions(d, ell).into_iter().enumerate() {
        let groups: Vec<Vec<usize>> = (0..ell).map(|g| (0..d).filter(|&s| rgs[s] == g).collect()).collect();
        let dims = groups.iter().map(|g| n.pow(g.len() as u32)).collect();
        let mut entries = Vec::new();
        let mut idx = vec![0usize; d];
        for &c in q.data() {
            if c != 0.0 {
                let slot: SmallVec<[u32; 4]> =
                    groups.iter().map(|g| g.iter().fold(0, |a, &s| a * n + idx[s]) as u32).collect();
                entries.push((slot, c));
            }
            // Odometer over the row-major index.
            for s in (0..d).rev() {
                idx[s] += 1;
                if idx[s] < n {
                    break;
                }
                idx[s] = 0;
            }
        }
        if entries.is_empty() {
            continue;
        }
        let t = Tensor { dims, entries };
        let current = best.as_ref().map_or(-1.0, |b| b.correlation);
        if t.frob() <= current {
            continue;
        }
        let (value, _) = t.best(opts, key as u64);
        if value > current {
            best = Some(FormMEll { ell, value: value.sqrt(), correlation: value, groups });
        }
    }
    best.ok_or_else(|| invalid("zero form"))
}
