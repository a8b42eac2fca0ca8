use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Squarefree monomial: a strictly increasing list of variable indices.
/// The empty list is the constant monomial.
///
/// Ordering is lexicographic on the index list, which fixes the iteration
/// order of every polynomial map in the crate.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn constant() -> Self {
        Self(SmallVec::new())
    }

    pub fn var(i: u32) -> Self {
        Self(smallvec::smallvec![i])
    }

    /// Canonicalizes (sorts) the indices; rejects repeats.
    pub fn new(vars: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut v: SmallVec<[u32; 4]> = vars.into_iter().collect();
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(Error::RepeatedIndex(w[0]));
            }
        }
        Ok(Self(v))
    }

    pub fn vars(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, var: u32) -> bool {
        self.0.binary_search(&var).is_ok()
    }

    pub fn max_var(&self) -> Option<u32> {
        self.0.last().copied()
    }

    pub fn is_disjoint(&self, other: &Monomial) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    /// Product of two monomials on disjoint variables.
    pub fn union_disjoint(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let next = match (self.0.get(i), other.0.get(j)) {
                (Some(&a), Some(&b)) if a == b => return None,
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    a
                }
                (Some(_), Some(&b)) => {
                    j += 1;
                    b
                }
                (Some(&a), None) => {
                    i += 1;
                    a
                }
                (None, Some(&b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            out.push(next);
        }
        Some(Monomial(out))
    }

    /// Symmetric difference: the product reduced with `x_i^2 = 1`.
    pub fn symmetric_difference(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a < b => {
                    out.push(a);
                    i += 1;
                }
                (Some(_), Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (Some(&a), None) => {
                    out.push(a);
                    i += 1;
                }
                (None, Some(&b)) => {
                    out.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    /// Keeps only the variables accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(u32) -> bool) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&v| keep(v)).collect())
    }

    /// Renames variables through `map`; the map must be injective on this monomial.
    pub fn rename(&self, map: impl Fn(u32) -> u32) -> Result<Monomial> {
        Monomial::new(self.0.iter().map(|&v| map(v)))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "x{v}")?;
        }
        Ok(())
    }
}
