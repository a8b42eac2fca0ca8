use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{powi, Scalar};

/// Power product `prod x_i^{a_i}` stored as `(variable, exponent)` pairs,
/// sorted by variable, every exponent at least 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PowerProduct(SmallVec<[(u32, u32); 4]>);

impl PowerProduct {
    pub fn constant() -> Self {
        Self::default()
    }

    /// Merges repeated variables (`x1 * x1` becomes `x1^2`) and drops zero exponents.
    pub fn new(factors: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        for (v, e) in factors {
            *acc.entry(v).or_default() += e;
        }
        Self(acc.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&(_, e)| e as usize).sum()
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }
}

impl fmt::Debug for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "x{v}")?;
            } else {
                write!(f, "x{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial with arbitrary exponents.
#[derive(Clone, PartialEq)]
pub struct GeneralPolynomial<S> {
    nvars: usize,
    terms: BTreeMap<PowerProduct, S>,
}

impl<S: Scalar> GeneralPolynomial<S> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (PowerProduct, S)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if let Some(&(v, _)) = m.0.last() {
                if v as usize >= nvars {
                    return Err(Error::IndexOutOfRange { index: v as usize, nvars });
                }
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, m: PowerProduct, c: S) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&PowerProduct, &S)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(PowerProduct::degree).max().unwrap_or(0)
    }

    /// Largest single-variable exponent.
    pub fn max_exponent(&self) -> u32 {
        self.terms.keys().flat_map(|m| m.0.iter().map(|&(_, e)| e)).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &[S]) -> Result<S> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                t = t * powi(&x[v as usize], e);
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Sum of squared coefficients (a scale for batteries; not `E[p^2]`).
    pub fn coeff_norm_sq(&self) -> S {
        self.terms.values().fold(S::zero(), |a, c| a + c.clone() * c.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> GeneralPolynomial<T> {
        let mut out = GeneralPolynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Fast evaluator over `f64` inputs.
    pub fn compile(&self) -> crate::poly::CompiledPoly {
        crate::poly::CompiledPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, c)| {
                let vars: Vec<u32> =
                    m.factors().iter().flat_map(|&(v, e)| std::iter::repeat_n(v, e as usize)).collect();
                (vars, c.approx())
            }),
        )
    }

    /// The polynomial as a multilinear one, if every exponent is 1.
    pub fn to_multilinear(&self) -> Option<crate::poly::MultilinearPolynomial<S>> {
        let mut out = crate::poly::MultilinearPolynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            if !m.is_multilinear() {
                return None;
            }
            let mono = crate::poly::Monomial::new(m.factors().iter().map(|&(v, _)| v)).ok()?;
            out.add_term(mono, c.clone());
        }
        Some(out)
    }
}

impl<S: Scalar> From<&crate::poly::MultilinearPolynomial<S>> for GeneralPolynomial<S> {
    fn from(p: &crate::poly::MultilinearPolynomial<S>) -> Self {
        let mut out = Self::zero(p.nvars());
        for (m, c) in p.terms() {
            out.add_term(PowerProduct::new(m.vars().iter().map(|&v| (v, 1))), c.clone());
        }
        out
    }
}

impl<S: Scalar> fmt::Debug for GeneralPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*{m:?}")?;
        }
        Ok(())
    }
}
