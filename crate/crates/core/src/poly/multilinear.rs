use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::budget::DEFAULT_MAX_DEGREE;
use crate::error::{Error, Result};
use crate::poly::Monomial;
use crate::scalar::Scalar;

/// Sparse multilinear polynomial in `nvars` variables.
///
/// Zero coefficients are never stored. Because squarefree Gaussian monomials
/// are orthonormal, the coefficient dot product equals `E[p(Y) q(Y)]` for
/// independent standard Gaussians `Y`.
#[derive(Clone, PartialEq)]
pub struct MultilinearPolynomial<S> {
    nvars: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> MultilinearPolynomial<S> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::constant(), c);
        p
    }

    /// The single variable `x_i`.
    pub fn var(nvars: usize, i: u32) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(i), S::one());
        p
    }

    /// Builds a polynomial, merging duplicate monomials and checking indices
    /// and the default degree ceiling.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, S)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if let Some(v) = m.max_var() {
                if v as usize >= nvars {
                    return Err(Error::IndexOutOfRange { index: v as usize, nvars });
                }
            }
            if m.degree() > DEFAULT_MAX_DEGREE {
                return Err(Error::DegreeOverflow { degree: m.degree(), max: DEFAULT_MAX_DEGREE });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Convenience constructor from index lists, e.g. `[(vec![0, 1], 3.0)]`.
    pub fn from_index_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, S)>,
    {
        let terms: Result<Vec<_>> =
            terms.into_iter().map(|(v, c)| Ok((Monomial::new(v)?, c))).collect();
        Self::from_terms(nvars, terms?)
    }

    /// Adds `c * m`, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Widens the ambient variable count.
    pub fn with_nvars(mut self, nvars: usize) -> Result<Self> {
        if let Some(v) = self.max_var() {
            if v as usize >= nvars {
                return Err(Error::IndexOutOfRange { index: v as usize, nvars });
            }
        }
        self.nvars = nvars;
        Ok(self)
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&S> {
        self.terms.get(m)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum monomial degree; 0 for constants and the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn max_var(&self) -> Option<u32> {
        self.terms.keys().filter_map(Monomial::max_var).max()
    }

    /// Variables that appear in at least one term.
    pub fn support(&self) -> BTreeSet<u32> {
        self.terms.keys().flat_map(|m| m.vars().iter().copied()).collect()
    }

    pub fn evaluate(&self, x: &[S]) -> Result<S> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &v in m.vars() {
                t = t * x[v as usize].clone();
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// `<p, q> = E[p(Y) q(Y)]`: sum of products of shared coefficients.
    pub fn inner_product(&self, other: &Self) -> Result<S> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &Self) -> S {
        let (small, large) =
            if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        small
            .terms
            .iter()
            .filter_map(|(m, c)| large.terms.get(m).map(|d| c.clone() * d.clone()))
            .fold(S::zero(), |a, b| a + b)
    }

    /// Sum of squared coefficients, `|p|^2 = E[p(Y)^2]`.
    pub fn norm_sq(&self) -> S {
        self.terms.values().fold(S::zero(), |a, c| a + c.clone() * c.clone())
    }

    /// Homogeneous components, ascending by degree. Degree-0 (constant)
    /// components are included when present.
    pub fn homogeneous_parts(&self) -> Vec<(usize, Self)> {
        let mut parts: BTreeMap<usize, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(m.degree())
                .or_insert_with(|| Self::zero(self.nvars))
                .terms
                .insert(m.clone(), c.clone());
        }
        parts.into_iter().collect()
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.clone() * s.clone())).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: &S) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &S::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(other, &(-S::one()))
    }

    /// Product of two polynomials whose supports are disjoint (the result is
    /// again multilinear).
    pub fn mul_disjoint(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, got: other.nvars });
        }
        let mut out = Self::zero(self.nvars);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let m = a.union_disjoint(b).ok_or_else(|| {
                    Error::InvalidArgument("mul_disjoint: supports overlap".into())
                })?;
                out.add_term(m, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MultilinearPolynomial<T> {
        let mut out = MultilinearPolynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_f64(&self) -> MultilinearPolynomial<f64> {
        self.map_coeffs(|c| c.approx())
    }

    /// Coefficient-wise conversion from `f64` (rationals snap to the dyadic grid).
    pub fn from_f64_poly(p: &MultilinearPolynomial<f64>) -> Self {
        p.map_coeffs(|c| S::from_float(*c))
    }

    /// Applies an injective variable renaming.
    pub fn rename(&self, nvars: usize, map: impl Fn(u32) -> u32) -> Result<Self> {
        let terms: Result<Vec<_>> =
            self.terms.iter().map(|(m, c)| Ok((m.rename(&map)?, c.clone()))).collect();
        Self::from_terms(nvars, terms?)
    }

    /// Fast evaluator over `f64` inputs.
    pub fn compile(&self) -> crate::poly::CompiledPoly {
        crate::poly::CompiledPoly::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.vars().to_vec(), c.approx())),
        )
    }
}

impl<S: Scalar> fmt::Debug for MultilinearPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<S: Scalar> fmt::Display for MultilinearPolynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if m.is_constant() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn evaluate_examples() {
        let p = MultilinearPolynomial::from_index_terms(2, [(vec![0, 1], 1.0)]).unwrap();
        assert_eq!(p.evaluate(&[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(MultilinearPolynomial::<f64>::zero(3).evaluate(&[4.0, 5.0, 6.0]).unwrap(), 0.0);
        // 3 x1 x3 - x2 at (2, 5, -1), 1-based names mapped to indices 0..3
        let p = MultilinearPolynomial::from_index_terms(3, [(vec![0, 2], q(3, 1)), (vec![1], q(-1, 1))])
            .unwrap();
        let x = [q(2, 1), q(5, 1), q(-1, 1)];
        assert_eq!(p.evaluate(&x).unwrap(), q(-11, 1));
        assert!(matches!(p.evaluate(&x[..2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn inner_products() {
        let x1x2 = MultilinearPolynomial::from_index_terms(3, [(vec![0, 1], q(1, 1))]).unwrap();
        assert_eq!(x1x2.inner_product(&x1x2).unwrap(), q(1, 1));
        let x1 = MultilinearPolynomial::<Rational>::var(3, 0);
        let x2 = MultilinearPolynomial::<Rational>::var(3, 1);
        assert_eq!(x1.inner_product(&x2).unwrap(), q(0, 1));
        let p = MultilinearPolynomial::from_index_terms(3, [(vec![0, 1], q(2, 1)), (vec![2], q(1, 1))])
            .unwrap();
        let r = MultilinearPolynomial::from_index_terms(3, [(vec![0, 1], q(1, 1)), (vec![2], q(-3, 1))])
            .unwrap();
        assert_eq!(p.inner_product(&r).unwrap(), q(-1, 1));
        assert_eq!(p.norm_sq(), p.inner_product(&p).unwrap());
    }

    #[test]
    fn homogeneous_split() {
        let p = MultilinearPolynomial::from_index_terms(3, [(vec![0, 1], 1.0), (vec![2], 1.0)]).unwrap();
        let parts = p.homogeneous_parts();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, 1);
        assert_eq!(parts[0].1, MultilinearPolynomial::var(3, 2));
        assert_eq!(parts[1].0, 2);
        let h = MultilinearPolynomial::from_index_terms(3, [(vec![0, 1], 1.0)]).unwrap();
        assert_eq!(h.homogeneous_parts(), vec![(2, h.clone())]);
    }

    #[test]
    fn no_zero_coefficients() {
        let mut p = MultilinearPolynomial::var(2, 0);
        p.add_term(Monomial::var(0), -1.0);
        assert!(p.is_zero());
        assert!(MultilinearPolynomial::from_index_terms(2, [(vec![0], 0.0)]).unwrap().is_zero());
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(matches!(
            MultilinearPolynomial::from_index_terms(2, [(vec![0, 0], 1.0)]),
            Err(Error::RepeatedIndex(0))
        ));
        assert!(matches!(
            MultilinearPolynomial::from_index_terms(2, [(vec![2], 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            MultilinearPolynomial::from_index_terms(12, [((0..9).collect(), 1.0)]),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn disjoint_products() {
        let a = MultilinearPolynomial::from_index_terms(4, [(vec![0], 1.0), (vec![1], 2.0)]).unwrap();
        let b = MultilinearPolynomial::from_index_terms(4, [(vec![2, 3], 3.0)]).unwrap();
        let ab = a.mul_disjoint(&b).unwrap();
        assert_eq!(ab.num_terms(), 2);
        assert_eq!(ab.norm_sq(), a.norm_sq() * b.norm_sq());
        assert!(a.mul_disjoint(&a).is_err());
    }
}
