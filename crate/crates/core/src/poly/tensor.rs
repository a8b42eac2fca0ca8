use crate::error::{Error, Result};
use crate::poly::MultilinearPolynomial;
use crate::scalar::Scalar;

/// Dense order-`d` tensor over `n` coordinates: a multilinear form
/// `q(X^1, ..., X^d) = sum q[i_1..i_d] X^1_{i_1} ... X^d_{i_d}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricForm<S> {
    n: usize,
    order: usize,
    data: Vec<S>,
}

impl<S: Scalar> SymmetricForm<S> {
    pub fn zeros(n: usize, order: usize) -> Self {
        Self { n, order, data: vec![S::zero(); n.pow(order as u32)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.flat_index(idx)]
    }

    /// `q(x, ..., x)`.
    pub fn evaluate_diagonal(&self, x: &[S]) -> Result<S> {
        let args: Vec<&[S]> = std::iter::repeat_n(x, self.order).collect();
        self.evaluate(&args)
    }

    /// `q(X^1, ..., X^d)` for `d` argument vectors.
    pub fn evaluate(&self, args: &[&[S]]) -> Result<S> {
        if args.len() != self.order {
            return Err(Error::DimensionMismatch { expected: self.order, got: args.len() });
        }
        if let Some(a) = args.iter().find(|a| a.len() != self.n) {
            return Err(Error::DimensionMismatch { expected: self.n, got: a.len() });
        }
        // Contract the last slot first.
        let mut cur = self.data.clone();
        for slot in (0..self.order).rev() {
            let x = args[slot];
            let next_len = cur.len() / self.n;
            let mut next = vec![S::zero(); next_len];
            for (r, out) in next.iter_mut().enumerate() {
                let row = &cur[r * self.n..(r + 1) * self.n];
                *out = row.iter().zip(x).fold(S::zero(), |a, (q, xi)| a + q.clone() * xi.clone());
            }
            cur = next;
        }
        Ok(cur.pop().unwrap_or_else(S::zero))
    }

    /// Frobenius inner product, `E[q1(X^1..X^d) q2(X^1..X^d)]` for
    /// independent standard Gaussian vectors.
    pub fn inner_product(&self, other: &Self) -> Result<S> {
        if self.n != other.n || self.order != other.order {
            return Err(Error::DimensionMismatch { expected: self.data.len(), got: other.data.len() });
        }
        Ok(self.data.iter().zip(&other.data).fold(S::zero(), |a, (x, y)| a + x.clone() * y.clone()))
    }
}

fn factorial<S: Scalar>(d: usize) -> S {
    (1..=d as i64).fold(S::one(), |a, k| a * S::from_int(k))
}

/// Heap's algorithm over index permutations.
fn for_each_permutation(items: &[usize], mut f: impl FnMut(&[usize])) {
    let mut a = items.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// The unique symmetric multilinear form with `q(X, ..., X) = p(X)`: each
/// coefficient is spread equally over its `d!` index permutations.
pub fn tensorize<S: Scalar>(p: &MultilinearPolynomial<S>, degree: usize) -> Result<SymmetricForm<S>> {
    if p.terms().any(|(m, _)| m.degree() != degree) {
        return Err(Error::NotHomogeneous);
    }
    let mut q = SymmetricForm::zeros(p.nvars(), degree);
    let share = factorial::<S>(degree);
    for (m, c) in p.terms() {
        let idx: Vec<usize> = m.vars().iter().map(|&v| v as usize).collect();
        let val = c.clone() / share.clone();
        for_each_permutation(&idx, |perm| {
            let f = q.flat_index(perm);
            q.data[f] = val.clone();
        });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn single_monomial() {
        let p = MultilinearPolynomial::from_index_terms(2, [(vec![0, 1], 1.0)]).unwrap();
        let q = tensorize(&p, 2).unwrap();
        assert_eq!(*q.get(&[0, 1]), 0.5);
        assert_eq!(*q.get(&[1, 0]), 0.5);
        assert_eq!(*q.get(&[0, 0]), 0.0);
    }

    #[test]
    fn rejects_non_homogeneous() {
        let p = MultilinearPolynomial::from_index_terms(2, [(vec![0, 1], 1.0), (vec![0], 1.0)]).unwrap();
        assert!(matches!(tensorize(&p, 2), Err(Error::NotHomogeneous)));
    }

    #[test]
    fn permutation_count() {
        let mut n = 0;
        for_each_permutation(&[0, 1, 2, 3], |_| n += 1);
        assert_eq!(n, 24);
    }

    #[test]
    fn inner_product_scales_by_factorial() {
        let p1 = MultilinearPolynomial::from_index_terms(
            4,
            [(vec![0, 1, 2], Rational::from_ratio(2, 1)), (vec![1, 2, 3], Rational::from_ratio(-1, 3))],
        )
        .unwrap();
        let p2 = MultilinearPolynomial::from_index_terms(
            4,
            [(vec![0, 1, 2], Rational::from_ratio(5, 1)), (vec![0, 2, 3], Rational::from_ratio(1, 1))],
        )
        .unwrap();
        let q1 = tensorize(&p1, 3).unwrap();
        let q2 = tensorize(&p2, 3).unwrap();
        let lhs = p1.inner_product(&p2).unwrap();
        let rhs = q1.inner_product(&q2).unwrap() * Rational::from_int(6);
        assert_eq!(lhs, rhs);
    }
}
