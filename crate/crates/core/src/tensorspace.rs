//! Canonical bases of the graded spaces `Λ^j(E*) ⊗ S^k(E*) ⊗ F` with
//! `E = Q^n` and `F = Q^f`.
//!
//! Conventions (fixed once, everything else depends on them):
//!
//! * A symmetric tensor of degree `k` is the coefficient vector of a
//!   homogeneous polynomial in the monomial basis `x^α`, so contraction
//!   `ι_{e_i}` is the partial derivative `∂/∂x_i`.
//! * Monomials of a fixed degree are listed in decreasing graded
//!   reverse-lexicographic order (`x1² > x1x2 > x2² > x1x3 > …`).
//! * Exterior indices are strictly increasing direction lists in
//!   lexicographic order.
//! * Flat index = `(fiber · C(n,j) + ext_rank) · C(n+k-1,k) + sym_rank`, so the
//!   fiber coordinate varies slowest and the monomial fastest.
//! * Wedging `e_i*` onto the front of an exterior index carries the sign
//!   `(-1)^(number of directions smaller than i)`.
//!
//! Directions are 0-based in code and printed 1-based (`x1`, `x2`, …).

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ratlin::{rat, RatMatrix};

/// `C(n, k)` as `usize`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of monomials of degree `k` in `n` variables, `C(n+k-1, k)`.
pub fn sym_dim(n: usize, k: i64) -> usize {
    if k < 0 {
        return 0;
    }
    let k = k as usize;
    if n == 0 {
        return usize::from(k == 0);
    }
    binomial(n + k - 1, k)
}

pub fn ext_dim(n: usize, j: usize) -> usize {
    binomial(n, j)
}

/// Exponent vector `α = (α_1, …, α_n)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(exponents: Vec<usize>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn exponents(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// `α + e_i`
    pub fn raised(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v[i] += 1;
        MultiIndex(v)
    }

    /// `α - e_i`, if `α_i > 0`.
    pub fn lowered(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[i] -= 1;
        Some(MultiIndex(v))
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `α! = Π α_i!`
    pub fn factorial(&self) -> BigInt {
        let mut acc = BigInt::one();
        for &a in &self.0 {
            for t in 2..=a {
                acc *= t;
            }
        }
        acc
    }

    /// Position among degree-`|α|` monomials in decreasing grevlex order.
    pub fn rank(&self) -> usize {
        let mut rank = 0;
        let mut degree = self.degree();
        for var in (1..self.0.len()).rev() {
            let last = self.0[var];
            for t in 0..last {
                rank += sym_dim(var, (degree - t) as i64);
            }
            degree -= last;
        }
        rank
    }

    /// Inverse of [`MultiIndex::rank`].
    pub fn unrank(n: usize, degree: usize, mut rank: usize) -> Self {
        let mut exps = vec![0; n];
        let mut remaining = degree;
        for var in (1..n).rev() {
            let mut t = 0;
            loop {
                let block = sym_dim(var, (remaining - t) as i64);
                if rank < block {
                    break;
                }
                rank -= block;
                t += 1;
            }
            exps[var] = t;
            remaining -= t;
        }
        if n > 0 {
            exps[0] = remaining;
        }
        MultiIndex(exps)
    }

    /// All multi-indices of the given degree, in canonical order.
    pub fn all_of_degree(n: usize, degree: usize) -> Vec<MultiIndex> {
        (0..sym_dim(n, degree as i64))
            .map(|r| MultiIndex::unrank(n, degree, r))
            .collect()
    }

    /// Derivative suffix such as `x1x1x2`; empty for the zero index.
    pub fn derivative_suffix(&self) -> String {
        let mut s = String::new();
        for (i, &a) in self.0.iter().enumerate() {
            for _ in 0..a {
                s.push_str(&format!("x{}", i + 1));
            }
        }
        s
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Strictly increasing list of directions labelling a basis element of `Λ^j E*`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExtIndex(Vec<usize>);

impl ExtIndex {
    pub fn new(directions: Vec<usize>) -> Result<Self> {
        if directions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::IndexOutOfRange(format!(
                "exterior index {directions:?} is not strictly increasing"
            )));
        }
        Ok(ExtIndex(directions))
    }

    pub fn empty() -> Self {
        ExtIndex(Vec::new())
    }

    pub fn directions(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// `e_i* ∧ self`, as `(sign, index)`, or `None` when `i` already occurs.
    pub fn wedge_front(&self, i: usize) -> Option<(i64, ExtIndex)> {
        match self.0.binary_search(&i) {
            Ok(_) => None,
            Err(pos) => {
                let mut dirs = self.0.clone();
                dirs.insert(pos, i);
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                Some((sign, ExtIndex(dirs)))
            }
        }
    }

    /// Lexicographic rank among `j`-subsets of `{0..n}`.
    pub fn rank(&self, n: usize) -> usize {
        let j = self.0.len();
        let mut rank = 0;
        let mut prev: Option<usize> = None;
        for (pos, &c) in self.0.iter().enumerate() {
            let start = prev.map_or(0, |p| p + 1);
            for v in start..c {
                rank += binomial(n - v - 1, j - pos - 1);
            }
            prev = Some(c);
        }
        rank
    }

    pub fn unrank(n: usize, j: usize, mut rank: usize) -> Self {
        let mut dirs = Vec::with_capacity(j);
        let mut v = 0;
        for pos in 0..j {
            loop {
                let block = binomial(n - v - 1, j - pos - 1);
                if rank < block {
                    break;
                }
                rank -= block;
                v += 1;
            }
            dirs.push(v);
            v += 1;
        }
        ExtIndex(dirs)
    }

    pub fn all(n: usize, j: usize) -> Vec<ExtIndex> {
        (0..ext_dim(n, j)).map(|r| ExtIndex::unrank(n, j, r)).collect()
    }
}

/// Describes `Λ^j(E*) ⊗ S^k(E*) ⊗ Q^f` with `dim E = n`.
///
/// `k` may be negative; `S^k = 0` then.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TensorSpaceDesc {
    pub n: usize,
    pub j: usize,
    pub k: i64,
    pub f: usize,
}

impl TensorSpaceDesc {
    pub fn new(n: usize, j: usize, k: i64, f: usize) -> Self {
        Self { n, j, k, f }
    }

    /// `S^k(E*) ⊗ Q^f`
    pub fn symmetric(n: usize, k: i64, f: usize) -> Self {
        Self::new(n, 0, k, f)
    }

    pub fn ext_dim(&self) -> usize {
        ext_dim(self.n, self.j)
    }

    pub fn sym_dim(&self) -> usize {
        sym_dim(self.n, self.k)
    }

    pub fn dim(&self) -> usize {
        self.ext_dim() * self.sym_dim() * self.f
    }

    pub fn index_of(&self, ext: &ExtIndex, sym: &MultiIndex, fib: usize) -> Result<usize> {
        if ext.degree() != self.j || ext.directions().iter().any(|&d| d >= self.n) {
            return Err(Error::IndexOutOfRange(format!(
                "exterior index {:?} invalid for n={}, j={}",
                ext.directions(),
                self.n,
                self.j
            )));
        }
        if sym.n() != self.n || self.k < 0 || sym.degree() as i64 != self.k {
            return Err(Error::IndexOutOfRange(format!(
                "multi-index {sym:?} invalid for n={}, k={}",
                self.n, self.k
            )));
        }
        if fib >= self.f {
            return Err(Error::IndexOutOfRange(format!(
                "fiber coordinate {fib} invalid for f={}",
                self.f
            )));
        }
        Ok(self.index_unchecked(ext.rank(self.n), sym.rank(), fib))
    }

    pub(crate) fn index_unchecked(&self, ext_rank: usize, sym_rank: usize, fib: usize) -> usize {
        (fib * self.ext_dim() + ext_rank) * self.sym_dim() + sym_rank
    }

    pub fn coindex_of(&self, index: usize) -> Result<(ExtIndex, MultiIndex, usize)> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange(format!(
                "flat index {index} out of range for dimension {}",
                self.dim()
            )));
        }
        let sd = self.sym_dim();
        let ed = self.ext_dim();
        let sym_rank = index % sd;
        let rest = index / sd;
        let ext_rank = rest % ed;
        let fib = rest / ed;
        Ok((
            ExtIndex::unrank(self.n, self.j, ext_rank),
            MultiIndex::unrank(self.n, self.k as usize, sym_rank),
            fib,
        ))
    }

    /// Basis labels in flat-index order.
    pub fn basis(&self) -> Vec<(ExtIndex, MultiIndex, usize)> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let exts = ExtIndex::all(self.n, self.j);
        let syms = MultiIndex::all_of_degree(self.n, self.k as usize);
        let mut out = Vec::with_capacity(self.dim());
        for fib in 0..self.f {
            for e in &exts {
                for s in &syms {
                    out.push((e.clone(), s.clone(), fib));
                }
            }
        }
        out
    }
}

pub fn dim(desc: &TensorSpaceDesc) -> usize {
    desc.dim()
}

/// Matrix of `η ↦ (v ↦ ι_v η)`, i.e. `S^k E* ⊗ F → E* ⊗ S^{k-1} E* ⊗ F`.
///
/// Entry `(e_i ⊗ x^{α-e_i}, x^α)` is `α_i`.
pub fn contraction_matrix(desc: &TensorSpaceDesc) -> Result<RatMatrix> {
    if desc.j != 0 {
        return Err(Error::InvalidArgument(format!(
            "contraction needs exterior degree 0, got {}",
            desc.j
        )));
    }
    if desc.k < 1 {
        return Err(Error::InvalidArgument(
            "contraction needs symmetric degree at least 1".into(),
        ));
    }
    let target = TensorSpaceDesc::new(desc.n, 1, desc.k - 1, desc.f);
    let mut m = RatMatrix::zeros(target.dim(), desc.dim());
    for (col, (_, alpha, fib)) in desc.basis().into_iter().enumerate() {
        for i in 0..desc.n {
            if let Some(lower) = alpha.lowered(i) {
                let row = target.index_unchecked(i, lower.rank(), fib);
                m.set(row, col, rat(alpha.exponents()[i] as i64));
            }
        }
    }
    Ok(m)
}

/// `∂/∂x_i` as a map `S^k E* ⊗ F → S^{k-1} E* ⊗ F`.
pub fn derivative_matrix(n: usize, k: i64, f: usize, i: usize) -> RatMatrix {
    let source = TensorSpaceDesc::symmetric(n, k, f);
    let target = TensorSpaceDesc::symmetric(n, k - 1, f);
    let mut m = RatMatrix::zeros(target.dim(), source.dim());
    for (col, (_, alpha, fib)) in source.basis().into_iter().enumerate() {
        if let Some(lower) = alpha.lowered(i) {
            let row = target.index_unchecked(0, lower.rank(), fib);
            m.set(row, col, rat(alpha.exponents()[i] as i64));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::Rational;
    use num_traits::Zero;
    use std::collections::HashSet;

    #[test]
    fn dimension_examples() {
        assert_eq!(TensorSpaceDesc::new(2, 0, 1, 1).dim(), 2);
        assert_eq!(TensorSpaceDesc::new(2, 1, 0, 3).dim(), 6);
        assert_eq!(TensorSpaceDesc::new(3, 2, 2, 1).dim(), 18);
        assert_eq!(TensorSpaceDesc::new(2, 3, 1, 1).dim(), 0);
        assert_eq!(TensorSpaceDesc::new(2, 1, -1, 1).dim(), 0);
    }

    #[test]
    fn grevlex_order_of_quadrics() {
        let desc = TensorSpaceDesc::symmetric(2, 2, 1);
        let labels: Vec<_> = desc.basis().into_iter().map(|(_, s, _)| s).collect();
        assert_eq!(
            labels,
            vec![
                MultiIndex::new(vec![2, 0]),
                MultiIndex::new(vec![1, 1]),
                MultiIndex::new(vec![0, 2])
            ]
        );
        let mid = desc
            .index_of(&ExtIndex::empty(), &MultiIndex::new(vec![1, 1]), 0)
            .unwrap();
        assert_eq!(mid, 1);
        let n3: Vec<_> = MultiIndex::all_of_degree(3, 2)
            .into_iter()
            .map(|m| m.derivative_suffix())
            .collect();
        assert_eq!(n3, ["x1x1", "x1x2", "x2x2", "x1x3", "x2x3", "x3x3"]);
    }

    #[test]
    fn first_and_last_index() {
        let desc = TensorSpaceDesc::new(3, 2, 2, 2);
        let (e, s, f) = desc.coindex_of(0).unwrap();
        assert_eq!(desc.index_of(&e, &s, f).unwrap(), 0);
        let last = desc.dim() - 1;
        let (e, s, f) = desc.coindex_of(last).unwrap();
        assert_eq!(e.directions(), &[1, 2]);
        assert_eq!(s.exponents(), &[0, 0, 2]);
        assert_eq!(f, 1);
        assert_eq!(desc.index_of(&e, &s, f).unwrap(), last);
    }

    #[test]
    fn index_errors() {
        let desc = TensorSpaceDesc::new(2, 1, 2, 1);
        let e = ExtIndex::new(vec![0]).unwrap();
        assert!(desc.index_of(&e, &MultiIndex::new(vec![1, 0]), 0).is_err());
        assert!(desc.index_of(&e, &MultiIndex::new(vec![1, 1]), 1).is_err());
        assert!(desc
            .index_of(&ExtIndex::new(vec![0, 1]).unwrap(), &MultiIndex::new(vec![1, 1]), 0)
            .is_err());
        assert!(ExtIndex::new(vec![1, 0]).is_err());
        assert!(desc.coindex_of(desc.dim()).is_err());
    }

    #[test]
    fn bijection_and_counts_exhaustive() {
        for n in 0..=4 {
            for j in 0..=n {
                for k in 0..=4i64 {
                    for f in 0..=3 {
                        let desc = TensorSpaceDesc::new(n, j, k, f);
                        // count by brute-force enumeration of all labels
                        let mut count = 0;
                        let mut seen = HashSet::new();
                        let exts: Vec<Vec<usize>> = (0u32..(1u32 << n))
                            .filter(|mask| mask.count_ones() as usize == j)
                            .map(|mask| (0..n).filter(|b| mask & (1 << b) != 0).collect())
                            .collect();
                        let mut monos = Vec::new();
                        let mut cur = vec![0usize; n];
                        fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                            if i + 1 >= cur.len() {
                                if !cur.is_empty() {
                                    cur[i] = left;
                                    out.push(cur.clone());
                                } else if left == 0 {
                                    out.push(vec![]);
                                }
                                return;
                            }
                            for a in 0..=left {
                                cur[i] = a;
                                rec(i + 1, left - a, cur, out);
                            }
                        }
                        rec(0, k as usize, &mut cur, &mut monos);
                        for e in &exts {
                            for m in &monos {
                                for fib in 0..f {
                                    let idx = desc
                                        .index_of(
                                            &ExtIndex::new(e.clone()).unwrap(),
                                            &MultiIndex::new(m.clone()),
                                            fib,
                                        )
                                        .unwrap();
                                    assert!(idx < desc.dim());
                                    assert!(seen.insert(idx));
                                    let (e2, m2, f2) = desc.coindex_of(idx).unwrap();
                                    assert_eq!((e2.directions(), m2.exponents(), f2), (&e[..], &m[..], fib));
                                    count += 1;
                                }
                            }
                        }
                        assert_eq!(count, desc.dim(), "n={n} j={j} k={k} f={f}");
                    }
                }
            }
        }
    }

    #[test]
    fn contraction_examples() {
        let m = contraction_matrix(&TensorSpaceDesc::symmetric(1, 1, 1)).unwrap();
        assert_eq!(m, RatMatrix::identity(1));
        let m = contraction_matrix(&TensorSpaceDesc::symmetric(2, 1, 1)).unwrap();
        assert_eq!(m, RatMatrix::identity(2));

        // x1*x2 contracts to x2 along e1 and to x1 along e2
        let desc = TensorSpaceDesc::symmetric(2, 2, 1);
        let m = contraction_matrix(&desc).unwrap();
        let mut eta = vec![Rational::zero(); 3];
        eta[1] = rat(1);
        let out = m.mul_vec(&eta);
        let target = TensorSpaceDesc::new(2, 1, 1, 1);
        let e1 = ExtIndex::new(vec![0]).unwrap();
        let e2 = ExtIndex::new(vec![1]).unwrap();
        let x1 = MultiIndex::unit(2, 0);
        let x2 = MultiIndex::unit(2, 1);
        assert_eq!(out[target.index_of(&e1, &x2, 0).unwrap()], rat(1));
        assert_eq!(out[target.index_of(&e2, &x1, 0).unwrap()], rat(1));
        assert_eq!(out.iter().filter(|v| !v.is_zero()).count(), 2);

        assert!(contraction_matrix(&TensorSpaceDesc::symmetric(2, 0, 1)).is_err());
    }

    #[test]
    fn contractions_commute() {
        for n in 1..=3 {
            for k in 2..=4 {
                for f in 1..=2 {
                    for u in 0..n {
                        for v in 0..n {
                            let uv = derivative_matrix(n, k - 1, f, u).mul(&derivative_matrix(n, k, f, v));
                            let vu = derivative_matrix(n, k - 1, f, v).mul(&derivative_matrix(n, k, f, u));
                            assert_eq!(uv, vu);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn wedge_sign_counts_smaller_directions() {
        let e = ExtIndex::new(vec![0, 2]).unwrap();
        assert_eq!(e.wedge_front(1), Some((-1, ExtIndex::new(vec![0, 1, 2]).unwrap())));
        assert_eq!(e.wedge_front(3), Some((1, ExtIndex::new(vec![0, 2, 3]).unwrap())));
        assert_eq!(e.wedge_front(2), None);
    }

    #[test]
    fn ext_rank_is_lexicographic() {
        let all: Vec<_> = ExtIndex::all(4, 2).into_iter().map(|e| e.directions().to_vec()).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        for (r, e) in ExtIndex::all(5, 3).iter().enumerate() {
            assert_eq!(e.rank(5), r);
        }
    }
}
