//! Exact rational linear algebra.
//!
//! Everything downstream (ranks of Spencer differentials, prolongation
//! fibers, torsion feasibility) reduces to questions about kernels and images
//! of rational matrices, so nothing here ever rounds.
//!
//! Row reduction uses a fixed pivot rule (leftmost nonzero column, first
//! nonzero row at or below the current row, pivot scaled to one). Subspaces
//! store the reduced echelon basis of their span, so two equal subspaces
//! always carry identical basis matrices.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always kept in lowest terms with a positive
/// denominator by `num-rational`.
pub type Rational = BigRational;

/// Integer-valued rational.
pub fn rat(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `numer / denom` in lowest terms. Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn format_vector(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

pub fn is_zero_vector(values: &[Rational]) -> bool {
    values.iter().all(Zero::is_zero)
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Self {
        let n_rows = rows.len();
        let mut entries = Vec::with_capacity(n_rows * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "row length mismatch");
            entries.extend(row);
        }
        Self {
            rows: n_rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from columns; every column must have length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    m.set(i, j, v.clone());
                }
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Rational) {
        let slot = &mut self.entries[i * self.cols + j];
        *slot += value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = Vec<Rational>> + '_ {
        (0..self.cols).map(move |j| self.column(j))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Matrix product. Skips zero entries, which matters for the very sparse
    /// Spencer differentials.
    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_to(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, factor: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.rows, other.rows);
        RatMatrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// `self` on top of `other`.
    pub fn vstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.cols);
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        RatMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> RatMatrix {
        RatMatrix::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    pub fn select_columns(&self, cols: &[usize]) -> RatMatrix {
        RatMatrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }

    fn row_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "[{}]", row.join(", "))?;
            if i + 1 < self.rows {
                write!(f, ", ")?;
            }
        }
        write!(f, "]")
    }
}

/// Reduces rows in place and returns the pivot columns.
fn rref_rows(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        if !inv.is_one() {
            for v in rows[r].iter_mut().skip(c) {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let (before, rest) = rows.split_at_mut(r);
        let (pivot_row, after) = rest.split_first_mut().unwrap();
        for other in before.iter_mut().chain(after.iter_mut()) {
            let factor = other[c].clone();
            if factor.is_zero() {
                continue;
            }
            for (j, pv) in pivot_row.iter().enumerate().skip(c) {
                if !pv.is_zero() {
                    other[j] -= &factor * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Reduced row-echelon form and pivot columns; `rank = pivots.len()`.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut rows = m.row_vectors();
    let pivots = rref_rows(&mut rows, m.cols);
    (RatMatrix::from_rows(m.cols, rows), pivots)
}

/// Basis of the null space of `m` (one vector per free column).
fn null_vectors(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let mut rows = m.row_vectors();
    let pivots = rref_rows(&mut rows, m.cols);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&free| !is_pivot[free])
        .map(|free| {
            let mut v = vec![Rational::zero(); m.cols];
            v[free] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                let entry = &rows[r][free];
                if !entry.is_zero() {
                    v[p] = -entry;
                }
            }
            v
        })
        .collect()
}

pub fn kernel(m: &RatMatrix) -> Subspace {
    Subspace::span(m.cols, null_vectors(m))
}

/// Column space of `m`.
pub fn image(m: &RatMatrix) -> Subspace {
    Subspace::from_columns(m)
}

/// Linear subspace of `Q^ambient_dim` with a canonical basis.
///
/// The basis is the reduced row-echelon basis of the span, stored as the
/// columns of `basis`. Each basis vector has a 1 in its pivot coordinate and
/// every other basis vector vanishes there.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RatMatrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(dim {} in Q^{}, basis {:?})",
            self.dim(),
            self.ambient_dim,
            self.basis
        )
    }
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: RatMatrix::zeros(ambient_dim, 0),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: RatMatrix::identity(ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Self {
        let mut rows: Vec<Vec<Rational>> = vectors
            .into_iter()
            .inspect(|v| assert_eq!(v.len(), ambient_dim, "vector length mismatch"))
            .filter(|v| !is_zero_vector(v))
            .collect();
        let pivots = rref_rows(&mut rows, ambient_dim);
        rows.truncate(pivots.len());
        Self {
            ambient_dim,
            basis: RatMatrix::from_columns(ambient_dim, &rows),
            pivots,
        }
    }

    pub fn from_columns(m: &RatMatrix) -> Self {
        Self::span(m.rows(), m.columns().collect())
    }

    /// Coordinate subspace spanned by the given standard basis vectors.
    pub fn coordinate(ambient_dim: usize, coords: impl IntoIterator<Item = usize>) -> Self {
        Self::span(
            ambient_dim,
            coords
                .into_iter()
                .map(|c| {
                    let mut v = vec![Rational::zero(); ambient_dim];
                    v[c] = Rational::one();
                    v
                })
                .collect(),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Basis vectors as columns (`ambient_dim x dim`).
    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn basis_vector(&self, c: usize) -> Vec<Rational> {
        self.basis.column(c)
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.columns().collect()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical representative of `v` modulo this subspace: the unique
    /// element of `v + self` vanishing on every pivot coordinate.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.ambient_dim, "vector length mismatch");
        let mut out = v.to_vec();
        for (c, &p) in self.pivots.iter().enumerate() {
            let coef = out[p].clone();
            if coef.is_zero() {
                continue;
            }
            for i in 0..self.ambient_dim {
                let b = self.basis.get(i, c);
                if !b.is_zero() {
                    out[i] -= &coef * b;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        is_zero_vector(&self.reduce(v))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        self.ambient_dim == other.ambient_dim
            && other.basis.columns().all(|v| self.contains(&v))
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Vector with the given coordinates in the canonical basis.
    pub fn vector(&self, coords: &[Rational]) -> Vec<Rational> {
        self.basis.mul_vec(coords)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut vectors = self.basis_vectors();
        vectors.extend(other.basis_vectors());
        Ok(Subspace::span(self.ambient_dim, vectors))
    }

    /// Rows spanning the annihilator: `x` lies in the subspace iff
    /// `annihilator() * x == 0`.
    pub fn annihilator(&self) -> RatMatrix {
        let rows = null_vectors(&self.basis.transpose());
        RatMatrix::from_rows(self.ambient_dim, rows)
    }

    /// Intersection, computed as the kernel of the stacked annihilators.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(kernel(&self.annihilator().vstack(&other.annihilator())))
    }

    /// `dim big - dim small` after checking `small ⊆ big`.
    pub fn quotient_dim(big: &Subspace, small: &Subspace) -> Result<usize> {
        big.check_ambient(small)?;
        if !big.contains_subspace(small) {
            return Err(Error::NotContained {
                small: small.dim(),
                big: big.dim(),
            });
        }
        Ok(big.dim() - small.dim())
    }

    /// Image of the subspace under the linear map `m`.
    pub fn image_under(&self, m: &RatMatrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient_dim, "map/subspace dimension mismatch");
        image(&m.mul(&self.basis))
    }

    /// Preimage `{x : m x ∈ self}`.
    pub fn preimage_under(&self, m: &RatMatrix) -> Subspace {
        assert_eq!(m.rows(), self.ambient_dim, "map/subspace dimension mismatch");
        kernel(&self.annihilator().mul(m))
    }

    /// Basis vectors of `self` (in canonical order) that extend a basis of
    /// `small` to a basis of `self`. `small` must be contained in `self`.
    pub fn complement_basis(&self, small: &Subspace) -> Vec<Vec<Rational>> {
        let mut acc = small.clone();
        let mut out = Vec::new();
        for v in self.basis_vectors() {
            if !acc.contains(&v) {
                let mut vectors = acc.basis_vectors();
                vectors.push(v.clone());
                acc = Subspace::span(self.ambient_dim, vectors);
                out.push(v);
            }
        }
        out
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "subspace ambient dimension",
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    Feasible {
        particular: Vec<Rational>,
        kernel: Subspace,
    },
    /// `witness` is a row combination `y` with `yᵀA = 0` and `yᵀb ≠ 0`.
    Infeasible {
        witness: Vec<Rational>,
        kernel: Subspace,
    },
}

impl AffineSolution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, AffineSolution::Feasible { .. })
    }

    pub fn kernel(&self) -> &Subspace {
        match self {
            AffineSolution::Feasible { kernel, .. } | AffineSolution::Infeasible { kernel, .. } => {
                kernel
            }
        }
    }
}

pub fn solve_affine(a: &RatMatrix, b: &[Rational]) -> Result<AffineSolution> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "right-hand side length",
            expected: a.rows(),
            found: b.len(),
        });
    }
    let kernel = kernel(a);
    // Augment with [b | I] so the row operations are recorded alongside.
    let rows = a.rows();
    let cols = a.cols();
    let mut aug: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r.extend((0..rows).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref_rows(&mut aug, cols + 1);
    if let Some(r) = pivots.iter().position(|&p| p == cols) {
        let witness = aug[r][cols + 1..].to_vec();
        return Ok(AffineSolution::Infeasible { witness, kernel });
    }
    let mut particular = vec![Rational::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        particular[p] = aug[r][cols].clone();
    }
    Ok(AffineSolution::Feasible { particular, kernel })
}

/// Sign of a rational as -1, 0, 1.
pub fn signum(v: &Rational) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}
