//! Spencer differentials, Spencer complexes of a tableau and their cohomology.
//!
//! A [`SpencerChain`] holds the prolongations `g^(0), g^(1), …` of a tableau
//! with `g^(l) ⊆ S^{k+l}E* ⊗ Q^f`. Cochains in bidegree `(l, m)` are
//! `Λ^m E* ⊗ g^(l)`; the differential lowers `l` and raises `m`. Below level
//! zero the chain ends on a *floor*: for a classical tableau the differential
//! out of `Λ^m ⊗ g` lands in `Λ^{m+1} ⊗ S^{k-1} ⊗ F`, for a generalized
//! tableau `∂: g → Hom(E, F)` it is `δ_∂` into `Λ^{m+1} ⊗ F`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ratlin::{kernel, rat, RatMatrix, Rational, Subspace};
use crate::tensorspace::{ExtIndex, MultiIndex, TensorSpaceDesc};

/// Matrix of `δ: Λ^j ⊗ S^k ⊗ F → Λ^{j+1} ⊗ S^{k-1} ⊗ F`,
/// `δ(ω ⊗ η) = (-1)^j ω ∧ δη = Σ_i (e_i* ∧ ω) ⊗ ∂_i η`.
pub fn delta_matrix(n: usize, j: usize, k: i64, f: usize) -> RatMatrix {
    let source = TensorSpaceDesc::new(n, j, k, f);
    let target = TensorSpaceDesc::new(n, j + 1, k - 1, f);
    let mut m = RatMatrix::zeros(target.dim(), source.dim());
    if target.dim() == 0 {
        return m;
    }
    for (col, (ext, alpha, fib)) in source.basis().into_iter().enumerate() {
        for i in 0..n {
            let Some(lower) = alpha.lowered(i) else {
                continue;
            };
            let Some((sign, wedged)) = ext.wedge_front(i) else {
                continue;
            };
            let row = target.index_unchecked(wedged.rank(n), lower.rank(), fib);
            m.set(row, col, rat(sign * alpha.exponents()[i] as i64));
        }
    }
    m
}

/// Matrix of `δ_∂: Λ^j E* ⊗ g → Λ^{j+1} E* ⊗ F`, `δ_∂(ω ⊗ v) = (-1)^j ω ∧ ∂(v)`.
///
/// `partial` has `n·f` rows indexed like `Hom(E, F) = E* ⊗ F` (row `a·n + i`
/// holds component `a` of `∂(v)(e_i)`) and one column per coordinate of `g`.
pub fn delta_partial_matrix(n: usize, partial: &RatMatrix, j: usize) -> Result<RatMatrix> {
    let f = hom_fiber_dim(n, partial.rows())?;
    let d = partial.cols();
    let source = TensorSpaceDesc::new(n, j, 0, d);
    let target = TensorSpaceDesc::new(n, j + 1, 0, f);
    let mut m = RatMatrix::zeros(target.dim(), source.dim());
    if target.dim() == 0 {
        return Ok(m);
    }
    for (col, (ext, _, b)) in source.basis().into_iter().enumerate() {
        for i in 0..n {
            let Some((sign, wedged)) = ext.wedge_front(i) else {
                continue;
            };
            let ext_rank = wedged.rank(n);
            for a in 0..f {
                let value = partial.get(a * n + i, b);
                if !value.is_zero() {
                    let row = target.index_unchecked(ext_rank, 0, a);
                    m.set(row, col, value * rat(sign));
                }
            }
        }
    }
    Ok(m)
}

fn hom_fiber_dim(n: usize, rows: usize) -> Result<usize> {
    if n == 0 {
        return Ok(0);
    }
    if rows % n != 0 {
        return Err(Error::DimensionMismatch {
            context: "rows of a map into Hom(E,F) must be a multiple of n",
            expected: n * (rows / n + 1),
            found: rows,
        });
    }
    Ok(rows / n)
}

/// `Λ^j E* ⊗ V` for a subspace `V ⊆ S^k E* ⊗ Q^f`, as a subspace of
/// `Λ^j ⊗ S^k ⊗ Q^f`.
pub fn wedge_tensor(n: usize, j: usize, k: i64, f: usize, v: &Subspace) -> Subspace {
    let sym = TensorSpaceDesc::symmetric(n, k, f);
    let desc = TensorSpaceDesc::new(n, j, k, f);
    assert_eq!(v.ambient_dim(), sym.dim(), "subspace not inside S^k ⊗ F");
    let mut vectors = Vec::with_capacity(desc.ext_dim() * v.dim());
    if desc.dim() == 0 {
        return Subspace::zero(0);
    }
    let sym_labels = sym.basis();
    for e in 0..desc.ext_dim() {
        for b in v.basis_vectors() {
            let mut out = vec![Rational::zero(); desc.dim()];
            for (idx, value) in b.into_iter().enumerate() {
                if !value.is_zero() {
                    let (_, alpha, fib) = &sym_labels[idx];
                    out[desc.index_unchecked(e, alpha.rank(), *fib)] = value;
                }
            }
            vectors.push(out);
        }
    }
    Subspace::span(desc.dim(), vectors)
}

/// Restriction of the ambient `δ` on `Λ^j ⊗ S^k ⊗ F` to `source`, written in
/// the canonical bases of `source` and `target`.
///
/// Fails when `δ(source) ⊄ target`, which means the chain the two subspaces
/// came from is inconsistent.
pub fn delta_hom_matrix(
    n: usize,
    f: usize,
    j: usize,
    k: i64,
    source: &Subspace,
    target: &Subspace,
) -> Result<RatMatrix> {
    let ambient = delta_matrix(n, j, k, f);
    restrict_map(&ambient, source, target)
}

/// Matrix of `m` restricted to `source` and corestricted to `target`.
pub fn restrict_map(m: &RatMatrix, source: &Subspace, target: &Subspace) -> Result<RatMatrix> {
    if m.cols() != source.ambient_dim() || m.rows() != target.ambient_dim() {
        return Err(Error::DimensionMismatch {
            context: "restricted map",
            expected: m.cols(),
            found: source.ambient_dim(),
        });
    }
    let images = m.mul(source.basis());
    let mut columns = Vec::with_capacity(source.dim());
    for v in images.columns() {
        let coords = target.coordinates(&v).ok_or(Error::NotContained {
            small: source.dim(),
            big: target.dim(),
        })?;
        columns.push(coords);
    }
    Ok(RatMatrix::from_columns(target.dim(), &columns))
}

/// What the differential out of level zero lands in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Floor {
    /// `Λ^{m+1} ⊗ S^{k-1} ⊗ F` (zero when `k = 0`).
    Classical,
    /// `δ_∂` into `Λ^{m+1} ⊗ Q^target_fiber`; the chain starts at degree 0.
    Partial { map: RatMatrix, target_fiber: usize },
}

/// Prolongation chain `g^(0) ⊆ S^k ⊗ F`, `g^(1) ⊆ S^{k+1} ⊗ F`, … with its floor.
#[derive(Clone, Debug)]
pub struct SpencerChain {
    n: usize,
    fiber: usize,
    base_degree: usize,
    levels: Vec<Subspace>,
    floor: Floor,
}

impl SpencerChain {
    pub fn classical(n: usize, fiber: usize, base_degree: usize, levels: Vec<Subspace>) -> Result<Self> {
        let chain = Self {
            n,
            fiber,
            base_degree,
            levels,
            floor: Floor::Classical,
        };
        chain.check_levels()?;
        Ok(chain)
    }

    /// Chain of a generalized tableau: `levels[0]` must be all of `Q^d`
    /// (the abstract symbol space) and `partial` maps it to `Hom(E, F)`.
    pub fn generalized(n: usize, partial: RatMatrix, levels: Vec<Subspace>) -> Result<Self> {
        let target_fiber = hom_fiber_dim(n, partial.rows())?;
        let chain = Self {
            n,
            fiber: partial.cols(),
            base_degree: 0,
            levels,
            floor: Floor::Partial {
                map: partial,
                target_fiber,
            },
        };
        chain.check_levels()?;
        Ok(chain)
    }

    fn check_levels(&self) -> Result<()> {
        for (l, g) in self.levels.iter().enumerate() {
            let expected = self.level_desc(l).dim();
            if g.ambient_dim() != expected {
                return Err(Error::DimensionMismatch {
                    context: "chain level ambient dimension",
                    expected,
                    found: g.ambient_dim(),
                });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fiber(&self) -> usize {
        self.fiber
    }

    pub fn base_degree(&self) -> usize {
        self.base_degree
    }

    pub fn floor(&self) -> &Floor {
        &self.floor
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, l: usize) -> &Subspace {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[Subspace] {
        &self.levels
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.levels.iter().map(Subspace::dim).collect()
    }

    /// Smallest `l` in the chain with `g^(l) = 0`.
    pub fn first_zero_level(&self) -> Option<usize> {
        self.levels.iter().position(Subspace::is_zero)
    }

    /// `S^{k+l} ⊗ F`
    pub fn level_desc(&self, l: usize) -> TensorSpaceDesc {
        TensorSpaceDesc::symmetric(self.n, (self.base_degree + l) as i64, self.fiber)
    }

    fn require(&self, needed: usize) -> Result<()> {
        if self.levels.len() < needed {
            return Err(Error::ChainTooShort {
                needed,
                available: self.levels.len(),
            });
        }
        Ok(())
    }

    /// `Λ^m ⊗ g^(l)` inside `Λ^m ⊗ S^{k+l} ⊗ F`.
    pub fn cochains(&self, l: usize, m: usize) -> Result<Subspace> {
        self.require(l + 1)?;
        Ok(wedge_tensor(
            self.n,
            m,
            (self.base_degree + l) as i64,
            self.fiber,
            &self.levels[l],
        ))
    }

    /// Ambient matrix of the differential leaving `Λ^m ⊗ S^{k+l} ⊗ F`.
    pub fn differential(&self, l: usize, m: usize) -> Result<RatMatrix> {
        match (&self.floor, l) {
            (Floor::Partial { map, .. }, 0) => delta_partial_matrix(self.n, map, m),
            _ => Ok(delta_matrix(
                self.n,
                m,
                (self.base_degree + l) as i64,
                self.fiber,
            )),
        }
    }

    /// `Z^{l,m}`: kernel of the differential on `Λ^m ⊗ g^(l)`.
    pub fn cocycles(&self, l: usize, m: usize) -> Result<Subspace> {
        let cochains = self.cochains(l, m)?;
        let d = self.differential(l, m)?;
        let basis = cochains.basis();
        let null = kernel(&d.mul(basis));
        Ok(cochains.image_under_basis(&null))
    }

    /// `B^{l,m}`: image of `Λ^{m-1} ⊗ g^(l+1)`. Needs level `l+1`.
    pub fn coboundaries(&self, l: usize, m: usize) -> Result<Subspace> {
        self.require(l + 2)?;
        let ambient = TensorSpaceDesc::new(self.n, m, (self.base_degree + l) as i64, self.fiber).dim();
        if m == 0 {
            return Ok(Subspace::zero(ambient));
        }
        let source = self.cochains(l + 1, m - 1)?;
        let d = self.differential(l + 1, m - 1)?;
        Ok(source.image_under(&d))
    }

    /// Checks that the differential maps `Λ^m ⊗ g^(l)` into `Λ^{m+1} ⊗ g^(l-1)`
    /// and that two consecutive differentials compose to zero on the chain.
    pub fn check_complex(&self, l: usize, m: usize) -> Result<()> {
        let source = self.cochains(l, m)?;
        let d = self.differential(l, m)?;
        if l >= 1 {
            let target = self.cochains(l - 1, m + 1)?;
            if !target.contains_subspace(&source.image_under(&d)) {
                return Err(Error::invariant(format!(
                    "δ does not map Λ^{m}⊗g^({l}) into Λ^{}⊗g^({})",
                    m + 1,
                    l - 1
                )));
            }
            let d2 = self.differential(l - 1, m + 1)?;
            if !d2.mul(&d).mul(source.basis()).is_zero() {
                return Err(Error::invariant(format!(
                    "δ∘δ ≠ 0 on Λ^{m}⊗g^({l})"
                )));
            }
        }
        Ok(())
    }

    /// Dimensions of `Z^{l,m}`, `B^{l,m}` and `H^{l,m}`, after verifying
    /// `B ⊆ Z`.
    pub fn entry(&self, l: usize, m: usize, with_representatives: bool) -> Result<CohomologyEntry> {
        let z = self.cocycles(l, m)?;
        let b = self.coboundaries(l, m)?;
        if !z.contains_subspace(&b) {
            return Err(Error::invariant(format!(
                "coboundaries not contained in cocycles at (l={l}, m={m})"
            )));
        }
        let representatives = if with_representatives && z.dim() > b.dim() {
            z.complement_basis(&b)
        } else {
            Vec::new()
        };
        Ok(CohomologyEntry {
            l,
            m,
            cocycle_dim: z.dim(),
            coboundary_dim: b.dim(),
            dim: z.dim() - b.dim(),
            representatives,
        })
    }
}

impl Subspace {
    /// Subspace spanned by `basis * coords` for each column of `coords`' basis.
    fn image_under_basis(&self, coords: &Subspace) -> Subspace {
        coords.image_under(self.basis())
    }
}

/// One cohomology group `H^{l,m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyEntry {
    pub l: usize,
    pub m: usize,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub dim: usize,
    /// Cocycles spanning a complement of the coboundaries (only filled on
    /// request), as vectors of `Λ^m ⊗ S^{k+l} ⊗ F`.
    pub representatives: Vec<Vec<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcyclicityStatus {
    /// Some prolongation vanishes inside the computed range, so every later
    /// row is zero as well.
    Unconditional,
    /// All groups with `l ≤ l_max` vanish; nothing is claimed beyond.
    CertifiedUpTo(usize),
    NonzeroAt { l: usize, m: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AcyclicityVerdict {
    pub r: usize,
    pub status: AcyclicityStatus,
}

impl AcyclicityVerdict {
    pub fn holds(&self) -> bool {
        !matches!(self.status, AcyclicityStatus::NonzeroAt { .. })
    }

    pub fn is_unconditional(&self) -> bool {
        matches!(self.status, AcyclicityStatus::Unconditional)
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub l_max: usize,
    pub m_max: usize,
    pub entries: BTreeMap<(usize, usize), CohomologyEntry>,
    /// First vanishing prolongation within the chain, if any.
    pub finite_type: Option<usize>,
    pub acyclicity: Vec<AcyclicityVerdict>,
}

impl CohomologyReport {
    pub fn dim(&self, l: usize, m: usize) -> Option<usize> {
        self.entries.get(&(l, m)).map(|e| e.dim)
    }

    pub fn entry(&self, l: usize, m: usize) -> Option<&CohomologyEntry> {
        self.entries.get(&(l, m))
    }

    /// `(l, m, dim)` triples in `(l, m)` order.
    pub fn table(&self) -> Vec<(usize, usize, usize)> {
        self.entries.values().map(|e| (e.l, e.m, e.dim)).collect()
    }
}

/// Spencer cohomology `H^{l,m}` for `0 ≤ l ≤ l_max`, `1 ≤ m ≤ m_max`.
///
/// The chain must reach level `l_max + 1`. Fails with an invariant violation
/// if some `H^{l,1}` is nonzero or `B ⊄ Z`.
pub fn cohomology(
    chain: &SpencerChain,
    l_max: usize,
    m_max: usize,
    with_representatives: bool,
) -> Result<CohomologyReport> {
    chain.require(l_max + 2)?;
    let mut entries = BTreeMap::new();
    for l in 0..=l_max {
        for m in 1..=m_max {
            let entry = chain.entry(l, m, with_representatives)?;
            if m == 1 && entry.dim != 0 {
                return Err(Error::invariant(format!(
                    "H^({l},1) has dimension {} but must vanish",
                    entry.dim
                )));
            }
            entries.insert((l, m), entry);
        }
    }
    let finite_type = chain.first_zero_level();
    let mut report = CohomologyReport {
        l_max,
        m_max,
        entries,
        finite_type,
        acyclicity: Vec::new(),
    };
    report.acyclicity = (1..=m_max)
        .map(|r| acyclicity_of(&report, r))
        .collect();
    Ok(report)
}

fn acyclicity_of(report: &CohomologyReport, r: usize) -> AcyclicityVerdict {
    for l in 0..=report.l_max {
        for m in 1..=r {
            if report.dim(l, m).unwrap_or(0) != 0 {
                return AcyclicityVerdict {
                    r,
                    status: AcyclicityStatus::NonzeroAt { l, m },
                };
            }
        }
    }
    let status = match report.finite_type {
        Some(l0) if l0 <= report.l_max + 1 => AcyclicityStatus::Unconditional,
        _ => AcyclicityStatus::CertifiedUpTo(report.l_max),
    };
    AcyclicityVerdict { r, status }
}

/// Whether the tableau behind `report` is `r`-acyclic.
pub fn is_r_acyclic(report: &CohomologyReport, r: usize) -> Result<AcyclicityVerdict> {
    if r == 0 || r > report.m_max {
        return Err(Error::InvalidArgument(format!(
            "report covers 1 ≤ m ≤ {}, cannot decide {r}-acyclicity",
            report.m_max
        )));
    }
    Ok(acyclicity_of(report, r))
}

/// Both sides of the Euler-characteristic identity along the anti-diagonal
/// `l + m = i`: `Σ_j (-1)^j dim(Λ^j ⊗ g^(i-j))` and
/// `Σ_j (-1)^j dim H^{i-j,j} + (-1)^J rank(δ out of Λ^J ⊗ g^(i-J))` where
/// `J = min(i, n)` is the last term of the truncated complex.
pub fn euler_characteristic(chain: &SpencerChain, i: usize) -> Result<(i64, i64)> {
    chain.require(i + 2)?;
    let top = i.min(chain.n());
    let mut lhs = 0i64;
    let mut rhs = 0i64;
    for j in 0..=top {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let l = i - j;
        lhs += sign * chain.cochains(l, j)?.dim() as i64;
        rhs += sign * chain.entry(l, j, false)?.dim as i64;
    }
    let l = i - top;
    let last = chain.cochains(l, top)?;
    let rank = last.image_under(&chain.differential(l, top)?).dim() as i64;
    rhs += if top % 2 == 0 { rank } else { -rank };
    Ok((lhs, rhs))
}

/// Exterior index helper re-exported for callers that build cochains by hand.
pub fn wedge_label(n: usize, dirs: &[usize]) -> Result<(usize, ExtIndex)> {
    let e = ExtIndex::new(dirs.to_vec())?;
    if dirs.iter().any(|&d| d >= n) {
        return Err(Error::IndexOutOfRange(format!("{dirs:?} for n={n}")));
    }
    Ok((e.rank(n), e))
}

/// Basis vector `dx_I ⊗ x^α ⊗ e_a` of `Λ^j ⊗ S^k ⊗ F`.
pub fn basis_tensor(desc: &TensorSpaceDesc, ext: &ExtIndex, sym: &MultiIndex, fib: usize) -> Result<Vec<Rational>> {
    let mut v = vec![Rational::zero(); desc.dim()];
    v[desc.index_of(ext, sym, fib)?] = rat(1);
    Ok(v)
}
