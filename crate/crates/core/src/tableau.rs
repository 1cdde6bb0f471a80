//! Tableaux, their prolongations and type classification.
//!
//! A classical tableau is a subspace `g ⊆ S^k E* ⊗ F` (for `k = 1` this is
//! `Hom(E, F)`, with `Hom(E,F)` coordinates `a·n + i` for the entry
//! `(row a, column i)`). A generalized tableau is an abstract space `Q^d`
//! with a linear map `∂: Q^d → Hom(E, F)`; only its first prolongation uses
//! `∂`, later ones are classical prolongations on `(E, Q^d)`.

use crate::error::{Error, Result};
use crate::ratlin::{kernel, RatMatrix, Subspace};
use crate::spencer::{cohomology, delta_partial_matrix, wedge_tensor, SpencerChain};
use crate::tensorspace::{binomial, contraction_matrix, derivative_matrix, sym_dim, TensorSpaceDesc};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    f: usize,
    degree: usize,
    space: Subspace,
    generalized_map: Option<RatMatrix>,
}

impl Tableau {
    /// `g ⊆ Hom(E, F)`, ambient dimension `n·f`.
    pub fn classical(n: usize, f: usize, space: Subspace) -> Result<Self> {
        Self::symmetric(n, f, 1, space)
    }

    /// `g ⊆ S^k E* ⊗ F` for `k ≥ 1`.
    pub fn symmetric(n: usize, f: usize, degree: usize, space: Subspace) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument(
                "a classical tableau lives in degree at least 1".into(),
            ));
        }
        let expected = sym_dim(n, degree as i64) * f;
        if space.ambient_dim() != expected {
            return Err(Error::DimensionMismatch {
                context: "tableau ambient dimension",
                expected,
                found: space.ambient_dim(),
            });
        }
        Ok(Self {
            n,
            f,
            degree,
            space,
            generalized_map: None,
        })
    }

    /// Generalized tableau `∂: Q^d → Hom(E, F)` given as an `(n·f) × d` matrix.
    pub fn generalized(n: usize, f: usize, partial: RatMatrix) -> Result<Self> {
        if partial.rows() != n * f {
            return Err(Error::DimensionMismatch {
                context: "generalized tableau map rows",
                expected: n * f,
                found: partial.rows(),
            });
        }
        Ok(Self {
            n,
            f,
            degree: 0,
            space: Subspace::full(partial.cols()),
            generalized_map: Some(partial),
        })
    }

    /// The whole of `Hom(E, F)`.
    pub fn full(n: usize, f: usize) -> Self {
        Self::classical(n, f, Subspace::full(n * f)).expect("full tableau")
    }

    pub fn zero(n: usize, f: usize) -> Self {
        Self::classical(n, f, Subspace::zero(n * f)).expect("zero tableau")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> usize {
        self.f
    }

    /// Symmetric degree of `g` (0 for a generalized tableau).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn generalized_map(&self) -> Option<&RatMatrix> {
        self.generalized_map.as_ref()
    }

    pub fn is_generalized(&self) -> bool {
        self.generalized_map.is_some()
    }

    /// Fiber of the symmetric spaces the prolongations live in: `f` for a
    /// classical tableau, `d = dim g` for a generalized one.
    fn chain_fiber(&self) -> usize {
        match &self.generalized_map {
            Some(m) => m.cols(),
            None => self.f,
        }
    }
}

/// `{η ∈ S^{k+1} ⊗ F : ∂_i η ∈ V for all i}` for `V ⊆ S^k ⊗ F`, after
/// checking that it is exactly `Hom(E, V) ∩ S^{k+1} ⊗ F`.
pub fn prolong_subspace(n: usize, f: usize, k: usize, v: &Subspace) -> Result<Subspace> {
    let target = TensorSpaceDesc::symmetric(n, k as i64 + 1, f);
    if v.is_zero() {
        return Ok(Subspace::zero(target.dim()));
    }
    let ann = v.annihilator();
    let mut stacked = RatMatrix::zeros(0, target.dim());
    for i in 0..n {
        stacked = stacked.vstack(&ann.mul(&derivative_matrix(n, k as i64 + 1, f, i)));
    }
    let result = kernel(&stacked);
    verify_double_containment(n, f, k, v, &result)?;
    Ok(result)
}

/// `δ(result) ⊆ E* ⊗ V`, and `Hom(E, V) ∩ δ(S^{k+1} ⊗ F)` has the same
/// dimension as `result`.
fn verify_double_containment(n: usize, f: usize, k: usize, v: &Subspace, result: &Subspace) -> Result<()> {
    let contraction = contraction_matrix(&TensorSpaceDesc::symmetric(n, k as i64 + 1, f))?;
    let hom = wedge_tensor(n, 1, k as i64, f, v);
    let image = result.image_under(&contraction);
    if !hom.contains_subspace(&image) {
        return Err(Error::invariant(format!(
            "prolongation in degree {} leaves Hom(E, g)",
            k + 1
        )));
    }
    let all_symmetric = Subspace::full(contraction.cols()).image_under(&contraction);
    let both = hom.intersect(&all_symmetric)?;
    if both.dim() != result.dim() {
        return Err(Error::invariant(format!(
            "prolongation in degree {}: dim {} but Hom(E,g) ∩ S^{}E*⊗F has dim {}",
            k + 1,
            result.dim(),
            k + 1,
            both.dim()
        )));
    }
    Ok(())
}

/// First prolongation `g^(1)`.
///
/// Classical: inside `S^{k+1} E* ⊗ F`. Generalized: inside
/// `Hom(E, Q^d)` (coordinates `b·n + i`), the kernel of
/// `η ↦ ∂(η(X))(Y) − ∂(η(Y))(X)`.
pub fn prolong(t: &Tableau) -> Result<Subspace> {
    match &t.generalized_map {
        Some(partial) => Ok(kernel(&delta_partial_matrix(t.n, partial, 1)?)),
        None => prolong_subspace(t.n, t.f, t.degree, &t.space),
    }
}

/// Prolongations `g^(0) = g, g^(1), …, g^(depth)`.
#[derive(Clone, Debug)]
pub struct TableauTower {
    base: Tableau,
    chain: SpencerChain,
}

impl TableauTower {
    pub fn base(&self) -> &Tableau {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.chain.len() - 1
    }

    /// `g^(i)`, with `g^(0)` the tableau itself (all of `Q^d` when generalized).
    pub fn level(&self, i: usize) -> &Subspace {
        self.chain.level(i)
    }

    /// Ambient space of level `i`.
    pub fn level_desc(&self, i: usize) -> TensorSpaceDesc {
        self.chain.level_desc(i)
    }

    /// `dim g^(1), …, dim g^(depth)`.
    pub fn ranks(&self) -> Vec<usize> {
        self.chain.ranks()[1..].to_vec()
    }

    pub fn chain(&self) -> &SpencerChain {
        &self.chain
    }

    pub fn into_chain(self) -> SpencerChain {
        self.chain
    }
}

/// Prolongs `t` `depth` times.
pub fn tower(t: &Tableau, depth: usize) -> Result<TableauTower> {
    let fiber = t.chain_fiber();
    let mut levels = vec![t.space.clone()];
    if depth >= 1 {
        levels.push(prolong(t)?);
    }
    // degree of the symmetric space holding levels[i]
    let base_degree = t.degree;
    for i in 2..=depth {
        let prev = &levels[i - 1];
        let next = prolong_subspace(t.n, fiber, base_degree + i - 1, prev)?;
        if prev.is_zero() && !next.is_zero() {
            return Err(Error::invariant(format!(
                "prolongation {i} is nonzero after a vanishing level"
            )));
        }
        levels.push(next);
    }
    let chain = match &t.generalized_map {
        Some(partial) => SpencerChain::generalized(t.n, partial.clone(), levels)?,
        None => SpencerChain::classical(t.n, t.f, t.degree, levels)?,
    };
    Ok(TableauTower {
        base: t.clone(),
        chain,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeVerdict {
    /// `l` is the smallest index with `g^(l) = 0`.
    FiniteType(usize),
    /// `g^(l) ≠ 0` for every `l ≤ l_max`.
    InfiniteTypeUpTo(usize),
}

pub fn classify_type(t: &Tableau, l_max: usize) -> Result<TypeVerdict> {
    let tw = tower(t, l_max)?;
    Ok(match tw.chain().first_zero_level() {
        Some(l) => TypeVerdict::FiniteType(l),
        None => TypeVerdict::InfiniteTypeUpTo(l_max),
    })
}

/// Observed stabilization of the Spencer cohomology rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationScan {
    pub l_max: usize,
    /// For `m = 1, …`: smallest `l ≤ l_max` with `H^{l',m} = 0` for every
    /// `l ≤ l' ≤ l_max`, or `None` if `H^{l_max,m} ≠ 0`.
    pub stable_from: Vec<Option<usize>>,
    /// True only when some prolongation vanishes within the scanned range,
    /// so the pattern persists for all larger `l`.
    pub certified: bool,
}

impl StabilizationScan {
    /// First `l` from which every row is zero, if every row stabilizes.
    pub fn stabilized_at(&self) -> Option<usize> {
        self.stable_from
            .iter()
            .try_fold(0usize, |acc, s| s.map(|l| acc.max(l)))
    }
}

pub fn stabilization_scan(t: &Tableau, l_max: usize) -> Result<StabilizationScan> {
    let m_max = t.n.max(1);
    let tw = tower(t, l_max + 1)?;
    let report = cohomology(tw.chain(), l_max, m_max, false)?;
    let stable_from = (1..=m_max)
        .map(|m| {
            let mut from = None;
            for l in (0..=l_max).rev() {
                if report.dim(l, m) == Some(0) {
                    from = Some(l);
                } else {
                    break;
                }
            }
            from
        })
        .collect();
    let certified = matches!(report.finite_type, Some(l0) if l0 <= l_max + 1);
    Ok(StabilizationScan {
        l_max,
        stable_from,
        certified,
    })
}

/// Lower bound `n·dim g − dim(Λ²E* ⊗ S^{k-1}E* ⊗ F)` on `dim g^(1)` from
/// rank-nullity on the map cutting out the prolongation.
pub fn first_prolongation_lower_bound(t: &Tableau) -> i64 {
    let target = match &t.generalized_map {
        Some(_) => binomial(t.n, 2) * t.f,
        None => binomial(t.n, 2) * sym_dim(t.n, t.degree as i64 - 1) * t.f,
    };
    (t.n * t.dim()) as i64 - target as i64
}
