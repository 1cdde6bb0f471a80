//! Linear constant-coefficient PDE systems on trivial bundles `R^n × R^m`.
//!
//! Jet coordinates `u^a_α` (`|α| ≤ k`) are laid out degree by degree, so the
//! coordinates of order `≤ k−1` form a prefix and truncation is a coordinate
//! projection. Within degree `d` the coordinate `(a, α)` sits at
//! `offset(d) + a·C(n+d−1, d) + rank(α)`.
//!
//! Jet coordinates are derivatives, tableau coordinates are polynomial
//! coefficients: a top-order jet `u_α` corresponds to the coefficient
//! `u_α / α!` of `x^α`.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ratlin::{image, kernel, RatMatrix, Rational, Subspace};
use crate::relconn::{classical_prolongation_fiber, torsion_at, RelConn, TorsionOutcome};
use crate::spencer::{cohomology, AcyclicityStatus, CohomologyReport};
use crate::tableau::{classify_type, tower, Tableau, TypeVerdict};
use crate::tensorspace::{binomial, sym_dim, MultiIndex, TensorSpaceDesc};

/// Fiber of `J^k(R^n, R^m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetSpace {
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

/// One jet coordinate `u^{component+1}_α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetCoordinate {
    pub component: usize,
    pub multi_index: MultiIndex,
}

impl fmt::Display for JetCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = self.multi_index.derivative_suffix();
        if suffix.is_empty() {
            write!(f, "u{}", self.component + 1)
        } else {
            write!(f, "u{}_{}", self.component + 1, suffix)
        }
    }
}

impl JetSpace {
    pub fn new(n: usize, m: usize, k: usize) -> Self {
        Self { n, m, k }
    }

    /// Number of coordinates of order `< d`.
    pub fn offset(&self, d: usize) -> usize {
        (0..d).map(|e| self.m * sym_dim(self.n, e as i64)).sum()
    }

    pub fn dim(&self) -> usize {
        self.offset(self.k + 1)
    }

    /// Coordinates of order exactly `d`.
    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        self.offset(d)..self.offset(d + 1)
    }

    pub fn index(&self, component: usize, alpha: &MultiIndex) -> Result<usize> {
        if component >= self.m || alpha.n() != self.n || alpha.degree() > self.k {
            return Err(Error::IndexOutOfRange(format!(
                "u{}_{:?} in J^{}(R^{}, R^{})",
                component + 1,
                alpha,
                self.k,
                self.n,
                self.m
            )));
        }
        let d = alpha.degree();
        Ok(self.offset(d) + component * sym_dim(self.n, d as i64) + alpha.rank())
    }

    pub fn coordinate(&self, index: usize) -> Result<JetCoordinate> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange(format!(
                "jet index {index} of {}",
                self.dim()
            )));
        }
        let mut d = 0;
        while self.offset(d + 1) <= index {
            d += 1;
        }
        let within = index - self.offset(d);
        let block = sym_dim(self.n, d as i64);
        Ok(JetCoordinate {
            component: within / block,
            multi_index: MultiIndex::unrank(self.n, d, within % block),
        })
    }

    pub fn coordinates(&self) -> Vec<JetCoordinate> {
        (0..self.dim())
            .map(|i| self.coordinate(i).expect("index in range"))
            .collect()
    }
}

/// Homogeneous linear system `equations · u = 0` on `J^k(R^n, R^m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PdeSystem {
    n: usize,
    m: usize,
    k: usize,
    equations: RatMatrix,
}

impl PdeSystem {
    pub fn new(n: usize, m: usize, k: usize, equations: RatMatrix) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("system order must be at least 1".into()));
        }
        let jets = JetSpace::new(n, m, k);
        if equations.cols() != jets.dim() {
            return Err(Error::DimensionMismatch {
                context: "equation columns must match the jet fiber",
                expected: jets.dim(),
                found: equations.cols(),
            });
        }
        Ok(Self { n, m, k, equations })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn jet_space(&self) -> JetSpace {
        JetSpace::new(self.n, self.m, self.k)
    }

    pub fn equations(&self) -> &RatMatrix {
        &self.equations
    }

    /// Same solution fiber, equations replaced by the nonzero rows of their
    /// reduced row echelon form.
    pub fn reduced(&self) -> Self {
        let (r, pivots) = crate::ratlin::rref(&self.equations);
        let rows: Vec<usize> = (0..pivots.len()).collect();
        Self {
            equations: r.select_rows(&rows),
            ..self.clone()
        }
    }
}

/// `F = ker(equations)` inside the `J^k` fiber.
pub fn solution_fiber(s: &PdeSystem) -> Subspace {
    kernel(&s.equations)
}

/// `1/α!` scaling taking top-order jets to monomial coefficients.
fn jet_to_monomial_scale(n: usize, m: usize, d: usize) -> Vec<Rational> {
    let block = sym_dim(n, d as i64);
    (0..m * block)
        .map(|i| {
            let alpha = MultiIndex::unrank(n, d, i % block);
            Rational::new(1.into(), alpha.factorial())
        })
        .collect()
}

/// Top-order slice of the solution fiber, in jet coordinates of degree `k`.
fn top_slice(s: &PdeSystem) -> Subspace {
    let range = s.jet_space().degree_range(s.k);
    let cols: Vec<usize> = range.collect();
    kernel(&s.equations.select_columns(&cols))
}

/// Symbol `g ⊆ S^k R^n* ⊗ R^m`: solutions with only top-order components,
/// as polynomial coefficients.
pub fn symbol_tableau(s: &PdeSystem) -> Tableau {
    let scale = jet_to_monomial_scale(s.n, s.m, s.k);
    let g = top_slice(s);
    let vectors = g
        .basis_vectors()
        .into_iter()
        .map(|v| v.iter().zip(&scale).map(|(x, c)| x * c).collect())
        .collect();
    let space = Subspace::span(scale.len(), vectors);
    Tableau::symmetric(s.n, s.m, s.k, space).expect("ambient matches S^k ⊗ R^m")
}

/// `P^(1) = J^1 P ∩ J^{k+1}`: the equations together with all their first
/// total derivatives.
pub fn formal_prolongation(s: &PdeSystem) -> PdeSystem {
    let source = s.jet_space();
    let target = JetSpace::new(s.n, s.m, s.k + 1);
    let coords = source.coordinates();
    let rows = s.equations.rows();
    let mut out = RatMatrix::zeros(rows * (s.n + 1), target.dim());
    for r in 0..rows {
        for (col, value) in s.equations.row(r).iter().enumerate() {
            if value.is_zero() {
                continue;
            }
            out.set(r, col, value.clone());
            let c = &coords[col];
            for i in 0..s.n {
                let shifted = target
                    .index(c.component, &c.multi_index.raised(i))
                    .expect("raised index has order ≤ k+1");
                out.set(rows * (i + 1) + r, shifted, value.clone());
            }
        }
    }
    PdeSystem::new(s.n, s.m, s.k + 1, out).expect("shape")
}

/// Truncation `J^k → J^{k-1}` restricted to `F`, in jet coordinates.
fn truncation_image(upper: &Subspace, lower_dim: usize) -> Subspace {
    let rows: Vec<usize> = (0..lower_dim).collect();
    image(&upper.basis().select_rows(&rows))
}

/// One level of the prolongation tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRecord {
    pub level: usize,
    pub fiber_dim: usize,
    pub symbol_dim: usize,
    /// Dimension of the image of `F^(i) → F^(i−1)`; `None` at level 0.
    pub projection_image_dim: Option<usize>,
    pub surjective: Option<bool>,
    pub torsion_vanishes: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificationBasis {
    /// The symbol vanishes from level `l` on and the tower is surjective
    /// past `l`.
    FiniteType(usize),
    /// Spencer 2-acyclicity checked for `l ≤ l_max`.
    Goldschmidt(usize),
    /// Every computed level was surjective; nothing is claimed beyond.
    ExhaustedBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerVerdict {
    FormallyIntegrable,
    IntegrableUpTo(usize),
    /// `F^(level) → F^(level−1)` misses `witness` (a jet of order
    /// `k + level − 1`).
    ObstructedAt { level: usize, witness: Vec<Rational> },
}

#[derive(Clone, Debug)]
pub struct IntegrabilityReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub levels: Vec<LevelRecord>,
    pub verdict: TowerVerdict,
    pub basis: CertificationBasis,
    /// `F^(0), …, F^(N)` in jet coordinates.
    pub fibers: Vec<Subspace>,
    /// Row-reduced systems `P^(0), …, P^(N)`.
    pub systems: Vec<PdeSystem>,
}

impl IntegrabilityReport {
    pub fn fiber_dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.fiber_dim).collect()
    }

    pub fn symbol_dims(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.symbol_dim).collect()
    }

    /// Surjectivity flags for levels `1..=N`.
    pub fn surjective(&self) -> Vec<bool> {
        self.levels.iter().filter_map(|l| l.surjective).collect()
    }
}

/// First canonical basis vector of `big` not contained in `small`.
fn first_outside(big: &Subspace, small: &Subspace) -> Option<Vec<Rational>> {
    big.basis_vectors().into_iter().find(|v| !small.contains(v))
}

/// Prolongs `N` times, recording fiber and symbol dimensions and the
/// surjectivity of each projection `F^(i) → F^(i−1)`.
pub fn prolongation_tower(s: &PdeSystem, levels: usize) -> Result<IntegrabilityReport> {
    if levels == 0 {
        return Err(Error::InvalidArgument("the tower needs at least one level".into()));
    }
    let tableau_tower = tower(&symbol_tableau(s), levels)?;
    let tableau_ranks: Vec<usize> = tableau_tower.chain().ranks();
    let mut systems = vec![s.reduced()];
    let mut fibers = vec![solution_fiber(s)];
    let mut records = vec![LevelRecord {
        level: 0,
        fiber_dim: fibers[0].dim(),
        symbol_dim: top_slice(s).dim(),
        projection_image_dim: None,
        surjective: None,
        torsion_vanishes: None,
    }];
    let mut obstruction = None;
    for i in 1..=levels {
        let next = formal_prolongation(&systems[i - 1]).reduced();
        let fiber = solution_fiber(&next);
        let lower = &fibers[i - 1];
        let projected = truncation_image(&fiber, lower.ambient_dim());
        if !lower.contains_subspace(&projected) {
            return Err(Error::invariant(format!(
                "level {i} projects outside the previous fiber"
            )));
        }
        let symbol_dim = top_slice(&next).dim();
        if fiber.dim() != symbol_dim + projected.dim() {
            return Err(Error::invariant(format!(
                "level {i}: dim F = {} but symbol {} + image {}",
                fiber.dim(),
                symbol_dim,
                projected.dim()
            )));
        }
        if symbol_dim != tableau_ranks[i] {
            return Err(Error::invariant(format!(
                "level {i}: symbol of the prolonged system has dim {symbol_dim}, tableau prolongation {}",
                tableau_ranks[i]
            )));
        }
        let surjective = projected.dim() == lower.dim();
        if !surjective && obstruction.is_none() {
            let witness = first_outside(lower, &projected).expect("image is a proper subspace");
            obstruction = Some((i, witness));
        }
        records.push(LevelRecord {
            level: i,
            fiber_dim: fiber.dim(),
            symbol_dim,
            projection_image_dim: Some(projected.dim()),
            surjective: Some(surjective),
            torsion_vanishes: Some(surjective),
        });
        systems.push(next);
        fibers.push(fiber);
    }
    let (verdict, basis) = match obstruction {
        Some((level, witness)) => (
            TowerVerdict::ObstructedAt { level, witness },
            CertificationBasis::ExhaustedBound,
        ),
        None => match tableau_tower.chain().first_zero_level() {
            Some(l) if levels > l => (TowerVerdict::FormallyIntegrable, CertificationBasis::FiniteType(l)),
            _ => (TowerVerdict::IntegrableUpTo(levels), CertificationBasis::ExhaustedBound),
        },
    };
    Ok(IntegrabilityReport {
        n: s.n,
        m: s.m,
        k: s.k,
        levels: records,
        verdict,
        basis,
        fibers,
        systems,
    })
}

/// `(D, σ)` on `E′ = F` with `E = J^{k−1}`: `σ` truncates and
/// `(A_i ξ)_α = −ξ_{α+e_i}` for `|α| ≤ k−1`, so that `D_{∂_i}` is the
/// classical Spencer operator restricted to `F`. `E′` carries the
/// coordinates of the canonical basis of `F`.
pub fn pde_to_relconn(s: &PdeSystem) -> Result<RelConn> {
    let upper = s.jet_space();
    let lower = JetSpace::new(s.n, s.m, s.k - 1);
    let fiber = solution_fiber(s);
    let basis = fiber.basis();
    let truncation_rows: Vec<usize> = (0..lower.dim()).collect();
    let sigma = basis.select_rows(&truncation_rows);
    let mut a = Vec::with_capacity(s.n);
    for i in 0..s.n {
        let mut shift = RatMatrix::zeros(lower.dim(), upper.dim());
        for (row, c) in lower.coordinates().into_iter().enumerate() {
            let col = upper.index(c.component, &c.multi_index.raised(i))?;
            shift.set(row, col, Rational::from_integer((-1).into()));
        }
        a.push(shift.mul(basis));
    }
    RelConn::new(sigma, a)
}

/// The two prolongation pipelines compared at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheckLevel {
    pub level: usize,
    /// `dim Prol(F^(level−1), D)`.
    pub prol_dim: usize,
    /// `dim F^(level)`.
    pub fiber_dim: usize,
    pub prol_image_dim: usize,
    pub tower_image_dim: usize,
    /// Projection images coincide as subspaces of the `J^{k+level−1}` fiber.
    pub images_agree: bool,
}

impl CrossCheckLevel {
    pub fn agrees(&self) -> bool {
        self.prol_dim == self.fiber_dim && self.prol_image_dim == self.tower_image_dim && self.images_agree
    }
}

/// Compares `Prol` of the relative connection of `P^(i−1)` with the formal
/// prolongation `P^(i)` for `i = 1..=levels`.
pub fn crosscheck(s: &PdeSystem, levels: usize) -> Result<Vec<CrossCheckLevel>> {
    let report = prolongation_tower(s, levels)?;
    let mut out = Vec::with_capacity(levels);
    for i in 1..=levels {
        let base = &report.systems[i - 1];
        let lower = &report.fibers[i - 1];
        let conn = pde_to_relconn(base)?;
        let prol = classical_prolongation_fiber(&conn)?;
        // Prol projects into F^(i−1) coordinates; push to jet coordinates
        let prol_image = prol.projection_image().image_under(lower.basis());
        let tower_image = truncation_image(&report.fibers[i], lower.ambient_dim());
        out.push(CrossCheckLevel {
            level: i,
            prol_dim: prol.dim(),
            fiber_dim: report.fibers[i].dim(),
            prol_image_dim: prol_image.dim(),
            tower_image_dim: tower_image.dim(),
            images_agree: prol_image == tower_image,
        });
    }
    Ok(out)
}

/// Torsion of `P^(level−1)` at a point `e` of its fiber that does not lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionDiagnostic {
    pub level: usize,
    pub outcome: TorsionOutcome,
    /// For `level ≥ 2`: the representative as an element of
    /// `Λ²R^n* ⊗ S^{k+level−2}R^n* ⊗ R^m` (polynomial coefficients), and
    /// the cohomology group `H^{level−2, 2}` it was checked against.
    pub cohomology_home: Option<CohomologyHome>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyHome {
    pub l: usize,
    pub representative: Vec<Rational>,
    /// The representative lies in `Λ² ⊗ g^(l)`.
    pub in_cochains: bool,
    pub is_cocycle: bool,
    pub nonzero_in_cohomology: bool,
}

impl CohomologyHome {
    pub fn verified(&self) -> bool {
        self.in_cochains && self.is_cocycle && self.nonzero_in_cohomology
    }
}

/// Evaluates the torsion of `P^(level−1)` at `point` (jet coordinates of
/// order `k+level−1`, inside `F^(level−1)`) and, from level 2 on, locates
/// the representative in `H^{level−2, 2}` of the symbol.
pub fn torsion_diagnostic(
    report: &IntegrabilityReport,
    s: &PdeSystem,
    level: usize,
    point: &[Rational],
) -> Result<TorsionDiagnostic> {
    if level == 0 || level >= report.fibers.len() {
        return Err(Error::IndexOutOfRange(format!("tower level {level}")));
    }
    let base = &report.systems[level - 1];
    let lower = &report.fibers[level - 1];
    let coords = lower.coordinates(point).ok_or_else(|| {
        Error::InvalidArgument("point is not in the fiber of the previous level".into())
    })?;
    let conn = pde_to_relconn(base)?;
    let outcome = torsion_at(&conn, &coords)?;
    let cohomology_home = match (&outcome, level) {
        (TorsionOutcome::Obstructed { raw, .. }, l2) if l2 >= 2 => {
            Some(locate_in_cohomology(s, base, l2 - 2, raw)?)
        }
        _ => None,
    };
    Ok(TorsionDiagnostic {
        level,
        outcome,
        cohomology_home,
    })
}

fn locate_in_cohomology(s: &PdeSystem, base: &PdeSystem, l: usize, raw: &[Rational]) -> Result<CohomologyHome> {
    let n = s.n;
    let m = s.m;
    let top = s.k + l;
    // raw is indexed r·C(n,2) + pair over jet coordinates r of order ≤ k+l
    let jets = JetSpace::new(n, m, top);
    debug_assert_eq!(base.k, top + 1);
    let pairs = binomial(n, 2);
    let desc = TensorSpaceDesc::new(n, 2, top as i64, m);
    let mut rep = vec![Rational::zero(); desc.dim()];
    let mut lower_order_clean = true;
    for r in 0..jets.dim() {
        let c = jets.coordinate(r)?;
        for p in 0..pairs {
            let value = &raw[r * pairs + p];
            if value.is_zero() {
                continue;
            }
            if c.multi_index.degree() != top {
                lower_order_clean = false;
                continue;
            }
            let scale = Rational::new(1.into(), c.multi_index.factorial());
            let idx = desc.index_unchecked(p, c.multi_index.rank(), c.component);
            rep[idx] = value * scale;
        }
    }
    let tw = tower(&symbol_tableau(s), l + 1)?;
    let chain = tw.chain();
    let cochains = chain.cochains(l, 2)?;
    let cocycles = chain.cocycles(l, 2)?;
    let coboundaries = chain.coboundaries(l, 2)?;
    let in_cochains = lower_order_clean && cochains.contains(&rep);
    Ok(CohomologyHome {
        l,
        is_cocycle: in_cochains && cocycles.contains(&rep),
        nonzero_in_cohomology: !coboundaries.contains(&rep),
        in_cochains,
        representative: rep,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GoldschmidtVerdict {
    /// Surjective and 2-acyclic for every `l`, the latter because the symbol
    /// has finite type `finite_type`.
    Certified { finite_type: usize },
    /// Surjective and `H^{l,2} = 0` for `l ≤ l_max`.
    UpToEvidence { l_max: usize },
    /// `F^(1) → F` misses `witness`.
    Obstructed { witness: Vec<Rational> },
    /// Surjective but `H^{l,2} ≠ 0`: the criterion does not apply.
    NotTwoAcyclic { l: usize, cocycle: Vec<Rational> },
}

#[derive(Clone, Debug)]
pub struct GoldschmidtReport {
    pub verdict: GoldschmidtVerdict,
    pub surjective: bool,
    pub cohomology: CohomologyReport,
}

/// Goldschmidt's sufficient condition: `F^(1) → F` onto and the symbol
/// 2-acyclic.
pub fn goldschmidt_check(s: &PdeSystem, l_max: usize) -> Result<GoldschmidtReport> {
    let tw = tower(&symbol_tableau(s), l_max + 1)?;
    let report = cohomology(tw.chain(), l_max, 2, true)?;
    let tower_report = prolongation_tower(s, 1)?;
    let surjective = tower_report.levels[1].surjective == Some(true);
    let verdict = if let TowerVerdict::ObstructedAt { witness, .. } = tower_report.verdict {
        GoldschmidtVerdict::Obstructed { witness }
    } else {
        match report.acyclicity[1].status {
            AcyclicityStatus::NonzeroAt { l, m } => {
                let cocycle = report
                    .entry(l, m)
                    .and_then(|e| e.representatives.first().cloned())
                    .unwrap_or_default();
                GoldschmidtVerdict::NotTwoAcyclic { l, cocycle }
            }
            AcyclicityStatus::Unconditional => GoldschmidtVerdict::Certified {
                finite_type: report.finite_type.expect("unconditional implies a zero level"),
            },
            AcyclicityStatus::CertifiedUpTo(l_max) => GoldschmidtVerdict::UpToEvidence { l_max },
        }
    };
    Ok(GoldschmidtReport {
        verdict,
        surjective,
        cohomology: report,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteTypeVerdict {
    /// Symbol of finite type `l`, tower surjective up to `k > l`, and
    /// `F^(j) → F^(j−1)` bijective for `max(l,1) ≤ j ≤ k`.
    Certified { l: usize, k: usize },
    ObstructedAt { level: usize, witness: Vec<Rational> },
    /// Finite type `l` but only `levels ≤ l` prolongations were computed.
    Undetermined { l: usize, levels: usize },
    /// No vanishing prolongation up to `l_max`.
    NotApplicable { l_max: usize },
}

pub fn finite_type_integrability(s: &PdeSystem, l_max: usize, levels: usize) -> Result<FiniteTypeVerdict> {
    let l = match classify_type(&symbol_tableau(s), l_max)? {
        TypeVerdict::InfiniteTypeUpTo(l_max) => return Ok(FiniteTypeVerdict::NotApplicable { l_max }),
        TypeVerdict::FiniteType(l) => l,
    };
    let report = prolongation_tower(s, levels)?;
    if let TowerVerdict::ObstructedAt { level, witness } = report.verdict {
        return Ok(FiniteTypeVerdict::ObstructedAt { level, witness });
    }
    if levels <= l {
        return Ok(FiniteTypeVerdict::Undetermined { l, levels });
    }
    for j in l.max(1)..=levels {
        if report.levels[j].fiber_dim != report.levels[j - 1].fiber_dim {
            return Err(Error::invariant(format!(
                "finite type {l} but dim F^({j}) = {} ≠ dim F^({}) = {}",
                report.levels[j].fiber_dim,
                j - 1,
                report.levels[j - 1].fiber_dim
            )));
        }
    }
    Ok(FiniteTypeVerdict::Certified { l, k: levels })
}
