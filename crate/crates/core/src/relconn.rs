//! Constant-coefficient relative connections on trivial bundles over `R^n`.
//!
//! A relative connection `(D, σ)` from `E′` to `E` is given by a linear map
//! `σ: E′ → E` and matrices `A_1, …, A_n: E′ → E`, acting on sections by
//! `D_{∂_i}(s) = A_i s + σ(∂_i s)`. The Leibniz rule
//! `D(fs) = f D(s) + df ⊗ σ(s)` holds for every such pair.
//!
//! First-order data at a point is a pair `(e, ψ)` with `e ∈ E′` and
//! `ψ ∈ Hom(R^n, E′)`, stored as the vector `[e | ψ_1 | … | ψ_n]` where
//! `ψ_i = ψ(∂_i)`.
//!
//! Reduction of the operator identities used here. Writing a point of the
//! partial prolongation as a section `(α, ω)` with `ω = dα − ψ`, the
//! condition `D(α) = σ∘ω` reads `A_i e + σψ_i = 0`, and
//! `K(α,ω)(∂_i,∂_j) = D_i(ω_j) − D_j(ω_i)` evaluates to
//! `A_jψ_i − A_iψ_j`. For a second connection `(D′, σ′)` from `E″` to `E′`
//! with matrices `B_i`, `D∘σ′ = σ∘D′` is `A_iσ′ = σB_i`, and once that holds
//! `D_i D′_j − D_j D′_i = 0` on coordinate fields reduces to
//! `A_iB_j = A_jB_i`.
//!
//! `σ` need not be surjective. Everything is computed by linear feasibility,
//! never through a right inverse of `σ`; the equivalence with the
//! section-level prolongation assumes enough local solutions through each
//! point, which holds for the constant-coefficient systems built here.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ratlin::{image, kernel, solve_affine, AffineSolution, RatMatrix, Rational, Subspace};
use crate::tableau::Tableau;
use crate::tensorspace::binomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelConn {
    n: usize,
    source_dim: usize,
    coeff_dim: usize,
    sigma: RatMatrix,
    a: Vec<RatMatrix>,
    sigma_surjective: bool,
    symbol: Subspace,
}

impl RelConn {
    /// `sigma` and every `A_i` are `coeff_dim × source_dim`.
    pub fn new(sigma: RatMatrix, a: Vec<RatMatrix>) -> Result<Self> {
        let (coeff_dim, source_dim) = (sigma.rows(), sigma.cols());
        for m in &a {
            if m.rows() != coeff_dim || m.cols() != source_dim {
                return Err(Error::DimensionMismatch {
                    context: "connection matrix shape must match σ",
                    expected: coeff_dim * source_dim,
                    found: m.rows() * m.cols(),
                });
            }
        }
        let sigma_surjective = sigma.rank() == coeff_dim;
        let symbol = kernel(&sigma);
        Ok(Self {
            n: a.len(),
            source_dim,
            coeff_dim,
            sigma,
            a,
            sigma_surjective,
            symbol,
        })
    }

    /// `σ = id`: an ordinary connection `∂_i s + A_i s` on `Q^d`.
    pub fn flat(a: Vec<RatMatrix>) -> Result<Self> {
        let d = a.first().map_or(0, RatMatrix::rows);
        Self::new(RatMatrix::identity(d), a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn coeff_dim(&self) -> usize {
        self.coeff_dim
    }

    pub fn sigma(&self) -> &RatMatrix {
        &self.sigma
    }

    pub fn a(&self) -> &[RatMatrix] {
        &self.a
    }

    pub fn sigma_surjective(&self) -> bool {
        self.sigma_surjective
    }

    /// Length of a first-order vector `[e | ψ_1 | … | ψ_n]`.
    pub fn jet_dim(&self) -> usize {
        self.source_dim * (self.n + 1)
    }

    /// Rows `A_i e + σψ_i` for `i = 1..n`.
    fn partial_equations(&self) -> RatMatrix {
        let s = self.source_dim;
        let c = self.coeff_dim;
        let mut m = RatMatrix::zeros(c * self.n, self.jet_dim());
        for i in 0..self.n {
            for r in 0..c {
                for col in 0..s {
                    m.set(i * c + r, col, self.a[i].get(r, col).clone());
                    m.set(i * c + r, (i + 1) * s + col, self.sigma.get(r, col).clone());
                }
            }
        }
        m
    }

    /// Rows `K(e,ψ)(i,j) = A_jψ_i − A_iψ_j` for `i < j`, pairs in lex order.
    fn k_matrix(&self) -> RatMatrix {
        let s = self.source_dim;
        let c = self.coeff_dim;
        let mut m = RatMatrix::zeros(c * binomial(self.n, 2), self.jet_dim());
        let mut block = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                for r in 0..c {
                    for col in 0..s {
                        m.set(block * c + r, (i + 1) * s + col, self.a[j].get(r, col).clone());
                        m.set(block * c + r, (j + 1) * s + col, -self.a[i].get(r, col).clone());
                    }
                }
                block += 1;
            }
        }
        m
    }
}

/// `g(D) = ker σ`.
pub fn symbol(c: &RelConn) -> Subspace {
    c.symbol.clone()
}

/// Generalized tableau `∂_D: g(D) → Hom(R^n, E)`, `∂_D(v)(∂_i) = A_i v`, in
/// the coordinates of the canonical basis of `ker σ`.
pub fn symbol_map(c: &RelConn) -> Tableau {
    let g = c.symbol.basis();
    let n = c.n;
    let mut partial = RatMatrix::zeros(n * c.coeff_dim, g.cols());
    for i in 0..n {
        let ag = c.a[i].mul(g);
        for r in 0..c.coeff_dim {
            for b in 0..g.cols() {
                partial.set(r * n + i, b, ag.get(r, b).clone());
            }
        }
    }
    Tableau::generalized(n, c.coeff_dim, partial).expect("shape is n·coeff_dim by dim g")
}

/// `{(e, ψ) : A_i e + σψ_i = 0}`.
pub fn partial_prolongation_fiber(c: &RelConn) -> Subspace {
    kernel(&c.partial_equations())
}

/// The classical prolongation at a point with its projection to `E′` and
/// the kernel of that projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlFiber {
    n: usize,
    source_dim: usize,
    space: Subspace,
    projection_image: Subspace,
    kernel_part: Subspace,
}

impl ProlFiber {
    /// Subspace of `E′ ⊕ Hom(R^n, E′)` in `[e | ψ_1 | … | ψ_n]` coordinates.
    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Image of `(e, ψ) ↦ e`.
    pub fn projection_image(&self) -> &Subspace {
        &self.projection_image
    }

    /// Elements with `e = 0`, as a subspace of `Hom(R^n, E′)` in
    /// `[ψ_1 | … | ψ_n]` coordinates.
    pub fn kernel_part(&self) -> &Subspace {
        &self.kernel_part
    }

    /// `(e, ψ) ↦ e` as a matrix on `E′ ⊕ Hom(R^n, E′)`.
    pub fn projection_matrix(&self) -> RatMatrix {
        let rows: Vec<usize> = (0..self.source_dim).collect();
        RatMatrix::identity(self.source_dim * (self.n + 1)).select_rows(&rows)
    }

    pub fn is_projection_surjective(&self) -> bool {
        self.projection_image.dim() == self.source_dim
    }
}

/// `Prol(E′, D) = {(e, ψ) : A_i e + σψ_i = 0, A_iψ_j = A_jψ_i}`.
///
/// Fails with an invariant violation if `dim Prol` differs from
/// `dim g(D)^(1) + dim(projection image)`.
pub fn classical_prolongation_fiber(c: &RelConn) -> Result<ProlFiber> {
    let space = kernel(&c.partial_equations().vstack(&c.k_matrix()));
    let s = c.source_dim;
    let e_rows: Vec<usize> = (0..s).collect();
    let psi_rows: Vec<usize> = (s..c.jet_dim()).collect();
    let basis = space.basis();
    let projection_image = image(&basis.select_rows(&e_rows));
    let e_zero = kernel(&basis.select_rows(&e_rows));
    let kernel_part = e_zero.image_under(&basis.select_rows(&psi_rows));
    if kernel_part.dim() + projection_image.dim() != space.dim() {
        return Err(Error::invariant(format!(
            "prolongation fiber has dim {} but kernel {} + image {}",
            space.dim(),
            kernel_part.dim(),
            projection_image.dim()
        )));
    }
    let fiber = ProlFiber {
        n: c.n,
        source_dim: s,
        space,
        projection_image,
        kernel_part,
    };
    let via_tableau = crate::tableau::prolong(&symbol_map(c))?;
    if via_tableau.dim() != fiber.kernel_part.dim() {
        return Err(Error::invariant(format!(
            "kernel of the projection has dim {} but g(D)^(1) has dim {}",
            fiber.kernel_part.dim(),
            via_tableau.dim()
        )));
    }
    Ok(fiber)
}

/// Which defining identity of compatibility failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompatibilityFailure {
    /// `A_i σ′ ≠ σ B_i`; `witness` is a basis vector of `E″` on which the
    /// two sides differ by `difference`.
    SymbolIntertwining {
        i: usize,
        witness: Vec<Rational>,
        difference: Vec<Rational>,
    },
    /// `A_i B_j ≠ A_j B_i`.
    Curvature {
        i: usize,
        j: usize,
        witness: Vec<Rational>,
        difference: Vec<Rational>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityVerdict {
    pub failures: Vec<CompatibilityFailure>,
}

impl CompatibilityVerdict {
    pub fn is_compatible(&self) -> bool {
        self.failures.is_empty()
    }
}

fn first_nonzero_column(m: &RatMatrix) -> Option<(Vec<Rational>, Vec<Rational>)> {
    (0..m.cols()).find_map(|col| {
        let column = m.column(col);
        if column.iter().all(Zero::is_zero) {
            return None;
        }
        let mut unit = vec![Rational::zero(); m.cols()];
        unit[col] = Rational::from_integer(1.into());
        Some((unit, column))
    })
}

/// Compatibility of `inner: E″ → E′` with `outer: E′ → E`:
/// `D∘σ′ = σ∘D′` and `D_X D′_Y − D_Y D′_X − σ D′_{[X,Y]} = 0`.
pub fn compatible(outer: &RelConn, inner: &RelConn) -> Result<CompatibilityVerdict> {
    if inner.coeff_dim != outer.source_dim {
        return Err(Error::DimensionMismatch {
            context: "inner connection must take values in the outer source",
            expected: outer.source_dim,
            found: inner.coeff_dim,
        });
    }
    if inner.n != outer.n {
        return Err(Error::DimensionMismatch {
            context: "connections over different base dimensions",
            expected: outer.n,
            found: inner.n,
        });
    }
    let mut failures = Vec::new();
    for i in 0..outer.n {
        let diff = outer.a[i].mul(&inner.sigma).sub(&outer.sigma.mul(&inner.a[i]));
        if let Some((witness, difference)) = first_nonzero_column(&diff) {
            failures.push(CompatibilityFailure::SymbolIntertwining { i, witness, difference });
        }
    }
    for i in 0..outer.n {
        for j in i + 1..outer.n {
            let diff = outer.a[i].mul(&inner.a[j]).sub(&outer.a[j].mul(&inner.a[i]));
            if let Some((witness, difference)) = first_nonzero_column(&diff) {
                failures.push(CompatibilityFailure::Curvature {
                    i,
                    j,
                    witness,
                    difference,
                });
            }
        }
    }
    Ok(CompatibilityVerdict { failures })
}

/// `K(e, ψ)` as a vector of `Λ²R^n* ⊗ E`: component `(i<j, r)` sits at
/// `r·C(n,2) + rank(i,j)`.
pub fn fiberwise_k(c: &RelConn, jet: &[Rational]) -> Result<Vec<Rational>> {
    if jet.len() != c.jet_dim() {
        return Err(Error::DimensionMismatch {
            context: "first-order vector [e | ψ]",
            expected: c.jet_dim(),
            found: jet.len(),
        });
    }
    Ok(reorder_pairs_outer(c, &c.k_matrix().mul_vec(jet)))
}

/// `k_matrix` stacks pair blocks of `coeff_dim` rows; `Λ² ⊗ E` is indexed
/// fiber-major.
fn reorder_pairs_outer(c: &RelConn, by_pair: &[Rational]) -> Vec<Rational> {
    let pairs = binomial(c.n, 2);
    let mut out = vec![Rational::zero(); by_pair.len()];
    for p in 0..pairs {
        for r in 0..c.coeff_dim {
            out[r * pairs + p] = by_pair[p * c.coeff_dim + r].clone();
        }
    }
    out
}

/// `Im δ_D ⊆ Λ²R^n* ⊗ E`, the image of `Hom(R^n, g(D))` under
/// `η ↦ ((X,Y) ↦ ∂_D(η(X))(Y) − ∂_D(η(Y))(X))`.
pub fn delta_d_image(c: &RelConn) -> Subspace {
    // shifts of ψ with σψ_i = 0 and e = 0
    let s = c.source_dim;
    let shifts: Vec<Vec<Rational>> = (0..c.symbol.dim())
        .flat_map(|b| {
            let v = c.symbol.basis_vector(b);
            (0..c.n).map(move |i| {
                let mut jet = vec![Rational::zero(); s * (c.n + 1)];
                jet[(i + 1) * s..(i + 2) * s].clone_from_slice(&v);
                jet
            })
        })
        .collect();
    let images = shifts
        .iter()
        .map(|jet| reorder_pairs_outer(c, &c.k_matrix().mul_vec(jet)))
        .collect();
    Subspace::span(c.coeff_dim * binomial(c.n, 2), images)
}

/// Outcome of evaluating the torsion at a point `e ∈ E′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionOutcome {
    /// `(e, lift)` lies in the classical prolongation.
    Vanishes { lift: Vec<Rational> },
    /// `e` admits first-order lifts but none satisfies the symmetry
    /// condition. `class` is the canonical representative of
    /// `K(e, ψ) mod Im δ_D` (independent of the lift), `raw` is `K(e, ψ)` for
    /// the lift returned.
    Obstructed {
        class: Vec<Rational>,
        raw: Vec<Rational>,
        lift: Vec<Rational>,
    },
    /// `A_i e + σψ_i = 0` has no solution: `witness` is a row combination
    /// `y` of that system with `yᵀ[σ-blocks] = 0` and `yᵀ(−A e) ≠ 0`.
    FiberEmpty { witness: Vec<Rational> },
}

impl TorsionOutcome {
    pub fn vanishes(&self) -> bool {
        matches!(self, TorsionOutcome::Vanishes { .. })
    }
}

/// Block-diagonal `σ` acting on `[ψ_1 | … | ψ_n]`.
fn sigma_blocks(c: &RelConn) -> RatMatrix {
    let (r, s) = (c.coeff_dim, c.source_dim);
    RatMatrix::from_fn(r * c.n, s * c.n, |row, col| {
        if row / r == col / s.max(1) && s > 0 {
            c.sigma.get(row % r, col % s).clone()
        } else {
            Rational::zero()
        }
    })
}

fn jet_of(c: &RelConn, e: &[Rational], psi: &[Rational]) -> Vec<Rational> {
    let mut jet = e.to_vec();
    jet.extend_from_slice(psi);
    debug_assert_eq!(jet.len(), c.jet_dim());
    jet
}

/// Torsion `T(e) = [K(e, ψ)] ∈ Λ²R^n* ⊗ E / Im δ_D` for any lift `ψ`.
pub fn torsion_at(c: &RelConn, e: &[Rational]) -> Result<TorsionOutcome> {
    if e.len() != c.source_dim {
        return Err(Error::DimensionMismatch {
            context: "point of E′",
            expected: c.source_dim,
            found: e.len(),
        });
    }
    let blocks = sigma_blocks(c);
    let rhs: Vec<Rational> = c
        .a
        .iter()
        .flat_map(|a| a.mul_vec(e).into_iter().map(|x| -x))
        .collect();
    let (psi0, shifts) = match solve_affine(&blocks, &rhs)? {
        AffineSolution::Infeasible { witness, .. } => {
            return Ok(TorsionOutcome::FiberEmpty { witness });
        }
        AffineSolution::Feasible { particular, kernel } => (particular, kernel),
    };
    let k0 = fiberwise_k(c, &jet_of(c, e, &psi0))?;
    let zero_e = vec![Rational::zero(); c.source_dim];
    // K restricted to shifts (e = 0, σψ_i = 0), in shift coordinates
    let k_on_shifts = RatMatrix::from_columns(
        k0.len(),
        &shifts
            .basis_vectors()
            .iter()
            .map(|phi| fiberwise_k(c, &jet_of(c, &zero_e, phi)))
            .collect::<Result<Vec<_>>>()?,
    );
    let neg_k0: Vec<Rational> = k0.iter().map(|x| -x.clone()).collect();
    match solve_affine(&k_on_shifts, &neg_k0)? {
        AffineSolution::Feasible { particular, .. } => {
            let phi = shifts.vector(&particular);
            let psi: Vec<Rational> = psi0.iter().zip(&phi).map(|(a, b)| a + b).collect();
            Ok(TorsionOutcome::Vanishes {
                lift: jet_of(c, e, &psi),
            })
        }
        AffineSolution::Infeasible { .. } => {
            let class = delta_d_image(c).reduce(&k0);
            Ok(TorsionOutcome::Obstructed {
                class,
                raw: k0,
                lift: jet_of(c, e, &psi0),
            })
        }
    }
}

/// Canonical representative of `K(e, ψ) mod Im δ_D` for a given lift.
pub fn torsion_class_of_lift(c: &RelConn, jet: &[Rational]) -> Result<Vec<Rational>> {
    let k = fiberwise_k(c, jet)?;
    Ok(delta_d_image(c).reduce(&k))
}

/// `dim H^{0,1}`: `ker(δ_D on Hom(R^n, ker σ))` modulo the image of
/// `v ↦ (B_1 v, …, B_n v)` on `ker σ′`.
pub fn h01_dim(outer: &RelConn, inner: &RelConn) -> Result<usize> {
    let verdict = compatible(outer, inner)?;
    if !verdict.is_compatible() {
        return Err(Error::Incompatible(format!(
            "{} identities fail",
            verdict.failures.len()
        )));
    }
    let cycles = classical_prolongation_fiber(outer)?.kernel_part().clone();
    let g_inner = symbol(inner);
    let n = outer.n;
    let stacked = RatMatrix::from_fn(n * outer.source_dim, inner.source_dim, |row, col| {
        inner.a[row / outer.source_dim.max(1)]
            .get(row % outer.source_dim, col)
            .clone()
    });
    let boundaries = g_inner.image_under(&stacked);
    Subspace::quotient_dim(&cycles, &boundaries)
        .map_err(|_| Error::invariant("image of ∂′ is not contained in ker δ_D"))
}

/// The canonical connection on `Prol(E′, D)`: `σ′(e, ψ) = e` and
/// `B_i(e, ψ) = −ψ_i`, in the coordinates of the canonical basis of `Prol`.
pub fn prolongation_connection(c: &RelConn) -> Result<(ProlFiber, RelConn)> {
    let fiber = classical_prolongation_fiber(c)?;
    let s = c.source_dim;
    let basis = fiber.space().basis();
    let sigma = basis.select_rows(&(0..s).collect::<Vec<_>>());
    let a = (0..c.n)
        .map(|i| {
            let rows: Vec<usize> = ((i + 1) * s..(i + 2) * s).collect();
            basis.select_rows(&rows).scale(&Rational::from_integer((-1).into()))
        })
        .collect();
    let inner = RelConn::new(sigma, a)?;
    Ok((fiber, inner))
}
