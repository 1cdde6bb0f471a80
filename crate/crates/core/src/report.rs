//! Machine-readable analysis reports.
//!
//! Every section is always present in the JSON output; sections a command
//! did not compute are `null`. Rationals are strings `"p"` or `"p/q"`.

use serde::Serialize;

use crate::jetpde::{
    CertificationBasis, CrossCheckLevel, FiniteTypeVerdict, GoldschmidtReport, GoldschmidtVerdict,
    IntegrabilityReport, JetSpace, PdeSystem, TorsionDiagnostic, TowerVerdict,
};
use crate::ratlin::{format_vector, Rational};
use crate::relconn::TorsionOutcome;
use crate::spencer::{AcyclicityStatus, CohomologyReport};
use crate::tableau::TypeVerdict;
use crate::tensorspace::{ExtIndex, TensorSpaceDesc};

pub const SCHEMA_VERSION: u32 = 1;

pub mod basis_ref {
    pub const TORSION: &str =
        "torsion criterion: a prolongation level is reached iff the projection onto the previous level is onto";
    pub const FINITE_TYPE: &str =
        "finite-type criterion: symbol of finite type l and integrable up to some order k > l imply formal integrability";
    pub const GOLDSCHMIDT: &str =
        "Goldschmidt criterion: onto first prolongation and 2-acyclic symbol imply formal integrability";
    pub const BOUNDED: &str = "bounded evidence: holds for every level computed, nothing claimed beyond";
    pub const FINITE_TYPE_DEFINITION: &str =
        "type of a tableau: smallest l with vanishing l-th prolongation";
    pub const ACYCLICITY: &str =
        "r-acyclicity: Spencer cohomology H^{l,m} vanishes for 1 <= m <= r and all l";
    pub const PROLONGATION_EQUIVALENCE: &str =
        "classical prolongation of the associated relative connection equals the formal prolongation of the system";
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub command: String,
    pub input: String,
    pub system: SystemSection,
    pub symbol: Option<SymbolSection>,
    pub cohomology: Option<CohomologySection>,
    pub tower: Option<Vec<LevelSection>>,
    pub crosscheck: Option<Vec<CrossCheckSection>>,
    pub verdict: Option<VerdictSection>,
    pub certification_basis: Option<String>,
    pub witnesses: Vec<WitnessSection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemSection {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub equations: usize,
    pub equation_rank: usize,
    pub jet_dim: usize,
    pub solution_fiber_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolSection {
    pub dim: usize,
    pub tower_ranks: Vec<usize>,
    #[serde(rename = "type")]
    pub type_: TypeSection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeSection {
    pub verdict: String,
    pub l: usize,
    pub basis_ref: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologySection {
    pub l_max: usize,
    pub m_max: usize,
    pub finite_type: Option<usize>,
    pub entries: Vec<CohomologyEntrySection>,
    pub acyclicity: Vec<AcyclicitySection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyEntrySection {
    pub l: usize,
    pub m: usize,
    pub cocycles: usize,
    pub coboundaries: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcyclicitySection {
    pub r: usize,
    pub verdict: String,
    pub l: Option<usize>,
    pub m: Option<usize>,
    pub basis_ref: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSection {
    pub level: usize,
    pub fiber_dim: usize,
    pub symbol_dim: usize,
    pub projection_image_dim: Option<usize>,
    pub surjective: Option<bool>,
    pub torsion_vanishes: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheckSection {
    pub level: usize,
    pub prol_dim: usize,
    pub fiber_dim: usize,
    pub prol_image_dim: usize,
    pub tower_image_dim: usize,
    pub images_agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerdictSection {
    pub verdict: String,
    pub level: Option<usize>,
    pub l: Option<usize>,
    pub basis_ref: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSection {
    pub kind: String,
    pub level: Option<usize>,
    pub labels: Vec<String>,
    pub vector: Vec<String>,
}

impl ReportDocument {
    pub fn new(command: &str, input: &str, s: &PdeSystem) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input: input.to_string(),
            system: system_section(s),
            symbol: None,
            cohomology: None,
            tower: None,
            crosscheck: None,
            verdict: None,
            certification_basis: None,
            witnesses: Vec::new(),
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn system_section(s: &PdeSystem) -> SystemSection {
    SystemSection {
        n: s.n(),
        m: s.m(),
        k: s.k(),
        equations: s.equations().rows(),
        equation_rank: s.equations().rank(),
        jet_dim: s.jet_space().dim(),
        solution_fiber_dim: crate::jetpde::solution_fiber(s).dim(),
    }
}

pub fn symbol_section(dim: usize, tower_ranks: Vec<usize>, verdict: TypeVerdict) -> SymbolSection {
    let (name, l) = match verdict {
        TypeVerdict::FiniteType(l) => ("finite-type", l),
        TypeVerdict::InfiniteTypeUpTo(l) => ("infinite-type-up-to", l),
    };
    SymbolSection {
        dim,
        tower_ranks,
        type_: TypeSection {
            verdict: name.to_string(),
            l,
            basis_ref: basis_ref::FINITE_TYPE_DEFINITION.to_string(),
        },
    }
}

pub fn cohomology_section(report: &CohomologyReport) -> CohomologySection {
    CohomologySection {
        l_max: report.l_max,
        m_max: report.m_max,
        finite_type: report.finite_type,
        entries: report
            .entries
            .values()
            .map(|e| CohomologyEntrySection {
                l: e.l,
                m: e.m,
                cocycles: e.cocycle_dim,
                coboundaries: e.coboundary_dim,
                dim: e.dim,
            })
            .collect(),
        acyclicity: report
            .acyclicity
            .iter()
            .map(|a| {
                let (verdict, l, m) = match a.status {
                    AcyclicityStatus::Unconditional => ("acyclic-unconditional", None, None),
                    AcyclicityStatus::CertifiedUpTo(l) => ("acyclic-up-to", Some(l), None),
                    AcyclicityStatus::NonzeroAt { l, m } => ("nonzero-at", Some(l), Some(m)),
                };
                AcyclicitySection {
                    r: a.r,
                    verdict: verdict.to_string(),
                    l,
                    m,
                    basis_ref: basis_ref::ACYCLICITY.to_string(),
                }
            })
            .collect(),
    }
}

/// Representatives of the nonzero cohomology groups as witnesses.
pub fn cohomology_witnesses(report: &CohomologyReport, n: usize, fiber: usize, base_degree: usize) -> Vec<WitnessSection> {
    let mut out = Vec::new();
    for e in report.entries.values() {
        let desc = TensorSpaceDesc::new(n, e.m, (base_degree + e.l) as i64, fiber);
        for rep in &e.representatives {
            out.push(WitnessSection {
                kind: format!("cohomology-class H^({},{})", e.l, e.m),
                level: Some(e.l),
                labels: tensor_labels(&desc),
                vector: format_vector(rep),
            });
        }
    }
    out
}

pub fn tower_section(report: &IntegrabilityReport) -> Vec<LevelSection> {
    report
        .levels
        .iter()
        .map(|l| LevelSection {
            level: l.level,
            fiber_dim: l.fiber_dim,
            symbol_dim: l.symbol_dim,
            projection_image_dim: l.projection_image_dim,
            surjective: l.surjective,
            torsion_vanishes: l.torsion_vanishes,
        })
        .collect()
}

pub fn crosscheck_section(levels: &[CrossCheckLevel]) -> Vec<CrossCheckSection> {
    levels
        .iter()
        .map(|c| CrossCheckSection {
            level: c.level,
            prol_dim: c.prol_dim,
            fiber_dim: c.fiber_dim,
            prol_image_dim: c.prol_image_dim,
            tower_image_dim: c.tower_image_dim,
            images_agree: c.images_agree,
        })
        .collect()
}

pub fn certification_basis(basis: &CertificationBasis) -> String {
    match basis {
        CertificationBasis::FiniteType(l) => format!("finite-type({l})"),
        CertificationBasis::Goldschmidt(l) => format!("goldschmidt({l})"),
        CertificationBasis::ExhaustedBound => "exhausted-bound".to_string(),
    }
}

pub fn tower_verdict(report: &IntegrabilityReport) -> VerdictSection {
    match &report.verdict {
        TowerVerdict::FormallyIntegrable => VerdictSection {
            verdict: "formally-integrable-certified".into(),
            level: None,
            l: match report.basis {
                CertificationBasis::FiniteType(l) => Some(l),
                _ => None,
            },
            basis_ref: basis_ref::FINITE_TYPE.into(),
        },
        TowerVerdict::IntegrableUpTo(n) => VerdictSection {
            verdict: "integrable-up-to".into(),
            level: Some(*n),
            l: None,
            basis_ref: basis_ref::BOUNDED.into(),
        },
        TowerVerdict::ObstructedAt { level, .. } => VerdictSection {
            verdict: "obstructed-at".into(),
            level: Some(*level),
            l: None,
            basis_ref: basis_ref::TORSION.into(),
        },
    }
}

pub fn goldschmidt_verdict(report: &GoldschmidtReport) -> (VerdictSection, String) {
    match &report.verdict {
        GoldschmidtVerdict::Certified { finite_type } => (
            VerdictSection {
                verdict: "formally-integrable-certified".into(),
                level: None,
                l: Some(*finite_type),
                basis_ref: basis_ref::GOLDSCHMIDT.into(),
            },
            format!("finite-type({finite_type})"),
        ),
        GoldschmidtVerdict::UpToEvidence { l_max } => (
            VerdictSection {
                verdict: "formally-integrable-up-to-evidence".into(),
                level: None,
                l: Some(*l_max),
                basis_ref: basis_ref::GOLDSCHMIDT.into(),
            },
            format!("goldschmidt({l_max})"),
        ),
        GoldschmidtVerdict::Obstructed { .. } => (
            VerdictSection {
                verdict: "obstructed".into(),
                level: Some(1),
                l: None,
                basis_ref: basis_ref::TORSION.into(),
            },
            "exhausted-bound".into(),
        ),
        GoldschmidtVerdict::NotTwoAcyclic { l, .. } => (
            VerdictSection {
                verdict: "inconclusive-not-2-acyclic".into(),
                level: None,
                l: Some(*l),
                basis_ref: basis_ref::GOLDSCHMIDT.into(),
            },
            "exhausted-bound".into(),
        ),
    }
}

pub fn finite_type_verdict(verdict: &FiniteTypeVerdict) -> (VerdictSection, String) {
    match verdict {
        FiniteTypeVerdict::Certified { l, k } => (
            VerdictSection {
                verdict: "formally-integrable-certified".into(),
                level: Some(*k),
                l: Some(*l),
                basis_ref: basis_ref::FINITE_TYPE.into(),
            },
            format!("finite-type({l})"),
        ),
        FiniteTypeVerdict::ObstructedAt { level, .. } => (
            VerdictSection {
                verdict: "obstructed-at".into(),
                level: Some(*level),
                l: None,
                basis_ref: basis_ref::TORSION.into(),
            },
            "exhausted-bound".into(),
        ),
        FiniteTypeVerdict::Undetermined { l, levels } => (
            VerdictSection {
                verdict: "undetermined".into(),
                level: Some(*levels),
                l: Some(*l),
                basis_ref: basis_ref::FINITE_TYPE.into(),
            },
            "exhausted-bound".into(),
        ),
        FiniteTypeVerdict::NotApplicable { l_max } => (
            VerdictSection {
                verdict: "not-applicable-infinite-type-up-to".into(),
                level: None,
                l: Some(*l_max),
                basis_ref: basis_ref::FINITE_TYPE.into(),
            },
            "exhausted-bound".into(),
        ),
    }
}

pub fn jet_labels(jets: &JetSpace) -> Vec<String> {
    jets.coordinates().iter().map(ToString::to_string).collect()
}

/// Labels `dx1^dx2 (x) x1^2 (x) e1` for a basis of `Λ^j ⊗ S^k ⊗ Q^f`.
pub fn tensor_labels(desc: &TensorSpaceDesc) -> Vec<String> {
    desc.basis()
        .into_iter()
        .map(|(ext, alpha, fib)| {
            let form = wedge_label(&ext);
            let mono = monomial_label(alpha.exponents());
            format!("{form} (x) {mono} (x) e{}", fib + 1)
        })
        .collect()
}

fn wedge_label(ext: &ExtIndex) -> String {
    if ext.directions().is_empty() {
        return "1".into();
    }
    ext.directions()
        .iter()
        .map(|d| format!("dx{}", d + 1))
        .collect::<Vec<_>>()
        .join("^")
}

fn monomial_label(exps: &[usize]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Labels `dx1^dx2 (x) u1_x1` for `Λ² ⊗ J^d` vectors as produced by the torsion.
pub fn torsion_labels(n: usize, jets: &JetSpace) -> Vec<String> {
    let pairs = ExtIndex::all(n, 2);
    let mut out = Vec::new();
    for c in jets.coordinates() {
        for p in &pairs {
            out.push(format!("{} (x) {c}", wedge_label(p)));
        }
    }
    out
}

pub fn projection_witness(level: usize, jets: &JetSpace, witness: &[Rational]) -> WitnessSection {
    WitnessSection {
        kind: "not-in-projection-image".into(),
        level: Some(level),
        labels: jet_labels(jets),
        vector: format_vector(witness),
    }
}

/// The torsion class and, from level 2 on, its Spencer cohomology representative.
pub fn torsion_witnesses(s: &PdeSystem, d: &TorsionDiagnostic) -> Vec<WitnessSection> {
    let mut out = Vec::new();
    let lower = JetSpace::new(s.n(), s.m(), s.k() + d.level - 2);
    match &d.outcome {
        TorsionOutcome::Obstructed { class, .. } => out.push(WitnessSection {
            kind: "torsion-class".into(),
            level: Some(d.level),
            labels: torsion_labels(s.n(), &lower),
            vector: format_vector(class),
        }),
        TorsionOutcome::FiberEmpty { witness } => out.push(WitnessSection {
            kind: "first-order-lift-infeasible".into(),
            level: Some(d.level),
            labels: Vec::new(),
            vector: format_vector(witness),
        }),
        TorsionOutcome::Vanishes { .. } => {}
    }
    if let Some(home) = &d.cohomology_home {
        let desc = TensorSpaceDesc::new(s.n(), 2, (s.k() + home.l) as i64, s.m());
        out.push(WitnessSection {
            kind: format!("cohomology-class H^({},2)", home.l),
            level: Some(d.level),
            labels: tensor_labels(&desc),
            vector: format_vector(&home.representative),
        });
    }
    out
}
