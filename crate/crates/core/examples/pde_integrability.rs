//! Formal integrability of a PDE system: tower, Goldschmidt and finite type.
//!
//! Usage: `cargo run --example pde_integrability [file.pde]`

use formint::format::{parse, parse_file, print};
use formint::jetpde::{
    finite_type_integrability, goldschmidt_check, prolongation_tower, torsion_diagnostic, GoldschmidtVerdict,
    JetSpace, TowerVerdict,
};
use formint::ratlin::{format_rational, Rational};
use formint::relconn::TorsionOutcome;

// Cross-differentiating twice gives u1_x1x1x2 = 0, a third-order condition
// that only shows up among the fourth-order jets.
const DEFAULT: &str = "\
base_dim = 2
fiber_rank = 2
order = 2
eq: u2_x2x2 + u1_x2 = 0
eq: u2_x1x1 = 0
";

fn show(labels: &[String], v: &[Rational]) -> String {
    let parts: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(x, _)| **x != Rational::from_integer(0.into()))
        .map(|(x, l)| format!("{l} = {}", format_rational(x)))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn main() {
    let s = match std::env::args().nth(1) {
        Some(path) => parse_file(path).unwrap(),
        None => parse(DEFAULT).unwrap(),
    };
    print!("{}", print(&s));

    let report = prolongation_tower(&s, 3).unwrap();
    println!("fiber dims    {:?}", report.fiber_dims());
    println!("symbol dims   {:?}", report.symbol_dims());
    println!("onto          {:?}", report.surjective());
    match &report.verdict {
        TowerVerdict::ObstructedAt { level, witness } => {
            let jets = JetSpace::new(s.n(), s.m(), s.k() + level - 1);
            let labels: Vec<String> = jets.coordinates().iter().map(ToString::to_string).collect();
            println!("obstructed at level {level}: the point {} does not lift", show(&labels, witness));
            let d = torsion_diagnostic(&report, &s, *level, witness).unwrap();
            if let TorsionOutcome::Obstructed { class, .. } = &d.outcome {
                let nonzero = class.iter().filter(|x| **x != Rational::from_integer(0.into())).count();
                println!("torsion class in Λ² ⊗ J^{}: {nonzero} nonzero entries", s.k() + level - 2);
            }
            if let Some(home) = d.cohomology_home {
                println!(
                    "representative in Λ² ⊗ g^({}) is a cocycle: {}, nonzero in H^({},2): {}",
                    home.l, home.is_cocycle, home.l, home.nonzero_in_cohomology
                );
            }
        }
        v => println!("tower verdict {v:?}, basis {:?}", report.basis),
    }
    let g = goldschmidt_check(&s, 3).unwrap();
    println!("goldschmidt: {}", match g.verdict {
        GoldschmidtVerdict::Certified { finite_type } => format!("certified, finite type {finite_type}"),
        GoldschmidtVerdict::UpToEvidence { l_max } => format!("2-acyclic up to l = {l_max}"),
        GoldschmidtVerdict::Obstructed { .. } => "first projection not onto".into(),
        GoldschmidtVerdict::NotTwoAcyclic { l, .. } => format!("inconclusive, H^({l},2) ≠ 0"),
    });
    println!("finite type: {:?}", finite_type_integrability(&s, 3, 3).unwrap());
}
