//! Prolongation towers of tableaux: ranks, type and cohomology stabilization.

use formint::format::parse;
use formint::jetpde::symbol_tableau;
use formint::ratlin::RatMatrix;
use formint::tableau::{
    classify_type, first_prolongation_lower_bound, prolong, stabilization_scan, tower, Tableau,
};

fn describe(name: &str, t: &Tableau) {
    let tw = tower(t, 4).unwrap();
    let scan = stabilization_scan(t, 3).unwrap();
    println!("{name}");
    println!("  dim g = {}, ranks of g^(1..=4) = {:?}", t.dim(), tw.ranks());
    println!("  type: {:?}", classify_type(t, 4).unwrap());
    println!("  dim g^(1) ≥ {}", first_prolongation_lower_bound(t));
    println!(
        "  cohomology rows vanish from l = {:?} (certified: {})",
        scan.stabilized_at(),
        scan.certified
    );
}

fn symbol_of(text: &str) -> Tableau {
    symbol_tableau(&parse(text).unwrap())
}

fn main() {
    describe(
        "heat equation u_x2 = u_x1x1 (symbol of u_x1x1 in S^2)",
        &symbol_of("base_dim = 2\nfiber_rank = 1\norder = 2\neq: u1_x1x1 - u1_x2 = 0\n"),
    );
    describe(
        "u_x1x1 = u_x2x2 = 0",
        &symbol_of("base_dim = 2\nfiber_rank = 1\norder = 2\neq: u1_x1x1 = 0\neq: u1_x2x2 = 0\n"),
    );
    describe(
        "Hessian in three variables vanishes",
        &symbol_of(
            "base_dim = 3\nfiber_rank = 1\norder = 2\neq: u1_x1x1 = 0\neq: u1_x1x2 = 0\neq: u1_x1x3 = 0\n\
             eq: u1_x2x2 = 0\neq: u1_x2x3 = 0\neq: u1_x3x3 = 0\n",
        ),
    );
    describe("full tableau, n = 3, f = 2", &Tableau::full(3, 2));

    // a generalized tableau: ∂: Q^1 → Hom(Q^2, Q^2), v ↦ v·id
    let partial = RatMatrix::from_i64_rows(&[&[1], &[0], &[0], &[1]]);
    let g = Tableau::generalized(2, 2, partial).unwrap();
    println!("generalized tableau ∂(v) = v·id");
    println!("  dim g^(1) = {}", prolong(&g).unwrap().dim());
    println!("  ranks {:?}", tower(&g, 3).unwrap().ranks());
}
