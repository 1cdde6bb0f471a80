//! Spencer differentials and cohomology of a few tableaux.

use formint::ratlin::{rat, Subspace};
use formint::spencer::{cohomology, delta_matrix, is_r_acyclic};
use formint::tableau::{tower, Tableau};
use formint::tensorspace::{MultiIndex, TensorSpaceDesc};

fn print_table(name: &str, t: &Tableau, l_max: usize) {
    let tw = tower(t, l_max + 1).unwrap();
    let report = cohomology(tw.chain(), l_max, t.n(), true).unwrap();
    println!("{name}: prolongation ranks {:?}", tw.chain().ranks());
    for l in 0..=l_max {
        let row: Vec<String> = (1..=t.n()).map(|m| report.dim(l, m).unwrap().to_string()).collect();
        println!("  H^({l}, 1..={}) = [{}]", t.n(), row.join(", "));
    }
    for r in 1..=t.n() {
        println!("  {r}-acyclic: {:?}", is_r_acyclic(&report, r).unwrap().status);
    }
}

fn main() {
    // δ∘δ = 0 on Λ^0 ⊗ S^3 ⊗ Q^2 with n = 3
    let d1 = delta_matrix(3, 0, 3, 2);
    let d2 = delta_matrix(3, 1, 2, 2);
    println!("δ: {}x{} then {}x{}, composition zero: {}", d1.rows(), d1.cols(), d2.rows(), d2.cols(), d2.mul(&d1).is_zero());

    print_table("full tableau Hom(Q^2, Q)", &Tableau::full(2, 1), 3);

    // the symbol of u_x1x1 = u_x2x2 = 0 is spanned by x1·x2
    let desc = TensorSpaceDesc::symmetric(2, 2, 1);
    let mut v = vec![rat(0); desc.dim()];
    let x1x2 = MultiIndex::new(vec![1, 1]);
    v[desc.index_of(&formint::tensorspace::ExtIndex::empty(), &x1x2, 0).unwrap()] = rat(1);
    let t = Tableau::symmetric(2, 1, 2, Subspace::span(desc.dim(), vec![v])).unwrap();
    print_table("span{x1·x2} in S^2", &t, 2);

    // Cauchy–Riemann: the graph of complex multiplication in Hom(Q^2, Q^2)
    let cr = Subspace::span(
        4,
        vec![
            vec![rat(1), rat(0), rat(0), rat(1)],
            vec![rat(0), rat(-1), rat(1), rat(0)],
        ],
    );
    let t = Tableau::classical(2, 2, cr).unwrap();
    let parsed = formint::format::parse("base_dim = 2\nfiber_rank = 2\norder = 1\neq: u1_x1 - u2_x2 = 0\neq: u1_x2 + u2_x1 = 0\n").unwrap();
    assert_eq!(t.space(), formint::jetpde::symbol_tableau(&parsed).space());
    print_table("Cauchy–Riemann symbol", &t, 3);
}
