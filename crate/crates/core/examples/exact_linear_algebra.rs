//! Exact subspace arithmetic over the rationals.

use formint::ratlin::{format_vector, kernel, ratio, solve_affine, AffineSolution, RatMatrix, Subspace};

fn main() {
    let m = RatMatrix::from_i64_rows(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 1]]);
    println!("rank = {}", m.rank());

    let ker = kernel(&m);
    println!("kernel has dimension {}", ker.dim());
    for v in ker.basis_vectors() {
        println!("  {:?}", format_vector(&v));
        assert!(m.mul_vec(&v).iter().all(|x| *x == ratio(0, 1)));
    }

    // two planes in Q^3 meet in a line
    let a = Subspace::span(3, vec![vec![ratio(1, 1), ratio(0, 1), ratio(0, 1)], vec![ratio(0, 1), ratio(1, 1), ratio(0, 1)]]);
    let b = Subspace::span(3, vec![vec![ratio(1, 1), ratio(1, 1), ratio(1, 1)], vec![ratio(0, 1), ratio(1, 2), ratio(0, 1)]]);
    let meet = a.intersect(&b).unwrap();
    let sum = a.sum(&b).unwrap();
    println!("dim(A ∩ B) = {}, dim(A + B) = {}", meet.dim(), sum.dim());
    println!("A ∩ B is spanned by {:?}", format_vector(&meet.basis_vector(0)));

    // the canonical representative of a coset v + A
    let v = vec![ratio(3, 1), ratio(-1, 2), ratio(5, 1)];
    println!("v mod A = {:?}", format_vector(&a.reduce(&v)));

    match solve_affine(&m, &[ratio(1, 1), ratio(2, 1), ratio(0, 1)]).unwrap() {
        AffineSolution::Feasible { particular, kernel } => {
            println!("solution {:?} + kernel of dim {}", format_vector(&particular), kernel.dim())
        }
        AffineSolution::Infeasible { witness, .. } => println!("no solution, witness {:?}", format_vector(&witness)),
    }
    match solve_affine(&m, &[ratio(1, 1), ratio(1, 1), ratio(0, 1)]).unwrap() {
        AffineSolution::Feasible { .. } => println!("unexpectedly solvable"),
        AffineSolution::Infeasible { witness, .. } => {
            println!("inconsistent: row combination {:?} kills the matrix but not the right-hand side", format_vector(&witness))
        }
    }
}
