//! Relative connections: prolongation, torsion and compatible connections.

use formint::ratlin::{format_vector, rat, RatMatrix};
use formint::relconn::{
    classical_prolongation_fiber, compatible, h01_dim, prolongation_connection, symbol_map, torsion_at, RelConn,
    TorsionOutcome,
};
use formint::tableau::prolong;

fn m(rows: &[&[i64]]) -> RatMatrix {
    RatMatrix::from_i64_rows(rows)
}

fn report(name: &str, c: &RelConn) {
    let p = classical_prolongation_fiber(c).unwrap();
    let g1 = prolong(&symbol_map(c)).unwrap();
    println!("{name}");
    println!(
        "  dim E′ = {}, dim Prol = {} = dim g^(1) {} + dim image {}",
        c.source_dim(),
        p.dim(),
        g1.dim(),
        p.projection_image().dim()
    );
    for b in 0..c.source_dim() {
        let mut e = vec![rat(0); c.source_dim()];
        e[b] = rat(1);
        match torsion_at(c, &e).unwrap() {
            TorsionOutcome::Vanishes { lift } => println!("  e{}: lifts to {:?}", b + 1, format_vector(&lift)),
            TorsionOutcome::Obstructed { class, .. } => {
                println!("  e{}: torsion class {:?}", b + 1, format_vector(&class))
            }
            TorsionOutcome::FiberEmpty { witness } => {
                println!("  e{}: no first-order lift, witness {:?}", b + 1, format_vector(&witness))
            }
        }
    }
}

fn main() {
    // D = d + A on a trivial bundle; flat iff A1 and A2 commute
    let commuting = RelConn::flat(vec![m(&[&[1, 1], &[0, 1]]), m(&[&[2, 3], &[0, 2]])]).unwrap();
    report("commuting pair", &commuting);
    let twisted = RelConn::flat(vec![m(&[&[0, 1], &[0, 0]]), m(&[&[0, 0], &[1, 0]])]).unwrap();
    report("non-commuting pair (torsion = [A1, A2]e)", &twisted);

    // a connection with a nontrivial symbol: σ drops the last coordinate
    let c = RelConn::new(
        m(&[&[1, 0, 0], &[0, 1, 0]]),
        vec![m(&[&[0, 0, 1], &[0, 0, 0]]), m(&[&[0, 0, 0], &[0, 0, 1]])],
    )
    .unwrap();
    report("σ with a kernel", &c);

    // Prol(E′, D) carries a canonical connection compatible with D
    let (fiber, inner) = prolongation_connection(&c).unwrap();
    let verdict = compatible(&c, &inner).unwrap();
    println!(
        "canonical connection on Prol (dim {}): compatible = {}, dim H^(0,1) = {}",
        fiber.dim(),
        verdict.is_compatible(),
        h01_dim(&c, &inner).unwrap()
    );
}
