//! Shared generators and a brute-force jet oracle for the integration tests.
//!
//! The oracle enumerates jet coordinates and differentiates equations on its
//! own and ranks matrices with a separate Gaussian elimination, so it shares
//! nothing with the library's index arithmetic.
#![allow(dead_code)]

use std::collections::HashMap;

use formint::format::parse;
use formint::jetpde::PdeSystem;
use formint::ratlin::{Rational, RatMatrix, Subspace};
use formint::relconn::RelConn;
use formint::tableau::Tableau;
use formint::tensorspace::sym_dim;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

pub fn corpus_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_files() -> Vec<std::path::PathBuf> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "pde"))
        .collect();
    files.sort();
    files
}

#[derive(Clone, Debug)]
pub struct Term {
    pub coef: Rational,
    pub comp: usize,
    pub exps: Vec<usize>,
}

/// A system kept as term lists, independent of the library's matrix layout.
#[derive(Clone, Debug)]
pub struct RawSystem {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub eqs: Vec<Vec<Term>>,
}

impl RawSystem {
    pub fn to_text(&self) -> String {
        let mut s = format!("base_dim = {}\nfiber_rank = {}\norder = {}\n", self.n, self.m, self.k);
        for eq in &self.eqs {
            s.push_str("eq:");
            for (i, t) in eq.iter().enumerate() {
                let negative = t.coef < Rational::zero();
                let abs = if negative { -t.coef.clone() } else { t.coef.clone() };
                let sep = match (i, negative) {
                    (_, true) => " -",
                    (0, false) => "",
                    (_, false) => " +",
                };
                let suffix: String = t
                    .exps
                    .iter()
                    .enumerate()
                    .flat_map(|(v, &e)| std::iter::repeat(format!("x{}", v + 1)).take(e))
                    .collect();
                let jet = if suffix.is_empty() {
                    format!("u{}", t.comp + 1)
                } else {
                    format!("u{}_{suffix}", t.comp + 1)
                };
                s.push_str(&format!("{sep} {abs} * {jet}"));
            }
            s.push_str(" = 0\n");
        }
        s
    }

    pub fn to_system(&self) -> PdeSystem {
        parse(&self.to_text()).expect("generated system parses")
    }
}

/// Multi-indices of `n` variables with total degree `d`.
pub fn multi_indices(n: usize, d: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in multi_indices(n - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All `(component, α)` with `|α| ≤ order`.
pub fn jet_coords(n: usize, m: usize, order: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for d in 0..=order {
        for a in 0..m {
            for alpha in multi_indices(n, d) {
                out.push((a, alpha));
            }
        }
    }
    out
}

/// Rank by plain Gaussian elimination.
pub fn oracle_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let factor = rows[r][c].clone() / pivot.clone();
                for j in c..cols {
                    let delta = rows[rank][j].clone() * factor.clone();
                    rows[r][j] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLevel {
    pub fiber: usize,
    pub symbol: usize,
    pub image: Option<usize>,
}

/// Fiber, symbol and projection-image dimensions of `P^(0..=levels)`,
/// from the equations `D^β E = 0`, `|β| ≤ i`, on `J^{k+i}`.
pub fn oracle_tower(s: &RawSystem, levels: usize) -> Vec<OracleLevel> {
    let mut out: Vec<OracleLevel> = Vec::new();
    for i in 0..=levels {
        let order = s.k + i;
        let coords = jet_coords(s.n, s.m, order);
        let index: HashMap<(usize, Vec<usize>), usize> =
            coords.iter().cloned().enumerate().map(|(j, c)| (c, j)).collect();
        let mut rows = Vec::new();
        for d in 0..=i {
            for beta in multi_indices(s.n, d) {
                for eq in &s.eqs {
                    let mut row = vec![Rational::zero(); coords.len()];
                    for t in eq {
                        let exps: Vec<usize> = t.exps.iter().zip(&beta).map(|(a, b)| a + b).collect();
                        row[index[&(t.comp, exps)]] += t.coef.clone();
                    }
                    rows.push(row);
                }
            }
        }
        let rank = if rows.is_empty() { 0 } else { oracle_rank(rows.clone()) };
        let fiber = coords.len() - rank;
        let top: Vec<usize> = (0..coords.len()).filter(|&j| coords[j].1.iter().sum::<usize>() == order).collect();
        let top_rows: Vec<Vec<Rational>> = rows.iter().map(|r| top.iter().map(|&j| r[j].clone()).collect()).collect();
        let top_rank = if top_rows.is_empty() { 0 } else { oracle_rank(top_rows) };
        let symbol = top.len() - top_rank;
        out.push(OracleLevel {
            fiber,
            symbol,
            image: (i > 0).then_some(fiber - symbol),
        });
    }
    out
}

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let p: i64 = rng.gen_range(-3..=3);
    let q: i64 = if rng.gen_bool(0.25) { 2 } else { 1 };
    Rational::new(p.into(), q.into())
}

/// A random system with `n ≤ n_max`, `m ≤ m_max`, `k ≤ k_max` and at most
/// `eq_max` equations of up to three terms.
pub fn random_raw_system<R: Rng>(rng: &mut R, n_max: usize, m_max: usize, k_max: usize, eq_max: usize) -> RawSystem {
    let n = rng.gen_range(1..=n_max);
    let m = rng.gen_range(1..=m_max);
    let k = rng.gen_range(1..=k_max);
    let count = rng.gen_range(1..=eq_max);
    let mut eqs = Vec::with_capacity(count);
    for _ in 0..count {
        let terms = rng.gen_range(1..=3);
        let mut eq = Vec::new();
        for t in 0..terms {
            let d = if t == 0 { k } else { rng.gen_range(0..=k) };
            let all = multi_indices(n, d);
            let exps = all[rng.gen_range(0..all.len())].clone();
            let mut coef = small_rational(rng);
            if coef.is_zero() {
                coef = Rational::one();
            }
            eq.push(Term {
                coef,
                comp: rng.gen_range(0..m),
                exps,
            });
        }
        eqs.push(eq);
    }
    RawSystem { n, m, k, eqs }
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> RatMatrix {
    RatMatrix::from_fn(rows, cols, |_, _| q(rng.gen_range(-bound..=bound)))
}

/// Random subspace of `S^k ⊗ Q^f` as a classical tableau.
pub fn random_tableau<R: Rng>(rng: &mut R) -> Tableau {
    let n = rng.gen_range(1..=3);
    let f = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=2);
    let ambient = sym_dim(n, k as i64) * f;
    let count = rng.gen_range(0..=ambient);
    let vectors: Vec<Vec<Rational>> = (0..count)
        .map(|_| {
            (0..ambient)
                .map(|_| if rng.gen_bool(0.5) { q(0) } else { q(rng.gen_range(-2..=2)) })
                .collect()
        })
        .collect();
    Tableau::symmetric(n, f, k, Subspace::span(ambient, vectors)).unwrap()
}

pub fn random_relconn<R: Rng>(rng: &mut R) -> RelConn {
    let n = rng.gen_range(1..=3);
    let s = rng.gen_range(1..=4);
    let c = rng.gen_range(0..=3);
    let sigma = random_matrix(rng, c, s, 2);
    let a = (0..n).map(|_| random_matrix(rng, c, s, 2)).collect();
    RelConn::new(sigma, a).unwrap()
}

/// `∂_i u + A_i u = 0` for `n = a.len()`.
pub fn flat_raw_system(a: &[RatMatrix]) -> RawSystem {
    let n = a.len();
    let m = a[0].rows();
    let mut eqs = Vec::new();
    for (i, ai) in a.iter().enumerate() {
        for r in 0..m {
            let mut exps = vec![0; n];
            exps[i] = 1;
            let mut eq = vec![Term {
                coef: Rational::one(),
                comp: r,
                exps,
            }];
            for c in 0..m {
                let v = ai.get(r, c);
                if !v.is_zero() {
                    eq.push(Term {
                        coef: v.clone(),
                        comp: c,
                        exps: vec![0; n],
                    });
                }
            }
            eqs.push(eq);
        }
    }
    RawSystem { n, m, k: 1, eqs }
}

pub fn commutator(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    a.mul(b).sub(&b.mul(a))
}
