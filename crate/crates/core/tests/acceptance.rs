//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. All comparisons are exact.

mod common;

use std::time::Instant;

use common::*;
use formint::cli::run_with_io;
use formint::format::{parse, print};
use formint::jetpde::{
    crosscheck, finite_type_integrability, goldschmidt_check, pde_to_relconn, prolongation_tower,
    symbol_tableau, torsion_diagnostic, FiniteTypeVerdict, GoldschmidtVerdict, JetSpace, PdeSystem,
    TowerVerdict,
};
use formint::ratlin::{image, RatMatrix, Rational};
use formint::relconn::{
    classical_prolongation_fiber, delta_d_image, fiberwise_k, symbol_map, torsion_at, torsion_class_of_lift,
    RelConn, TorsionOutcome,
};
use formint::spencer::{cohomology, delta_hom_matrix, delta_matrix, SpencerChain};
use formint::tableau::{prolong, tower, Tableau};
use formint::tensorspace::MultiIndex;
use num_traits::Zero;
use rand::Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Composition of two consecutive restricted differentials, checked by the
/// test rather than by the chain itself.
fn restricted_dd_zero(chain: &SpencerChain, l: usize, m: usize) -> Result<bool, String> {
    let (n, f, k) = (chain.n(), chain.fiber(), chain.base_degree());
    let src = chain.cochains(l, m).map_err(err)?;
    let mid = chain.cochains(l - 1, m + 1).map_err(err)?;
    let tgt = chain.cochains(l - 2, m + 2).map_err(err)?;
    let d1 = delta_hom_matrix(n, f, m, (k + l) as i64, &src, &mid).map_err(err)?;
    let d2 = delta_hom_matrix(n, f, m + 1, (k + l - 1) as i64, &mid, &tgt).map_err(err)?;
    Ok(d2.mul(&d1).is_zero())
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut ambient = 0;
    for n in 1..=4 {
        for k in 0..=4i64 {
            for j in 0..n {
                for f in 1..=3 {
                    let d1 = delta_matrix(n, j, k, f);
                    let d2 = delta_matrix(n, j + 1, k - 1, f);
                    ensure!(d2.mul(&d1).is_zero(), "ambient δ∘δ ≠ 0 at n={n} j={j} k={k} f={f}");
                    ambient += 1;
                }
            }
        }
    }
    let mut r = rng(1);
    let mut compositions = 0;
    for case in 0..200 {
        let t = random_tableau(&mut r);
        let tw = tower(&t, 3).map_err(err)?;
        let chain = tw.chain();
        for l in 1..=3 {
            for m in 0..=t.n() {
                chain.check_complex(l, m).map_err(|e| format!("chain {case}: {e}"))?;
                if l >= 2 {
                    ensure!(restricted_dd_zero(chain, l, m)?, "chain {case}: δ∘δ ≠ 0 at l={l} m={m}");
                    compositions += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 30.0, "took {secs:.1}s (target 30s)");
    Ok(format!(
        "{ambient} ambient compositions, 200 random chains ({compositions} restricted compositions), {secs:.1}s"
    ))
}

/// `dim Z^{l,1}` and `dim B^{l,1}` from ambient matrices ranked by the oracle.
fn oracle_h_l1(chain: &SpencerChain, l: usize) -> Result<(usize, usize), String> {
    let (n, f, k) = (chain.n(), chain.fiber(), chain.base_degree());
    let src = chain.cochains(l, 1).map_err(err)?;
    let d = delta_matrix(n, 1, (k + l) as i64, f).mul(src.basis());
    let z = src.dim() - rows_rank(&d);
    let up = chain.level(l + 1);
    let b = rows_rank(&delta_matrix(n, 0, (k + l + 1) as i64, f).mul(up.basis()));
    Ok((z, b))
}

fn rows_rank(m: &RatMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    oracle_rank((0..m.rows()).map(|i| m.row(i).to_vec()).collect())
}

fn check_h_l1(t: &Tableau, l_max: usize, label: &str) -> Result<(), String> {
    let tw = tower(t, l_max + 1).map_err(err)?;
    let report = cohomology(tw.chain(), l_max, 1, false).map_err(|e| format!("{label}: {e}"))?;
    for l in 0..=l_max {
        ensure!(report.dim(l, 1) == Some(0), "{label}: H^({l},1) ≠ 0");
        let (z, b) = oracle_h_l1(tw.chain(), l)?;
        ensure!(z == b, "{label}: oracle gives dim Z = {z}, dim B = {b} at l={l}");
    }
    Ok(())
}

fn corpus_systems() -> Vec<(String, PdeSystem)> {
    corpus_files()
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, formint::format::parse_file(&p).unwrap())
        })
        .collect()
}

fn criterion_2() -> Check {
    let corpus = corpus_systems();
    for (name, s) in &corpus {
        check_h_l1(&symbol_tableau(s), 3, name)?;
    }
    let mut r = rng(2);
    for case in 0..100 {
        let t = random_tableau(&mut r);
        check_h_l1(&t, 2, &format!("random tableau {case}"))?;
    }
    Ok(format!("{} corpus symbols (l ≤ 3) and 100 random tableaux (l ≤ 2)", corpus.len()))
}

fn criterion_3() -> Check {
    let mut cases = 0;
    for n in 1..=3 {
        for f in 1..=3 {
            let t = Tableau::full(n, f);
            let tw = tower(&t, 5).map_err(err)?;
            let ranks = tw.chain().ranks();
            for (i, &r) in ranks.iter().enumerate().take(5) {
                let expected = f * binomial(n + i, i + 1);
                ensure!(r == expected, "n={n} f={f}: rank of level {i} is {r}, expected {expected}");
            }
            let report = cohomology(tw.chain(), 4, n, false).map_err(err)?;
            for ((l, m), e) in &report.entries {
                ensure!(e.dim == 0, "n={n} f={f}: H^({l},{m}) has dim {}", e.dim);
            }
            ensure!(
                report.acyclicity.iter().all(|a| a.holds()),
                "n={n} f={f}: acyclicity verdict fails"
            );
            cases += 1;
        }
    }
    Ok(format!("{cases} full tableaux, ranks f·C(n+i,i+1) for i ≤ 4, H^(l,m) = 0 for l ≤ 4, 1 ≤ m ≤ n"))
}

fn term(coef: i64, comp: usize, exps: &[usize]) -> Term {
    Term {
        coef: q(coef),
        comp,
        exps: exps.to_vec(),
    }
}

fn cauchy_riemann_raw() -> RawSystem {
    RawSystem {
        n: 2,
        m: 2,
        k: 1,
        eqs: vec![
            vec![term(1, 0, &[1, 0]), term(-1, 1, &[0, 1])],
            vec![term(1, 0, &[0, 1]), term(1, 1, &[1, 0])],
        ],
    }
}

fn laplace_raw() -> RawSystem {
    RawSystem {
        n: 2,
        m: 1,
        k: 2,
        eqs: vec![vec![term(1, 0, &[2, 0]), term(1, 0, &[0, 2])]],
    }
}

fn corpus_system(name: &str) -> PdeSystem {
    formint::format::parse_file(corpus_dir().join(name)).unwrap()
}

/// Library tower against the oracle on fiber, symbol and image dimensions.
fn tower_matches_oracle(s: &PdeSystem, raw: &RawSystem, levels: usize) -> Result<Vec<OracleLevel>, String> {
    let oracle = oracle_tower(raw, levels);
    let report = prolongation_tower(s, levels).map_err(err)?;
    for (rec, o) in report.levels.iter().zip(&oracle) {
        ensure!(
            rec.fiber_dim == o.fiber && rec.symbol_dim == o.symbol && rec.projection_image_dim == o.image,
            "level {}: library ({}, {}, {:?}) vs oracle ({}, {}, {:?})",
            rec.level,
            rec.fiber_dim,
            rec.symbol_dim,
            rec.projection_image_dim,
            o.fiber,
            o.symbol,
            o.image
        );
    }
    Ok(oracle)
}

fn criterion_4() -> Check {
    let s = corpus_system("cauchy_riemann.pde");
    let raw = cauchy_riemann_raw();
    ensure!(s == raw.to_system(), "corpus file differs from the hand-built system");
    let oracle = tower_matches_oracle(&s, &raw, 4)?;
    let fibers: Vec<usize> = oracle.iter().map(|o| o.fiber).collect();
    let symbols: Vec<usize> = oracle.iter().map(|o| o.symbol).collect();
    ensure!(fibers == [4, 6, 8, 10, 12], "oracle fiber dims {fibers:?}");
    ensure!(symbols == [2, 2, 2, 2, 2], "oracle symbol dims {symbols:?}");
    ensure!(symbol_tableau(&s).dim() == 2, "symbol dim {}", symbol_tableau(&s).dim());
    let ranks = tower(&symbol_tableau(&s), 4).map_err(err)?.chain().ranks();
    ensure!(ranks == [2, 2, 2, 2, 2], "tableau ranks {ranks:?}");
    let report = prolongation_tower(&s, 4).map_err(err)?;
    ensure!(report.fiber_dims() == [4, 6, 8, 10, 12], "fiber dims {:?}", report.fiber_dims());
    ensure!(report.surjective().iter().all(|&b| b), "a projection is not onto");
    for i in 1..=4 {
        ensure!(oracle[i].image == Some(oracle[i - 1].fiber), "oracle: level {i} not onto");
    }
    let g = goldschmidt_check(&s, 4).map_err(err)?;
    ensure!(
        g.verdict == GoldschmidtVerdict::UpToEvidence { l_max: 4 },
        "goldschmidt verdict {:?}",
        g.verdict
    );
    ensure!(g.surjective, "first projection not onto");
    for l in 0..=4 {
        ensure!(g.cohomology.dim(l, 2) == Some(0), "H^({l},2) ≠ 0");
    }
    Ok("symbol 2, ranks [2,2,2,2,2], fibers [4,6,8,10,12], onto, up-to-evidence(4), H^(l,2) = 0".into())
}

fn criterion_5() -> Check {
    let s = corpus_system("laplace2d.pde");
    let raw = laplace_raw();
    ensure!(s == raw.to_system(), "corpus file differs from the hand-built system");
    let oracle = tower_matches_oracle(&s, &raw, 4)?;
    ensure!(oracle.iter().all(|o| o.symbol == 2), "oracle symbol dims {oracle:?}");
    for i in 1..=4 {
        ensure!(oracle[i].image == Some(oracle[i - 1].fiber), "oracle: level {i} not onto");
    }
    ensure!(symbol_tableau(&s).dim() == 2, "symbol dim {}", symbol_tableau(&s).dim());
    let ranks = tower(&symbol_tableau(&s), 4).map_err(err)?.chain().ranks();
    ensure!(ranks == [2, 2, 2, 2, 2], "tableau ranks {ranks:?}");
    let report = prolongation_tower(&s, 4).map_err(err)?;
    ensure!(report.surjective().iter().all(|&b| b), "a projection is not onto");
    ensure!(report.verdict == TowerVerdict::IntegrableUpTo(4), "tower verdict {:?}", report.verdict);
    let fibers: Vec<usize> = oracle.iter().map(|o| o.fiber).collect();
    Ok(format!("symbol 2, ranks constant 2, fibers {fibers:?}, onto through level 4"))
}

fn random_commuting_pair<R: Rng>(r: &mut R, m: usize) -> Vec<RatMatrix> {
    let a = random_matrix(r, m, m, 2);
    let (c0, c1, c2) = (q(r.gen_range(-2..=2)), q(r.gen_range(-2..=2)), q(r.gen_range(-1..=1)));
    let b = RatMatrix::identity(m)
        .scale(&c0)
        .add(&a.scale(&c1))
        .add(&a.mul(&a).scale(&c2));
    vec![a, b]
}

fn random_noncommuting_pair<R: Rng>(r: &mut R, m: usize) -> Vec<RatMatrix> {
    loop {
        let a = random_matrix(r, m, m, 2);
        let b = random_matrix(r, m, m, 2);
        if !commutator(&a, &b).is_zero() {
            return vec![a, b];
        }
    }
}

/// The `J^1` point `(u = e, u_{x_i} = −A_i e)` of the flat system.
fn flat_point(jets: &JetSpace, a: &[RatMatrix], e: &[Rational]) -> Vec<Rational> {
    let mut p = vec![Rational::zero(); jets.dim()];
    for (c, v) in e.iter().enumerate() {
        p[jets.index(c, &MultiIndex::zero(a.len())).unwrap()] = v.clone();
    }
    for (i, ai) in a.iter().enumerate() {
        for (c, v) in ai.mul_vec(e).into_iter().enumerate() {
            p[jets.index(c, &MultiIndex::unit(a.len(), i)).unwrap()] = -v;
        }
    }
    p
}

fn check_flat(a: &[RatMatrix], commuting: bool) -> Result<bool, String> {
    let raw = flat_raw_system(a);
    let s = raw.to_system();
    let m = a[0].rows();
    let report = prolongation_tower(&s, 2).map_err(err)?;
    let ft = finite_type_integrability(&s, 1, 2).map_err(err)?;
    let g = goldschmidt_check(&s, 2).map_err(err)?;
    let certified = report.verdict == TowerVerdict::FormallyIntegrable
        && matches!(ft, FiniteTypeVerdict::Certified { l: 0, .. })
        && matches!(g.verdict, GoldschmidtVerdict::Certified { finite_type: 0 });
    ensure!(certified == commuting, "certified = {certified} for commuting = {commuting}");
    if !commuting {
        ensure!(
            matches!(report.verdict, TowerVerdict::ObstructedAt { level: 1, .. }),
            "tower verdict {:?}",
            report.verdict
        );
        ensure!(matches!(g.verdict, GoldschmidtVerdict::Obstructed { .. }), "goldschmidt {:?}", g.verdict);
    }
    let conn = RelConn::flat(a.to_vec()).map_err(err)?;
    let bracket = commutator(&a[0], &a[1]);
    let jets = JetSpace::new(2, m, 1);
    let rows: Vec<usize> = (0..jets.dim()).collect();
    let tower_image = image(&report.fibers[1].basis().select_rows(&rows));
    for b in 0..m {
        let mut e = vec![Rational::zero(); m];
        e[b] = q(1);
        let expected = bracket.mul_vec(&e);
        let outcome = torsion_at(&conn, &e).map_err(err)?;
        match &outcome {
            TorsionOutcome::Vanishes { .. } => {
                ensure!(expected.iter().all(Zero::is_zero), "torsion vanishes but [A1,A2]e ≠ 0")
            }
            TorsionOutcome::Obstructed { class, .. } => {
                ensure!(class == &expected, "class {class:?} ≠ [A1,A2]e = {expected:?}")
            }
            TorsionOutcome::FiberEmpty { .. } => return Err("flat connection with empty fiber".into()),
        }
        let point = flat_point(&jets, a, &e);
        ensure!(report.fibers[0].contains(&point), "flat point outside F");
        let d = torsion_diagnostic(&report, &s, 1, &point).map_err(err)?;
        ensure!(
            d.outcome.vanishes() == outcome.vanishes() && tower_image.contains(&point) == outcome.vanishes(),
            "pipelines disagree on e_{b}"
        );
    }
    Ok(certified)
}

fn criterion_6() -> Check {
    let mut r = rng(6);
    let mut certified = 0;
    let mut obstructed = 0;
    for _ in 0..50 {
        let m = r.gen_range(2..=3);
        if check_flat(&random_commuting_pair(&mut r, m), true)? {
            certified += 1;
        }
    }
    for _ in 0..50 {
        let m = r.gen_range(2..=3);
        if !check_flat(&random_noncommuting_pair(&mut r, m), false)? {
            obstructed += 1;
        }
    }
    ensure!(certified == 50 && obstructed == 50, "certified {certified}, obstructed {obstructed}");
    Ok("50 commuting pairs certified, 50 non-commuting obstructed at level 1, torsion = [A1,A2]e".into())
}

fn instances_7() -> Vec<(String, PdeSystem, Option<RawSystem>)> {
    let mut out: Vec<_> = corpus_systems().into_iter().map(|(n, s)| (n, s, None)).collect();
    let mut r = rng(7);
    for i in 0..100 {
        let raw = random_raw_system(&mut r, 3, 2, 2, 4);
        out.push((format!("random system {i}"), raw.to_system(), Some(raw)));
    }
    out
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let mut levels_checked = 0;
    let mut not_onto = 0;
    for (name, s, raw) in instances_7() {
        let cc = crosscheck(&s, 2).map_err(|e| format!("{name}: {e}"))?;
        if prolongation_tower(&s, 2).map_err(err)?.surjective().contains(&false) {
            not_onto += 1;
        }
        for c in &cc {
            ensure!(c.agrees(), "{name}: level {} disagrees: {c:?}", c.level);
            levels_checked += 1;
        }
        if let Some(raw) = raw {
            let oracle = tower_matches_oracle(&s, &raw, 2).map_err(|e| format!("{name}: {e}"))?;
            for c in &cc {
                ensure!(c.prol_dim == oracle[c.level].fiber, "{name}: Prol dim vs oracle fiber");
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 60.0, "took {secs:.1}s (target 60s)");
    Ok(format!(
        "6 corpus + 100 random systems ({not_onto} with a projection that is not onto), {levels_checked} levels agree, {secs:.1}s"
    ))
}

fn criterion_8() -> Check {
    let mut checked = 0;
    for (name, s, _) in instances_7() {
        let report = prolongation_tower(&s, 2).map_err(err)?;
        for i in 1..=2 {
            let c = pde_to_relconn(&report.systems[i - 1]).map_err(err)?;
            let p = classical_prolongation_fiber(&c).map_err(err)?;
            let g1 = prolong(&symbol_map(&c)).map_err(err)?;
            ensure!(
                p.dim() == g1.dim() + p.projection_image().dim(),
                "{name}, level {i}: dim Prol {} ≠ {} + {}",
                p.dim(),
                g1.dim(),
                p.projection_image().dim()
            );
            ensure!(p.kernel_part().dim() == g1.dim(), "{name}, level {i}: kernel part");
            checked += 1;
        }
    }
    Ok(format!("{checked} connections: dim Prol = dim g^(1) + dim image"))
}

/// `{(0, ψ) : σψ_i = 0 for all i}`, the freedom in choosing a lift.
fn lift_shifts(c: &RelConn) -> Vec<Vec<Rational>> {
    let s = c.source_dim();
    let ker = formint::ratlin::kernel(c.sigma());
    let mut out = Vec::new();
    for i in 0..c.n() {
        for v in ker.basis_vectors() {
            let mut jet = vec![Rational::zero(); c.jet_dim()];
            jet[s + i * s..s + (i + 1) * s].clone_from_slice(&v);
            out.push(jet);
        }
    }
    out
}

fn criterion_9() -> Check {
    let mut r = rng(9);
    let mut obstructed = 0;
    let mut shifts_tried = 0;
    for case in 0..100 {
        let c = random_relconn(&mut r);
        let im = delta_d_image(&c);
        let shifts = lift_shifts(&c);
        for b in 0..c.source_dim() {
            let mut e = vec![Rational::zero(); c.source_dim()];
            e[b] = q(1);
            let TorsionOutcome::Obstructed { class, lift, .. } = torsion_at(&c, &e).map_err(err)? else {
                continue;
            };
            obstructed += 1;
            ensure!(im.reduce(&fiberwise_k(&c, &lift).map_err(err)?) == class, "case {case}: class of returned lift");
            for _ in 0..3 {
                let mut other = lift.clone();
                for sh in &shifts {
                    let t = small_rational(&mut r);
                    for (x, y) in other.iter_mut().zip(sh) {
                        *x += t.clone() * y;
                    }
                }
                let k = fiberwise_k(&c, &other).map_err(err)?;
                ensure!(im.reduce(&k) == class, "case {case}, e_{b}: class changed under a kernel shift");
                ensure!(
                    torsion_class_of_lift(&c, &other).map_err(err)? == class,
                    "case {case}, e_{b}: torsion_class_of_lift differs"
                );
                shifts_tried += 1;
            }
        }
    }
    ensure!(obstructed >= 20, "only {obstructed} obstructed points, the check is too weak");
    Ok(format!("100 connections, {obstructed} obstructed points, {shifts_tried} shifted lifts"))
}

fn run(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let args: Vec<String> = std::iter::once("formint").chain(args.iter().copied()).map(String::from).collect();
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let code = run_with_io(&args, &mut out, &mut errs);
    (code, out, errs)
}

fn criterion_10() -> Check {
    let commands: [&[&str]; 6] = [
        &["symbol"],
        &["tower", "--levels", "3"],
        &["cohomology", "--l-max", "2", "--m-max", "2"],
        &["goldschmidt", "--l-max", "3"],
        &["finite-type", "--l-max", "3", "--levels", "3"],
        &["crosscheck", "--levels", "2"],
    ];
    let mut runs = 0;
    for path in corpus_files() {
        let file = path.to_string_lossy().into_owned();
        for cmd in commands {
            let mut args = vec![cmd[0], file.as_str()];
            args.extend_from_slice(&cmd[1..]);
            args.extend_from_slice(&["--json", "-"]);
            let (c1, o1, e1) = run(&args);
            let (c2, o2, _) = run(&args);
            ensure!(c1 == 0 && c2 == 0, "{args:?}: exit {c1}: {}", String::from_utf8_lossy(&e1));
            ensure!(o1 == o2, "{args:?}: outputs differ");
            let v: serde_json::Value = serde_json::from_slice(&o1).map_err(err)?;
            ensure!(v["schema_version"] == 1, "{args:?}: schema version");
            runs += 1;
        }
        let text = std::fs::read_to_string(&path).map_err(err)?;
        let s = parse(&text).map_err(err)?;
        ensure!(print(&s) == text, "{file}: print(parse(text)) ≠ text");
        ensure!(parse(&print(&s)).map_err(err)? == s, "{file}: parse(print(s)) ≠ s");
    }
    Ok(format!("{runs} command runs byte-identical, corpus round trip exact"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("δ∘δ = 0 on ambient and restricted complexes", criterion_1),
        ("H^(l,1) = 0", criterion_2),
        ("full tableau ranks and cohomology", criterion_3),
        ("Cauchy–Riemann tower and Goldschmidt verdict", criterion_4),
        ("Laplace tower", criterion_5),
        ("flat connections: commuting iff certified", criterion_6),
        ("relative-connection and formal prolongation agree", criterion_7),
        ("exact sequence 0 → g^(1) → Prol → E", criterion_8),
        ("torsion class independent of the lift", criterion_9),
        ("CLI determinism and corpus round trip", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
