//! Command-line driver: `formint <verb> <file> [options]`.
//!
//! Exit status 0 means the analysis ran (obstructions included), 1 means bad
//! input or arguments, 2 means an internal invariant failed.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::format::parse_file;
use crate::jetpde::{
    crosscheck, finite_type_integrability, goldschmidt_check, prolongation_tower, symbol_tableau,
    torsion_diagnostic, FiniteTypeVerdict, GoldschmidtVerdict, IntegrabilityReport, JetSpace,
    PdeSystem, TowerVerdict,
};
use crate::ratlin::format_vector;
use crate::report::{self, basis_ref, ReportDocument, VerdictSection, WitnessSection};
use crate::spencer::cohomology;
use crate::tableau::{classify_type, tower};

#[derive(Debug, Parser)]
#[command(name = "formint", version, about = "Formal integrability of linear constant-coefficient PDE systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symbol dimension, tableau prolongation ranks and type.
    Symbol {
        #[command(flatten)]
        common: Common,
        /// Number of tableau prolongations to compute.
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Prolongation tower with surjectivity of each projection.
    Tower {
        #[command(flatten)]
        common: Common,
        /// Number of prolongation levels.
        #[arg(long)]
        levels: usize,
    },
    /// Spencer cohomology table of the symbol.
    Cohomology {
        #[command(flatten)]
        common: Common,
        /// Largest prolongation index l.
        #[arg(long = "l-max")]
        l_max: usize,
        /// Largest form degree m.
        #[arg(long = "m-max")]
        m_max: usize,
    },
    /// First-level surjectivity plus 2-acyclicity of the symbol.
    Goldschmidt {
        #[command(flatten)]
        common: Common,
        /// Largest prolongation index l.
        #[arg(long = "l-max")]
        l_max: usize,
    },
    /// Integrability through the finite type of the symbol.
    FiniteType {
        #[command(flatten)]
        common: Common,
        /// Largest prolongation index l.
        #[arg(long = "l-max")]
        l_max: usize,
        /// Number of prolongation levels.
        #[arg(long)]
        levels: usize,
    },
    /// Compares the relative-connection and formal prolongation pipelines.
    Crosscheck {
        #[command(flatten)]
        common: Common,
        /// Number of prolongation levels.
        #[arg(long)]
        levels: usize,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// System description file.
    pub file: PathBuf,
    /// Write the JSON report to a path, or to standard output with `-`.
    #[arg(long, value_name = "PATH")]
    pub json: Option<String>,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Symbol { common, .. }
            | Command::Tower { common, .. }
            | Command::Cohomology { common, .. }
            | Command::Goldschmidt { common, .. }
            | Command::FiniteType { common, .. }
            | Command::Crosscheck { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Symbol { .. } => "symbol",
            Command::Tower { .. } => "tower",
            Command::Cohomology { .. } => "cohomology",
            Command::Goldschmidt { .. } => "goldschmidt",
            Command::FiniteType { .. } => "finite-type",
            Command::Crosscheck { .. } => "crosscheck",
        }
    }
}

/// A finished analysis: the report plus the exit status it warrants.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: ReportDocument,
    pub status: i32,
}

fn input_label(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Runs a parsed command on a parsed system.
pub fn analyze(command: &Command, s: &PdeSystem) -> Result<Outcome> {
    let label = input_label(&command.common().file);
    let mut doc = ReportDocument::new(command.name(), &label, s);
    let mut status = 0;
    match command {
        Command::Symbol { levels, .. } => {
            doc.symbol = Some(symbol_only(s, *levels)?);
        }
        Command::Tower { levels, .. } => {
            let r = prolongation_tower(s, *levels)?;
            doc.symbol = Some(symbol_from_tower(s, &r, *levels)?);
            doc.tower = Some(report::tower_section(&r));
            doc.verdict = Some(report::tower_verdict(&r));
            doc.certification_basis = Some(match r.verdict {
                TowerVerdict::ObstructedAt { level, .. } => format!("torsion({level})"),
                _ => report::certification_basis(&r.basis),
            });
            doc.witnesses = obstruction_witnesses(s, &r)?;
        }
        Command::Cohomology { l_max, m_max, .. } => {
            if *m_max == 0 {
                return Err(Error::InvalidArgument("--m-max must be at least 1".into()));
            }
            let t = symbol_tableau(s);
            let tw = tower(&t, l_max + 1)?;
            let c = cohomology(tw.chain(), *l_max, *m_max, true)?;
            doc.symbol = Some(symbol_only(s, *l_max)?);
            doc.cohomology = Some(report::cohomology_section(&c));
            doc.witnesses = report::cohomology_witnesses(&c, s.n(), s.m(), s.k());
        }
        Command::Goldschmidt { l_max, .. } => {
            let g = goldschmidt_check(s, *l_max)?;
            doc.symbol = Some(symbol_only(s, *l_max)?);
            doc.cohomology = Some(report::cohomology_section(&g.cohomology));
            let (verdict, basis) = report::goldschmidt_verdict(&g);
            doc.verdict = Some(verdict);
            doc.certification_basis = Some(basis);
            match &g.verdict {
                GoldschmidtVerdict::Obstructed { .. } => {
                    let r = prolongation_tower(s, 1)?;
                    doc.tower = Some(report::tower_section(&r));
                    doc.certification_basis = Some("torsion(1)".into());
                    doc.witnesses = obstruction_witnesses(s, &r)?;
                }
                GoldschmidtVerdict::NotTwoAcyclic { l, cocycle } => {
                    let desc = crate::tensorspace::TensorSpaceDesc::new(s.n(), 2, (s.k() + l) as i64, s.m());
                    doc.witnesses.push(WitnessSection {
                        kind: format!("cohomology-class H^({l},2)"),
                        level: Some(*l),
                        labels: report::tensor_labels(&desc),
                        vector: format_vector(cocycle),
                    });
                }
                _ => {}
            }
        }
        Command::FiniteType { l_max, levels, .. } => {
            let v = finite_type_integrability(s, *l_max, *levels)?;
            let r = prolongation_tower(s, *levels)?;
            doc.symbol = Some(symbol_only(s, *l_max)?);
            doc.tower = Some(report::tower_section(&r));
            let (verdict, basis) = report::finite_type_verdict(&v);
            doc.verdict = Some(verdict);
            doc.certification_basis = Some(basis);
            if let FiniteTypeVerdict::ObstructedAt { level, .. } = v {
                doc.certification_basis = Some(format!("torsion({level})"));
                doc.witnesses = obstruction_witnesses(s, &r)?;
            }
        }
        Command::Crosscheck { levels, .. } => {
            let r = prolongation_tower(s, *levels)?;
            let c = crosscheck(s, *levels)?;
            let agree = c.iter().all(|l| l.agrees());
            doc.symbol = Some(symbol_from_tower(s, &r, *levels)?);
            doc.tower = Some(report::tower_section(&r));
            doc.crosscheck = Some(report::crosscheck_section(&c));
            doc.verdict = Some(VerdictSection {
                verdict: if agree { "pipelines-agree" } else { "pipelines-disagree" }.into(),
                level: Some(*levels),
                l: None,
                basis_ref: basis_ref::PROLONGATION_EQUIVALENCE.into(),
            });
            if !agree {
                status = 2;
            }
        }
    }
    Ok(Outcome { report: doc, status })
}

fn symbol_only(s: &PdeSystem, levels: usize) -> Result<report::SymbolSection> {
    let t = symbol_tableau(s);
    let tw = tower(&t, levels)?;
    let verdict = classify_type(&t, levels)?;
    Ok(report::symbol_section(t.dim(), tw.chain().ranks(), verdict))
}

fn symbol_from_tower(s: &PdeSystem, r: &IntegrabilityReport, levels: usize) -> Result<report::SymbolSection> {
    let t = symbol_tableau(s);
    let verdict = classify_type(&t, levels)?;
    Ok(report::symbol_section(t.dim(), r.symbol_dims(), verdict))
}

fn obstruction_witnesses(s: &PdeSystem, r: &IntegrabilityReport) -> Result<Vec<WitnessSection>> {
    let TowerVerdict::ObstructedAt { level, witness } = &r.verdict else {
        return Ok(Vec::new());
    };
    let jets = JetSpace::new(s.n(), s.m(), s.k() + level - 1);
    let mut out = vec![report::projection_witness(*level, &jets, witness)];
    let d = torsion_diagnostic(r, s, *level, witness)?;
    if d.outcome.vanishes() {
        return Err(Error::Invariant(format!(
            "level {level}: a point outside the projection image has vanishing torsion"
        )));
    }
    if let Some(home) = &d.cohomology_home {
        if !home.verified() {
            return Err(Error::Invariant(format!(
                "level {level}: torsion representative is not a nonzero class of H^({},2)",
                home.l
            )));
        }
    }
    out.extend(report::torsion_witnesses(s, &d));
    Ok(out)
}

/// Human-readable rendering of a report.
pub fn render_table(doc: &ReportDocument) -> String {
    let mut o = String::new();
    let sys = &doc.system;
    let _ = writeln!(o, "{} {}", doc.command, doc.input);
    let _ = writeln!(
        o,
        "system: n = {}, m = {}, k = {}; {} equations of rank {}; jet dim {}; solution fiber dim {}",
        sys.n, sys.m, sys.k, sys.equations, sys.equation_rank, sys.jet_dim, sys.solution_fiber_dim
    );
    if let Some(sym) = &doc.symbol {
        let _ = writeln!(
            o,
            "symbol: dim {}; prolongation ranks {:?}; {} {}",
            sym.dim, sym.tower_ranks, sym.type_.verdict, sym.type_.l
        );
    }
    if let Some(c) = &doc.cohomology {
        let _ = writeln!(o, "cohomology (dim H^(l,m)):");
        let mut header = String::from("  l\\m");
        for m in 1..=c.m_max {
            let _ = write!(header, "{m:>5}");
        }
        let _ = writeln!(o, "{header}");
        for l in 0..=c.l_max {
            let mut row = format!("  {l:<3}");
            for m in 1..=c.m_max {
                let d = c.entries.iter().find(|e| e.l == l && e.m == m).map(|e| e.dim);
                match d {
                    Some(d) => {
                        let _ = write!(row, "{d:>5}");
                    }
                    None => row.push_str("    -"),
                }
            }
            let _ = writeln!(o, "{row}");
        }
        for a in &c.acyclicity {
            let at = match (a.l, a.m) {
                (Some(l), Some(m)) => format!(" (l = {l}, m = {m})"),
                (Some(l), None) => format!(" (l = {l})"),
                _ => String::new(),
            };
            let _ = writeln!(o, "  {}-acyclic: {}{}", a.r, a.verdict, at);
        }
    }
    if let Some(levels) = &doc.tower {
        let _ = writeln!(o, "tower:");
        let _ = writeln!(o, "  {:>5} {:>6} {:>7} {:>6} {:>5}", "level", "fiber", "symbol", "image", "onto");
        for l in levels {
            let image = l.projection_image_dim.map_or("-".to_string(), |d| d.to_string());
            let onto = l.surjective.map_or("-", |b| if b { "yes" } else { "no" });
            let _ = writeln!(
                o,
                "  {:>5} {:>6} {:>7} {:>6} {:>5}",
                l.level, l.fiber_dim, l.symbol_dim, image, onto
            );
        }
    }
    if let Some(levels) = &doc.crosscheck {
        let _ = writeln!(o, "crosscheck:");
        let _ = writeln!(
            o,
            "  {:>5} {:>5} {:>6} {:>10} {:>11} {:>6}",
            "level", "prol", "fiber", "prol image", "tower image", "agree"
        );
        for c in levels {
            let _ = writeln!(
                o,
                "  {:>5} {:>5} {:>6} {:>10} {:>11} {:>6}",
                c.level,
                c.prol_dim,
                c.fiber_dim,
                c.prol_image_dim,
                c.tower_image_dim,
                if c.images_agree { "yes" } else { "no" }
            );
        }
    }
    if let Some(v) = &doc.verdict {
        let mut line = format!("verdict: {}", v.verdict);
        if let Some(level) = v.level {
            let _ = write!(line, " level={level}");
        }
        if let Some(l) = v.l {
            let _ = write!(line, " l={l}");
        }
        let _ = writeln!(o, "{line}");
        let _ = writeln!(o, "  basis: {}", v.basis_ref);
    }
    if let Some(b) = &doc.certification_basis {
        let _ = writeln!(o, "certification basis: {b}");
    }
    for w in &doc.witnesses {
        let _ = writeln!(o, "witness {}:", w.kind);
        let width = w.labels.iter().map(String::len).max().unwrap_or(0);
        for (i, x) in w.vector.iter().enumerate() {
            if x == "0" {
                continue;
            }
            match w.labels.get(i) {
                Some(label) => {
                    let _ = writeln!(o, "  {label:<width$}  {x}");
                }
                None => {
                    let _ = writeln!(o, "  [{i}]  {x}");
                }
            }
        }
    }
    o
}

fn exit_code(e: &Error) -> i32 {
    if e.is_invariant_violation() {
        2
    } else {
        1
    }
}

/// Runs the CLI with explicit arguments (the first is the program name) and
/// output streams, returning the exit status.
pub fn run_with_io(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    execute(&cli.command, out, err)
}

/// Parses the input file, runs the analysis and writes the outputs.
pub fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let common = command.common();
    let system = match parse_file(&common.file) {
        Ok(s) => s,
        Err(e) => {
            match &e {
                Error::Parse(_) => {
                    let _ = writeln!(err, "error: {}: {e}", common.file.display());
                }
                _ => {
                    let _ = writeln!(err, "error: {e}");
                }
            }
            return exit_code(&e);
        }
    };
    let outcome = match analyze(command, &system) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let json = outcome.report.to_json();
    match common.json.as_deref() {
        Some("-") => {
            let _ = out.write_all(json.as_bytes());
        }
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                let _ = writeln!(err, "error: {path}: {e}");
                return 1;
            }
            let _ = out.write_all(render_table(&outcome.report).as_bytes());
        }
        None => {
            let _ = out.write_all(render_table(&outcome.report).as_bytes());
        }
    }
    if outcome.status == 2 {
        let _ = writeln!(err, "error: internal invariant violated: prolongation pipelines disagree");
    }
    outcome.status
}

/// Entry point for the binary.
pub fn main_with_args(args: impl IntoIterator<Item = String>) -> i32 {
    let args: Vec<String> = args.into_iter().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with_io(&args, &mut out, &mut err);
    let _ = out.flush();
    code
}
