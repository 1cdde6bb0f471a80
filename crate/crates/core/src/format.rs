//! Plain-text description of a linear PDE system.
//!
//! ```text
//! # Cauchy–Riemann equations
//! base_dim = 2
//! fiber_rank = 2
//! order = 1
//! eq: u1_x1 - u2_x2 = 0
//! eq: u1_x2 + u2_x1 = 0
//! ```
//!
//! Header lines are `key = <positive integer>` for `base_dim`, `fiber_rank`
//! and `order`, each exactly once and before the first equation. An
//! equation is `eq: <term> (± <term>)* = 0` with an optional leading `-`; a
//! term is `[<rational>] [*] u<comp>[_<deriv>]` where the rational is `p` or
//! `p/q`, `<comp>` runs from 1 to `fiber_rank` and `<deriv>` is a word such
//! as `x1x1x2`. Lines starting with `#` and blank lines are ignored.
//! Equations whose terms cancel are dropped.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::jetpde::{JetSpace, PdeSystem};
use crate::ratlin::{RatMatrix, Rational};
use crate::tensorspace::MultiIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// The text does not match the grammar.
    Syntax,
    /// Well-formed text describing an invalid system (bad index, order too
    /// high, missing or repeated header key).
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::Semantic => "semantic error",
        };
        write!(f, "line {}, column {}: {kind}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

type ParseResult<T> = std::result::Result<T, ParseError>;

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t') {
            self.pos += 1;
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        self.error_at(self.column(), kind, message)
    }

    fn error_at(&self, column: usize, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            kind,
            message: message.into(),
        }
    }

    fn expected(&self, what: &str) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of line".to_string(),
        };
        self.error(ParseErrorKind::Syntax, format!("expected {what}, found {found}"))
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }
}

#[derive(Debug)]
struct RawTerm {
    column: usize,
    coefficient: Rational,
    component: usize,
    component_column: usize,
    derivatives: Vec<(usize, usize)>,
}

#[derive(Debug)]
struct RawEquation {
    line: usize,
    terms: Vec<RawTerm>,
}

fn parse_rational(cur: &mut Cursor) -> ParseResult<Option<Rational>> {
    let column = cur.column();
    let Some(p) = cur.digits() else {
        return Ok(None);
    };
    let numer: BigInt = p.parse().expect("digits");
    let denom = if cur.eat('/') {
        let Some(q) = cur.digits() else {
            return Err(cur.expected("a denominator"));
        };
        let q: BigInt = q.parse().expect("digits");
        if q.is_zero() {
            return Err(cur.error_at(column, ParseErrorKind::Semantic, "zero denominator"));
        }
        q
    } else {
        BigInt::one()
    };
    Ok(Some(Rational::new(numer, denom)))
}

fn parse_term(cur: &mut Cursor, sign: &Rational) -> ParseResult<RawTerm> {
    cur.skip_ws();
    let column = cur.column();
    let coefficient = parse_rational(cur)?;
    cur.skip_ws();
    if cur.eat('*') {
        if coefficient.is_none() {
            return Err(cur.error_at(column, ParseErrorKind::Syntax, "'*' without a coefficient"));
        }
        cur.skip_ws();
    }
    if !cur.eat('u') {
        return Err(cur.expected("a jet variable 'u<component>'"));
    }
    let component_column = cur.column();
    let Some(comp) = cur.digits() else {
        return Err(cur.expected("a component index after 'u'"));
    };
    let component: usize = comp.parse().map_err(|_| {
        cur.error_at(component_column, ParseErrorKind::Semantic, "component index too large")
    })?;
    let mut derivatives = Vec::new();
    if cur.eat('_') {
        loop {
            let var_column = cur.column();
            if !cur.eat('x') {
                if derivatives.is_empty() {
                    return Err(cur.expected("a derivative 'x<variable>'"));
                }
                break;
            }
            let Some(v) = cur.digits() else {
                return Err(cur.expected("a variable index after 'x'"));
            };
            let v: usize = v.parse().map_err(|_| {
                cur.error_at(var_column, ParseErrorKind::Semantic, "variable index too large")
            })?;
            derivatives.push((v, var_column));
        }
    }
    if matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
        return Err(cur.expected("'+', '-' or '='"));
    }
    Ok(RawTerm {
        column,
        coefficient: sign * coefficient.unwrap_or_else(Rational::one),
        component,
        component_column,
        derivatives,
    })
}

fn parse_equation(cur: &mut Cursor) -> ParseResult<RawEquation> {
    let mut terms = Vec::new();
    cur.skip_ws();
    let mut sign = if cur.eat('-') { -Rational::one() } else { Rational::one() };
    loop {
        terms.push(parse_term(cur, &sign)?);
        cur.skip_ws();
        if cur.eat('+') {
            sign = Rational::one();
        } else if cur.eat('-') {
            sign = -Rational::one();
        } else if cur.eat('=') {
            break;
        } else {
            return Err(cur.expected("'+', '-' or '= 0'"));
        }
    }
    cur.skip_ws();
    let zero_column = cur.column();
    match cur.digits() {
        Some(d) if d.chars().all(|c| c == '0') => {}
        Some(_) => {
            return Err(cur.error_at(
                zero_column,
                ParseErrorKind::Syntax,
                "right-hand side must be 0 (only homogeneous systems are supported)",
            ))
        }
        None => return Err(cur.expected("'0' after '='")),
    }
    cur.skip_ws();
    if !cur.at_end() {
        return Err(cur.expected("end of line"));
    }
    Ok(RawEquation {
        line: cur.line,
        terms,
    })
}

const KEYS: [&str; 3] = ["base_dim", "fiber_rank", "order"];

/// Parses the text of a `.pde` file.
pub fn parse(text: &str) -> ParseResult<PdeSystem> {
    let mut header: [Option<(usize, usize)>; 3] = [None; 3];
    let mut equations = Vec::new();
    let mut last_line = 0;
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let mut cur = Cursor::new(raw_line, line);
        cur.skip_ws();
        if cur.at_end() || cur.peek() == Some('#') {
            continue;
        }
        let word_column = cur.column();
        let word = cur.word();
        cur.skip_ws();
        if word == "eq" {
            if !cur.eat(':') {
                return Err(cur.expected("':' after 'eq'"));
            }
            if let Some(pos) = header.iter().position(Option::is_none) {
                return Err(cur.error_at(
                    word_column,
                    ParseErrorKind::Semantic,
                    format!("equation before header key '{}'", KEYS[pos]),
                ));
            }
            equations.push(parse_equation(&mut cur)?);
            continue;
        }
        let Some(slot) = KEYS.iter().position(|k| *k == word) else {
            if word.is_empty() {
                return Err(cur.expected("a header key or 'eq:'"));
            }
            return Err(cur.error_at(
                word_column,
                ParseErrorKind::Semantic,
                format!("unknown key '{word}' (expected base_dim, fiber_rank, order or eq)"),
            ));
        };
        if !equations.is_empty() {
            return Err(cur.error_at(
                word_column,
                ParseErrorKind::Semantic,
                format!("header key '{word}' after the first equation"),
            ));
        }
        if !cur.eat('=') {
            return Err(cur.expected("'='"));
        }
        cur.skip_ws();
        let value_column = cur.column();
        let Some(value) = cur.digits() else {
            return Err(cur.expected("a positive integer"));
        };
        cur.skip_ws();
        if !cur.at_end() {
            return Err(cur.expected("end of line"));
        }
        let value: usize = value.parse().map_err(|_| {
            cur.error_at(value_column, ParseErrorKind::Semantic, "value too large")
        })?;
        if value == 0 {
            return Err(cur.error_at(
                value_column,
                ParseErrorKind::Semantic,
                format!("'{word}' must be positive"),
            ));
        }
        if let Some((first, _)) = header[slot] {
            return Err(cur.error_at(
                word_column,
                ParseErrorKind::Semantic,
                format!("duplicate key '{word}' (first given on line {first})"),
            ));
        }
        header[slot] = Some((line, value));
    }
    if let Some(pos) = header.iter().position(Option::is_none) {
        return Err(ParseError {
            line: last_line.max(1),
            column: 1,
            kind: ParseErrorKind::Semantic,
            message: format!("missing header key '{}'", KEYS[pos]),
        });
    }
    let [n, m, k] = header.map(|h| h.expect("checked").1);
    build_system(n, m, k, &equations)
}

fn build_system(n: usize, m: usize, k: usize, equations: &[RawEquation]) -> ParseResult<PdeSystem> {
    let jets = JetSpace::new(n, m, k);
    let mut rows = Vec::with_capacity(equations.len());
    for eq in equations {
        let mut row = vec![Rational::zero(); jets.dim()];
        for term in &eq.terms {
            let err = |column: usize, message: String| ParseError {
                line: eq.line,
                column,
                kind: ParseErrorKind::Semantic,
                message,
            };
            if term.component == 0 || term.component > m {
                return Err(err(
                    term.component_column,
                    format!("component u{} out of range 1..={m}", term.component),
                ));
            }
            let mut exps = vec![0; n];
            for &(v, column) in &term.derivatives {
                if v == 0 || v > n {
                    return Err(err(column, format!("variable x{v} out of range 1..={n}")));
                }
                exps[v - 1] += 1;
            }
            if term.derivatives.len() > k {
                return Err(err(
                    term.column,
                    format!("derivative of order {} exceeds the system order {k}", term.derivatives.len()),
                ));
            }
            let idx = jets
                .index(term.component - 1, &MultiIndex::new(exps))
                .expect("validated index");
            row[idx] += &term.coefficient;
        }
        // an equation whose terms cancel carries no condition
        if row.iter().any(|x| !x.is_zero()) {
            rows.push(row);
        }
    }
    let matrix = RatMatrix::from_rows(jets.dim(), rows);
    Ok(PdeSystem::new(n, m, k, matrix).expect("shape matches jet space"))
}

pub fn parse_file(path: impl AsRef<Path>) -> Result<PdeSystem> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse(&text)?)
}

fn format_coefficient(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Canonical text: header, then one line per nonzero equation with terms
/// by decreasing order and jet position, unit coefficients omitted.
pub fn print(s: &PdeSystem) -> String {
    let jets = s.jet_space();
    let coords = jets.coordinates();
    let mut out = format!(
        "base_dim = {}\nfiber_rank = {}\norder = {}\n",
        s.n(),
        s.m(),
        s.k()
    );
    for r in 0..s.equations().rows() {
        let mut terms: Vec<(usize, &Rational)> = s
            .equations()
            .row(r)
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .collect();
        if terms.is_empty() {
            continue;
        }
        terms.sort_by_key(|(idx, _)| (std::cmp::Reverse(coords[*idx].multi_index.degree()), *idx));
        let mut line = String::from("eq:");
        for (pos, (idx, value)) in terms.into_iter().enumerate() {
            let sign = if value.is_negative() { "-" } else { "+" };
            if pos == 0 {
                line.push(' ');
                if value.is_negative() {
                    line.push('-');
                }
            } else {
                line.push_str(&format!(" {sign} "));
            }
            let magnitude = value.abs();
            if !magnitude.is_one() {
                line.push_str(&format_coefficient(&magnitude));
                line.push(' ');
            }
            line.push_str(&coords[idx].to_string());
        }
        line.push_str(" = 0\n");
        out.push_str(&line);
    }
    out
}
