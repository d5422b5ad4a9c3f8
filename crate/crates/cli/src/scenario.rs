//! The `twistcalc-scenario 1` text format: syntax tree, parser and printer.

use std::fmt::{self, Write as _};

use twistcalc_core::dgalg::Side;
use twistcalc_core::exactalg::{Field, Scalar};

use crate::error::{CliError, CliResult};

pub const HEADER: &str = "twistcalc-scenario 1";

/// A module word `X * M * …`; atoms are bimodule names or `diag(A)`.
pub type Word = Vec<String>;

/// Blocks of a graded map keyed by source degree, rows listed top to bottom.
pub type Blocks = Vec<Block>;

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub degree: i32,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraDef {
    Ground,
    TruncatedPolynomial { degree: i32, top: usize },
    ResolvedDualNumbers,
    Explicit {
        basis: Vec<(String, i32)>,
        unit: Vec<Scalar>,
        products: Vec<(String, String, Vec<Scalar>)>,
        idempotents: Vec<Vec<Scalar>>,
        differential: Blocks,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum BimoduleDef {
    FreeRight { left: String, right: String, shifts: Vec<i32> },
    FreeLeft { left: String, right: String, shifts: Vec<i32> },
    Diagonal(String),
    Zero { left: String, right: String },
    Tensor(Word),
    Shift { source: String, by: i32 },
    Dual(String),
    DirectSum(Vec<String>),
    RestrictLeft { source: String, ground: String },
    RestrictRight { source: String, ground: String },
    Explicit {
        left: String,
        right: String,
        basis: Vec<(String, i32)>,
        differential: Blocks,
        left_action: Vec<(String, Blocks)>,
        right_action: Vec<(String, Blocks)>,
        semifree: Vec<(Side, Vec<Vec<Scalar>>)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapDef {
    Explicit { source: Word, target: Word, degree: i32, blocks: Blocks },
    Identity(Word),
    Zero { source: Word, target: Word, degree: i32 },
    Pairing { m: String, n: String },
    SolveAction { m: String, n: String, trace: String },
    Evaluation { m: String, dual: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum AdjunctionDef {
    Given { m: String, n: String, trace: String, action: String, zeta: Option<(String, String)> },
    Free { m: String, n: String },
    DualLeft { m: String, l: String },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PnDef {
    pub adjunction: String,
    pub h: String,
    pub terms: Vec<String>,
    pub higher: Vec<(usize, usize, String)>,
    pub isos: Vec<(usize, String)>,
    /// `None` asks the solver for one.
    pub gamma: Option<String>,
    pub left: Option<String>,
    pub inverse: Option<String>,
    pub psi: Option<String>,
    pub psi_prime: Option<String>,
    pub mu_top: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ItemDef {
    Algebra(AlgebraDef),
    Bimodule(BimoduleDef),
    Map(MapDef),
    Adjunction(AdjunctionDef),
    Uniqueness { adjunction: String, x: String, f: String, h0: Option<String> },
    Complex { terms: Vec<(i32, String)>, q: Vec<(usize, usize, String)> },
    Pn(PnDef),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Item {
    pub name: String,
    pub def: ItemDef,
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self.def {
            ItemDef::Algebra(_) => "algebra",
            ItemDef::Bimodule(_) => "bimodule",
            ItemDef::Map(_) => "map",
            ItemDef::Adjunction(_) => "adjunction",
            ItemDef::Uniqueness { .. } => "uniqueness",
            ItemDef::Complex { .. } => "complex",
            ItemDef::Pn(_) => "pn",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioFile {
    pub field: Field,
    pub assumptions: Vec<String>,
    pub items: Vec<Item>,
    /// Source line of each item, for error locations.
    pub lines: Vec<usize>,
}

impl PartialEq for ScenarioFile {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.assumptions == other.assumptions && self.items == other.items
    }
}

impl ScenarioFile {
    pub fn new(field: Field) -> ScenarioFile {
        ScenarioFile {
            field,
            assumptions: Vec::new(),
            items: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, def: ItemDef) -> &mut Self {
        self.items.push(Item { name: name.into(), def });
        self.lines.push(0);
        self
    }

    pub fn line_of(&self, i: usize) -> usize {
        self.lines.get(i).copied().unwrap_or(0)
    }
}

// ---------------------------------------------------------------- parsing

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
    text: &'a str,
}

struct Cursor<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    field: Field,
    block: String,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.pos)
    }

    fn next(&mut self) -> Option<&Line<'a>> {
        let l = self.lines.get(self.pos);
        self.pos += 1;
        l
    }

    fn line_no(&self) -> usize {
        self.lines
            .get(self.pos.saturating_sub(1))
            .map_or(0, |l| l.number)
    }

    fn err(&self, message: impl Into<String>) -> CliError {
        CliError::Parse {
            line: self.line_no(),
            block: self.block.clone(),
            message: message.into(),
        }
    }

    fn scalar(&self, t: &str) -> CliResult<Scalar> {
        self.field.parse(t).map_err(|e| self.err(e.to_string()))
    }

    fn scalars(&self, ts: &[&str]) -> CliResult<Vec<Scalar>> {
        ts.iter().map(|t| self.scalar(t)).collect()
    }

    fn int<T: std::str::FromStr>(&self, t: &str) -> CliResult<T> {
        t.parse().map_err(|_| self.err(format!("expected an integer, got `{t}`")))
    }
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then(|| Line {
                number: i + 1,
                tokens: body.split_whitespace().collect(),
                text: body,
            })
        })
        .collect()
}

fn parse_field(c: &Cursor<'_>, tokens: &[&str]) -> CliResult<Field> {
    match tokens {
        ["field", "rational"] => Ok(Field::Rational),
        ["field", "prime", p] => {
            let p: u64 = c.int(p)?;
            Field::prime(p).map_err(|e| c.err(e.to_string()))
        }
        _ => Err(c.err("expected `field rational` or `field prime <p>`")),
    }
}

/// `X * M -> N * M`.
fn split_arrow<'t>(c: &Cursor<'_>, tokens: &'t [&'t str]) -> CliResult<(Word, Word, &'t [&'t str])> {
    let arrow = tokens
        .iter()
        .position(|t| *t == "->")
        .ok_or_else(|| c.err("expected `source -> target`"))?;
    let source = word(c, &tokens[..arrow])?;
    let rest = &tokens[arrow + 1..];
    let end = rest.iter().position(|t| *t == "degree").unwrap_or(rest.len());
    let target = word(c, &rest[..end])?;
    Ok((source, target, &rest[end..]))
}

fn word(c: &Cursor<'_>, tokens: &[&str]) -> CliResult<Word> {
    let mut out = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if i % 2 == 1 {
            if *t != "*" {
                return Err(c.err(format!("expected `*` between atoms, got `{t}`")));
            }
        } else {
            out.push(t.to_string());
        }
    }
    if out.is_empty() || tokens.len() % 2 == 0 {
        return Err(c.err("empty or unterminated module word"));
    }
    Ok(out)
}

fn degree_tail(c: &Cursor<'_>, rest: &[&str]) -> CliResult<i32> {
    match rest {
        ["degree", d] => c.int(d),
        _ => Err(c.err("expected `degree <d>`")),
    }
}

fn basis(c: &Cursor<'_>, tokens: &[&str]) -> CliResult<Vec<(String, i32)>> {
    tokens
        .iter()
        .map(|t| {
            let (name, d) = t
                .rsplit_once(':')
                .ok_or_else(|| c.err(format!("basis entry `{t}` is not `name:degree`")))?;
            Ok((name.to_string(), c.int(d)?))
        })
        .collect()
}

/// Reads consecutive `block d r c` entries and their rows.
fn blocks(c: &mut Cursor<'_>) -> CliResult<Blocks> {
    let mut out = Vec::new();
    while let Some(["block", d, r, k]) = c.peek().map(|l| l.tokens.as_slice()) {
        let (d, r, k) = (d.to_string(), r.to_string(), k.to_string());
        c.next();
        let (degree, rows, cols): (i32, usize, usize) = (c.int(&d)?, c.int(&r)?, c.int(&k)?);
        let mut entries = Vec::with_capacity(rows);
        for _ in 0..rows {
            let toks: Vec<String> = match c.next() {
                Some(l) => l.tokens.iter().map(|s| s.to_string()).collect(),
                None => return Err(c.err("matrix ended early")),
            };
            if toks.len() != cols {
                return Err(c.err(format!("row has {} entries, expected {cols}", toks.len())));
            }
            let refs: Vec<&str> = toks.iter().map(String::as_str).collect();
            entries.push(c.scalars(&refs)?);
        }
        out.push(Block {
            degree,
            rows,
            cols,
            entries,
        });
    }
    Ok(out)
}

fn expect_end(c: &mut Cursor<'_>) -> CliResult<()> {
    match c.next().map(|l| l.tokens.as_slice()) {
        Some(["end"]) => Ok(()),
        _ => Err(c.err("expected `end`")),
    }
}

fn parse_algebra(c: &mut Cursor<'_>, rest: &[String]) -> CliResult<AlgebraDef> {
    let r: Vec<&str> = rest.iter().map(String::as_str).collect();
    match r.as_slice() {
        ["ground"] => Ok(AlgebraDef::Ground),
        ["truncated-polynomial", d, t] => Ok(AlgebraDef::TruncatedPolynomial {
            degree: c.int(d)?,
            top: c.int(t)?,
        }),
        ["resolved-dual-numbers"] => Ok(AlgebraDef::ResolvedDualNumbers),
        ["explicit"] => {
            let mut basis_ = Vec::new();
            let mut unit = Vec::new();
            let mut products = Vec::new();
            let mut idempotents = Vec::new();
            let mut differential = Vec::new();
            loop {
                let toks: Vec<String> = match c.peek() {
                    Some(l) => l.tokens.iter().map(|s| s.to_string()).collect(),
                    None => return Err(c.err("unterminated algebra block")),
                };
                let t: Vec<&str> = toks.iter().map(String::as_str).collect();
                match t.as_slice() {
                    ["end"] => break,
                    ["basis", rest @ ..] => {
                        c.next();
                        basis_ = basis(c, rest)?;
                    }
                    ["unit", rest @ ..] => {
                        c.next();
                        unit = c.scalars(rest)?;
                    }
                    ["idempotent", rest @ ..] => {
                        c.next();
                        idempotents.push(c.scalars(rest)?);
                    }
                    ["product", a, b, "=", rest @ ..] => {
                        c.next();
                        products.push((a.to_string(), b.to_string(), c.scalars(rest)?));
                    }
                    ["differential"] => {
                        c.next();
                        differential = blocks(c)?;
                    }
                    _ => {
                        c.next();
                        return Err(c.err(format!("unexpected `{}` in algebra block", t.join(" "))));
                    }
                }
            }
            expect_end(c)?;
            Ok(AlgebraDef::Explicit {
                basis: basis_,
                unit,
                products,
                idempotents,
                differential,
            })
        }
        _ => Err(c.err("unknown algebra form")),
    }
}

fn parse_side(c: &Cursor<'_>, t: &str) -> CliResult<Side> {
    match t {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        _ => Err(c.err(format!("expected `left` or `right`, got `{t}`"))),
    }
}

fn shifts(c: &Cursor<'_>, ts: &[&str]) -> CliResult<Vec<i32>> {
    ts.iter().map(|t| c.int(t)).collect()
}

fn parse_bimodule(c: &mut Cursor<'_>, rest: &[String]) -> CliResult<BimoduleDef> {
    let r: Vec<&str> = rest.iter().map(String::as_str).collect();
    let s = |x: &str| x.to_string();
    match r.as_slice() {
        ["free-right", l, rr, sh @ ..] => Ok(BimoduleDef::FreeRight {
            left: s(l),
            right: s(rr),
            shifts: shifts(c, sh)?,
        }),
        ["free-left", l, rr, sh @ ..] => Ok(BimoduleDef::FreeLeft {
            left: s(l),
            right: s(rr),
            shifts: shifts(c, sh)?,
        }),
        ["diagonal", a] => Ok(BimoduleDef::Diagonal(s(a))),
        ["zero", l, rr] => Ok(BimoduleDef::Zero { left: s(l), right: s(rr) }),
        ["tensor", w @ ..] => Ok(BimoduleDef::Tensor(word(c, w)?)),
        ["shift", x, n] => Ok(BimoduleDef::Shift { source: s(x), by: c.int(n)? }),
        ["dual", x] => Ok(BimoduleDef::Dual(s(x))),
        ["direct-sum", parts @ ..] if !parts.is_empty() => Ok(BimoduleDef::DirectSum(parts.iter().map(|p| s(p)).collect())),
        ["restrict-left", x, g] => Ok(BimoduleDef::RestrictLeft { source: s(x), ground: s(g) }),
        ["restrict-right", x, g] => Ok(BimoduleDef::RestrictRight { source: s(x), ground: s(g) }),
        ["explicit", l, rr] => {
            let (left, right) = (s(l), s(rr));
            let mut basis_ = Vec::new();
            let mut differential = Vec::new();
            let mut left_action = Vec::new();
            let mut right_action = Vec::new();
            let mut semifree = Vec::new();
            loop {
                let toks: Vec<String> = match c.peek() {
                    Some(l) => l.tokens.iter().map(|s| s.to_string()).collect(),
                    None => return Err(c.err("unterminated bimodule block")),
                };
                let t: Vec<&str> = toks.iter().map(String::as_str).collect();
                match t.as_slice() {
                    ["end"] => break,
                    ["basis", rest @ ..] => {
                        c.next();
                        basis_ = basis(c, rest)?;
                    }
                    ["differential"] => {
                        c.next();
                        differential = blocks(c)?;
                    }
                    ["left", e] => {
                        c.next();
                        let b = blocks(c)?;
                        left_action.push((e.to_string(), b));
                    }
                    ["right", e] => {
                        c.next();
                        let b = blocks(c)?;
                        right_action.push((e.to_string(), b));
                    }
                    ["semifree", side] => {
                        c.next();
                        let side = parse_side(c, side)?;
                        let mut gens = Vec::new();
                        while let Some(["gen", ..]) = c.peek().map(|l| l.tokens.as_slice()) {
                            let toks: Vec<String> = c.next().unwrap().tokens[1..].iter().map(|s| s.to_string()).collect();
                            let refs: Vec<&str> = toks.iter().map(String::as_str).collect();
                            gens.push(c.scalars(&refs)?);
                        }
                        semifree.push((side, gens));
                    }
                    _ => {
                        c.next();
                        return Err(c.err(format!("unexpected `{}` in bimodule block", t.join(" "))));
                    }
                }
            }
            expect_end(c)?;
            Ok(BimoduleDef::Explicit {
                left,
                right,
                basis: basis_,
                differential,
                left_action,
                right_action,
                semifree,
            })
        }
        _ => Err(c.err("unknown bimodule form")),
    }
}

fn parse_map(c: &mut Cursor<'_>, rest: &[String]) -> CliResult<MapDef> {
    let r: Vec<&str> = rest.iter().map(String::as_str).collect();
    let s = |x: &str| x.to_string();
    match r.as_slice() {
        ["explicit", tail @ ..] => {
            let (source, target, d) = split_arrow(c, tail)?;
            let degree = degree_tail(c, d)?;
            let b = blocks(c)?;
            expect_end(c)?;
            Ok(MapDef::Explicit {
                source,
                target,
                degree,
                blocks: b,
            })
        }
        ["identity", w @ ..] => Ok(MapDef::Identity(word(c, w)?)),
        ["zero", tail @ ..] => {
            let (source, target, d) = split_arrow(c, tail)?;
            Ok(MapDef::Zero {
                source,
                target,
                degree: degree_tail(c, d)?,
            })
        }
        ["pairing", m, n] => Ok(MapDef::Pairing { m: s(m), n: s(n) }),
        ["solve-action", m, n, t] => Ok(MapDef::SolveAction {
            m: s(m),
            n: s(n),
            trace: s(t),
        }),
        ["evaluation", m, l] => Ok(MapDef::Evaluation { m: s(m), dual: s(l) }),
        _ => Err(c.err("unknown map form")),
    }
}

fn parse_adjunction(c: &Cursor<'_>, rest: &[String]) -> CliResult<AdjunctionDef> {
    let r: Vec<&str> = rest.iter().map(String::as_str).collect();
    let s = |x: &str| x.to_string();
    match r.as_slice() {
        ["free", m, n] => Ok(AdjunctionDef::Free { m: s(m), n: s(n) }),
        ["dual-left", m, l] => Ok(AdjunctionDef::DualLeft { m: s(m), l: s(l) }),
        [m, n, t, a] => Ok(AdjunctionDef::Given {
            m: s(m),
            n: s(n),
            trace: s(t),
            action: s(a),
            zeta: None,
        }),
        [m, n, t, a, "zeta", zm, zn] => Ok(AdjunctionDef::Given {
            m: s(m),
            n: s(n),
            trace: s(t),
            action: s(a),
            zeta: Some((s(zm), s(zn))),
        }),
        _ => Err(c.err("expected `adjunction <name> <M> <N> <trace> <action> [zeta <ζM> <ζN>]`")),
    }
}

fn parse_complex(c: &mut Cursor<'_>) -> CliResult<ItemDef> {
    let mut terms = Vec::new();
    let mut q = Vec::new();
    loop {
        let toks: Vec<String> = match c.next() {
            Some(l) => l.tokens.iter().map(|s| s.to_string()).collect(),
            None => return Err(c.err("unterminated complex block")),
        };
        let t: Vec<&str> = toks.iter().map(String::as_str).collect();
        match t.as_slice() {
            ["end"] => break,
            ["term", p, m] => terms.push((c.int(p)?, m.to_string())),
            ["q", a, b, m] => q.push((c.int(a)?, c.int(b)?, m.to_string())),
            _ => return Err(c.err(format!("unexpected `{}` in complex block", t.join(" ")))),
        }
    }
    Ok(ItemDef::Complex { terms, q })
}

fn parse_pn(c: &mut Cursor<'_>, rest: &[String]) -> CliResult<PnDef> {
    let adjunction = match rest {
        [a] => a.clone(),
        _ => return Err(c.err("expected `pn <name> <adjunction>`")),
    };
    let mut def = PnDef {
        adjunction,
        ..PnDef::default()
    };
    loop {
        let toks: Vec<String> = match c.next() {
            Some(l) => l.tokens.iter().map(|s| s.to_string()).collect(),
            None => return Err(c.err("unterminated pn block")),
        };
        let t: Vec<&str> = toks.iter().map(String::as_str).collect();
        let s = |x: &str| x.to_string();
        match t.as_slice() {
            ["end"] => break,
            ["h", h] => def.h = s(h),
            ["term", k, m] => {
                let k: usize = c.int(k)?;
                if k != def.terms.len() {
                    return Err(c.err(format!("term {k} listed out of order")));
                }
                def.terms.push(s(m));
            }
            ["higher", k, j, m] => def.higher.push((c.int(k)?, c.int(j)?, s(m))),
            ["iso", k, m] => def.isos.push((c.int(k)?, s(m))),
            ["gamma", "solve"] => def.gamma = None,
            ["gamma", m] => def.gamma = Some(s(m)),
            ["left", m] => def.left = Some(s(m)),
            ["inverse", m] => def.inverse = Some(s(m)),
            ["psi", m] => def.psi = Some(s(m)),
            ["psi-prime", m] => def.psi_prime = Some(s(m)),
            ["mu-top", m] => def.mu_top = Some(s(m)),
            _ => return Err(c.err(format!("unexpected `{}` in pn block", t.join(" ")))),
        }
    }
    if def.h.is_empty() {
        return Err(c.err("pn block needs `h <bimodule>`"));
    }
    Ok(def)
}

pub fn parse(text: &str) -> CliResult<ScenarioFile> {
    let mut c = Cursor {
        lines: tokenize(text),
        pos: 0,
        field: Field::Rational,
        block: "header".into(),
    };
    match c.next() {
        Some(l) if l.text == HEADER => {}
        _ => return Err(c.err(format!("first line must be `{HEADER}`"))),
    }
    let toks: Vec<String> = match c.next() {
        Some(l) => l.tokens.iter().map(|s| s.to_string()).collect(),
        None => return Err(c.err("missing field line")),
    };
    c.block = "field".into();
    let refs: Vec<&str> = toks.iter().map(String::as_str).collect();
    c.field = parse_field(&c, &refs)?;
    let mut out = ScenarioFile::new(c.field);
    while let Some(l) = c.next() {
        let number = l.number;
        let text = l.text.to_string();
        let toks: Vec<String> = l.tokens.iter().map(|s| s.to_string()).collect();
        if toks[0] == "assume" {
            out.assumptions.push(text["assume".len()..].trim().to_string());
            continue;
        }
        if toks.len() < 2 {
            return Err(c.err(format!("`{text}` is not an item")));
        }
        let (kind, name, rest) = (toks[0].clone(), toks[1].clone(), &toks[2..]);
        c.block = format!("{kind} {name}");
        let def = match kind.as_str() {
            "algebra" => ItemDef::Algebra(parse_algebra(&mut c, rest)?),
            "bimodule" => ItemDef::Bimodule(parse_bimodule(&mut c, rest)?),
            "map" => ItemDef::Map(parse_map(&mut c, rest)?),
            "adjunction" => ItemDef::Adjunction(parse_adjunction(&c, rest)?),
            "uniqueness" => match rest {
                [a, x, f] => ItemDef::Uniqueness {
                    adjunction: a.clone(),
                    x: x.clone(),
                    f: f.clone(),
                    h0: None,
                },
                [a, x, f, h] => ItemDef::Uniqueness {
                    adjunction: a.clone(),
                    x: x.clone(),
                    f: f.clone(),
                    h0: Some(h.clone()),
                },
                _ => return Err(c.err("expected `uniqueness <name> <adjunction> <X> <f> [h0]`")),
            },
            "complex" if rest.is_empty() => parse_complex(&mut c)?,
            "pn" => ItemDef::Pn(parse_pn(&mut c, rest)?),
            _ => return Err(c.err(format!("unknown item `{kind}`"))),
        };
        if out.items.iter().any(|i| i.name == name) {
            return Err(c.err(format!("`{name}` is defined twice")));
        }
        out.items.push(Item { name, def });
        out.lines.push(number);
    }
    Ok(out)
}

// ---------------------------------------------------------------- printing

fn join<T: fmt::Display>(xs: &[T], sep: &str) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn write_blocks(out: &mut String, indent: &str, blocks: &Blocks) {
    for b in blocks {
        let _ = writeln!(out, "{indent}block {} {} {}", b.degree, b.rows, b.cols);
        for row in &b.entries {
            let _ = writeln!(out, "{indent}  {}", join(row, " "));
        }
    }
}

fn write_basis(out: &mut String, basis: &[(String, i32)]) {
    let entries: Vec<String> = basis.iter().map(|(n, d)| format!("{n}:{d}")).collect();
    let _ = writeln!(out, "  basis {}", entries.join(" "));
}

impl fmt::Display for ScenarioFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "field {}", self.field);
        for a in &self.assumptions {
            let _ = writeln!(out, "assume {a}");
        }
        for item in &self.items {
            let name = &item.name;
            match &item.def {
                ItemDef::Algebra(a) => match a {
                    AlgebraDef::Ground => {
                        let _ = writeln!(out, "algebra {name} ground");
                    }
                    AlgebraDef::TruncatedPolynomial { degree, top } => {
                        let _ = writeln!(out, "algebra {name} truncated-polynomial {degree} {top}");
                    }
                    AlgebraDef::ResolvedDualNumbers => {
                        let _ = writeln!(out, "algebra {name} resolved-dual-numbers");
                    }
                    AlgebraDef::Explicit {
                        basis,
                        unit,
                        products,
                        idempotents,
                        differential,
                    } => {
                        let _ = writeln!(out, "algebra {name} explicit");
                        write_basis(&mut out, basis);
                        let _ = writeln!(out, "  unit {}", join(unit, " "));
                        for (a, b, v) in products {
                            let _ = writeln!(out, "  product {a} {b} = {}", join(v, " "));
                        }
                        for e in idempotents {
                            let _ = writeln!(out, "  idempotent {}", join(e, " "));
                        }
                        let _ = writeln!(out, "  differential");
                        write_blocks(&mut out, "    ", differential);
                        let _ = writeln!(out, "end");
                    }
                },
                ItemDef::Bimodule(b) => match b {
                    BimoduleDef::FreeRight { left, right, shifts } => {
                        let _ = writeln!(out, "bimodule {name} free-right {left} {right} {}", join(shifts, " "));
                    }
                    BimoduleDef::FreeLeft { left, right, shifts } => {
                        let _ = writeln!(out, "bimodule {name} free-left {left} {right} {}", join(shifts, " "));
                    }
                    BimoduleDef::Diagonal(a) => {
                        let _ = writeln!(out, "bimodule {name} diagonal {a}");
                    }
                    BimoduleDef::Zero { left, right } => {
                        let _ = writeln!(out, "bimodule {name} zero {left} {right}");
                    }
                    BimoduleDef::Tensor(w) => {
                        let _ = writeln!(out, "bimodule {name} tensor {}", w.join(" * "));
                    }
                    BimoduleDef::Shift { source, by } => {
                        let _ = writeln!(out, "bimodule {name} shift {source} {by}");
                    }
                    BimoduleDef::Dual(x) => {
                        let _ = writeln!(out, "bimodule {name} dual {x}");
                    }
                    BimoduleDef::DirectSum(parts) => {
                        let _ = writeln!(out, "bimodule {name} direct-sum {}", parts.join(" "));
                    }
                    BimoduleDef::RestrictLeft { source, ground } => {
                        let _ = writeln!(out, "bimodule {name} restrict-left {source} {ground}");
                    }
                    BimoduleDef::RestrictRight { source, ground } => {
                        let _ = writeln!(out, "bimodule {name} restrict-right {source} {ground}");
                    }
                    BimoduleDef::Explicit {
                        left,
                        right,
                        basis,
                        differential,
                        left_action,
                        right_action,
                        semifree,
                    } => {
                        let _ = writeln!(out, "bimodule {name} explicit {left} {right}");
                        write_basis(&mut out, basis);
                        let _ = writeln!(out, "  differential");
                        write_blocks(&mut out, "    ", differential);
                        for (e, b) in left_action {
                            let _ = writeln!(out, "  left {e}");
                            write_blocks(&mut out, "    ", b);
                        }
                        for (e, b) in right_action {
                            let _ = writeln!(out, "  right {e}");
                            write_blocks(&mut out, "    ", b);
                        }
                        for (side, gens) in semifree {
                            let side = match side {
                                Side::Left => "left",
                                Side::Right => "right",
                            };
                            let _ = writeln!(out, "  semifree {side}");
                            for g in gens {
                                let _ = writeln!(out, "    gen {}", join(g, " "));
                            }
                        }
                        let _ = writeln!(out, "end");
                    }
                },
                ItemDef::Map(m) => match m {
                    MapDef::Explicit {
                        source,
                        target,
                        degree,
                        blocks,
                    } => {
                        let _ = writeln!(
                            out,
                            "map {name} explicit {} -> {} degree {degree}",
                            source.join(" * "),
                            target.join(" * ")
                        );
                        write_blocks(&mut out, "  ", blocks);
                        let _ = writeln!(out, "end");
                    }
                    MapDef::Identity(w) => {
                        let _ = writeln!(out, "map {name} identity {}", w.join(" * "));
                    }
                    MapDef::Zero { source, target, degree } => {
                        let _ = writeln!(
                            out,
                            "map {name} zero {} -> {} degree {degree}",
                            source.join(" * "),
                            target.join(" * ")
                        );
                    }
                    MapDef::Pairing { m, n } => {
                        let _ = writeln!(out, "map {name} pairing {m} {n}");
                    }
                    MapDef::SolveAction { m, n, trace } => {
                        let _ = writeln!(out, "map {name} solve-action {m} {n} {trace}");
                    }
                    MapDef::Evaluation { m, dual } => {
                        let _ = writeln!(out, "map {name} evaluation {m} {dual}");
                    }
                },
                ItemDef::Adjunction(a) => match a {
                    AdjunctionDef::Given {
                        m,
                        n,
                        trace,
                        action,
                        zeta,
                    } => {
                        let z = zeta.as_ref().map(|(a, b)| format!(" zeta {a} {b}")).unwrap_or_default();
                        let _ = writeln!(out, "adjunction {name} {m} {n} {trace} {action}{z}");
                    }
                    AdjunctionDef::Free { m, n } => {
                        let _ = writeln!(out, "adjunction {name} free {m} {n}");
                    }
                    AdjunctionDef::DualLeft { m, l } => {
                        let _ = writeln!(out, "adjunction {name} dual-left {m} {l}");
                    }
                },
                ItemDef::Uniqueness { adjunction, x, f: map, h0 } => {
                    let h = h0.as_ref().map(|h| format!(" {h}")).unwrap_or_default();
                    let _ = writeln!(out, "uniqueness {name} {adjunction} {x} {map}{h}");
                }
                ItemDef::Complex { terms, q } => {
                    let _ = writeln!(out, "complex {name}");
                    for (p, m) in terms {
                        let _ = writeln!(out, "  term {p} {m}");
                    }
                    for (a, b, m) in q {
                        let _ = writeln!(out, "  q {a} {b} {m}");
                    }
                    let _ = writeln!(out, "end");
                }
                ItemDef::Pn(p) => {
                    let _ = writeln!(out, "pn {name} {}", p.adjunction);
                    let _ = writeln!(out, "  h {}", p.h);
                    for (k, t) in p.terms.iter().enumerate() {
                        let _ = writeln!(out, "  term {k} {t}");
                    }
                    for (k, j, m) in &p.higher {
                        let _ = writeln!(out, "  higher {k} {j} {m}");
                    }
                    for (k, m) in &p.isos {
                        let _ = writeln!(out, "  iso {k} {m}");
                    }
                    let _ = writeln!(out, "  gamma {}", p.gamma.as_deref().unwrap_or("solve"));
                    for (key, v) in [
                        ("left", &p.left),
                        ("inverse", &p.inverse),
                        ("psi", &p.psi),
                        ("psi-prime", &p.psi_prime),
                        ("mu-top", &p.mu_top),
                    ] {
                        if let Some(v) = v {
                            let _ = writeln!(out, "  {key} {v}");
                        }
                    }
                    let _ = writeln!(out, "end");
                }
            }
        }
        f.write_str(&out)
    }
}
