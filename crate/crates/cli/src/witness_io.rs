//! `twistcalc-witness 1` files: a witness with its differentials, readable
//! and re-verifiable without the scenario that produced it.

use std::fmt::Write as _;
use std::path::Path;

use twistcalc_core::exactalg::{Field, GradedMap, GradedSpace, Matrix};
use twistcalc_core::witness::Witness;

use crate::error::{CliError, CliResult};
use crate::export::blocks;

pub const HEADER: &str = "twistcalc-witness 1";

fn space(s: &GradedSpace) -> String {
    let parts: Vec<String> = s.dims().iter().filter(|(_, n)| **n > 0).map(|(d, n)| format!("{d}:{n}")).collect();
    parts.join(" ")
}

fn write_map(out: &mut String, name: &str, g: &GradedMap) {
    let _ = writeln!(out, "map {name}");
    let _ = writeln!(out, "  source {}", space(g.source()));
    let _ = writeln!(out, "  target {}", space(g.target()));
    let _ = writeln!(out, "  degree {}", g.degree());
    for b in blocks(g) {
        let _ = writeln!(out, "  block {} {} {}", b.degree, b.rows, b.cols);
        for row in &b.entries {
            let r: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "    {}", r.join(" "));
        }
    }
    let _ = writeln!(out, "end");
}

pub fn to_text(w: &Witness) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let maps: Vec<(&str, &GradedMap)> = match w {
        Witness::NullHomotopy {
            d_source, d_target, f, h, ..
        } => vec![("d_source", d_source), ("d_target", d_target), ("f", f), ("h", h)],
        Witness::Equivalence {
            d_source,
            d_target,
            f,
            g,
            h1,
            h2,
            ..
        } => vec![
            ("d_source", d_source),
            ("d_target", d_target),
            ("f", f),
            ("g", g),
            ("h1", h1),
            ("h2", h2),
        ],
    };
    let _ = writeln!(out, "field {}", maps[0].1.field());
    let _ = writeln!(out, "kind {}", w.kind());
    let _ = writeln!(out, "label {}", w.label());
    for (name, g) in maps {
        write_map(&mut out, name, g);
    }
    out
}

struct Reader<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, message: impl Into<String>) -> CliError {
        CliError::Parse {
            line: self.lines.get(self.pos.saturating_sub(1)).map_or(0, |l| l.0),
            block: "witness".into(),
            message: message.into(),
        }
    }

    fn next(&mut self) -> CliResult<&'a str> {
        let l = self.lines.get(self.pos).map(|l| l.1);
        self.pos += 1;
        l.ok_or_else(|| self.err("unexpected end of file"))
    }

    fn keyed(&mut self, key: &str) -> CliResult<&'a str> {
        let l = self.next()?;
        match l.strip_prefix(key) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok(rest.trim()),
            _ => Err(self.err(format!("expected `{key}`"))),
        }
    }

    fn int<T: std::str::FromStr>(&self, t: &str) -> CliResult<T> {
        t.parse().map_err(|_| self.err(format!("expected an integer, got `{t}`")))
    }

    fn space(&mut self, key: &str) -> CliResult<GradedSpace> {
        let rest = self.keyed(key)?;
        let dims = rest
            .split_whitespace()
            .map(|p| {
                let (d, n) = p.split_once(':').ok_or_else(|| self.err(format!("bad space entry `{p}`")))?;
                Ok((self.int(d)?, self.int(n)?))
            })
            .collect::<CliResult<Vec<(i32, usize)>>>()?;
        Ok(GradedSpace::new(dims))
    }

    fn map(&mut self, field: Field, name: &str) -> CliResult<GradedMap> {
        let header = self.keyed("map")?;
        if header != name {
            return Err(self.err(format!("expected map `{name}`, got `{header}`")));
        }
        let source = self.space("source")?;
        let target = self.space("target")?;
        let degree: i32 = {
            let d = self.keyed("degree")?;
            self.int(d)?
        };
        let mut mats = Vec::new();
        loop {
            let l = self.next()?;
            if l == "end" {
                break;
            }
            let t: Vec<&str> = l.split_whitespace().collect();
            let ["block", d, r, c] = t.as_slice() else {
                return Err(self.err(format!("unexpected `{l}`")));
            };
            let (d, r, c): (i32, usize, usize) = (self.int(d)?, self.int(r)?, self.int(c)?);
            let mut rows = Vec::with_capacity(r);
            for _ in 0..r {
                let row = self.next()?;
                let entries = row
                    .split_whitespace()
                    .map(|s| field.parse(s).map_err(|e| self.err(e.to_string())))
                    .collect::<CliResult<Vec<_>>>()?;
                rows.push(entries);
            }
            mats.push((d, Matrix::from_rows(field, r, c, rows).map_err(|e| self.err(e.to_string()))?));
        }
        GradedMap::from_blocks(field, &source, &target, degree, mats).map_err(|e| self.err(e.to_string()))
    }
}

pub fn from_text(text: &str) -> CliResult<Witness> {
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut r = Reader { lines, pos: 0 };
    if r.next()? != HEADER {
        return Err(r.err(format!("first line must be `{HEADER}`")));
    }
    let field = match r.keyed("field")?.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["rational"] => Field::Rational,
        ["prime", p] => {
            let p = r.int(p)?;
            Field::prime(p).map_err(|e| r.err(e.to_string()))?
        }
        _ => return Err(r.err("unknown field")),
    };
    let kind = r.keyed("kind")?.to_string();
    let label = r.keyed("label")?.to_string();
    let d_source = r.map(field, "d_source")?;
    let d_target = r.map(field, "d_target")?;
    match kind.as_str() {
        "null-homotopy" => Ok(Witness::NullHomotopy {
            label,
            d_source,
            d_target,
            f: r.map(field, "f")?,
            h: r.map(field, "h")?,
        }),
        "homotopy-equivalence" => Ok(Witness::Equivalence {
            label,
            d_source,
            d_target,
            f: r.map(field, "f")?,
            g: r.map(field, "g")?,
            h1: r.map(field, "h1")?,
            h2: r.map(field, "h2")?,
        }),
        other => Err(r.err(format!("unknown witness kind `{other}`"))),
    }
}

pub fn write(path: &Path, w: &Witness) -> CliResult<()> {
    std::fs::write(path, to_text(w)).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read(path: &Path) -> CliResult<Witness> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_text(&text)
}
