//! Command reports, rendered as text or as JSON.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use twistcalc_core::report::ValidationReport;
use twistcalc_core::witness::Witness;

use crate::error::CliResult;
use crate::witness_io;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub key: String,
    pub value: String,
}

/// Results for one item of the scenario.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Section {
    pub subject: String,
    pub checks: Vec<CheckEntry>,
    pub facts: Vec<Fact>,
    /// A precondition that stopped the computation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub witnesses: Vec<Witness>,
    #[serde(skip)]
    pub assumptions: Vec<String>,
}

impl Section {
    pub fn new(subject: impl Into<String>) -> Section {
        Section {
            subject: subject.into(),
            ..Section::default()
        }
    }

    /// `detail` explains a failure and is dropped when the check passes.
    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.checks.push(CheckEntry {
            name: name.into(),
            passed,
            detail: if passed { String::new() } else { detail.into() },
        });
        self
    }

    pub fn fact(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.facts.push(Fact {
            key: key.into(),
            value: value.to_string(),
        });
        self
    }

    pub fn witness(&mut self, w: Witness) -> &mut Self {
        self.witnesses.push(w);
        self
    }

    pub fn absorb(&mut self, r: &ValidationReport) -> &mut Self {
        for c in &r.checks {
            self.check(c.name.clone(), c.passed, c.detail.clone());
        }
        for a in &r.assumptions {
            self.assume(a.clone());
        }
        self
    }

    pub fn assume(&mut self, text: impl Into<String>) -> &mut Self {
        let text = text.into();
        if !self.assumptions.contains(&text) {
            self.assumptions.push(text);
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    MathematicalFailure,
    PreconditionFailure,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::MathematicalFailure => 1,
            Outcome::PreconditionFailure => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessEntry {
    pub section: String,
    pub label: String,
    pub kind: String,
    pub verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub scenario: String,
    pub field: String,
    pub sections: Vec<Section>,
    pub assumptions: Vec<String>,
    pub notes: Vec<String>,
    pub witnesses: Vec<WitnessEntry>,
    pub outcome: Outcome,
    pub exit_code: i32,
    /// Wall-clock time; the only field that varies between identical runs.
    pub elapsed_ms: u64,
    #[serde(skip)]
    pub witness_data: Vec<Witness>,
}

impl Report {
    pub fn new(command: &str, scenario: &str, field: String, sections: Vec<Section>, mut notes: Vec<String>) -> Report {
        let mut assumptions = Vec::new();
        let mut witnesses = Vec::new();
        let mut witness_data = Vec::new();
        for s in &sections {
            for a in &s.assumptions {
                if !assumptions.contains(a) {
                    assumptions.push(a.clone());
                }
            }
            for w in &s.witnesses {
                witnesses.push(WitnessEntry {
                    section: s.subject.clone(),
                    label: w.label().to_string(),
                    kind: w.kind().to_string(),
                    verified: w.verify(),
                    file: None,
                });
                witness_data.push(w.clone());
            }
        }
        let outcome = if sections.iter().any(|s| s.error.is_some()) {
            Outcome::PreconditionFailure
        } else if sections.iter().all(Section::passed) && witnesses.iter().all(|w| w.verified) {
            Outcome::Pass
        } else {
            Outcome::MathematicalFailure
        };
        if sections.is_empty() {
            notes.push(format!("the scenario has nothing for `{command}` to check"));
        }
        Report {
            command: command.into(),
            scenario: scenario.into(),
            field,
            sections,
            assumptions,
            notes,
            witnesses,
            outcome,
            exit_code: outcome.exit_code(),
            elapsed_ms: 0,
            witness_data,
        }
    }

    /// Writes every witness to `dir`, reloads it and re-verifies the copy.
    pub fn emit_witnesses(&mut self, dir: &Path) -> CliResult<()> {
        std::fs::create_dir_all(dir).map_err(|source| crate::error::CliError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        for (i, (entry, w)) in self.witnesses.iter_mut().zip(&self.witness_data).enumerate() {
            let path = dir.join(format!("{i:04}.wit"));
            witness_io::write(&path, w)?;
            let reloaded = witness_io::read(&path)?;
            entry.verified = entry.verified && reloaded == *w && reloaded.verify();
            entry.file = Some(path.display().to_string());
        }
        if self.outcome == Outcome::Pass && self.witnesses.iter().any(|w| !w.verified) {
            self.outcome = Outcome::MathematicalFailure;
            self.exit_code = self.outcome.exit_code();
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without the timing field, for comparing runs.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(o) = v.as_object_mut() {
            o.remove("elapsed_ms");
        }
        v.to_string()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} ({})", self.command, self.scenario, self.field);
        for s in &self.sections {
            let _ = writeln!(out, "[{}]", s.subject);
            for c in &s.checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                if c.detail.is_empty() {
                    let _ = writeln!(out, "  [{mark}] {}", c.name);
                } else {
                    let _ = writeln!(out, "  [{mark}] {}: {}", c.name, c.detail);
                }
            }
            for f in &s.facts {
                let _ = writeln!(out, "  {}: {}", f.key, f.value);
            }
            if let Some(e) = &s.error {
                let _ = writeln!(out, "  error: {e}");
            }
        }
        if !self.witnesses.is_empty() {
            let _ = writeln!(out, "witnesses:");
            for w in &self.witnesses {
                let status = if w.verified { "verified" } else { "NOT VERIFIED" };
                let file = w.file.as_ref().map(|f| format!(" -> {f}")).unwrap_or_default();
                let _ = writeln!(out, "  {} / {} ({}): {status}{file}", w.section, w.label, w.kind);
            }
        }
        if !self.assumptions.is_empty() {
            let _ = writeln!(out, "assumptions:");
            for a in &self.assumptions {
                let _ = writeln!(out, "  - {a}");
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let outcome = match self.outcome {
            Outcome::Pass => "pass",
            Outcome::MathematicalFailure => "mathematical failure",
            Outcome::PreconditionFailure => "precondition failure",
        };
        let _ = writeln!(out, "result: {outcome} (exit {}), {} ms", self.exit_code, self.elapsed_ms);
        out
    }
}
