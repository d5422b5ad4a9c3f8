use std::fmt;

/// One named invariant and whether it held.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of a validator: failures are entries, not errors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub subject: String,
    pub checks: Vec<Check>,
    /// Assumptions the checks rely on but cannot certify.
    pub assumptions: Vec<String>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> ValidationReport {
        ValidationReport {
            subject: subject.into(),
            ..Default::default()
        }
    }

    /// `detail` explains a failure and is dropped when the check passes.
    pub fn record(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: if passed { String::new() } else { detail.into() },
        });
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.record(name, true, "");
    }

    pub fn fail(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.record(name, false, detail);
    }

    pub fn assume(&mut self, text: impl Into<String>) {
        let text = text.into();
        if !self.assumptions.contains(&text) {
            self.assumptions.push(text);
        }
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Appends another report's checks under a prefix.
    pub fn absorb(&mut self, other: ValidationReport) {
        for c in other.checks {
            self.checks.push(Check {
                name: format!("{}: {}", other.subject, c.name),
                ..c
            });
        }
        for a in other.assumptions {
            self.assume(a);
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.subject, if self.is_ok() { "ok" } else { "FAILED" })?;
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "  [{mark}] {}", c.name)?;
            } else {
                writeln!(f, "  [{mark}] {} ({})", c.name, c.detail)?;
            }
        }
        for a in &self.assumptions {
            writeln!(f, "  assumes: {a}")?;
        }
        Ok(())
    }
}
