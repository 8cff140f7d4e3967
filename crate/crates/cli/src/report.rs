//! Plain-text reports with PASS/FAIL lines and optional CSV tables.

use std::fmt::Display;
use std::path::Path;

use vortexhom::dynamics::BalanceReport;
use vortexhom::integrate::NamedCheck;

/// One gated line of a report.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub subject: String,
    pub name: String,
    pub value: String,
    pub reference: String,
    pub pass: bool,
}

impl Row {
    pub fn render(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        let subject = if self.subject.is_empty() {
            String::new()
        } else {
            format!("{} ", self.subject)
        };
        format!(
            "{tag} {subject}{}: {} ({})",
            self.name, self.value, self.reference
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    lines: Vec<String>,
    rows: Vec<Row>,
    subject: String,
}

/// Shortest round-trip form, scientific outside `[1e-4, 1e9)`.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e9).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            lines: vec![format!("# vortexhom {command}")],
            ..Default::default()
        }
    }

    /// Prefix for subsequent gated lines.
    pub fn set_subject(&mut self, s: &str) {
        self.subject = s.into();
    }

    pub fn info(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    pub fn note(&mut self, text: impl Display) {
        self.lines.push(text.to_string());
    }

    fn push(&mut self, name: &str, value: String, reference: String, pass: bool) {
        let row = Row {
            subject: self.subject.clone(),
            name: name.into(),
            value,
            reference,
            pass,
        };
        self.lines.push(row.render());
        self.rows.push(row);
    }

    /// A value held below a threshold.
    pub fn below(&mut self, name: &str, value: f64, threshold: f64) {
        let pass = value.is_finite() && value <= threshold;
        self.push(
            name,
            sci(value),
            format!("threshold {}", sci(threshold)),
            pass,
        );
    }

    pub fn expect(&mut self, name: &str, value: f64, expected: &str, pass: bool) {
        self.push(name, num(value), format!("expected {expected}"), pass);
    }

    pub fn verdict(&mut self, name: &str, value: impl Display, expected: impl Display, pass: bool) {
        self.push(
            name,
            value.to_string(),
            format!("expected {expected}"),
            pass,
        );
    }

    pub fn named(&mut self, prefix: &str, c: &NamedCheck) {
        let name = format!("{prefix}{}", c.name);
        self.push(
            &name,
            sci(c.value),
            format!("threshold {}", sci(c.threshold)),
            c.pass,
        );
    }

    /// Gated checks of a balance report; informational checks become notes.
    pub fn balance(&mut self, r: &BalanceReport) {
        if !r.applicable {
            self.lines
                .push(format!("n/a {}{}: {}", self.prefix(), r.name, r.note));
            return;
        }
        let main_pass = r.worst_ratio <= 1.0 && r.max_residual.is_finite();
        self.push(
            &format!("{}/residual", r.name),
            sci(r.max_residual),
            format!("worst ratio {} of atol + rtol·scale", sci(r.worst_ratio)),
            main_pass,
        );
        for c in &r.checks {
            if c.name.starts_with("info:") {
                self.lines.push(format!(
                    "info {}{}/{}: {}",
                    self.prefix(),
                    r.name,
                    c.name.trim_start_matches("info:"),
                    sci(c.value)
                ));
            } else {
                self.named(&format!("{}/", r.name), c);
            }
        }
        if !r.note.is_empty() {
            self.lines
                .push(format!("note {}{}: {}", self.prefix(), r.name, r.note));
        }
    }

    fn prefix(&self) -> String {
        if self.subject.is_empty() {
            String::new()
        } else {
            format!("{} ", self.subject)
        }
    }

    pub fn not_applicable(&mut self, name: &str, why: impl Display) {
        self.lines
            .push(format!("n/a {}{name}: {why}", self.prefix()));
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn failures(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Appends another report's body, keeping its rows.
    pub fn absorb(&mut self, other: Report) {
        self.lines.extend(other.lines.into_iter().skip(1));
        self.rows.extend(other.rows);
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        let failed = self.failures();
        if failed.is_empty() {
            out.push_str(&format!("result: PASS ({} checks)\n", self.rows.len()));
        } else {
            let names: Vec<String> = failed
                .iter()
                .map(|r| {
                    if r.subject.is_empty() {
                        r.name.clone()
                    } else {
                        format!("{} {}", r.subject, r.name)
                    }
                })
                .collect();
            out.push_str(&format!(
                "result: FAIL ({} of {} checks failed: {})\n",
                failed.len(),
                self.rows.len(),
                names.join(", ")
            ));
        }
        out
    }

    /// Writes the gated rows as `subject,check,value,reference,pass`.
    pub fn write_csv(&self, path: &Path) -> Result<(), String> {
        let mut w = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
        w.write_record(["subject", "check", "value", "reference", "pass"])
            .map_err(|e| e.to_string())?;
        for r in &self.rows {
            w.write_record([
                r.subject.as_str(),
                r.name.as_str(),
                r.value.as_str(),
                r.reference.as_str(),
                if r.pass { "true" } else { "false" },
            ])
            .map_err(|e| e.to_string())?;
        }
        w.flush().map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn num_switches_to_scientific_for_tiny_values() {
        assert_eq!(num(6.283185307179586), "6.283185307179586");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-2.220446049250313e-16), "-2.220446049250313e-16");
    }

    #[test]
    fn render_lists_failures() {
        let mut r = Report::new("x");
        r.below("small", 1e-9, 1e-8);
        r.set_subject("s");
        r.below("big", 1.0, 1e-8);
        let out = r.render();
        assert!(out.contains("PASS small: 1.000e-9 (threshold 1.000e-8)"));
        assert!(out.contains("FAIL s big"));
        assert!(out.ends_with("result: FAIL (1 of 2 checks failed: s big)\n"));
        assert!(!r.passed());
    }
}
