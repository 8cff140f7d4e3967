//! The line-oriented scenario file format.
//!
//! ```text
//! vortexhom-scenario 1
//! name = point_vortex
//! dim = 2
//! bounds = -2.0 2.0, -2.0 2.0
//! const gamma = 2*pi
//! velocity.x = -gamma/(2*pi)*y/(x^2 + y^2)
//! velocity.y = gamma/(2*pi)*x/(x^2 + y^2)
//! density = 1.0
//! pressure = 1.0 - gamma^2/(8*pi^2*(x^2 + y^2))
//! exclude point origin at 0.0 0.0 radius 0.2 strength gamma
//! declare steady incompressible irrotational
//! golden circulation/winding=1 = 2*pi tol 1e-8 source classical
//! ```
//!
//! Blank lines and text after `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::expr::{parse_at, Expr};
use crate::error::{Error, Result};

pub const HEADER: &str = "vortexhom-scenario";
pub const FORMAT_VERSION: u32 = 1;

pub const AXES: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Property {
    Steady,
    Incompressible,
    Irrotational,
    Barotropic,
    Conservative,
    Balanced,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Steady,
        Property::Incompressible,
        Property::Irrotational,
        Property::Barotropic,
        Property::Conservative,
        Property::Balanced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Steady => "steady",
            Property::Incompressible => "incompressible",
            Property::Irrotational => "irrotational",
            Property::Barotropic => "barotropic",
            Property::Conservative => "conservative",
            Property::Balanced => "balanced",
        }
    }

    pub fn from_name(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.name() == s)
    }
}

/// Where a golden value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Source {
    /// Closed-form value of a classical result.
    Classical,
    /// Worked out by hand for this scenario.
    Calculation,
    /// Immediate from the definitions.
    Definition,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Classical => "classical",
            Source::Calculation => "calculation",
            Source::Definition => "definition",
        }
    }

    fn from_name(s: &str) -> Option<Source> {
        [Source::Classical, Source::Calculation, Source::Definition]
            .into_iter()
            .find(|p| p.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExclusionKind {
    Point,
    Line { direction: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExclusionDecl {
    pub label: String,
    pub kind: ExclusionKind,
    pub at: Vec<f64>,
    pub radius: f64,
    pub strength: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenDecl {
    pub key: String,
    pub expected: Expr,
    pub tol: f64,
    pub source: Source,
}

/// A parsed but not yet evaluated scenario file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScenarioFile {
    pub name: String,
    pub dim: usize,
    pub bounds: Vec<(f64, f64)>,
    pub constants: Vec<(String, Expr)>,
    pub velocity: Vec<Expr>,
    pub density: Option<Expr>,
    pub pressure: Option<Expr>,
    pub potential: Option<Expr>,
    pub force: Option<Vec<Expr>>,
    /// Density as a function of the pressure variable `p`.
    pub eos: Option<Expr>,
    pub exclusions: Vec<ExclusionDecl>,
    pub declared: Vec<Property>,
    pub probe_radius: Option<f64>,
    pub probe_point: Option<Vec<f64>>,
    pub atol: Option<f64>,
    pub rtol: Option<f64>,
    pub goldens: Vec<GoldenDecl>,
    /// Source line of each field, for diagnostics.
    pub lines: BTreeMap<String, usize>,
}

fn field_error(field: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Field {
        field: field.into(),
        line,
        message: message.into(),
    }
}

fn parse_number(word: &str, line: usize, column: usize) -> Result<f64> {
    word.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            column,
            message: format!("expected a number, found `{word}`"),
        })
}

/// Whitespace-separated words with their 1-based columns.
fn words(s: &str, col0: usize) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        if c.is_whitespace() {
            if let Some(b) = start.take() {
                out.push((&s[b..i], col0 + s[..b].chars().count()));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(b) = start {
        out.push((&s[b..], col0 + s[..b].chars().count()));
    }
    out
}

fn is_identifier(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

impl ScenarioFile {
    fn set_line(&mut self, field: &str, line: usize) -> Result<()> {
        if let Some(prev) = self.lines.insert(field.to_string(), line) {
            return Err(field_error(
                field,
                line,
                format!("duplicate definition (first on line {prev})"),
            ));
        }
        Ok(())
    }

    pub fn line_of(&self, field: &str) -> usize {
        self.lines.get(field).copied().unwrap_or(0)
    }

    pub fn parse(text: &str) -> Result<ScenarioFile> {
        let mut f = ScenarioFile::default();
        let mut velocity: BTreeMap<usize, Expr> = BTreeMap::new();
        let mut force: BTreeMap<usize, Expr> = BTreeMap::new();
        let mut seen_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            if content.trim().is_empty() {
                continue;
            }
            let lead = content.len() - content.trim_start().len();
            let body = content.trim();
            let col = |off: usize| 1 + content[..lead + off].chars().count();
            if !seen_header {
                let w = words(body, col(0));
                let ok = w.len() == 2 && w[0].0 == HEADER;
                if !ok {
                    return Err(Error::Parse {
                        line,
                        column: col(0),
                        message: format!("expected header `{HEADER} {FORMAT_VERSION}`"),
                    });
                }
                if w[1].0 != FORMAT_VERSION.to_string() {
                    return Err(Error::Parse {
                        line,
                        column: w[1].1,
                        message: format!("unsupported format version `{}`", w[1].0),
                    });
                }
                seen_header = true;
                continue;
            }
            let first = body.split_whitespace().next().unwrap_or("");
            match first {
                "exclude" => f.parse_exclusion(body, line, col(0))?,
                "declare" => {
                    for (w, c) in words(body, col(0)).into_iter().skip(1) {
                        let p = Property::from_name(w).ok_or_else(|| Error::Parse {
                            line,
                            column: c,
                            message: format!("unknown property `{w}`"),
                        })?;
                        if !f.declared.contains(&p) {
                            f.declared.push(p);
                        }
                    }
                    f.lines.entry("declare".into()).or_insert(line);
                }
                "golden" => f.parse_golden(body, line, col(0))?,
                "const" => {
                    let rest = &body["const".len()..];
                    let eq = rest.find('=').ok_or_else(|| Error::Parse {
                        line,
                        column: col(body.len()),
                        message: "expected `=` in constant definition".into(),
                    })?;
                    let name = rest[..eq].trim();
                    if !is_identifier(name) {
                        return Err(Error::Parse {
                            line,
                            column: col("const".len()),
                            message: format!("invalid constant name `{name}`"),
                        });
                    }
                    let off = "const".len() + eq + 1;
                    let e = parse_at(&body[off..], line, col(off))?;
                    f.set_line(&format!("const {name}"), line)?;
                    f.constants.push((name.to_string(), e));
                }
                _ => {
                    let eq = body.find('=').ok_or_else(|| Error::Parse {
                        line,
                        column: col(0),
                        message: format!("expected `key = value`, found `{body}`"),
                    })?;
                    let key = body[..eq].trim();
                    let off = eq + 1;
                    let value = &body[off..];
                    let vcol = col(off);
                    f.set_line(key, line)?;
                    f.parse_field(key, value, line, vcol, &mut velocity, &mut force)?;
                }
            }
        }
        if !seen_header {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("missing header `{HEADER} {FORMAT_VERSION}`"),
            });
        }
        f.finish(velocity, force)?;
        Ok(f)
    }

    fn parse_field(
        &mut self,
        key: &str,
        value: &str,
        line: usize,
        vcol: usize,
        velocity: &mut BTreeMap<usize, Expr>,
        force: &mut BTreeMap<usize, Expr>,
    ) -> Result<()> {
        let numbers = |s: &str| -> Result<Vec<f64>> {
            words(s, vcol)
                .into_iter()
                .map(|(w, c)| parse_number(w, line, c))
                .collect()
        };
        let single = |s: &str| -> Result<f64> {
            let v = numbers(s)?;
            if v.len() != 1 {
                return Err(field_error(key, line, "expected one number"));
            }
            Ok(v[0])
        };
        let axis = |k: &str, prefix: &str| -> Option<usize> {
            k.strip_prefix(prefix)
                .and_then(|a| AXES.iter().position(|x| *x == a))
        };
        match key {
            "name" => {
                let v = value.trim();
                if !is_identifier(v) {
                    return Err(field_error(key, line, format!("invalid name `{v}`")));
                }
                self.name = v.to_string();
            }
            "dim" => {
                let d = value.trim();
                self.dim = match d.parse::<usize>() {
                    Ok(n @ 1..=3) => n,
                    _ => {
                        return Err(field_error(
                            key,
                            line,
                            format!("dimension must be 1, 2 or 3, got `{d}`"),
                        ))
                    }
                };
            }
            "bounds" => {
                let mut b = Vec::new();
                let mut off = 0;
                for part in value.split(',') {
                    let pcol = vcol + value[..off].chars().count();
                    let ws = words(part, pcol);
                    if ws.len() != 2 {
                        return Err(field_error(key, line, "each axis needs `lo hi`"));
                    }
                    let lo = parse_number(ws[0].0, line, ws[0].1)?;
                    let hi = parse_number(ws[1].0, line, ws[1].1)?;
                    if lo >= hi {
                        return Err(field_error(key, line, format!("empty interval {lo} {hi}")));
                    }
                    b.push((lo, hi));
                    off += part.len() + 1;
                }
                self.bounds = b;
            }
            "density" => self.density = Some(parse_at(value, line, vcol)?),
            "pressure" => self.pressure = Some(parse_at(value, line, vcol)?),
            "potential" => self.potential = Some(parse_at(value, line, vcol)?),
            "eos" => self.eos = Some(parse_at(value, line, vcol)?),
            "probe_radius" => {
                let r = single(value)?;
                if r <= 0.0 {
                    return Err(field_error(key, line, "must be positive"));
                }
                self.probe_radius = Some(r);
            }
            "probe_point" => self.probe_point = Some(numbers(value)?),
            "atol" | "rtol" => {
                let v = single(value)?;
                if v <= 0.0 {
                    return Err(field_error(key, line, "must be positive"));
                }
                if key == "atol" {
                    self.atol = Some(v);
                } else {
                    self.rtol = Some(v);
                }
            }
            k => {
                if let Some(a) = axis(k, "velocity.") {
                    velocity.insert(a, parse_at(value, line, vcol)?);
                } else if let Some(a) = axis(k, "force.") {
                    force.insert(a, parse_at(value, line, vcol)?);
                } else {
                    return Err(field_error(k, line, "unknown field"));
                }
            }
        }
        Ok(())
    }

    fn parse_exclusion(&mut self, body: &str, line: usize, col0: usize) -> Result<()> {
        let (head, strength) = match body.find(" strength ") {
            Some(i) => {
                let off = i + " strength ".len();
                let scol = col0 + body[..off].chars().count();
                (&body[..i], Some(parse_at(&body[off..], line, scol)?))
            }
            None => (body, None),
        };
        let w = words(head, col0);
        let err = |c: usize, m: &str| Error::Parse {
            line,
            column: c,
            message: m.into(),
        };
        if w.len() < 3 {
            return Err(err(col0, "expected `exclude point|line LABEL at ...`"));
        }
        let kind = w[1].0;
        let label = w[2].0;
        if !is_identifier(label) {
            return Err(err(w[2].1, "invalid exclusion label"));
        }
        let mut i = 3;
        let take_until = |stop: &str, i: &mut usize| -> Result<Vec<f64>> {
            let mut v = Vec::new();
            while *i < w.len() && w[*i].0 != stop {
                v.push(parse_number(w[*i].0, line, w[*i].1)?);
                *i += 1;
            }
            Ok(v)
        };
        if w.get(i).map(|x| x.0) != Some("at") {
            return Err(err(w.get(i).map_or(col0, |x| x.1), "expected `at`"));
        }
        i += 1;
        let (at, direction) = match kind {
            "point" => (take_until("radius", &mut i)?, None),
            "line" => {
                let at = take_until("dir", &mut i)?;
                if w.get(i).map(|x| x.0) != Some("dir") {
                    return Err(err(col0, "line exclusion needs `dir`"));
                }
                i += 1;
                (at, Some(take_until("radius", &mut i)?))
            }
            other => return Err(err(w[1].1, &format!("unknown exclusion kind `{other}`"))),
        };
        if w.get(i).map(|x| x.0) != Some("radius") || i + 2 != w.len() {
            return Err(err(
                w.get(i).map_or(col0, |x| x.1),
                "expected `radius R` at end",
            ));
        }
        let radius = parse_number(w[i + 1].0, line, w[i + 1].1)?;
        if radius <= 0.0 {
            return Err(err(w[i + 1].1, "radius must be positive"));
        }
        self.set_line(&format!("exclude {label}"), line)?;
        self.exclusions.push(ExclusionDecl {
            label: label.into(),
            kind: match direction {
                Some(d) => ExclusionKind::Line { direction: d },
                None => ExclusionKind::Point,
            },
            at,
            radius,
            strength,
        });
        Ok(())
    }

    fn parse_golden(&mut self, body: &str, line: usize, col0: usize) -> Result<()> {
        let err = |c: usize, m: &str| Error::Parse {
            line,
            column: c,
            message: m.into(),
        };
        let rest = &body["golden".len()..];
        let eq = rest
            .find(" = ")
            .ok_or_else(|| err(col0, "expected `golden KEY = VALUE tol T source S`"))?;
        let key = rest[..eq].trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(err(col0 + "golden".len(), "invalid golden key"));
        }
        let voff = "golden".len() + eq + 3;
        let value = &body[voff..];
        let tol_at = value
            .rfind(" tol ")
            .ok_or_else(|| err(col0 + voff, "missing `tol`"))?;
        let tail = &value[tol_at..];
        let tcol = col0 + body[..voff + tol_at].chars().count();
        let w = words(tail, tcol);
        if w.len() != 4 || w[0].0 != "tol" || w[2].0 != "source" {
            return Err(err(tcol, "expected `tol T source S`"));
        }
        let tol = parse_number(w[1].0, line, w[1].1)?;
        let source = Source::from_name(w[3].0)
            .ok_or_else(|| err(w[3].1, "source must be classical, calculation or definition"))?;
        let expected = parse_at(&value[..tol_at], line, col0 + body[..voff].chars().count())?;
        if self.goldens.iter().any(|g| g.key == key) {
            return Err(field_error(
                &format!("golden {key}"),
                line,
                "duplicate golden key",
            ));
        }
        self.lines.insert(format!("golden {key}"), line);
        self.goldens.push(GoldenDecl {
            key: key.into(),
            expected,
            tol,
            source,
        });
        Ok(())
    }

    fn finish(
        &mut self,
        velocity: BTreeMap<usize, Expr>,
        force: BTreeMap<usize, Expr>,
    ) -> Result<()> {
        if self.name.is_empty() {
            return Err(field_error("name", 0, "missing"));
        }
        if self.dim == 0 {
            return Err(field_error("dim", 0, "missing"));
        }
        let n = self.dim;
        if self.bounds.len() != n {
            return Err(field_error(
                "bounds",
                self.line_of("bounds"),
                format!("expected {n} intervals, got {}", self.bounds.len()),
            ));
        }
        let collect = |m: BTreeMap<usize, Expr>, what: &str| -> Result<Vec<Expr>> {
            if let Some((&a, _)) = m.iter().find(|(a, _)| **a >= n) {
                let key = format!("{what}.{}", AXES[a]);
                return Err(field_error(&key, 0, format!("axis beyond dimension {n}")));
            }
            (0..n)
                .map(|a| {
                    m.get(&a).cloned().ok_or_else(|| {
                        field_error(&format!("{what}.{}", AXES[a]), 0, "missing component")
                    })
                })
                .collect()
        };
        self.velocity = collect(velocity, "velocity")?;
        if !force.is_empty() {
            self.force = Some(collect(force, "force")?);
        }
        if let Some(p) = &self.probe_point {
            if p.len() != n {
                return Err(field_error(
                    "probe_point",
                    self.line_of("probe_point"),
                    format!("expected {n} coordinates"),
                ));
            }
        }
        for e in &self.exclusions {
            let bad = e.at.len() != n
                || matches!(&e.kind, ExclusionKind::Line { direction } if direction.len() != n || n != 3);
            if bad {
                return Err(field_error(
                    &format!("exclude {}", e.label),
                    self.line_of(&format!("exclude {}", e.label)),
                    "coordinates do not match the dimension",
                ));
            }
        }
        Ok(())
    }

    /// Canonical text form; parses back to an equal file.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = self.write(&mut s);
        s
    }

    fn write(&self, s: &mut String) -> fmt::Result {
        let num = |v: f64| format!("{v:?}");
        writeln!(s, "{HEADER} {FORMAT_VERSION}")?;
        writeln!(s, "name = {}", self.name)?;
        writeln!(s, "dim = {}", self.dim)?;
        let b: Vec<String> = self
            .bounds
            .iter()
            .map(|(lo, hi)| format!("{} {}", num(*lo), num(*hi)))
            .collect();
        writeln!(s, "bounds = {}", b.join(", "))?;
        for (name, e) in &self.constants {
            writeln!(s, "const {name} = {e}")?;
        }
        for (a, e) in self.velocity.iter().enumerate() {
            writeln!(s, "velocity.{} = {e}", AXES[a])?;
        }
        for (key, e) in [
            ("density", &self.density),
            ("pressure", &self.pressure),
            ("potential", &self.potential),
        ] {
            if let Some(e) = e {
                writeln!(s, "{key} = {e}")?;
            }
        }
        if let Some(f) = &self.force {
            for (a, e) in f.iter().enumerate() {
                writeln!(s, "force.{} = {e}", AXES[a])?;
            }
        }
        if let Some(e) = &self.eos {
            writeln!(s, "eos = {e}")?;
        }
        for e in &self.exclusions {
            let at: Vec<String> = e.at.iter().map(|v| num(*v)).collect();
            match &e.kind {
                ExclusionKind::Point => write!(s, "exclude point {} at {}", e.label, at.join(" "))?,
                ExclusionKind::Line { direction } => {
                    let d: Vec<String> = direction.iter().map(|v| num(*v)).collect();
                    write!(
                        s,
                        "exclude line {} at {} dir {}",
                        e.label,
                        at.join(" "),
                        d.join(" ")
                    )?
                }
            }
            write!(s, " radius {}", num(e.radius))?;
            if let Some(st) = &e.strength {
                write!(s, " strength {st}")?;
            }
            writeln!(s)?;
        }
        if !self.declared.is_empty() {
            let d: Vec<&str> = self.declared.iter().map(|p| p.name()).collect();
            writeln!(s, "declare {}", d.join(" "))?;
        }
        if let Some(r) = self.probe_radius {
            writeln!(s, "probe_radius = {}", num(r))?;
        }
        if let Some(p) = &self.probe_point {
            let p: Vec<String> = p.iter().map(|v| num(*v)).collect();
            writeln!(s, "probe_point = {}", p.join(" "))?;
        }
        if let Some(v) = self.atol {
            writeln!(s, "atol = {}", num(v))?;
        }
        if let Some(v) = self.rtol {
            writeln!(s, "rtol = {}", num(v))?;
        }
        for g in &self.goldens {
            writeln!(
                s,
                "golden {} = {} tol {} source {}",
                g.key,
                g.expected,
                num(g.tol),
                g.source.name()
            )?;
        }
        Ok(())
    }

    /// Equality ignoring source line numbers.
    pub fn same_content(&self, other: &ScenarioFile) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.lines.clear();
        b.lines.clear();
        a == b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# a comment
vortexhom-scenario 1
name = demo
dim = 2
bounds = -1 1, -2 2
const k = 2*pi   # trailing comment
velocity.x = -k*y
velocity.y = k*x
density = 1
exclude point hole at 0.5 0 radius 0.1 strength k/2
declare steady incompressible
probe_point = 0.2 0.1
golden vorticity = 2*k tol 1e-9 source calculation
";

    #[test]
    fn parses_sample() {
        let f = ScenarioFile::parse(SAMPLE).unwrap();
        assert_eq!(f.name, "demo");
        assert_eq!(f.bounds, vec![(-1.0, 1.0), (-2.0, 2.0)]);
        assert_eq!(f.velocity.len(), 2);
        assert_eq!(f.exclusions[0].at, vec![0.5, 0.0]);
        assert_eq!(f.declared, vec![Property::Steady, Property::Incompressible]);
        assert_eq!(f.goldens[0].source, Source::Calculation);
        assert_eq!(f.line_of("velocity.y"), 8);
    }

    #[test]
    fn text_round_trip() {
        let f = ScenarioFile::parse(SAMPLE).unwrap();
        let g = ScenarioFile::parse(&f.to_text()).unwrap();
        assert!(f.same_content(&g));
        assert_eq!(g.to_text(), f.to_text());
    }

    #[test]
    fn diagnostics() {
        let bad_expr = SAMPLE.replace("velocity.y = k*x", "velocity.y = k*)x");
        match ScenarioFile::parse(&bad_expr) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (8, 16)),
            other => panic!("{other:?}"),
        }
        let unknown = SAMPLE.replace("density = 1", "densty = 1");
        assert!(matches!(
            ScenarioFile::parse(&unknown),
            Err(Error::Field { ref field, line: 9, .. }) if field == "densty"
        ));
        let missing = SAMPLE.replace("velocity.y = k*x\n", "");
        assert!(matches!(
            ScenarioFile::parse(&missing),
            Err(Error::Field { ref field, .. }) if field == "velocity.y"
        ));
        let header = SAMPLE.replace("vortexhom-scenario 1", "vortexhom-scenario 7");
        assert!(matches!(
            ScenarioFile::parse(&header),
            Err(Error::Parse {
                line: 2,
                column: 20,
                ..
            })
        ));
        let dup = format!("{SAMPLE}density = 2\n");
        assert!(matches!(
            ScenarioFile::parse(&dup),
            Err(Error::Field { .. })
        ));
        let prop = SAMPLE.replace("declare steady", "declare stedy");
        assert!(matches!(
            ScenarioFile::parse(&prop),
            Err(Error::Parse {
                line: 11,
                column: 9,
                ..
            })
        ));
    }
}
