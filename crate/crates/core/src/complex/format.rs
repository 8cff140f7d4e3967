//! Plain-text complex definitions.
//!
//! ```text
//! # comments start with '#'
//! complex circle
//! degree 0 v0 v1
//! degree 1 a b
//! boundary a : +v1 -v0
//! boundary b : +v0 -v1
//! ```
//!
//! Face terms are `+id`, `-id` or `±coeff*id`. Cubes without a `boundary`
//! line have no faces.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{CubeId, CubicalComplex};
use crate::error::{Error, Result};

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_term(lineno: usize, col: usize, tok: &str) -> Result<(CubeId, f64)> {
    let (sign, rest) = match tok.as_bytes().first() {
        Some(b'+') => (1.0, &tok[1..]),
        Some(b'-') => (-1.0, &tok[1..]),
        _ => return Err(err(lineno, col, format!("face term `{tok}` needs a sign"))),
    };
    let (coeff, id) = match rest.split_once('*') {
        Some((c, id)) => {
            let c: f64 = c
                .parse()
                .map_err(|_| err(lineno, col + 1, format!("bad coefficient `{c}`")))?;
            (c, id)
        }
        None => (1.0, rest),
    };
    if id.is_empty() {
        return Err(err(lineno, col, "missing cube id"));
    }
    Ok((CubeId::new(id), sign * coeff))
}

pub fn parse_complex(text: &str) -> Result<CubicalComplex> {
    let mut name = None;
    let mut order: Vec<(CubeId, usize, usize)> = Vec::new();
    let mut faces: HashMap<CubeId, Vec<(CubeId, f64)>> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(&(col, head)) = toks.first() else {
            continue;
        };
        match head {
            "complex" => {
                let (_, n) = toks
                    .get(1)
                    .ok_or_else(|| err(lineno, col, "missing complex name"))?;
                name = Some(n.to_string());
            }
            "degree" => {
                let &(c, k) = toks
                    .get(1)
                    .ok_or_else(|| err(lineno, col, "missing degree"))?;
                let k: usize = k
                    .parse()
                    .map_err(|_| err(lineno, c, format!("bad degree `{k}`")))?;
                for &(_, id) in &toks[2..] {
                    order.push((CubeId::new(id), k, lineno));
                }
            }
            "boundary" => {
                let &(_, id) = toks
                    .get(1)
                    .ok_or_else(|| err(lineno, col, "missing cube id"))?;
                match toks.get(2) {
                    Some((_, ":")) => {}
                    Some(&(c, t)) => {
                        return Err(err(lineno, c, format!("expected `:`, found `{t}`")))
                    }
                    None => return Err(err(lineno, line.len() + 1, "expected `:`")),
                }
                let terms = toks[3..]
                    .iter()
                    .map(|&(c, t)| parse_term(lineno, c, t))
                    .collect::<Result<Vec<_>>>()?;
                if faces.insert(CubeId::new(id), terms).is_some() {
                    return Err(err(lineno, col, format!("duplicate boundary for `{id}`")));
                }
            }
            other => return Err(err(lineno, col, format!("unknown directive `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| err(1, 1, "missing `complex <name>` header"))?;
    let mut b = CubicalComplex::builder(name);
    for (id, k, _) in &order {
        let f = faces.remove(id).unwrap_or_default();
        b.add_cube(id.clone(), *k, f, None);
    }
    if let Some(id) = faces.keys().min() {
        return Err(Error::Structural(format!(
            "boundary given for undeclared cube `{id}`"
        )));
    }
    b.build()
}

pub fn write_complex(c: &CubicalComplex) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "complex {}", c.name());
    for k in 0..=c.dim() {
        let ids: Vec<String> = c.basis(k).iter().map(|b| b.id.0.clone()).collect();
        let _ = writeln!(out, "degree {k} {}", ids.join(" "));
    }
    for k in 1..=c.dim() {
        for cube in c.basis(k) {
            let faces = c.faces_of(&cube.id).expect("own cube");
            let terms: Vec<String> = faces
                .iter()
                .map(|(f, s)| {
                    if *s == 1.0 {
                        format!("+{f}")
                    } else if *s == -1.0 {
                        format!("-{f}")
                    } else if *s < 0.0 {
                        format!("-{}*{f}", -s)
                    } else {
                        format!("+{s}*{f}")
                    }
                })
                .collect();
            let _ = writeln!(out, "boundary {} : {}", cube.id, terms.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{betti_numbers, golden};

    #[test]
    fn round_trip_golden() {
        for (name, betti) in golden::GOLDEN {
            let c = golden::golden(name).unwrap();
            let back = parse_complex(&write_complex(&c)).unwrap();
            assert_eq!(&betti_numbers(&back).unwrap()[..], *betti);
        }
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse_complex("complex x\ndegree 0 p\nboundary p : p\n").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 3,
                column: 14,
                message: "face term `p` needs a sign".into()
            }
        );
    }
}
