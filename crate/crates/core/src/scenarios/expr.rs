//! A small analytic expression language.
//!
//! ```text
//! expr  := 'if' sum cmp sum 'then' expr 'else' expr | sum
//! sum   := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! cmp   := '<' | '<=' | '>' | '>='
//! ```

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Atan2,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Atan2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Atan2 => "atan2",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Atan2 => 2,
            _ => 1,
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Cmp {
    fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
        }
    }

    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Gt => a > b,
            Cmp::Ge => a >= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Name(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    If {
        lhs: Box<Expr>,
        cmp: Cmp,
        rhs: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

const KEYWORDS: [&str; 3] = ["if", "then", "else"];

/// Names with fixed values.
pub const BUILTIN_CONSTANTS: [(&str, f64); 2] =
    [("pi", std::f64::consts::PI), ("e", std::f64::consts::E)];

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn name(s: &str) -> Expr {
        Expr::Name(s.into())
    }

    /// Every name referenced, in first-use order.
    pub fn names(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            match e {
                Expr::Num(_) => {}
                Expr::Name(n) => {
                    if !out.contains(n) {
                        out.push(n.clone());
                    }
                }
                Expr::Neg(a) => walk(a, out),
                Expr::Binary(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Expr::Call(_, args) => args.iter().for_each(|a| walk(a, out)),
                Expr::If {
                    lhs,
                    rhs,
                    then,
                    otherwise,
                    ..
                } => {
                    for x in [lhs, rhs, then, otherwise] {
                        walk(x, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Guard expressions `lhs − rhs` of every conditional.
    pub fn guards(&self) -> Vec<Expr> {
        let mut out = Vec::new();
        self.visit_ifs(&mut |lhs, rhs| {
            out.push(Expr::Binary(
                BinOp::Sub,
                Box::new(lhs.clone()),
                Box::new(rhs.clone()),
            ))
        });
        out
    }

    fn visit_ifs(&self, f: &mut impl FnMut(&Expr, &Expr)) {
        match self {
            Expr::Num(_) | Expr::Name(_) => {}
            Expr::Neg(a) => a.visit_ifs(f),
            Expr::Binary(_, a, b) => {
                a.visit_ifs(f);
                b.visit_ifs(f);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.visit_ifs(f)),
            Expr::If {
                lhs,
                rhs,
                then,
                otherwise,
                ..
            } => {
                f(lhs, rhs);
                for x in [lhs, rhs, then, otherwise] {
                    x.visit_ifs(f);
                }
            }
        }
    }

    /// Both branches of the outermost conditionals, with guards, for seam checks.
    pub fn branches(&self) -> Vec<(Expr, Expr, Expr)> {
        let mut out = Vec::new();
        fn walk(e: &Expr, out: &mut Vec<(Expr, Expr, Expr)>) {
            match e {
                Expr::Num(_) | Expr::Name(_) => {}
                Expr::Neg(a) => walk(a, out),
                Expr::Binary(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Expr::Call(_, args) => args.iter().for_each(|a| walk(a, out)),
                Expr::If {
                    lhs,
                    rhs,
                    then,
                    otherwise,
                    ..
                } => {
                    let g = Expr::Binary(BinOp::Sub, lhs.clone(), rhs.clone());
                    out.push((g, (**then).clone(), (**otherwise).clone()));
                    walk(then, out);
                    walk(otherwise, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Compact rendering for reports: `2*pi` becomes `2π`.
    pub fn display(&self) -> String {
        match self {
            Expr::Name(n) if n == "pi" => "π".into(),
            Expr::Binary(BinOp::Mul, a, b) => match (&**a, &**b) {
                (Expr::Num(k), Expr::Name(n)) if n == "pi" => format!("{}π", fmt_num(*k)),
                (Expr::Neg(k), Expr::Name(n)) if n == "pi" && matches!(**k, Expr::Num(_)) => {
                    format!(
                        "-{}",
                        Expr::Binary(BinOp::Mul, k.clone(), b.clone()).display()
                    )
                }
                _ => self.to_string(),
            },
            Expr::Neg(a) => match &**a {
                Expr::Name(_) | Expr::Binary(BinOp::Mul, _, _) => {
                    let inner = a.display();
                    if inner.ends_with('π') {
                        format!("-{inner}")
                    } else {
                        self.to_string()
                    }
                }
                _ => self.to_string(),
            },
            _ => self.to_string(),
        }
    }
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:?}")
    }
}

// ---------------------------------------------------------------------------
// Printing

const PREC_IF: u8 = 0;
const PREC_SUM: u8 = 1;
const PREC_TERM: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => PREC_UNARY,
        Expr::Num(_) | Expr::Name(_) | Expr::Call(..) => PREC_ATOM,
        Expr::Neg(_) => PREC_UNARY,
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => PREC_SUM,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => PREC_TERM,
        Expr::Binary(BinOp::Pow, ..) => PREC_POW,
        Expr::If { .. } => PREC_IF,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "(")?;
        write_expr(f, e)?;
        write!(f, ")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Num(v) => write!(f, "{v:?}"),
        Expr::Name(n) => write!(f, "{n}"),
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, PREC_UNARY)
        }
        Expr::Binary(op, a, b) => {
            let (l, r) = match op {
                BinOp::Add | BinOp::Sub => (PREC_SUM, PREC_TERM),
                BinOp::Mul | BinOp::Div => (PREC_TERM, PREC_UNARY),
                BinOp::Pow => (PREC_ATOM, PREC_UNARY),
            };
            write_at(f, a, l)?;
            match op {
                BinOp::Add | BinOp::Sub => write!(f, " {} ", op.symbol())?,
                _ => write!(f, "{}", op.symbol())?,
            }
            write_at(f, b, r)
        }
        Expr::Call(func, args) => {
            write!(f, "{}(", func.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_expr(f, a)?;
            }
            write!(f, ")")
        }
        Expr::If {
            lhs,
            cmp,
            rhs,
            then,
            otherwise,
        } => {
            write!(f, "if ")?;
            write_at(f, lhs, PREC_SUM)?;
            write!(f, " {} ", cmp.symbol())?;
            write_at(f, rhs, PREC_SUM)?;
            write!(f, " then ")?;
            write_expr(f, then)?;
            write!(f, " else ")?;
            write_expr(f, otherwise)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

// ---------------------------------------------------------------------------
// Lexing and parsing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Cmp(Cmp),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

impl<'a> Lexer<'a> {
    /// Tokens with their byte offsets.
    fn tokens(src: &'a str, line: usize, col0: usize) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            while lx.pos < lx.src.len() && lx.src[lx.pos].is_ascii_whitespace() {
                lx.pos += 1;
            }
            let start = lx.pos;
            if lx.pos >= lx.src.len() {
                out.push((Tok::End, start));
                return Ok(out);
            }
            let c = lx.src[lx.pos] as char;
            let tok = if c.is_ascii_digit() || c == '.' {
                lx.number(line, col0)?
            } else if c.is_ascii_alphabetic() || c == '_' {
                while lx.pos < lx.src.len()
                    && (lx.src[lx.pos].is_ascii_alphanumeric() || lx.src[lx.pos] == b'_')
                {
                    lx.pos += 1;
                }
                Tok::Ident(src[start..lx.pos].to_string())
            } else {
                lx.pos += 1;
                match c {
                    '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '<' | '>' => {
                        let eq = lx.pos < lx.src.len() && lx.src[lx.pos] == b'=';
                        if eq {
                            lx.pos += 1;
                        }
                        Tok::Cmp(match (c, eq) {
                            ('<', false) => Cmp::Lt,
                            ('<', true) => Cmp::Le,
                            ('>', false) => Cmp::Gt,
                            _ => Cmp::Ge,
                        })
                    }
                    _ => {
                        let ch = src[start..].chars().next().unwrap_or(c);
                        return Err(parse_error(
                            line,
                            col0 + src[..start].chars().count(),
                            format!("unexpected character `{ch}`"),
                        ));
                    }
                }
            };
            out.push((tok, start));
        }
    }

    fn number(&mut self, line: usize, col0: usize) -> Result<Tok> {
        let start = self.pos;
        let digits = |s: &mut Self| {
            let b = s.pos;
            while s.pos < s.src.len() && s.src[s.pos].is_ascii_digit() {
                s.pos += 1;
            }
            s.pos - b
        };
        let mut n = digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            n += digits(self);
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len()
                && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) if n > 0 => Ok(Tok::Num(v)),
            _ => Err(parse_error(
                line,
                col0 + start,
                format!("malformed number `{text}`"),
            )),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    i: usize,
    line: usize,
    col0: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn column(&self) -> usize {
        let off = self.toks[self.i].1;
        self.col0 + self.src[..off].chars().count()
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        parse_error(self.line, self.column(), msg)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::Cmp(c) => format!("`{}`", c.symbol()),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of expression".into(),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            t => Err(self.error(format!("expected `{kw}`, found {}", Self::describe(t)))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Tok::Ident(s) if s == "if") {
            self.next();
            let lhs = self.sum()?;
            let cmp = match self.peek() {
                Tok::Cmp(c) => *c,
                t => {
                    return Err(
                        self.error(format!("expected comparison, found {}", Self::describe(t)))
                    )
                }
            };
            self.next();
            let rhs = self.sum()?;
            self.expect_keyword("then")?;
            let then = self.expr()?;
            self.expect_keyword("else")?;
            let otherwise = self.expr()?;
            return Ok(Expr::If {
                lhs: Box::new(lhs),
                cmp,
                rhs: Box::new(rhs),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        self.sum()
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.next();
            let r = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            e = Expr::Binary(op, Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.next();
            let r = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            e = Expr::Binary(op, Box::new(e), Box::new(r));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Op('-') {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.next();
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let col_err = self.column();
        match self.next() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                match self.next() {
                    Tok::RParen => Ok(e),
                    t => Err(parse_error(
                        self.line,
                        col_err,
                        format!("unclosed `(`: found {}", Self::describe(&t)),
                    )),
                }
            }
            Tok::Ident(name) => {
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(parse_error(
                        self.line,
                        col_err,
                        format!("unexpected keyword `{name}`"),
                    ));
                }
                if *self.peek() != Tok::LParen {
                    return Ok(Expr::Name(name));
                }
                let func = Func::lookup(&name).ok_or_else(|| {
                    parse_error(self.line, col_err, format!("unknown function `{name}`"))
                })?;
                self.next();
                let mut args = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.next();
                    args.push(self.expr()?);
                }
                if *self.peek() != Tok::RParen {
                    return Err(self.error(format!(
                        "expected `)` after arguments, found {}",
                        Self::describe(self.peek())
                    )));
                }
                self.next();
                if args.len() != func.arity() {
                    return Err(parse_error(
                        self.line,
                        col_err,
                        format!(
                            "`{}` takes {} argument(s), got {}",
                            func.name(),
                            func.arity(),
                            args.len()
                        ),
                    ));
                }
                Ok(Expr::Call(func, args))
            }
            t => Err(parse_error(
                self.line,
                col_err,
                format!("expected a value, found {}", Self::describe(&t)),
            )),
        }
    }
}

/// Parses `src`, reporting errors at `line` with columns offset by `col0`.
pub fn parse_at(src: &str, line: usize, col0: usize) -> Result<Expr> {
    let toks = Lexer::tokens(src, line, col0)?;
    let mut p = Parser {
        src,
        toks,
        i: 0,
        line,
        col0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected {}", Parser::describe(p.peek()))));
    }
    Ok(e)
}

pub fn parse(src: &str) -> Result<Expr> {
    parse_at(src, 1, 1)
}

// ---------------------------------------------------------------------------
// Compilation, evaluation and differentiation

/// An expression with names resolved to argument slots or numbers.
#[derive(Clone, Debug, PartialEq)]
pub enum Compiled {
    Num(f64),
    Slot(usize),
    Neg(Box<Compiled>),
    Binary(BinOp, Box<Compiled>, Box<Compiled>),
    Call(Func, Vec<Compiled>),
    If {
        lhs: Box<Compiled>,
        cmp: Cmp,
        rhs: Box<Compiled>,
        then: Box<Compiled>,
        otherwise: Box<Compiled>,
    },
}

/// Resolves names: `slots` maps variables to argument positions and
/// `constants` supplies numeric values.
pub fn compile(
    e: &Expr,
    slots: &[(&str, usize)],
    constants: &HashMap<String, f64>,
) -> std::result::Result<Compiled, String> {
    let c = |x: &Expr| compile(x, slots, constants).map(Box::new);
    Ok(match e {
        Expr::Num(v) => Compiled::Num(*v),
        Expr::Name(n) => {
            if let Some((_, s)) = slots.iter().find(|(name, _)| name == n) {
                Compiled::Slot(*s)
            } else if let Some(v) = constants.get(n) {
                Compiled::Num(*v)
            } else if let Some((_, v)) = BUILTIN_CONSTANTS.iter().find(|(name, _)| name == n) {
                Compiled::Num(*v)
            } else {
                return Err(format!("unknown name `{n}`"));
            }
        }
        Expr::Neg(a) => Compiled::Neg(c(a)?),
        Expr::Binary(op, a, b) => Compiled::Binary(*op, c(a)?, c(b)?),
        Expr::Call(f, args) => Compiled::Call(
            *f,
            args.iter()
                .map(|a| compile(a, slots, constants))
                .collect::<std::result::Result<_, _>>()?,
        ),
        Expr::If {
            lhs,
            cmp,
            rhs,
            then,
            otherwise,
        } => Compiled::If {
            lhs: c(lhs)?,
            cmp: *cmp,
            rhs: c(rhs)?,
            then: c(then)?,
            otherwise: c(otherwise)?,
        },
    })
}

impl Compiled {
    pub fn eval(&self, args: &[f64]) -> f64 {
        match self {
            Compiled::Num(v) => *v,
            Compiled::Slot(s) => args[*s],
            Compiled::Neg(a) => -a.eval(args),
            Compiled::Binary(op, a, b) => {
                let (x, y) = (a.eval(args), b.eval(args));
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => pow(x, y),
                }
            }
            Compiled::Call(f, a) => {
                let x = a[0].eval(args);
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Exp => x.exp(),
                    Func::Ln => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Atan2 => x.atan2(a[1].eval(args)),
                }
            }
            Compiled::If {
                lhs,
                cmp,
                rhs,
                then,
                otherwise,
            } => {
                if cmp.holds(lhs.eval(args), rhs.eval(args)) {
                    then.eval(args)
                } else {
                    otherwise.eval(args)
                }
            }
        }
    }

    pub fn depends_on(&self, slot: usize) -> bool {
        match self {
            Compiled::Num(_) => false,
            Compiled::Slot(s) => *s == slot,
            Compiled::Neg(a) => a.depends_on(slot),
            Compiled::Binary(_, a, b) => a.depends_on(slot) || b.depends_on(slot),
            Compiled::Call(_, args) => args.iter().any(|a| a.depends_on(slot)),
            Compiled::If {
                lhs,
                rhs,
                then,
                otherwise,
                ..
            } => [lhs, rhs, then, otherwise]
                .iter()
                .any(|x| x.depends_on(slot)),
        }
    }

    /// Symbolic partial derivative in `slot`, with light simplification.
    ///
    /// Conditionals differentiate branchwise; the guard is kept.
    pub fn derivative(&self, slot: usize) -> Compiled {
        use Compiled as C;
        if !self.depends_on(slot) {
            return C::Num(0.0);
        }
        match self {
            C::Num(_) => C::Num(0.0),
            C::Slot(s) => C::Num(if *s == slot { 1.0 } else { 0.0 }),
            C::Neg(a) => neg(a.derivative(slot)),
            C::Binary(op, a, b) => {
                let (da, db) = (a.derivative(slot), b.derivative(slot));
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul(da, b), mul(a, db)),
                    BinOp::Div => sub(div(da, b.clone()), div(mul(a, db), mul(b.clone(), b))),
                    BinOp::Pow => {
                        if !b.depends_on(slot) {
                            let bm1 = sub(b.clone(), C::Num(1.0));
                            mul(mul(b, powc(a, bm1)), da)
                        } else {
                            // a^b (b' ln a + b a'/a)
                            let lna = C::Call(Func::Ln, vec![a.clone()]);
                            let inner = add(mul(db, lna), div(mul(b.clone(), da), a.clone()));
                            mul(powc(a, b), inner)
                        }
                    }
                }
            }
            C::Call(f, args) => {
                let a = args[0].clone();
                let da = a.derivative(slot);
                match f {
                    Func::Sin => mul(C::Call(Func::Cos, vec![a]), da),
                    Func::Cos => neg(mul(C::Call(Func::Sin, vec![a]), da)),
                    Func::Tan => {
                        let c = C::Call(Func::Cos, vec![a]);
                        div(da, mul(c.clone(), c))
                    }
                    Func::Exp => mul(C::Call(Func::Exp, vec![a]), da),
                    Func::Ln => div(da, a),
                    Func::Sqrt => div(da, mul(C::Num(2.0), C::Call(Func::Sqrt, vec![a]))),
                    Func::Atan2 => {
                        // atan2(y, x): (x y' − y x') / (x² + y²)
                        let (y, x) = (a, args[1].clone());
                        let dx = x.derivative(slot);
                        let num = sub(mul(x.clone(), da), mul(y.clone(), dx));
                        let den = add(mul(x.clone(), x), mul(y.clone(), y));
                        div(num, den)
                    }
                }
            }
            C::If {
                lhs,
                cmp,
                rhs,
                then,
                otherwise,
            } => C::If {
                lhs: lhs.clone(),
                cmp: *cmp,
                rhs: rhs.clone(),
                then: Box::new(then.derivative(slot)),
                otherwise: Box::new(otherwise.derivative(slot)),
            },
        }
    }
}

/// `x^y` with integer exponents done by repeated multiplication so negative
/// bases behave.
fn pow(x: f64, y: f64) -> f64 {
    if y.fract() == 0.0 && y.abs() <= 64.0 {
        x.powi(y as i32)
    } else {
        x.powf(y)
    }
}

fn is_num(e: &Compiled, v: f64) -> bool {
    matches!(e, Compiled::Num(x) if *x == v)
}

fn neg(a: Compiled) -> Compiled {
    match a {
        Compiled::Num(v) => Compiled::Num(-v),
        Compiled::Neg(x) => *x,
        a => Compiled::Neg(Box::new(a)),
    }
}

fn add(a: Compiled, b: Compiled) -> Compiled {
    match (a, b) {
        (Compiled::Num(x), Compiled::Num(y)) => Compiled::Num(x + y),
        (a, b) if is_num(&a, 0.0) => b,
        (a, b) if is_num(&b, 0.0) => a,
        (a, b) => Compiled::Binary(BinOp::Add, Box::new(a), Box::new(b)),
    }
}

fn sub(a: Compiled, b: Compiled) -> Compiled {
    match (a, b) {
        (Compiled::Num(x), Compiled::Num(y)) => Compiled::Num(x - y),
        (a, b) if is_num(&b, 0.0) => a,
        (a, b) if is_num(&a, 0.0) => neg(b),
        (a, b) => Compiled::Binary(BinOp::Sub, Box::new(a), Box::new(b)),
    }
}

fn mul(a: Compiled, b: Compiled) -> Compiled {
    match (a, b) {
        (Compiled::Num(x), Compiled::Num(y)) => Compiled::Num(x * y),
        (a, _) if is_num(&a, 0.0) => Compiled::Num(0.0),
        (_, b) if is_num(&b, 0.0) => Compiled::Num(0.0),
        (a, b) if is_num(&a, 1.0) => b,
        (a, b) if is_num(&b, 1.0) => a,
        (a, b) => Compiled::Binary(BinOp::Mul, Box::new(a), Box::new(b)),
    }
}

fn div(a: Compiled, b: Compiled) -> Compiled {
    match (a, b) {
        (a, _) if is_num(&a, 0.0) => Compiled::Num(0.0),
        (a, b) if is_num(&b, 1.0) => a,
        (a, b) => Compiled::Binary(BinOp::Div, Box::new(a), Box::new(b)),
    }
}

fn powc(a: Compiled, b: Compiled) -> Compiled {
    match (a, b) {
        (_, b) if is_num(&b, 0.0) => Compiled::Num(1.0),
        (a, b) if is_num(&b, 1.0) => a,
        (a, b) => Compiled::Binary(BinOp::Pow, Box::new(a), Box::new(b)),
    }
}

/// A shareable scalar function of the argument slots.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

impl Compiled {
    pub fn into_fn(self) -> ScalarFn {
        Arc::new(move |args| self.eval(args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, args: &[f64]) -> f64 {
        let slots = [("t", 0), ("x", 1), ("y", 2), ("z", 3)];
        compile(&parse(src).unwrap(), &slots, &HashMap::new())
            .unwrap()
            .eval(args)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2*3", &[]), 7.0);
        assert_eq!(eval("2^3^2", &[]), 512.0);
        assert_eq!(eval("-2^2", &[]), -4.0);
        assert_eq!(eval("8/4/2", &[]), 1.0);
        assert_eq!(eval("2^-1", &[]), 0.5);
        assert_eq!(eval("10 - 4 - 3", &[]), 3.0);
    }

    #[test]
    fn functions_and_conditionals() {
        let a = [0.0, 0.3, -0.4, 0.0];
        assert!((eval("sqrt(x^2 + y^2)", &a) - 0.5).abs() < 1e-15);
        assert!((eval("atan2(y, x)", &a) - (-0.4f64).atan2(0.3)).abs() < 1e-15);
        assert_eq!(eval("if x^2 + y^2 < 1 then 1 else 2", &a), 1.0);
        assert_eq!(eval("if x >= 1 then 1 else 2", &a), 2.0);
        assert!((eval("exp(ln(2)) * pi", &a) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn errors_carry_columns() {
        match parse_at("x + * y", 4, 10) {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 4);
                assert_eq!(column, 14);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("foo(x)"),
            Err(Error::Parse { column: 1, .. })
        ));
        assert!(matches!(parse("(x + 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse("atan2(x)"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse("x $ y"),
            Err(Error::Parse { column: 3, .. })
        ));
        assert!(matches!(parse("1.2.3"), Err(Error::Parse { .. })));
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "-(x + y)^2",
            "(-x)^2",
            "a - (b - c)",
            "a/(b*c)",
            "if x < 1 then -y else (if y > 0 then 1 else 2)",
            "(if x < 1 then 1 else 2) + 3",
            "2^3^2",
            "(2^3)^2",
            "--x",
            "1e-7*x",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let slots = [("t", 0), ("x", 1), ("y", 2)];
        for src in [
            "x^2*y - sin(x*y)",
            "exp(-t)*x/(x^2 + y^2)",
            "sqrt(1 + x^2)^3",
            "atan2(y, x)",
            "x^y",
            "if x^2 + y^2 < 1 then x*y else ln(x^2 + y^2)",
            "tan(x) - cos(y)",
        ] {
            let c = compile(&parse(src).unwrap(), &slots, &HashMap::new()).unwrap();
            let p = [0.3, 0.7, 0.4];
            for s in 0..3 {
                let d = c.derivative(s).eval(&p);
                let h = 1e-6;
                let mut a = p;
                let mut b = p;
                a[s] += h;
                b[s] -= h;
                let fd = (c.eval(&a) - c.eval(&b)) / (2.0 * h);
                assert!((d - fd).abs() < 1e-7, "{src} slot {s}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn display_uses_pi_symbol() {
        assert_eq!(parse("2*pi").unwrap().display(), "2π");
        assert_eq!(parse("pi").unwrap().display(), "π");
        assert_eq!(parse("-2*pi").unwrap().display(), "-2π");
        assert_eq!(parse("x + 1").unwrap().display(), "x + 1.0");
    }
}
