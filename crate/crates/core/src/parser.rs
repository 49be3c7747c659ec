//! Infix formula text <-> [`Expr`].
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := prefix (('*' | '/') prefix | <implicit> prefix)*
//! prefix  := ('-' | '+') prefix | power
//! power   := atom ('^' prefix)?            right associative
//! atom    := number | ident | ident '(' sum ')' | '(' sum ')'
//!          | 'cases' '{' label ':' number (',' label ':' number)* '}' '(' ident ')'
//! ```
//!
//! Implicit multiplication applies after a number or a closing parenthesis
//! when the next token starts an identifier or a parenthesised group, so
//! `0.264311(BMXWT)`, `2x` and `(a)(b)` all parse as products. Exponents must
//! be numeric constants: `^2` is `square`, `^0.5` is `sqrt`, `^-1` is `inv`,
//! other integers expand to repeated products.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::expr::{eval_constant, BinaryOp, Expr, UnaryOp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unbalanced parentheses")]
    UnbalancedParentheses,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl ParseError {
    fn syntax(offset: usize, msg: impl Into<String>) -> Self {
        Self {
            kind: ParseErrorKind::Syntax(msg.into()),
            offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Str(String),
    Op(char),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            let t = lx.next()?;
            let end = t.0 == Tok::End;
            out.push(t);
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = self.bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let tok = match b {
            b'0'..=b'9' | b'.' => return self.number(),
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
            }
            b'"' => {
                let close = self.src[start + 1..]
                    .find('"')
                    .ok_or_else(|| ParseError::syntax(start, "unterminated string"))?;
                self.pos = start + 1 + close + 1;
                return Ok((Tok::Str(self.src[start + 1..start + 1 + close].to_string()), start));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(b as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b':' => Tok::Colon,
            b',' => Tok::Comma,
            _ => {
                let ch = self.src[start..].chars().next().unwrap();
                return Err(ParseError::syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }

    fn number(&mut self) -> Result<(Tok, usize), ParseError> {
        let start = self.pos;
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while lx.pos < lx.bytes.len() && lx.bytes[lx.pos].is_ascii_digit() {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(ParseError::syntax(start, "malformed number"));
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // `2exp(x)`: the `e` starts an identifier.
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        let v: f64 = text
            .parse()
            .map_err(|_| ParseError::syntax(start, format!("malformed number `{text}`")))?;
        if !v.is_finite() {
            return Err(ParseError::syntax(start, format!("number `{text}` out of range")));
        }
        Ok((Tok::Num(v), start))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    depth: usize,
}

const FUNCTIONS: [(&str, UnaryOp); 6] = [
    ("sqrt", UnaryOp::Sqrt),
    ("exp", UnaryOp::Exp),
    ("log", UnaryOp::Log),
    ("ln", UnaryOp::Log),
    ("square", UnaryOp::Square),
    ("inv", UnaryOp::Inv),
];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn offset(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if t != Tok::End {
            self.i += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else if want == Tok::RParen {
            Err(ParseError {
                kind: ParseErrorKind::UnbalancedParentheses,
                offset: self.offset(),
            })
        } else {
            Err(ParseError::syntax(self.offset(), format!("expected {what}")))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinaryOp::Add,
                Tok::Op('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinaryOp::Mul,
                Tok::Op('/') => BinaryOp::Div,
                Tok::Ident(_) | Tok::LParen if self.implicit_allowed() => {
                    let rhs = self.prefix()?;
                    lhs = Expr::mul(lhs, rhs);
                    continue;
                }
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.prefix()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    /// Implicit multiplication only follows a number or a closing parenthesis.
    fn implicit_allowed(&self) -> bool {
        self.i > 0 && matches!(self.toks[self.i - 1].0, Tok::Num(_) | Tok::RParen)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                let inner = self.prefix()?;
                Ok(match inner {
                    Expr::Constant(c) => Expr::Constant(-c),
                    other => Expr::neg(other),
                })
            }
            Tok::Op('+') => {
                self.bump();
                self.prefix()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        let at = self.offset();
        self.bump();
        let exponent = self.prefix()?;
        let Some(k) = eval_constant(&exponent) else {
            return Err(ParseError::syntax(at, "exponent must be a numeric constant"));
        };
        power_of(base, k).ok_or_else(|| ParseError::syntax(at, format!("unsupported exponent {k}")))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Constant(v)),
            Tok::LParen => {
                self.depth += 1;
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                self.depth -= 1;
                Ok(e)
            }
            Tok::Ident(name) if name == "cases" && *self.peek() == Tok::LBrace => self.cases(),
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let Some(op) = FUNCTIONS.iter().find(|(n, _)| *n == name).map(|(_, op)| *op) else {
                        return Err(ParseError {
                            kind: ParseErrorKind::UnknownFunction(name),
                            offset: at,
                        });
                    };
                    self.bump();
                    let arg = self.sum()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::unary(op, arg))
                } else {
                    Ok(Expr::Feature(name))
                }
            }
            Tok::RParen => Err(ParseError {
                kind: ParseErrorKind::UnbalancedParentheses,
                offset: at,
            }),
            Tok::End => Err(ParseError::syntax(at, "unexpected end of input")),
            t => Err(ParseError::syntax(at, format!("unexpected token {t:?}"))),
        }
    }

    fn cases(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut table = BTreeMap::new();
        loop {
            let at = self.offset();
            let label = match self.bump() {
                Tok::Ident(s) | Tok::Str(s) => s,
                Tok::Num(v) => format!("{v}"),
                Tok::RBrace if table.is_empty() => break,
                _ => return Err(ParseError::syntax(at, "expected a category label")),
            };
            self.expect(Tok::Colon, "`:`")?;
            let at = self.offset();
            let value = match self.prefix()? {
                Expr::Constant(v) => v,
                _ => return Err(ParseError::syntax(at, "category value must be a number")),
            };
            if table.insert(label.clone(), value).is_some() {
                return Err(ParseError::syntax(at, format!("duplicate category `{label}`")));
            }
            match self.bump() {
                Tok::Comma => continue,
                Tok::RBrace => break,
                _ => return Err(ParseError::syntax(self.toks[self.i - 1].1, "expected `,` or `}`")),
            }
        }
        self.expect(Tok::LParen, "`(` after cases{...}")?;
        let at = self.offset();
        let Tok::Ident(name) = self.bump() else {
            return Err(ParseError::syntax(at, "expected a column name"));
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(Expr::CategoryMap { name, table })
    }
}

fn power_of(base: Expr, k: f64) -> Option<Expr> {
    if k == 0.5 {
        return Some(Expr::unary(UnaryOp::Sqrt, base));
    }
    if k.fract() != 0.0 || k == 0.0 || k.abs() > 64.0 {
        return None;
    }
    let n = k.abs() as u32;
    let pos = match n {
        1 => base,
        2 => Expr::unary(UnaryOp::Square, base),
        _ => {
            let mut acc = Expr::unary(UnaryOp::Square, base.clone());
            for _ in 2..n {
                acc = Expr::mul(acc, base.clone());
            }
            acc
        }
    };
    Some(if k < 0.0 { Expr::unary(UnaryOp::Inv, pos) } else { pos })
}

/// Parses an infix formula.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0, depth: 0 };
    let e = p.sum()?;
    match p.peek() {
        Tok::End => Ok(e),
        Tok::RParen => Err(ParseError {
            kind: ParseErrorKind::UnbalancedParentheses,
            offset: p.offset(),
        }),
        _ => Err(ParseError::syntax(p.offset(), "unexpected trailing input")),
    }
}

/// Shortest round-trip text for a constant.
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn is_plain_label(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_PREFIX: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Constant(c) if c.is_sign_negative() => PREC_PREFIX,
        Expr::Constant(_) | Expr::Feature(_) | Expr::CategoryMap { .. } => PREC_ATOM,
        Expr::Unary(UnaryOp::Neg, _) => PREC_PREFIX,
        Expr::Unary(UnaryOp::Square, _) => PREC_POWER,
        Expr::Unary(..) => PREC_ATOM,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => PREC_SUM,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => PREC_PRODUCT,
    }
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    let paren = prec(e) < min_prec;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Constant(c) => out.push_str(&format_number(*c)),
        Expr::Feature(n) => out.push_str(n),
        Expr::CategoryMap { name, table } => {
            out.push_str("cases{");
            for (i, (k, v)) in table.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                if is_plain_label(k) {
                    out.push_str(k);
                } else {
                    let _ = write!(out, "\"{k}\"");
                }
                out.push_str(": ");
                out.push_str(&format_number(*v));
            }
            let _ = write!(out, "}}({name})");
        }
        Expr::Unary(UnaryOp::Neg, c) => {
            out.push('-');
            write_expr(out, c, PREC_POWER);
        }
        Expr::Unary(UnaryOp::Square, c) => {
            write_expr(out, c, PREC_ATOM);
            out.push_str("^2");
        }
        Expr::Unary(op, c) => {
            out.push_str(op.name());
            out.push('(');
            write_expr(out, c, 0);
            out.push(')');
        }
        Expr::Binary(op, l, r) => {
            let p = prec(e);
            write_expr(out, l, p);
            match op {
                BinaryOp::Add | BinaryOp::Sub => {
                    let _ = write!(out, " {} ", op.symbol());
                }
                _ => out.push_str(op.symbol()),
            }
            // Left associative: an equal-precedence right operand keeps its parentheses.
            write_expr(out, r, p + 1);
        }
    }
    if paren {
        out.push(')');
    }
}

/// Prints with minimal parentheses; `parse(print(e))` rebuilds the same tree
/// up to folding of negated literals.
pub fn print(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr, 0);
    out
}
