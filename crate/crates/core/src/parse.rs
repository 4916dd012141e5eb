//! Parser for root expressions and comma-separated root lists.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := exp_atom ('^' exponent)?        right associative
//! exp_atom := '-' exp_atom | INTEGER | '(' exponent ')'
//! atom     := INTEGER | IDENT | '(' expr ')'
//! ```
//!
//! `-a^2` is `-(a^2)`. Fractions are written as integer division (`1/2`).
//! Every parse result is canonical.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::Rational;
use crate::expr::Expr;

/// Largest absolute exponent a parsed expression may carry.
pub const MAX_EXPONENT: u64 = 1 << 20;
/// Largest constant (in bits) a literal power may fold into.
const MAX_CONSTANT_BITS: u64 = 1 << 22;
const MAX_DEPTH: usize = 100;

/// Half-open byte range into the parsed input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    fn shift(self, by: usize) -> Self {
        SourceSpan::new(self.start + by, self.end + by)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Unexpected token or end of input; carries what was expected.
    Syntax(String),
    InvalidExponent(String),
    DivisionByZero,
    TooDeep,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Syntax(m) => {
                write!(f, "syntax error at offset {}: {m}", self.span.start)
            }
            ParseErrorKind::InvalidExponent(m) => {
                write!(f, "invalid exponent at offset {}: {m}", self.span.start)
            }
            ParseErrorKind::DivisionByZero => {
                write!(f, "division by zero at offset {}", self.span.start)
            }
            ParseErrorKind::TooDeep => {
                write!(
                    f,
                    "expression nested too deeply at offset {}",
                    self.span.start
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootListError {
    #[error("root list is empty")]
    Empty,
    #[error("root entry {index} is empty (offset {})", span.start)]
    EmptyEntry { index: usize, span: SourceSpan },
    #[error("root entry {index}: {source}")]
    Entry {
        index: usize,
        #[source]
        source: ParseError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let single = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, SourceSpan::new(start, start + 1)));
            i += 1;
        } else if b.is_ascii_whitespace() {
            i += 1;
        } else if b.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = BigInt::from_str(&src[start..i]).expect("ascii digits");
            out.push((Tok::Int(n), SourceSpan::new(start, i)));
        } else if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((
                Tok::Ident(src[start..i].to_string()),
                SourceSpan::new(start, i),
            ));
        } else {
            let ch = src[start..].chars().next().expect("non-empty");
            return Err(ParseError {
                kind: ParseErrorKind::Syntax(format!("unexpected character {ch:?}")),
                span: SourceSpan::new(start, start + ch.len_utf8()),
            });
        }
    }
    out.push((Tok::Eof, SourceSpan::new(src.len(), src.len())));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax(format!(
                "expected {expected}, found {}",
                self.peek().describe()
            )),
            span: self.span(),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError {
                kind: ParseErrorKind::TooDeep,
                span: self.span(),
            });
        }
        Ok(())
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected("`)`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Expr::add([acc, rhs]);
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc - rhs;
                }
                _ => break,
            }
            self.check_size(&acc)?;
        }
        self.depth -= 1;
        Ok(acc)
    }

    /// A product of factors. A leading `-` negates the whole product, and all
    /// factors are multiplied at once, so printed products read back to the
    /// same canonical tree.
    fn term(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            self.enter()?;
            let inner = self.term()?;
            self.depth -= 1;
            return Ok(-inner);
        }
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Slash => {
                    let start = self.bump().1.start;
                    let rhs = self.unary()?;
                    let end = self.toks[self.pos.saturating_sub(1)].1.end;
                    if rhs.is_zero() {
                        return Err(ParseError {
                            kind: ParseErrorKind::DivisionByZero,
                            span: SourceSpan::new(start, end.max(start)),
                        });
                    }
                    self.check_pow(&rhs, -1, SourceSpan::new(start, end.max(start)))?;
                    factors.push(Expr::pow(rhs, -1));
                }
                _ => break,
            }
        }
        let acc = Expr::mul(factors);
        self.check_size(&acc)?;
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(-inner);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let start = self.bump().1.start;
        let exp = self.exponent()?;
        let end = self.toks[self.pos.saturating_sub(1)].1.end;
        let span = SourceSpan::new(start, end.max(start));
        let exp = i64::try_from(exp).map_err(|_| out_of_range(span))?;
        self.check_pow(&base, exp, span)?;
        let r = Expr::checked_pow(base, exp).ok_or_else(|| out_of_range(span))?;
        if r.max_abs_exponent() > MAX_EXPONENT {
            return Err(out_of_range(span));
        }
        Ok(r)
    }

    fn check_pow(&self, base: &Expr, exp: i64, span: SourceSpan) -> Result<(), ParseError> {
        let e = exp.unsigned_abs();
        if e > MAX_EXPONENT {
            return Err(out_of_range(span));
        }
        if base.max_abs_exponent().saturating_mul(e) > MAX_EXPONENT {
            return Err(out_of_range(span));
        }
        if constant_bits(base).saturating_mul(e) > MAX_CONSTANT_BITS {
            return Err(out_of_range(span));
        }
        Ok(())
    }

    fn check_size(&self, e: &Expr) -> Result<(), ParseError> {
        if e.max_abs_exponent() > MAX_EXPONENT {
            return Err(out_of_range(self.span()));
        }
        Ok(())
    }

    /// Integer-valued exponent chain; evaluated eagerly.
    fn exponent(&mut self) -> Result<i128, ParseError> {
        let span = self.span();
        let base = self.exp_atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        self.enter()?;
        let e = self.exponent()?;
        self.depth -= 1;
        if e < 0 {
            if base == 1 || base == -1 {
                return Ok(if e % 2 == 0 { 1 } else { base });
            }
            return Err(ParseError {
                kind: ParseErrorKind::InvalidExponent("exponent must be an integer".into()),
                span,
            });
        }
        let e = u32::try_from(e).map_err(|_| out_of_range(span))?;
        base.checked_pow(e)
            .filter(|v| v.unsigned_abs() <= MAX_EXPONENT as u128)
            .ok_or_else(|| out_of_range(span))
    }

    fn exp_atom(&mut self) -> Result<i128, ParseError> {
        self.enter()?;
        let (tok, span) = self.bump();
        let v = match tok {
            Tok::Minus => -self.exp_atom()?,
            Tok::Int(n) => {
                let v = i128::try_from(n).map_err(|_| out_of_range(span))?;
                if v.unsigned_abs() > MAX_EXPONENT as u128 {
                    return Err(out_of_range(span));
                }
                v
            }
            Tok::LParen => {
                let v = self.exponent()?;
                if *self.peek() != Tok::RParen {
                    return Err(ParseError {
                        kind: ParseErrorKind::InvalidExponent(format!(
                            "exponent must be an integer, found {}",
                            self.peek().describe()
                        )),
                        span: self.span(),
                    });
                }
                self.bump();
                v
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::InvalidExponent(format!(
                        "exponent must be an integer literal, found {}",
                        other.describe()
                    )),
                    span,
                })
            }
        };
        self.depth -= 1;
        Ok(v)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Constant(Rational::from_integer(n)))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr::Symbol(s))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            _ => Err(self.unexpected("a number, identifier or `(`")),
        }
    }
}

fn out_of_range(span: SourceSpan) -> ParseError {
    ParseError {
        kind: ParseErrorKind::InvalidExponent("exponent out of range".into()),
        span,
    }
}

fn constant_bits(e: &Expr) -> u64 {
    match e {
        Expr::Constant(c) => c.bits(),
        Expr::Symbol(_) => 0,
        Expr::Power(b, _) => constant_bits(b),
        Expr::Product(xs) | Expr::Sum(xs) => xs.iter().map(constant_bits).max().unwrap_or(0),
    }
}

/// Parses a single root expression into canonical form.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

/// Splits on commas outside parentheses and parses each entry.
/// Entry indices in errors are 1-based; spans are offsets into `src`.
pub fn parse_root_list(src: &str) -> Result<Vec<Expr>, RootListError> {
    if src.trim().is_empty() {
        return Err(RootListError::Empty);
    }
    let mut entries = Vec::new();
    let mut depth = 0i64;
    let mut start = 0;
    for (i, b) in src.bytes().enumerate() {
        match b {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b',' if depth == 0 => {
                entries.push((start, i));
                start = i + 1;
            }
            _ => {}
        }
    }
    entries.push((start, src.len()));

    let mut out = Vec::with_capacity(entries.len());
    for (k, (s, e)) in entries.into_iter().enumerate() {
        let index = k + 1;
        let text = &src[s..e];
        if text.trim().is_empty() {
            return Err(RootListError::EmptyEntry {
                index,
                span: SourceSpan::new(s, e),
            });
        }
        let expr = parse_expr(text).map_err(|err| RootListError::Entry {
            index,
            source: ParseError {
                kind: err.kind,
                span: err.span.shift(s),
            },
        })?;
        out.push(expr);
    }
    Ok(out)
}
