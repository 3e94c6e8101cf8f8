//! Template DSL.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*'? factor)*
//! factor := '-' factor | atom ('^' nat)*
//! atom   := scalar | 'X' | 'Y' | 'I' | '(' expr ')'
//! scalar := nat ('/' nat)?
//! ```
//!
//! Juxtaposition multiplies, so `3Y`, `XY` and `Y(I + X)` are products.
//! `I` and `1` both denote the identity operator.

use std::fmt;

use thiserror::Error;

use crate::scalar::{FieldDescriptor, Scalar, ScalarError};
use crate::template::Template;

/// Bound on the expansion size, counted as the degree of the expression with
/// every leaf (constants included) weighing one.
pub const MAX_WEIGHT: u64 = 128;
/// Bound on nested parentheses and unary minus signs.
pub const MAX_DEPTH: usize = 64;

pub type Span = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    I,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Const(Scalar),
    Var(Var),
    Neg(Box<Expr>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, u32),
}

/// Template expression with the byte span it was parsed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {}, found {found}", expected.join(" or "))]
    Unexpected {
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("negative exponents are not allowed")]
    NegativeExponent,
    #[error("exponent does not fit in 32 bits")]
    ExponentOverflow,
    #[error("expression too large to expand (size bound {MAX_WEIGHT})")]
    TooLarge,
    #[error("nesting deeper than {MAX_DEPTH}")]
    TooDeep,
    #[error(transparent)]
    Scalar(ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {pos}: {kind}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn is_negative_exponent(&self) -> bool {
        self.kind == ParseErrorKind::NegativeExponent
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(String),
    Var(Var),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
    Bad(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(s) if s.len() > 12 => write!(f, "number `{}...`", &s[..12]),
            Tok::Num(s) => write!(f, "number `{s}`"),
            Tok::Var(v) => write!(f, "`{v:?}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
            Tok::Bad(c) => write!(f, "character {c:?}"),
        }
    }
}

fn lex(text: &str) -> Vec<(Tok, Span)> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((start, ch)) = chars.next() {
        let tok = match ch {
            c if c.is_whitespace() => continue,
            '0'..='9' => {
                let mut end = start + 1;
                while let Some(&(k, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    end = k + 1;
                    chars.next();
                }
                out.push((Tok::Num(text[start..end].to_string()), (start, end)));
                continue;
            }
            'X' => Tok::Var(Var::X),
            'Y' => Tok::Var(Var::Y),
            'I' => Tok::Var(Var::I),
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => Tok::Bad(other),
        };
        out.push((tok, (start, start + ch.len_utf8())));
    }
    out.push((Tok::End, (text.len(), text.len())));
    out
}

const FACTOR_START: &[&str] = &["number", "`X`", "`Y`", "`I`", "`(`", "`-`"];

struct Parser {
    toks: Vec<(Tok, Span)>,
    at: usize,
    depth: usize,
    field: FieldDescriptor,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn span(&self) -> Span {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.at].clone();
        if t.0 != Tok::End {
            self.at += 1;
        }
        t
    }

    fn prev_end(&self) -> usize {
        if self.at == 0 {
            0
        } else {
            self.toks[self.at - 1].1 .1
        }
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            pos: self.span().0,
            kind,
        }
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        self.error(ParseErrorKind::Unexpected {
            expected: expected.to_vec(),
            found: self.peek().to_string(),
        })
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error(ParseErrorKind::TooDeep));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let start = self.span().0;
        let mut terms = vec![self.term()?];
        loop {
            let negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => break,
            };
            let (_, op_span) = self.bump();
            let t = self.term()?;
            terms.push(if negate {
                let span = (op_span.0, t.span.1);
                Expr {
                    kind: ExprKind::Neg(Box::new(t)),
                    span,
                }
            } else {
                t
            });
        }
        Ok(collapse(terms, ExprKind::Add, (start, self.prev_end())))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let start = self.span().0;
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                }
                Tok::Num(_) | Tok::Var(_) | Tok::LParen => {}
                _ => break,
            }
            factors.push(self.factor()?);
        }
        Ok(collapse(factors, ExprKind::Mul, (start, self.prev_end())))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let start = self.span().0;
        if *self.peek() == Tok::Minus {
            self.bump();
            self.enter()?;
            let inner = self.factor()?;
            self.depth -= 1;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(inner)),
                span: (start, self.prev_end()),
            });
        }
        let mut base = self.atom()?;
        let mut exponent: Option<u32> = None;
        while *self.peek() == Tok::Caret {
            self.bump();
            let k = self.exponent()?;
            exponent = Some(match exponent {
                None => k,
                Some(e) => e
                    .checked_mul(k)
                    .ok_or_else(|| self.error(ParseErrorKind::ExponentOverflow))?,
            });
        }
        if let Some(k) = exponent {
            base = Expr {
                kind: ExprKind::Pow(Box::new(base), k),
                span: (start, self.prev_end()),
            };
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        match self.peek().clone() {
            Tok::Num(digits) => {
                let k = digits
                    .parse::<u32>()
                    .map_err(|_| self.error(ParseErrorKind::ExponentOverflow))?;
                self.bump();
                Ok(k)
            }
            Tok::Minus => Err(self.error(ParseErrorKind::NegativeExponent)),
            _ => Err(self.unexpected(&["natural number"])),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.span().0;
        let kind = match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                ExprKind::Var(v)
            }
            Tok::Num(digits) => {
                self.bump();
                let mut value = self.number(&digits, start)?;
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let den_pos = self.span().0;
                    let Tok::Num(den) = self.peek().clone() else {
                        return Err(self.unexpected(&["number"]));
                    };
                    self.bump();
                    let den = self.number(&den, den_pos)?;
                    value = value.try_div(&den).map_err(|e| ParseError {
                        pos: den_pos,
                        kind: ParseErrorKind::Scalar(e),
                    })?;
                }
                ExprKind::Const(value)
            }
            Tok::LParen => {
                self.bump();
                self.enter()?;
                let inner = self.expr()?;
                self.depth -= 1;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(&["`)`", "`+`", "`-`", "`*`", "`^`"]));
                }
                self.bump();
                return Ok(Expr {
                    kind: inner.kind,
                    span: (start, self.prev_end()),
                });
            }
            Tok::Minus => unreachable!("handled by factor"),
            _ => return Err(self.unexpected(FACTOR_START)),
        };
        Ok(Expr {
            kind,
            span: (start, self.prev_end()),
        })
    }

    fn number(&self, digits: &str, pos: usize) -> Result<Scalar, ParseError> {
        Scalar::parse(digits, self.field).map_err(|e| ParseError {
            pos,
            kind: ParseErrorKind::Scalar(e),
        })
    }
}

fn collapse(mut items: Vec<Expr>, wrap: fn(Vec<Expr>) -> ExprKind, span: Span) -> Expr {
    if items.len() == 1 {
        items.pop().expect("one item")
    } else {
        Expr {
            kind: wrap(items),
            span,
        }
    }
}

/// Expansion size bound; see [`MAX_WEIGHT`]. Saturates instead of overflowing.
fn weight(e: &Expr) -> u64 {
    match &e.kind {
        ExprKind::Const(_) | ExprKind::Var(_) => 1,
        ExprKind::Neg(inner) => weight(inner),
        ExprKind::Add(items) => items.iter().map(weight).max().unwrap_or(0),
        ExprKind::Mul(items) => items.iter().map(weight).fold(0, u64::saturating_add),
        ExprKind::Pow(base, k) => weight(base).saturating_mul(u64::from(*k)),
    }
}

fn first_too_large(e: &Expr) -> Option<usize> {
    if weight(e) <= MAX_WEIGHT {
        return None;
    }
    let children: Vec<&Expr> = match &e.kind {
        ExprKind::Neg(inner) | ExprKind::Pow(inner, _) => vec![inner],
        ExprKind::Add(items) | ExprKind::Mul(items) => items.iter().collect(),
        _ => vec![],
    };
    children
        .into_iter()
        .find_map(first_too_large)
        .or(Some(e.span.0))
}

/// Parses template DSL text into an expression tree.
pub fn parse_template_expr(text: &str, field: FieldDescriptor) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text),
        at: 0,
        depth: 0,
        field,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        let mut expected = vec!["`+`", "`-`", "`*`", "`^`", "end of input"];
        if p.depth == 0 && *p.peek() == Tok::RParen {
            expected.retain(|&t| t != "`^`");
        }
        return Err(p.unexpected(&expected));
    }
    if let Some(pos) = first_too_large(&e) {
        return Err(ParseError {
            pos,
            kind: ParseErrorKind::TooLarge,
        });
    }
    Ok(e)
}

fn expand_in(e: &Expr, field: FieldDescriptor) -> Template {
    let combine = |acc: Template, t: Template, mul: bool| {
        if mul {
            acc.try_mul(&t)
        } else {
            acc.try_add(&t)
        }
        .expect("single field")
    };
    match &e.kind {
        ExprKind::Const(c) => Template::constant(c.clone()),
        ExprKind::Var(Var::X) => Template::x(field),
        ExprKind::Var(Var::Y) => Template::y(field),
        ExprKind::Var(Var::I) => Template::identity(field),
        ExprKind::Neg(inner) => expand_in(inner, field).neg(),
        ExprKind::Add(items) => items.iter().fold(Template::zero(field), |acc, t| {
            combine(acc, expand_in(t, field), false)
        }),
        ExprKind::Mul(items) => items.iter().fold(Template::identity(field), |acc, t| {
            combine(acc, expand_in(t, field), true)
        }),
        ExprKind::Pow(base, k) => expand_in(base, field).pow(*k),
    }
}

impl Expr {
    /// Multiplies out to a coefficient map.
    pub fn expand(&self, field: FieldDescriptor) -> Template {
        expand_in(self, field)
    }
}

/// Parses and expands in one step.
pub fn parse_template(text: &str, field: FieldDescriptor) -> Result<Template, ParseError> {
    Ok(parse_template_expr(text, field)?.expand(field))
}
