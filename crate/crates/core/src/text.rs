//! Tokenizer and expression parser for the printed forms of Lazard elements
//! and truncated series.
//!
//! Grammar (whitespace between tokens is ignored):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := int ['/' int] | '(' expr ')' | ident ['^' int]
//! ```
//!
//! Identifiers `p1`, `p2`, ... are Lazard generators; any other identifier is a
//! formal variable.

use thiserror::Error;

use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected character `{ch}` at offset {offset}")]
    UnexpectedChar { ch: char, offset: usize },
    #[error("unexpected token `{token}` at offset {offset}")]
    UnexpectedToken { token: String, offset: usize },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid generator `{0}`")]
    InvalidGenerator(String),
    #[error("coefficient ring has no generator `{0}`")]
    GeneratorNotAllowed(String),
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Expr {
    Number(Rational),
    Generator(u32),
    Variable(String),
    Neg(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Sym(char),
}

fn tokenize(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (offset, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|c| c.1).collect();
            out.push((Tok::Int(s), offset));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|c| c.1).collect();
            out.push((Tok::Ident(s), offset));
        } else if "+-*/^()".contains(ch) {
            out.push((Tok::Sym(ch), offset));
            i += 1;
        } else {
            return Err(ParseError::UnexpectedChar { ch, offset });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.pos) {
            None => ParseError::UnexpectedEnd,
            Some((tok, offset)) => ParseError::UnexpectedToken {
                token: match tok {
                    Tok::Int(s) | Tok::Ident(s) => s.clone(),
                    Tok::Sym(c) => c.to_string(),
                },
                offset: *offset,
            },
        }
    }

    fn eat(&mut self, sym: char) -> bool {
        if self.peek() == Some(&Tok::Sym(sym)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Int(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected()),
        }
    }

    fn small_int(&mut self) -> Result<u32, ParseError> {
        let s = self.int()?;
        s.parse().map_err(|_| ParseError::InvalidNumber(s))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let first_negative = self.eat('-');
        let first = self.term()?;
        terms.push(if first_negative {
            Expr::Neg(Box::new(first))
        } else {
            first
        });
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let literal = if self.eat('/') {
                    format!("{n}/{}", self.int()?)
                } else {
                    n
                };
                let q = literal.parse().map_err(|_| ParseError::InvalidNumber(literal))?;
                Ok(Expr::Number(q))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.unexpected());
                }
                Ok(inner)
            }
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let base = match generator_index(&name)? {
                    Some(i) => Expr::Generator(i),
                    None => Expr::Variable(name),
                };
                if self.eat('^') {
                    Ok(Expr::Power(Box::new(base), self.small_int()?))
                } else {
                    Ok(base)
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}

fn generator_index(name: &str) -> Result<Option<u32>, ParseError> {
    match name.strip_prefix('p') {
        Some(digits) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
            match digits.parse::<u32>() {
                Ok(i) if i >= 1 && !digits.starts_with('0') => Ok(Some(i)),
                _ => Err(ParseError::InvalidGenerator(name.to_string())),
            }
        }
        _ => Ok(None),
    }
}

pub(crate) fn parse_expr(input: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(input)?;
    let mut parser = Parser { toks, pos: 0 };
    let e = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.unexpected());
    }
    Ok(e)
}

/// Leaves of an expression tree, handed to the evaluation callback.
pub(crate) enum Leaf<'a> {
    Number(&'a Rational),
    Generator(u32),
    Variable(&'a str),
}

/// Ring operations needed to fold a parsed expression.
pub(crate) trait ExprAlgebra: Sized {
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

pub(crate) fn evaluate<A, F>(expr: &Expr, leaf: &F) -> Result<A, ParseError>
where
    A: ExprAlgebra,
    F: Fn(Leaf<'_>) -> Result<A, ParseError>,
{
    let one = || leaf(Leaf::Number(&Rational::one()));
    Ok(match expr {
        Expr::Number(q) => leaf(Leaf::Number(q))?,
        Expr::Generator(i) => leaf(Leaf::Generator(*i))?,
        Expr::Variable(v) => leaf(Leaf::Variable(v))?,
        Expr::Neg(e) => evaluate(e, leaf)?.neg(),
        Expr::Sum(terms) => {
            let mut acc = leaf(Leaf::Number(&Rational::zero()))?;
            for t in terms {
                acc = acc.add(&evaluate(t, leaf)?);
            }
            acc
        }
        Expr::Product(factors) => {
            let mut acc = one()?;
            for f in factors {
                acc = acc.mul(&evaluate(f, leaf)?);
            }
            acc
        }
        Expr::Power(base, k) => {
            let b: A = evaluate(base, leaf)?;
            let mut acc = one()?;
            for _ in 0..*k {
                acc = acc.mul(&b);
            }
            acc
        }
    })
}
