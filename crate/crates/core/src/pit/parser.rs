//! Recursive-descent parser for arithmetic formulas.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! formula  := term { ("+" | "-") term }
//! term     := factor { "*" factor }
//! factor   := "(" formula ")" | "-" factor | variable | constant
//! variable := "x" nonzero-digit { digit }
//! constant := integer [ "/" positive-integer ]
//! ```
//!
//! Subtraction and unary minus are parse-time sugar: `a - b` becomes
//! `a + (-1)*b` and `-f` becomes `(-1)*f`, so the tree contains only
//! `Add`/`Mul`/`Var`/`Const` nodes and each introduced `-1` counts as a
//! leaf toward the formula size.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::linalg::{GaussianRational, Rational};

/// An arithmetic formula over ℚ(i) with 1-based variables `x1, x2, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Var(usize),
    Const(GaussianRational),
    Add(Box<Formula>, Box<Formula>),
    Mul(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(index: usize) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        Formula::Var(index)
    }

    pub fn constant(c: GaussianRational) -> Self {
        Formula::Const(c)
    }

    pub fn add(lhs: Formula, rhs: Formula) -> Self {
        Formula::Add(Box::new(lhs), Box::new(rhs))
    }

    pub fn mul(lhs: Formula, rhs: Formula) -> Self {
        Formula::Mul(Box::new(lhs), Box::new(rhs))
    }

    fn neg(f: Formula) -> Self {
        Formula::mul(Formula::Const(GaussianRational::from_ints(-1, 0)), f)
    }

    /// Formula size `e`: the number of leaves of the desugared tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::Const(_) => 1,
            Formula::Add(l, r) | Formula::Mul(l, r) => l.size() + r.size(),
        }
    }

    /// Variable count `m`: the largest variable index used, 0 if none.
    pub fn var_count(&self) -> usize {
        match self {
            Formula::Var(i) => *i,
            Formula::Const(_) => 0,
            Formula::Add(l, r) | Formula::Mul(l, r) => l.var_count().max(r.var_count()),
        }
    }
}

impl fmt::Display for Formula {
    /// Grammar-conformant text. Trees produced by [`parse_formula`] reparse
    /// to an identical tree: unary negation resugars `(-1)*f` to `-f` and a
    /// trailing `+ (-1)*t` to `- t`. Hand-built trees with negative real
    /// constants print as the value-equal unary form; non-real constants
    /// have no grammar representation and print as `(re+im*i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        show(self, f, 0)
    }
}

fn is_neg_one(f: &Formula) -> bool {
    matches!(f, Formula::Const(c) if *c == GaussianRational::from_ints(-1, 0))
}

/// Precedence: 0 = formula (sum chain), 1 = term, 2 = factor.
fn show(node: &Formula, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
    let prec = match node {
        Formula::Add(..) => 0,
        Formula::Mul(l, _) if is_neg_one(l) => 2, // prints as unary minus
        Formula::Mul(..) => 1,
        _ => 2,
    };
    if prec < ctx {
        write!(f, "(")?;
    }
    match node {
        Formula::Var(i) => write!(f, "x{i}")?,
        Formula::Const(c) => write_const(c, f)?,
        Formula::Add(l, r) => {
            show(l, f, 0)?;
            if let Formula::Mul(rl, rr) = r.as_ref() {
                if is_neg_one(rl) {
                    write!(f, " - ")?;
                    show(rr, f, 1)?;
                    if prec < ctx {
                        write!(f, ")")?;
                    }
                    return Ok(());
                }
            }
            write!(f, " + ")?;
            show(r, f, 1)?;
        }
        Formula::Mul(l, r) if is_neg_one(l) => {
            write!(f, "-")?;
            show(r, f, 2)?;
        }
        Formula::Mul(l, r) => {
            show(l, f, 1)?;
            write!(f, " * ")?;
            show(r, f, 2)?;
        }
    }
    if prec < ctx {
        write!(f, ")")?;
    }
    Ok(())
}

fn write_const(c: &GaussianRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if !c.im().is_zero() {
        return write!(f, "({c})");
    }
    if c.re().is_negative() {
        return write!(f, "-{}", -c.re().clone());
    }
    write!(f, "{}", c.re())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: &'static str },
    UnexpectedEnd { expected: &'static str },
    TrailingInput { found: String },
    VariableIndexZero,
    VariableLeadingZero,
    BareVariable,
    ZeroDenominator,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            Self::UnexpectedToken { found, expected } => {
                write!(f, "unexpected `{found}`, expected {expected}")
            }
            Self::UnexpectedEnd { expected } => write!(f, "unexpected end of input, expected {expected}"),
            Self::TrailingInput { found } => write!(f, "trailing input starting at `{found}`"),
            Self::VariableIndexZero => write!(f, "variable index 0 is not allowed (variables start at x1)"),
            Self::VariableLeadingZero => write!(f, "variable index has a leading zero"),
            Self::BareVariable => write!(f, "`x` must be followed by a variable index"),
            Self::ZeroDenominator => write!(f, "constant denominator must be positive"),
        }
    }
}

/// A syntax error with its 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Int(BigInt),
    Var(usize),
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            Self::Plus => "+".into(),
            Self::Minus => "-".into(),
            Self::Star => "*".into(),
            Self::Slash => "/".into(),
            Self::LParen => "(".into(),
            Self::RParen => ")".into(),
            Self::Int(v) => v.to_string(),
            Self::Var(i) => format!("x{i}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Self { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, column, kind }
    }

    fn digits(&mut self, first: char) -> String {
        let mut text = String::from(first);
        while let Some(&c) = self.chars.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        text
    }

    fn tokenize(mut self) -> Result<(Vec<Token>, usize, usize), ParseError> {
        let mut tokens = Vec::new();
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let (line, column) = (self.line, self.column);
            let kind = match c {
                '+' => {
                    self.bump();
                    TokenKind::Plus
                }
                '-' => {
                    self.bump();
                    TokenKind::Minus
                }
                '*' => {
                    self.bump();
                    TokenKind::Star
                }
                '/' => {
                    self.bump();
                    TokenKind::Slash
                }
                '(' => {
                    self.bump();
                    TokenKind::LParen
                }
                ')' => {
                    self.bump();
                    TokenKind::RParen
                }
                'x' => {
                    self.bump();
                    let first = match self.chars.peek() {
                        Some(&d) if d.is_ascii_digit() => {
                            self.bump();
                            d
                        }
                        _ => return Err(self.error(line, column, ParseErrorKind::BareVariable)),
                    };
                    let digits = self.digits(first);
                    if digits == "0" {
                        return Err(self.error(line, column, ParseErrorKind::VariableIndexZero));
                    }
                    if digits.starts_with('0') {
                        return Err(self.error(line, column, ParseErrorKind::VariableLeadingZero));
                    }
                    let index: usize = digits.parse().map_err(|_| {
                        self.error(line, column, ParseErrorKind::UnexpectedToken {
                            found: format!("x{digits}"),
                            expected: "a representable variable index",
                        })
                    })?;
                    TokenKind::Var(index)
                }
                d if d.is_ascii_digit() => {
                    self.bump();
                    let digits = self.digits(d);
                    TokenKind::Int(digits.parse().expect("digit run parses as integer"))
                }
                other => return Err(self.error(line, column, ParseErrorKind::UnexpectedChar(other))),
            };
            tokens.push(Token { kind, line, column });
        }
        Ok((tokens, self.line, self.column))
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end_line: usize,
    end_column: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn end_error(&self, expected: &'static str) -> ParseError {
        ParseError {
            line: self.end_line,
            column: self.end_column,
            kind: ParseErrorKind::UnexpectedEnd { expected },
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok.kind {
                TokenKind::Plus => {
                    self.next();
                    let rhs = self.term()?;
                    acc = Formula::add(acc, rhs);
                }
                TokenKind::Minus => {
                    self.next();
                    let rhs = self.term()?;
                    acc = Formula::add(acc, Formula::neg(rhs));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(tok) if tok.kind == TokenKind::Star) {
            self.next();
            let rhs = self.factor()?;
            acc = Formula::mul(acc, rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Formula, ParseError> {
        let Some(tok) = self.next() else {
            return Err(self.end_error("a factor"));
        };
        match tok.kind {
            TokenKind::LParen => {
                let inner = self.formula()?;
                match self.next() {
                    Some(t) if t.kind == TokenKind::RParen => Ok(inner),
                    Some(t) => Err(ParseError {
                        line: t.line,
                        column: t.column,
                        kind: ParseErrorKind::UnexpectedToken {
                            found: t.kind.describe(),
                            expected: "`)`",
                        },
                    }),
                    None => Err(self.end_error("`)`")),
                }
            }
            TokenKind::Minus => Ok(Formula::neg(self.factor()?)),
            TokenKind::Var(i) => Ok(Formula::Var(i)),
            TokenKind::Int(numer) => {
                // Optional `/ positive-integer` continuation of a constant.
                if matches!(self.peek(), Some(t) if t.kind == TokenKind::Slash) {
                    self.next();
                    let Some(den_tok) = self.next() else {
                        return Err(self.end_error("a positive integer denominator"));
                    };
                    let TokenKind::Int(denom) = den_tok.kind else {
                        return Err(ParseError {
                            line: den_tok.line,
                            column: den_tok.column,
                            kind: ParseErrorKind::UnexpectedToken {
                                found: den_tok.kind.describe(),
                                expected: "a positive integer denominator",
                            },
                        });
                    };
                    if denom.is_zero() {
                        return Err(ParseError {
                            line: den_tok.line,
                            column: den_tok.column,
                            kind: ParseErrorKind::ZeroDenominator,
                        });
                    }
                    return Ok(Formula::Const(GaussianRational::from_rational(Rational::new(
                        numer, denom,
                    ))));
                }
                Ok(Formula::Const(GaussianRational::from_rational(Rational::from_integer(numer))))
            }
            other => Err(ParseError {
                line: tok.line,
                column: tok.column,
                kind: ParseErrorKind::UnexpectedToken {
                    found: other.describe(),
                    expected: "a factor (`(`, `-`, a variable, or a constant)",
                },
            }),
        }
    }
}

/// Parses and desugars a formula, reporting syntax errors with their
/// position.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let (tokens, end_line, end_column) = Lexer::new(text).tokenize()?;
    let mut parser = Parser { tokens, pos: 0, end_line, end_column };
    let formula = parser.formula()?;
    if let Some(extra) = parser.peek() {
        return Err(ParseError {
            line: extra.line,
            column: extra.column,
            kind: ParseErrorKind::TrailingInput { found: extra.kind.describe() },
        });
    }
    Ok(formula)
}

impl FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_formula(s)
    }
}
