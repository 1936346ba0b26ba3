//! Text grammar for power sums and operator specifications.
//!
//! ```text
//! function := fterm (('+' | '-') fterm)*
//! fterm    := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)?
//! primary  := NUMBER | 'x' | '(' function ')'
//! exponent := NUMBER | '(' '-'? NUMBER ')'
//!
//! operator := oterm (('+' | '-') oterm)*
//! oterm    := '-'? (NUMBER '*')? oatom
//! oatom    := 'D' | 'RL' '(' NUMBER ')' | 'caputo' '(' NUMBER ')'
//!           | 'GL' '(' NUMBER ',' 'h' '=' NUMBER ')'
//!           | 'local' '(' 'a' '=' function ',' 'b' '=' function ')'
//!           | '(' operator ')'
//! ```
//!
//! Precedence, tightest first: `^`, unary minus, `*` and `/`, binary `+ -`.
//! Input is ASCII; whitespace is ignored. A bare operator atom parses to
//! that atom; anything with a sign, a coefficient or more than one term
//! parses to a linear combination.

use std::fmt;

use crate::funclass::{PowerSum, PowerTerm};
use crate::operator::OperatorSpec;

/// Nesting limit for parentheses and unary minus.
const MAX_DEPTH: usize = 200;
/// Largest power sum an expression may expand to.
const MAX_TERMS: usize = 4096;
/// Largest integer power applied to a multi-term base.
const MAX_INTEGER_POWER: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Unsupported,
    Range,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::Unsupported => "unsupported construct",
            ParseErrorKind::Range => "out of range",
        };
        write!(f, "{kind} at byte {}: {}", self.offset, self.message)
    }
}

type PResult<T> = Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eq,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => write!(f, "'+'"),
            Tok::Minus => write!(f, "'-'"),
            Tok::Star => write!(f, "'*'"),
            Tok::Slash => write!(f, "'/'"),
            Tok::Caret => write!(f, "'^'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Comma => write!(f, "','"),
            Tok::Eq => write!(f, "'='"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn err(kind: ParseErrorKind, offset: usize, message: impl Into<String>) -> ParseError {
    ParseError { kind, offset, message: message.into() }
}

fn lex(src: &[u8]) -> PResult<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i];
        if !c.is_ascii() {
            return Err(err(ParseErrorKind::Syntax, i, "non-ASCII input"));
        }
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, i));
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < src.len() && (src[i].is_ascii_digit() || src[i] == b'.') {
                i += 1;
            }
            if i < src.len() && (src[i] == b'e' || src[i] == b'E') {
                let mut j = i + 1;
                if j < src.len() && (src[j] == b'+' || src[j] == b'-') {
                    j += 1;
                }
                if j < src.len() && src[j].is_ascii_digit() {
                    while j < src.len() && src[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = std::str::from_utf8(&src[start..i]).expect("ascii");
            let value: f64 = text
                .parse()
                .map_err(|_| err(ParseErrorKind::Syntax, start, format!("malformed number '{text}'")))?;
            if !value.is_finite() {
                return Err(err(ParseErrorKind::Range, start, format!("number '{text}' is not finite")));
            }
            out.push((Tok::Num(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < src.len() && (src[i].is_ascii_alphanumeric() || src[i] == b'_') {
                i += 1;
            }
            let text = std::str::from_utf8(&src[start..i]).expect("ascii").to_string();
            out.push((Tok::Ident(text), start));
            continue;
        }
        return Err(err(ParseErrorKind::Syntax, i, format!("unexpected character '{}'", c as char)));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(src.as_bytes())?, pos: 0, depth: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("{t}")))
        }
    }

    fn expect_ident(&mut self, name: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == name => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("'{name}'"))),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        err(ParseErrorKind::Syntax, self.offset(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(err(ParseErrorKind::Unsupported, self.offset(), "expression nested too deeply"));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn number(&mut self) -> PResult<f64> {
        match self.peek() {
            Tok::Num(v) => {
                let v = *v;
                self.bump();
                Ok(v)
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn checked(&self, p: PowerSum, at: usize) -> PResult<PowerSum> {
        if p.len() > MAX_TERMS {
            return Err(err(
                ParseErrorKind::Unsupported,
                at,
                format!("expression expands to more than {MAX_TERMS} terms"),
            ));
        }
        if p.terms().iter().any(|t| !t.coeff.is_finite() || !t.exponent.is_finite()) {
            return Err(err(
                ParseErrorKind::Range,
                at,
                "expression has a non-finite coefficient or exponent",
            ));
        }
        Ok(p)
    }

    fn product(&self, a: &PowerSum, b: &PowerSum, at: usize) -> PResult<PowerSum> {
        if a.len().saturating_mul(b.len()) > MAX_TERMS * 16 {
            return Err(err(
                ParseErrorKind::Unsupported,
                at,
                format!("expression expands to more than {MAX_TERMS} terms"),
            ));
        }
        self.checked(a.multiply(b), at)
    }

    // function := fterm (('+' | '-') fterm)*
    fn function(&mut self) -> PResult<PowerSum> {
        let mut acc = self.fterm()?;
        loop {
            let at = self.offset();
            if self.eat(&Tok::Plus) {
                let rhs = self.fterm()?;
                acc = self.checked(acc.add(&rhs), at)?;
            } else if self.eat(&Tok::Minus) {
                let rhs = self.fterm()?;
                acc = self.checked(acc.add(&rhs.scale(-1.0)), at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn fterm(&mut self) -> PResult<PowerSum> {
        let mut acc = self.unary()?;
        loop {
            let at = self.offset();
            if self.eat(&Tok::Star) {
                let rhs = self.unary()?;
                acc = self.product(&acc, &rhs, at)?;
            } else if self.eat(&Tok::Slash) {
                let rhs = self.unary()?;
                let divisor = match rhs.terms() {
                    [t] if t.exponent == 0.0 => t.coeff,
                    [] => return Err(err(ParseErrorKind::Range, at, "division by zero")),
                    _ => {
                        return Err(err(
                            ParseErrorKind::Unsupported,
                            at,
                            "division by a non-constant expression leaves the power-sum class",
                        ))
                    }
                };
                acc = self.checked(acc.scale(1.0 / divisor), at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> PResult<PowerSum> {
        if self.eat(&Tok::Minus) {
            self.enter()?;
            let inner = self.unary()?;
            self.leave();
            return Ok(inner.scale(-1.0));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<PowerSum> {
        let base = self.primary()?;
        let at = self.offset();
        if !self.eat(&Tok::Caret) {
            return Ok(base);
        }
        let exponent = self.exponent()?;
        self.raise(base, exponent, at)
    }

    fn exponent(&mut self) -> PResult<f64> {
        match self.peek() {
            Tok::Num(_) => self.number(),
            Tok::LParen => {
                self.bump();
                let negative = self.eat(&Tok::Minus);
                let v = self.number()?;
                self.expect(Tok::RParen)?;
                Ok(if negative { -v } else { v })
            }
            Tok::Minus => Err(err(
                ParseErrorKind::Syntax,
                self.offset(),
                "negative exponents must be parenthesized, e.g. x^(-0.5)",
            )),
            _ => Err(self.unexpected("an exponent literal")),
        }
    }

    fn raise(&self, base: PowerSum, e: f64, at: usize) -> PResult<PowerSum> {
        match base.terms() {
            [] => {
                if e > 0.0 {
                    Ok(PowerSum::zero())
                } else {
                    Err(err(ParseErrorKind::Range, at, "zero raised to a non-positive power"))
                }
            }
            [t] => {
                if t.coeff < 0.0 && e != e.trunc() {
                    return Err(err(
                        ParseErrorKind::Range,
                        at,
                        "negative base raised to a non-integer power",
                    ));
                }
                let coeff = if t.coeff == 1.0 { 1.0 } else { t.coeff.powf(e) };
                self.checked(PowerSum::from_terms(vec![PowerTerm::new(coeff, t.exponent * e)]), at)
            }
            _ => {
                if e < 0.0 || e != e.trunc() || e > f64::from(MAX_INTEGER_POWER) {
                    return Err(err(
                        ParseErrorKind::Unsupported,
                        at,
                        format!(
                            "a sum can only be raised to an integer power between 0 and {MAX_INTEGER_POWER}"
                        ),
                    ));
                }
                let mut acc = PowerSum::one();
                for _ in 0..e as u32 {
                    acc = self.product(&acc, &base, at)?;
                }
                Ok(acc)
            }
        }
    }

    fn primary(&mut self) -> PResult<PowerSum> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(PowerSum::constant(v))
            }
            Tok::Ident(name) if name == "x" => {
                self.bump();
                Ok(PowerSum::x())
            }
            Tok::LParen => {
                self.bump();
                self.enter()?;
                let inner = self.function()?;
                self.leave();
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => Err(err(
                ParseErrorKind::Unsupported,
                at,
                format!("unknown name '{name}'; functions use the single variable 'x'"),
            )),
            _ => Err(self.unexpected("a number, 'x' or '('")),
        }
    }

    // operator := oterm (('+' | '-') oterm)*
    fn operator(&mut self) -> PResult<OperatorSpec> {
        let (first, bare) = self.oterm(false)?;
        let mut items = vec![first];
        let mut single_bare = bare;
        loop {
            let negative = if self.eat(&Tok::Plus) {
                false
            } else if self.eat(&Tok::Minus) {
                true
            } else {
                break;
            };
            single_bare = false;
            let ((c, spec), _) = self.oterm(negative)?;
            items.push((c, spec));
        }
        if single_bare {
            Ok(items.pop().expect("one item").1)
        } else {
            Ok(OperatorSpec::LinearCombo(items))
        }
    }

    /// One signed, optionally scaled atom; the flag is true for a bare atom.
    fn oterm(&mut self, negated: bool) -> PResult<((f64, OperatorSpec), bool)> {
        let mut negative = negated;
        let mut bare = !negated;
        if self.eat(&Tok::Minus) {
            negative = !negative;
            bare = false;
        }
        let mut coeff = 1.0;
        if let Tok::Num(v) = *self.peek() {
            self.bump();
            self.expect(Tok::Star)?;
            coeff = v;
            bare = false;
        }
        let atom = self.oatom()?;
        Ok(((if negative { -coeff } else { coeff }, atom), bare))
    }

    fn paren_number(&mut self) -> PResult<(f64, usize)> {
        self.expect(Tok::LParen)?;
        let at = self.offset();
        let negative = self.eat(&Tok::Minus);
        let v = self.number()?;
        Ok((if negative { -v } else { v }, at))
    }

    fn oatom(&mut self) -> PResult<OperatorSpec> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                self.enter()?;
                let inner = self.operator()?;
                self.leave();
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "D" => Ok(OperatorSpec::Classical),
                    "RL" => {
                        let (alpha, at) = self.paren_number()?;
                        self.expect(Tok::RParen)?;
                        OperatorSpec::rl(alpha).map_err(|e| err(ParseErrorKind::Range, at, e.to_string()))
                    }
                    "caputo" => {
                        let (alpha, at) = self.paren_number()?;
                        self.expect(Tok::RParen)?;
                        OperatorSpec::caputo(alpha).map_err(|e| err(ParseErrorKind::Range, at, e.to_string()))
                    }
                    "GL" => {
                        let (alpha, alpha_at) = self.paren_number()?;
                        self.expect(Tok::Comma)?;
                        self.expect_ident("h")?;
                        self.expect(Tok::Eq)?;
                        let h_at = self.offset();
                        let negative = self.eat(&Tok::Minus);
                        let h = self.number()?;
                        let h = if negative { -h } else { h };
                        self.expect(Tok::RParen)?;
                        if !(h > 0.0) {
                            return Err(err(
                                ParseErrorKind::Range,
                                h_at,
                                format!("GL step h must be positive, got {h}"),
                            ));
                        }
                        OperatorSpec::gl(alpha, h)
                            .map_err(|e| err(ParseErrorKind::Range, alpha_at, e.to_string()))
                    }
                    "local" => {
                        self.expect(Tok::LParen)?;
                        self.expect_ident("a")?;
                        self.expect(Tok::Eq)?;
                        let a = self.function()?;
                        self.expect(Tok::Comma)?;
                        self.expect_ident("b")?;
                        self.expect(Tok::Eq)?;
                        let b = self.function()?;
                        self.expect(Tok::RParen)?;
                        Ok(OperatorSpec::local(a, b))
                    }
                    other => Err(err(
                        ParseErrorKind::Unsupported,
                        at,
                        format!("unknown operator '{other}'; expected D, RL, caputo, GL or local"),
                    )),
                }
            }
            _ => Err(self.unexpected("an operator")),
        }
    }
}

/// Parses a power-sum expression in `x`.
pub fn parse_function(text: &str) -> Result<PowerSum, ParseError> {
    let mut p = Parser::new(text)?;
    if *p.peek() == Tok::End {
        return Err(err(ParseErrorKind::Syntax, 0, "empty expression"));
    }
    let f = p.function()?;
    p.finish()?;
    Ok(f)
}

/// Parses an operator expression such as `2*RL(0.5) - D`.
pub fn parse_operator(text: &str) -> Result<OperatorSpec, ParseError> {
    let mut p = Parser::new(text)?;
    if *p.peek() == Tok::End {
        return Err(err(ParseErrorKind::Syntax, 0, "empty expression"));
    }
    let op = p.operator()?;
    p.finish()?;
    Ok(op)
}

/// Parsed function together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionExpr {
    pub source: String,
    pub parsed: PowerSum,
}

impl std::str::FromStr for FunctionExpr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        Ok(FunctionExpr { source: s.to_string(), parsed: parse_function(s)? })
    }
}

/// Parsed operator together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorExpr {
    pub source: String,
    pub parsed: OperatorSpec,
}

impl std::str::FromStr for OperatorExpr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        Ok(OperatorExpr { source: s.to_string(), parsed: parse_operator(s)? })
    }
}
