//! ASCII surface syntax for operator expressions.
//!
//! ```text
//! expr   := sign? term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' sign? integer)?
//! atom   := generator | 'i' | 'hbar' | 'c' | 'm' | integer
//!         | '(' expr ')'
//!         | ('comm' | 'acomm' | 'sym') '(' expr ',' expr ')'
//! sign   := '+' | '-'
//! ```
//!
//! The right operand of `/` must be an invertible scalar. Brackets are
//! expanded formally; call [`crate::opalg::normalize`] on the result.

use std::cmp::Reverse;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::opalg::{
    bracket_formal, AlgebraSpec, BracketKind, GaussianRational, GeneratorSet, OpExpr, OpWord,
    Scalar, UnitMonomial,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected {
        expected: &'static str,
        found: String,
    },
    #[error("unknown identifier {0:?} for this algebra")]
    UnknownIdentifier(String),
    #[error("negative power of non-invertible {0}")]
    NotInvertible(String),
    #[error("division by an operator expression")]
    DivisionByOperator,
    #[error("division by a non-invertible scalar")]
    NonInvertibleDivisor,
    #[error("exponent out of range")]
    ExponentRange,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        let tok = match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("ascii digits");
                out.push((start, Tok::Int(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let c = text[start..].chars().next().expect("non-empty");
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::UnexpectedChar(c),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    spec: &'a AlgebraSpec,
}

impl Parser<'_> {
    fn gens(&self) -> &Arc<GeneratorSet> {
        self.spec.generators()
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            kind,
        })
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(ParseErrorKind::Unexpected {
                expected,
                found: self.peek().to_string(),
            })
        }
    }

    fn expr(&mut self) -> Result<OpExpr, ParseError> {
        let negate = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OpExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    let at = self.offset();
                    self.bump();
                    let divisor = self.factor()?;
                    let s = divisor.as_scalar().ok_or(ParseError {
                        offset: at,
                        kind: ParseErrorKind::DivisionByOperator,
                    })?;
                    let inv = s.inv().map_err(|_| ParseError {
                        offset: at,
                        kind: ParseErrorKind::NonInvertibleDivisor,
                    })?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let negative = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let at = self.offset();
        match self.bump().1 {
            Tok::Int(n) => {
                let n = if negative { -n } else { n };
                n.to_i32().ok_or(ParseError {
                    offset: at,
                    kind: ParseErrorKind::ExponentRange,
                })
            }
            other => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::Unexpected {
                    expected: "integer exponent",
                    found: other.to_string(),
                },
            }),
        }
    }

    fn factor(&mut self) -> Result<OpExpr, ParseError> {
        let start = self.offset();
        // A bare generator keeps its power as a single run-length factor.
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(id) = self.gens().lookup(&name) {
                self.bump();
                let power = if *self.peek() == Tok::Caret {
                    self.bump();
                    self.exponent()?
                } else {
                    1
                };
                if power < 0 && !self.gens().get(id).invertible {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::NotInvertible(name),
                    });
                }
                return Ok(if power == 0 {
                    OpExpr::one(self.gens())
                } else {
                    OpExpr::generator(self.gens(), id, power)
                });
            }
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let power = self.exponent()?;
        if power >= 0 {
            return Ok(base.pow(power as u32));
        }
        let not_invertible = || ParseError {
            offset: start,
            kind: ParseErrorKind::NotInvertible("operator expression".into()),
        };
        let s = base.as_scalar().ok_or_else(not_invertible)?;
        let s = s.pow(power).map_err(|_| not_invertible())?;
        Ok(OpExpr::scalar(self.gens(), s))
    }

    fn atom(&mut self) -> Result<OpExpr, ParseError> {
        let at = self.offset();
        let (_, tok) = self.bump();
        let gens = Arc::clone(self.gens());
        match tok {
            Tok::Int(n) => Ok(OpExpr::scalar(
                &gens,
                Scalar::term(
                    UnitMonomial::ONE,
                    GaussianRational::new(BigRational::from_integer(n), BigRational::zero()),
                ),
            )),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let scalar = match name.as_str() {
                    "i" => Some(Scalar::i()),
                    "hbar" => Some(Scalar::hbar()),
                    "c" => Some(Scalar::c()),
                    "m" => Some(Scalar::m()),
                    _ => None,
                };
                if let Some(s) = scalar {
                    return Ok(OpExpr::scalar(&gens, s));
                }
                let kind = match name.as_str() {
                    "comm" => BracketKind::Comm,
                    "acomm" => BracketKind::Acomm,
                    "sym" => BracketKind::Sym,
                    _ => {
                        return Err(ParseError {
                            offset: at,
                            kind: ParseErrorKind::UnknownIdentifier(name),
                        })
                    }
                };
                self.expect(Tok::LParen, "'('")?;
                let a = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let b = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(bracket_formal(&a, &b, kind).expect("same generator set"))
            }
            other => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::Unexpected {
                    expected: "operand",
                    found: other.to_string(),
                },
            }),
        }
    }
}

/// Parse `text` into a formal (unnormalized) expression over `spec`.
pub fn parse(text: &str, spec: &AlgebraSpec) -> Result<OpExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, spec };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err(ParseErrorKind::Unexpected {
            expected: "operator or end of input",
            found: p.peek().to_string(),
        });
    }
    Ok(e)
}

/// Deterministic text for an expression. Terms are ordered by decreasing
/// word degree, then word, then unit monomial; multi-monomial coefficients
/// are written as separate terms. The output parses back to `e`.
pub fn render(e: &OpExpr) -> String {
    let gens = e.generators();
    let mut terms: Vec<(&OpWord, &UnitMonomial, &GaussianRational)> = e
        .terms()
        .flat_map(|(w, s)| s.terms().map(move |(mono, g)| (w, mono, g)))
        .collect();
    terms.sort_by_key(|(w, mono, _)| (Reverse(w.degree()), *w, **mono));

    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (w, mono, g)) in terms.into_iter().enumerate() {
        let (negative, number) = coefficient_text(g);
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mut parts: Vec<String> = Vec::new();
        if let Some(n) = number {
            parts.push(n);
        }
        for (name, exp) in [("hbar", mono.hbar), ("c", mono.c), ("m", mono.m)] {
            match exp {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{exp}")),
            }
        }
        if !w.is_identity() {
            parts.push(w.display(gens).to_string());
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        out.push_str(&parts.join("*"));
    }
    out
}

/// Sign and magnitude text of a Gaussian rational; `None` magnitude means 1.
fn coefficient_text(g: &GaussianRational) -> (bool, Option<String>) {
    let (re, im) = (g.re(), g.im());
    if im.is_zero() {
        let mag = re.abs();
        (re.is_negative(), (!mag.is_one()).then(|| mag.to_string()))
    } else if re.is_zero() {
        let mag = im.abs();
        let text = if mag.is_one() {
            "i".to_string()
        } else {
            format!("{mag}*i")
        };
        (im.is_negative(), Some(text))
    } else {
        let sign = if im.is_negative() { '-' } else { '+' };
        let mag = im.abs();
        let imag = if mag.is_one() {
            "i".to_string()
        } else {
            format!("{mag}*i")
        };
        (false, Some(format!("({re} {sign} {imag})")))
    }
}
