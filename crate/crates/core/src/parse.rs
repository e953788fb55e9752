//! Recursive-descent parser for Exp-Int expressions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | atom ("^" exponent)?
//! exponent := integer | "-" integer | "(" "-"? integer ")"
//! atom   := "x" | integer | "(" expr ")" | ("inv" | "exp" | "int") "(" expr ")"
//! ```
//!
//! `a / b` is read as `a * inv(b)` and `a^-n` as `inv(a)^n`. There is no
//! implicit multiplication.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::expr::Expr;
use crate::Rational;

/// Largest accepted exponent in `a^n`.
pub const MAX_EXPONENT: u32 = 1000;

/// Byte range `[start, end)` in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at {span}: expected {expected}, found {found}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "number {n}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            i += 1;
            out.push((t, SourceSpan { start, end: i }));
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            out.push((Tok::Num(n), SourceSpan { start, end: i }));
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((
                Tok::Ident(src[start..i].to_string()),
                SourceSpan { start, end: i },
            ));
        } else {
            let ch = src[start..].chars().next().unwrap();
            return Err(ParseError {
                span: SourceSpan {
                    start,
                    end: start + ch.len_utf8(),
                },
                expected: "an expression character".into(),
                found: format!("'{ch}'"),
            });
        }
    }
    out.push((
        Tok::End,
        SourceSpan {
            start: src.len(),
            end: src.len(),
        },
    ));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            span: self.span(),
            expected: expected.into(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    factors.push(self.factor()?);
                }
                Tok::Slash => {
                    self.bump();
                    factors.push(Expr::inv(self.factor()?));
                }
                _ => break,
            }
        }
        Ok(Expr::product(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (negative, n) = self.exponent()?;
        let base = if negative { Expr::inv(base) } else { base };
        Ok(base.pow(n))
    }

    fn exponent(&mut self) -> Result<(bool, u32), ParseError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let span = self.span();
        let Tok::Num(n) = self.peek().clone() else {
            return Err(self.error("an integer exponent"));
        };
        self.bump();
        let n: u32 = match u32::try_from(&n) {
            Ok(v) if v <= MAX_EXPONENT => v,
            _ => {
                return Err(ParseError {
                    span,
                    expected: format!("an exponent of at most {MAX_EXPONENT}"),
                    found: n.to_string(),
                })
            }
        };
        if paren {
            self.expect(Tok::RParen, "')' after the exponent")?;
        }
        Ok((negative, n))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Const(Rational::from_integer(n)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let op: fn(Expr) -> Expr = match name.as_str() {
                    "x" => {
                        self.bump();
                        return Ok(Expr::x());
                    }
                    "inv" => Expr::inv,
                    "exp" => Expr::exp,
                    "int" => Expr::int,
                    _ => return Err(self.error("'x', a number, '(' or one of inv, exp, int")),
                };
                self.bump();
                self.expect(Tok::LParen, &format!("'(' after {name}"))?;
                if *self.peek() == Tok::RParen {
                    return Err(self.error(&format!("an argument for {name}")));
                }
                let arg = self.expr()?;
                self.expect(Tok::RParen, &format!("')' closing {name}"))?;
                Ok(op(arg))
            }
            _ => Err(self.error("'x', a number, '(' or one of inv, exp, int")),
        }
    }
}

/// Parse `src` into a normalized expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::x()
    }

    #[test]
    fn precedence_and_powers() {
        assert_eq!(
            parse("x^3+3*x^2+5*x+7").unwrap(),
            x().pow(3) + Expr::from(3) * x().pow(2) + Expr::from(5) * x() + 7.into()
        );
        assert_eq!(parse("-x^2").unwrap(), -x().pow(2));
        assert_eq!(parse("2-3-4").unwrap(), Expr::from(-5));
    }

    #[test]
    fn division_and_negative_exponents() {
        assert_eq!(parse("1/x").unwrap(), Expr::inv(x()));
        assert_eq!(parse("x^-2").unwrap(), Expr::inv(x()).pow(2));
        assert_eq!(parse("x^(-2)").unwrap(), Expr::inv(x()).pow(2));
        assert_eq!(
            parse("-1/2*x").unwrap(),
            Expr::Const(Rational::new((-1).into(), 2.into())) * x()
        );
    }

    #[test]
    fn operators() {
        assert_eq!(
            parse("exp(x*int(exp(-x^2)))").unwrap(),
            Expr::exp(x() * Expr::int(Expr::exp(-x().pow(2))))
        );
    }

    #[test]
    fn errors_carry_spans() {
        let err = parse("exp(x").unwrap_err();
        assert_eq!(err.span, SourceSpan { start: 5, end: 5 });
        assert!(parse("exp()").is_err());
        assert!(parse("2x").is_err());
        assert!(parse("log(x)").is_err());
        assert!(parse("x^1001").is_err());
        assert!(parse("x +").is_err());
        assert!(parse("x $ 1").is_err());
    }
}
