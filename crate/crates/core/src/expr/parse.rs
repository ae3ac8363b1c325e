//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := '-'? INT | '(' '-'? INT ('/' INT)? ')'
//! atom     := INT | IDENT | FUNC '(' expr ')' | '(' expr ')'
//! ```
//!
//! `FUNC` is one of `exp`, `log` (alias `ln`), `sqrt`. There is no implicit
//! multiplication.

use num_bigint::BigInt;

use crate::rational::Rational;

use super::{Expr, ExprError};

#[derive(Debug, Clone, PartialEq)]
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
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ExprError> {
        let mut lx = Lexer {
            src,
            toks: Vec::new(),
        };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let start = i;
            let tok = match c {
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
                b'0'..=b'9' => {
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let n = lx.src[start..i]
                        .parse()
                        .expect("digits parse as an integer");
                    lx.toks.push((Tok::Int(n), start));
                    continue;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    lx.toks
                        .push((Tok::Ident(lx.src[start..i].to_string()), start));
                    continue;
                }
                _ => {
                    let ch = lx.src[start..].chars().next().unwrap_or('?');
                    return Err(ExprError::Syntax {
                        offset: start,
                        message: format!("unexpected character `{ch}`"),
                    });
                }
            };
            lx.toks.push((tok, start));
            i += 1;
        }
        lx.toks.push((Tok::End, src.len()));
        Ok(lx.toks)
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exponent = self.exponent()?;
        let base = Box::new(base);
        match exponent.to_i64() {
            Some(n) => Ok(Expr::IntPow(base, n)),
            None if exponent.is_integer() => self.error("integer exponent out of range"),
            None => Ok(Expr::RatPow(base, exponent)),
        }
    }

    fn signed_int(&mut self) -> Result<BigInt, ExprError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Tok::Int(n) => Ok(if neg { -n } else { n }),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.error("expected an integer exponent")
            }
        }
    }

    fn exponent(&mut self) -> Result<Rational, ExprError> {
        if *self.peek() != Tok::LParen {
            return Ok(Rational::from_integer(self.signed_int()?));
        }
        self.bump();
        let num = self.signed_int()?;
        let value = if *self.peek() == Tok::Slash {
            self.bump();
            let at = self.offset();
            let den = match self.bump() {
                Tok::Int(d) => d,
                _ => {
                    return Err(ExprError::Syntax {
                        offset: at,
                        message: "expected an exponent denominator".into(),
                    })
                }
            };
            if den == BigInt::from(0) {
                return Err(ExprError::Syntax {
                    offset: at,
                    message: "zero denominator in exponent".into(),
                });
            }
            Rational::new(num, den)
        } else {
            Rational::from_integer(num)
        };
        self.expect(Tok::RParen, "`)` after exponent")?;
        Ok(value)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::Lit(Rational::from_integer(n))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func: Option<fn(Box<Expr>) -> Expr> = match name.as_str() {
                    "exp" => Some(Expr::Exp),
                    "log" | "ln" => Some(Expr::Log),
                    "sqrt" => Some(Expr::Sqrt),
                    _ => None,
                };
                match func {
                    Some(build) => {
                        self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(build(Box::new(arg)))
                    }
                    None => Ok(Expr::Var(name)),
                }
            }
            Tok::End => Err(ExprError::Syntax {
                offset: at,
                message: "unexpected end of input".into(),
            }),
            _ => Err(ExprError::Syntax {
                offset: at,
                message: "expected a number, variable, function, or `(`".into(),
            }),
        }
    }
}

/// Parses one expression in at most one free variable.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let toks = Lexer::run(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    let vars = e.variables();
    if vars.len() > 1 {
        return Err(ExprError::MultipleVariables(
            vars.into_iter().map(str::to_string).collect(),
        ));
    }
    Ok(e)
}
