use std::collections::BTreeSet;
use std::fmt;

use crate::poly::Polynomial;
use crate::rational::Rational;

use super::ExprError;

/// Expression tree for the one-variable function language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Lit(Rational),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    IntPow(Box<Expr>, i64),
    RatPow(Box<Expr>, Rational),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sqrt(Box<Expr>),
    Neg(Box<Expr>),
}

impl Expr {
    pub fn lit(c: impl Into<Rational>) -> Self {
        Expr::Lit(c.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    /// Distinct variable names, sorted.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(v) => {
                out.insert(v.as_str());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::IntPow(a, _)
            | Expr::RatPow(a, _)
            | Expr::Exp(a)
            | Expr::Log(a)
            | Expr::Sqrt(a)
            | Expr::Neg(a) => a.collect_vars(out),
        }
    }

    /// The single free variable, if any.
    pub fn variable(&self) -> Option<&str> {
        self.variables().into_iter().next()
    }

    /// Exact conversion for polynomial expressions (division only by
    /// constants, non-negative integer powers, no transcendental functions).
    pub fn to_polynomial(&self) -> Result<Polynomial, ExprError> {
        let not_poly = || ExprError::NotPolynomial {
            subexpr: self.to_string(),
        };
        Ok(match self {
            Expr::Lit(c) => Polynomial::constant(c.clone()),
            Expr::Var(_) => Polynomial::x(),
            Expr::Add(a, b) => &a.to_polynomial()? + &b.to_polynomial()?,
            Expr::Sub(a, b) => &a.to_polynomial()? - &b.to_polynomial()?,
            Expr::Mul(a, b) => &a.to_polynomial()? * &b.to_polynomial()?,
            Expr::Div(a, b) => {
                let den = b.to_polynomial()?;
                match den.degree() {
                    Some(0) => a.to_polynomial()?.scale(&den.coeff(0).recip().unwrap()),
                    _ => return Err(not_poly()),
                }
            }
            Expr::IntPow(a, n) if *n >= 0 => a.to_polynomial()?.pow(*n as u32),
            Expr::Neg(a) => -&a.to_polynomial()?,
            _ => return Err(not_poly()),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::IntPow(..) | Expr::RatPow(..) => 4,
            Expr::Lit(c) if c.is_negative() || !c.is_integer() => 5,
            _ => 6,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    /// Prints a string the parser reads back to the same function.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, p: u8| {
            a.fmt_child(f, p)?;
            write!(f, " {op} ")?;
            b.fmt_child(f, p + 1)
        };
        match self {
            Expr::Lit(c) if c.is_integer() && !c.is_negative() => write!(f, "{c}"),
            Expr::Lit(c) => write!(f, "({c})"),
            Expr::Var(v) => f.write_str(v),
            Expr::Add(a, b) => binary(f, a, "+", b, 1),
            Expr::Sub(a, b) => binary(f, a, "-", b, 1),
            Expr::Mul(a, b) => binary(f, a, "*", b, 2),
            Expr::Div(a, b) => binary(f, a, "/", b, 2),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.fmt_child(f, 3)
            }
            Expr::IntPow(a, n) => {
                a.fmt_child(f, 6)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::RatPow(a, r) => {
                a.fmt_child(f, 6)?;
                write!(f, "^({r})")
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}
