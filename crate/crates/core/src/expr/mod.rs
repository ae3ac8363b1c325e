//! The function mini-language used for `q(x)`, `v(x)`, `A(λ)`, `B(λ)`.
//!
//! Expressions are parsed into an [`Expr`] tree and expanded into exact
//! Taylor series by recursive series arithmetic on the tree. Every
//! transcendental node must be anchored at a rational value at the expansion
//! point (`log`, `sqrt`, rational powers at 1; `exp` at 0) so coefficients
//! stay rational.

mod ast;
mod parse;

pub use ast::Expr;
pub use parse::parse;

use crate::rational::Rational;
use crate::series::Series;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("expression uses more than one variable: {}", .0.join(", "))]
    MultipleVariables(Vec<String>),
    #[error("log argument `{subexpr}` is not exactly 1 at the expansion point")]
    LogArgumentNotOne { subexpr: String },
    #[error("sqrt argument `{subexpr}` is not exactly 1 at the expansion point")]
    SqrtArgumentNotOne { subexpr: String },
    #[error("base of rational power `{subexpr}` is not exactly 1 at the expansion point")]
    RatPowBaseNotOne { subexpr: String },
    #[error("exp argument `{subexpr}` is not exactly 0 at the expansion point")]
    ExpArgumentNotZero { subexpr: String },
    #[error("`{subexpr}` vanishes at the expansion point (pole)")]
    PoleAtExpansionPoint { subexpr: String },
    #[error("`{subexpr}` is not a polynomial")]
    NotPolynomial { subexpr: String },
}

/// A Taylor expansion job: `ast` about `x = point` through `(x − point)^order`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionRequest {
    pub ast: Expr,
    pub point: Rational,
    pub order: usize,
}

/// Label for a series in `name − x0`, e.g. `x-1`, `x+2`, or plain `x` at 0.
pub fn expansion_var(name: &str, x0: &Rational) -> String {
    if x0.is_zero() {
        name.to_string()
    } else if x0.is_negative() {
        format!("{name}+{}", -x0)
    } else {
        format!("{name}-{x0}")
    }
}

/// Expands `req.ast` about `req.point`.
///
/// The result is a series in `x − x₀` (labelled via [`expansion_var`]; a
/// constant expression uses the name `x`).
pub fn taylor(req: &ExpansionRequest) -> Result<Series, ExprError> {
    let name = req.ast.variable().unwrap_or("x");
    let var = expansion_var(name, &req.point);
    Expansion {
        var: &var,
        point: &req.point,
        order: req.order,
    }
    .eval(&req.ast)
}

impl Expr {
    pub fn taylor(&self, point: &Rational, order: usize) -> Result<Series, ExprError> {
        taylor(&ExpansionRequest {
            ast: self.clone(),
            point: point.clone(),
            order,
        })
    }
}

struct Expansion<'a> {
    var: &'a str,
    point: &'a Rational,
    order: usize,
}

impl Expansion<'_> {
    fn constant(&self, c: Rational) -> Series {
        Series::from_rationals(self.var, vec![c], self.order)
    }

    fn eval(&self, e: &Expr) -> Result<Series, ExprError> {
        let pole = || ExprError::PoleAtExpansionPoint {
            subexpr: e.to_string(),
        };
        Ok(match e {
            Expr::Lit(c) => self.constant(c.clone()),
            Expr::Var(_) => Series::from_rationals(
                self.var,
                vec![self.point.clone(), Rational::one()],
                self.order,
            ),
            Expr::Add(a, b) => &self.eval(a)? + &self.eval(b)?,
            Expr::Sub(a, b) => &self.eval(a)? - &self.eval(b)?,
            Expr::Mul(a, b) => &self.eval(a)? * &self.eval(b)?,
            Expr::Div(a, b) => {
                let den = self.eval(b)?;
                if den.constant_term().is_zero() {
                    return Err(ExprError::PoleAtExpansionPoint {
                        subexpr: b.to_string(),
                    });
                }
                self.eval(a)?.try_div(&den).map_err(|_| pole())?
            }
            Expr::Neg(a) => -self.eval(a)?,
            Expr::IntPow(a, n) => {
                let base = self.eval(a)?;
                let p = base.powi(n.unsigned_abs() as u32);
                if *n < 0 {
                    if base.constant_term().is_zero() {
                        return Err(pole());
                    }
                    p.try_recip().map_err(|_| pole())?
                } else {
                    p
                }
            }
            Expr::RatPow(a, r) => {
                self.eval(a)?
                    .pow(r)
                    .map_err(|_| ExprError::RatPowBaseNotOne {
                        subexpr: a.to_string(),
                    })?
            }
            Expr::Sqrt(a) => self.eval(a)?.pow(&Rational::new(1, 2)).map_err(|_| {
                ExprError::SqrtArgumentNotOne {
                    subexpr: a.to_string(),
                }
            })?,
            Expr::Log(a) => self
                .eval(a)?
                .log()
                .map_err(|_| ExprError::LogArgumentNotOne {
                    subexpr: a.to_string(),
                })?,
            Expr::Exp(a) => self
                .eval(a)?
                .exp()
                .map_err(|_| ExprError::ExpArgumentNotZero {
                    subexpr: a.to_string(),
                })?,
        })
    }
}
