//! Closed-form flows for five reference choices of `q` and `v`.
//!
//! | example | q(x)  | v(x)      | T(λ, x)                          | g(λ, x)                                   |
//! |---------|-------|-----------|----------------------------------|-------------------------------------------|
//! | `Ex1`   | x     | 0         | x e^λ                            | 1                                         |
//! | `Ex2`   | x^r   | 0         | x (1 − λ(r−1)x^(r−1))^(−1/(r−1)) | 1                                         |
//! | `Ex3`   | 1     | any       | x + λ                            | exp ∫₀^λ v(x+u) du                        |
//! | `Ex4`   | x     | x²        | x e^λ                            | exp[x²/2 (e^(2λ) − 1)]                    |
//! | `Ex5`   | x^r   | x^s       | as `Ex2`                         | exp[x^e/e (D^(−e/(r−1)) − 1)], e = s−r+1  |
//!
//! In `Ex5`, `D = 1 − λ(r−1)x^(r−1)`. The prefactor is `1/e`: that is what
//! makes `∂g/∂λ = T^s g` hold for every `s`. At `e = 0` the closed form
//! degenerates to a logarithm and is rejected.

use crate::expr::{parse, Expr};
use crate::rational::Rational;
use crate::series::{Coeff, Series};

use super::{BivariateFlow, FlowError, FlowSolution, LAMBDA};

#[derive(Debug, Clone, PartialEq)]
pub enum FlowExample {
    Ex1,
    Ex2 { r: u32 },
    Ex3 { v: Expr },
    Ex4,
    Ex5 { r: u32, s: u32 },
}

impl FlowExample {
    pub fn q_expr(&self) -> Expr {
        let text = match self {
            FlowExample::Ex1 | FlowExample::Ex4 => "x".to_string(),
            FlowExample::Ex2 { r } | FlowExample::Ex5 { r, .. } => format!("x^{r}"),
            FlowExample::Ex3 { .. } => "1".to_string(),
        };
        parse(&text).expect("catalog expressions parse")
    }

    pub fn v_expr(&self) -> Expr {
        match self {
            FlowExample::Ex1 | FlowExample::Ex2 { .. } => Expr::lit(0),
            FlowExample::Ex3 { v } => v.clone(),
            FlowExample::Ex4 => parse("x^2").unwrap(),
            FlowExample::Ex5 { s, .. } => parse(&format!("x^{s}")).unwrap(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            FlowExample::Ex1 => "ex1".into(),
            FlowExample::Ex2 { r } => format!("ex2(r={r})"),
            FlowExample::Ex3 { v } => format!("ex3(v={v})"),
            FlowExample::Ex4 => "ex4".into(),
            FlowExample::Ex5 { r, s } => format!("ex5(r={r},s={s})"),
        }
    }

    fn validate(&self) -> Result<(), FlowError> {
        match self {
            FlowExample::Ex2 { r } if *r < 2 => Err(FlowError::UnsupportedParameters(format!(
                "ex2 needs r > 1, got r = {r}"
            ))),
            FlowExample::Ex5 { r, .. } if *r < 2 => Err(FlowError::UnsupportedParameters(format!(
                "ex5 needs r > 1, got r = {r}"
            ))),
            FlowExample::Ex5 { r, s } if *s + 1 == *r => Err(FlowError::UnsupportedParameters(
                format!("ex5 closed form is singular at s = r − 1 (r = {r}, s = {s})"),
            )),
            _ => Ok(()),
        }
    }
}

fn pow_coeff<C: Coeff>(x: &C, n: u32) -> C {
    (0..n).fold(x.one_like(), |acc, _| acc.times(x))
}

/// `1 − λ(r−1) X^(r−1)` raised to `alpha`.
fn dilation_base<C: Coeff>(x: &C, r: u32, alpha: &Rational, order: usize) -> Series<C> {
    let mut coeffs = vec![x.zero_like(); order + 1];
    coeffs[0] = x.one_like();
    if order >= 1 {
        coeffs[1] = pow_coeff(x, r - 1).scale(&-Rational::from(r - 1));
    }
    Series::new(LAMBDA, coeffs)
        .pow(alpha)
        .expect("constant term is one")
}

/// `X e^{cλ}` style series: coefficient `k` is `X c^k / k!`.
fn exponential<C: Coeff>(x: &C, c: &Rational, order: usize) -> Series<C> {
    let coeffs = (0..=order)
        .map(|k| x.scale(&(c.pow(k as i64) / Rational::factorial(k))))
        .collect();
    Series::new(LAMBDA, coeffs)
}

/// Closed forms with coefficients in `C`.
///
/// `x` is the coefficient-ring image of the point (`x₀`, or `x₀ + u` in the
/// bivariate case) and `shift` is `x − x₀` in that ring. `v_long` is the
/// Taylor series of `v` about `x₀`, long enough for the substitution in `Ex3`.
fn closed_form<C: Coeff>(
    example: &FlowExample,
    x: &C,
    shift: &C,
    v_long: &Series,
    order: usize,
) -> Result<(Series<C>, Series<C>), FlowError> {
    example.validate()?;
    let one = Series::constant(LAMBDA, x.one_like(), order);
    Ok(match example {
        FlowExample::Ex1 => (exponential(x, &Rational::one(), order), one),
        FlowExample::Ex2 { r } => {
            let alpha = Rational::new(-1, i64::from(r - 1));
            (dilation_base(x, *r, &alpha, order).mul_coeff(x), one)
        }
        FlowExample::Ex3 { .. } => {
            let mut t = vec![x.zero_like(); order + 1];
            t[0] = x.clone();
            if order >= 1 {
                t[1] = x.one_like();
            }
            // v(x + λ) as a series in λ: substitute (x − x₀) + λ.
            let mut arg = vec![x.zero_like(); order + 1];
            arg[0] = shift.clone();
            if order >= 1 {
                arg[1] = x.one_like();
            }
            let v_shifted = v_long.eval_at(&Series::new(LAMBDA, arg));
            let g = v_shifted.integrate().exp()?;
            (Series::new(LAMBDA, t), g)
        }
        FlowExample::Ex4 => {
            let t = exponential(x, &Rational::one(), order);
            let half_x2 = x.times(x).scale(&Rational::new(1, 2));
            let mut exponent = exponential(&half_x2, &Rational::from(2), order);
            let c0 = exponent.coeffs()[0].clone();
            exponent = &exponent - &Series::constant(LAMBDA, c0, order);
            (t, exponent.exp()?)
        }
        FlowExample::Ex5 { r, s } => {
            let e = i64::from(*s) - i64::from(*r) + 1;
            let alpha_t = Rational::new(-1, i64::from(r - 1));
            let t = dilation_base(x, *r, &alpha_t, order).mul_coeff(x);
            let x_pow_e = if e >= 0 {
                pow_coeff(x, e as u32)
            } else {
                let inv = x.try_inverse().ok_or_else(|| {
                    FlowError::UnsupportedParameters(format!(
                        "ex5 with s < r − 1 needs x₀ ≠ 0 (r = {r}, s = {s})"
                    ))
                })?;
                pow_coeff(&inv, (-e) as u32)
            };
            let prefactor = x_pow_e.scale(&Rational::new(1, e));
            let alpha_g = Rational::new(-e, i64::from(r - 1));
            let inner = &dilation_base(x, *r, &alpha_g, order) - &one;
            (t, inner.mul_coeff(&prefactor).exp()?)
        }
    })
}

fn v_expansion(example: &FlowExample, x0: &Rational, order: usize) -> Result<Series, FlowError> {
    Ok(example.v_expr().taylor(x0, order)?)
}

/// The closed-form flow at `x₀`, expanded through `λ^order`.
pub fn closed_form_catalog(
    example: &FlowExample,
    x0: &Rational,
    order: usize,
) -> Result<FlowSolution, FlowError> {
    let q_expr = example.q_expr();
    let v_expr = example.v_expr();
    let v_series = v_expansion(example, x0, order)?;
    let (t, g) = closed_form(example, x0, &Rational::zero(), &v_series, order)?;
    Ok(FlowSolution {
        t,
        g,
        x0: x0.clone(),
        q_series: q_expr.taylor(x0, order)?,
        v_series,
        q_expr: Some(q_expr.to_string()),
        v_expr: Some(v_expr.to_string()),
    })
}

/// The closed-form flow with coefficients in `x − x₀`, exact through
/// `λ^order_lambda` and `(x − x₀)^order_x`.
pub fn closed_form_catalog_bivariate(
    example: &FlowExample,
    x0: &Rational,
    order_lambda: usize,
    order_x: usize,
) -> Result<BivariateFlow, FlowError> {
    let q_expr = example.q_expr();
    let v_expr = example.v_expr();
    let long = order_lambda + order_x;
    let v_series = v_expansion(example, x0, long)?;
    let q_series = q_expr.taylor(x0, long)?;
    let x_var = crate::expr::expansion_var("x", x0);
    let shift = Series::variable(&x_var, order_x);
    let point = &shift + &Series::from_rationals(&x_var, vec![x0.clone()], order_x);
    let (t, g) = closed_form(example, &point, &shift, &v_series, order_lambda)?;
    Ok(FlowSolution {
        t,
        g,
        x0: x0.clone(),
        q_series,
        v_series,
        q_expr: Some(q_expr.to_string()),
        v_expr: Some(v_expr.to_string()),
    })
}
