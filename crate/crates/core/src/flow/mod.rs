//! Substitution flows.
//!
//! `exp[λ(q(x) d/dx + v(x))] F(x) = g(λ, x) · F(T(λ, x))` where
//!
//! ```text
//! ∂T/∂λ = q(T),      T(0, x) = x
//! ∂g/∂λ = v(T) · g,  g(0, x) = 1
//! ```
//!
//! Both equations are solved as formal power series in `λ` by the
//! order-by-order integration recurrence
//! `T_{k+1} = [λ^k] q(T) / (k+1)`, `g_{k+1} = [λ^k] (v(T) g) / (k+1)`.
//! Coefficients are either rationals (the flow at a fixed point `x₀`) or
//! series in `x − x₀` (the bivariate flow).
//!
//! The composition law `T(λ+θ, x) = T(θ, T(λ, x))`,
//! `g(λ+θ, x) = g(λ, x) g(θ, T(λ, x))` is checked in [`group_law_check`].
//! Analytically it can hold only locally in `λ`; on formal series it is an
//! exact identity order by order, so the check is an equality test.

mod catalog;
mod group_law;

pub use catalog::{closed_form_catalog, closed_form_catalog_bivariate, FlowExample};
pub use group_law::{group_law_check, GroupLawReport, LawMismatch};

use serde::{Deserialize, Serialize};

use crate::expr::{expansion_var, Expr, ExprError};
use crate::rational::Rational;
use crate::series::{Coeff, Series, SeriesError};

/// Variable label used for every series in `λ`.
pub const LAMBDA: &str = "lambda";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("{which} is truncated at order {have}, but order {need} is required")]
    InsufficientInputOrder {
        which: &'static str,
        have: usize,
        need: usize,
    },
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `T(λ, ·)` and `g(λ, ·)` as series in `λ`.
///
/// With `C = Rational` the coefficients are values at `x = x₀`; with
/// `C = Series<Rational>` they are series in `x − x₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "C: Coeff + Serialize",
    deserialize = "C: Coeff + Deserialize<'de>"
))]
pub struct FlowSolution<C: Coeff = Rational> {
    #[serde(rename = "T")]
    pub t: Series<C>,
    pub g: Series<C>,
    pub x0: Rational,
    pub q_series: Series,
    pub v_series: Series,
    pub q_expr: Option<String>,
    pub v_expr: Option<String>,
}

/// Bivariate flow: coefficients are series in `x − x₀`.
pub type BivariateFlow = FlowSolution<Series>;

impl<C: Coeff> FlowSolution<C> {
    pub fn order(&self) -> usize {
        self.t.order()
    }

    /// `T(λ, x) − x₀`, the series substituted into the `x − x₀` slot.
    pub fn displacement(&self) -> Series<C> {
        let mut coeffs = self.t.coeffs().to_vec();
        coeffs[0] = coeffs[0].minus(&coeffs[0].constant_like(&self.x0));
        Series::new(self.t.var(), coeffs)
    }

    /// `(∂T/∂λ − q(T), ∂g/∂λ − v(T) g)`, through `λ^(N−1)`. Both vanish for
    /// an exact solution. An order-0 solution has nothing to check and
    /// returns zeros.
    pub fn residuals(&self) -> (Series<C>, Series<C>) {
        if self.order() == 0 {
            let zero = self.t.constant_term().zero_like();
            let z = Series::constant(LAMBDA, zero, 0);
            return (z.clone(), z);
        }
        let s = self.displacement();
        let q_of_t = self.q_series.eval_at(&s);
        let v_of_t = self.v_series.eval_at(&s);
        let dt = self.t.differentiate();
        let dg = self.g.differentiate();
        let rt = &dt - &q_of_t.truncate(dt.order());
        let rg = &dg - &(&v_of_t * &self.g).truncate(dg.order());
        (rt, rg)
    }
}

impl FlowSolution<Series> {
    /// Sets `x = x₀`, giving the pointwise flow.
    pub fn at_point(&self) -> FlowSolution {
        FlowSolution {
            t: self.t.inner_constant_terms(),
            g: self.g.inner_constant_terms(),
            x0: self.x0.clone(),
            q_series: self.q_series.clone(),
            v_series: self.v_series.clone(),
            q_expr: self.q_expr.clone(),
            v_expr: self.v_expr.clone(),
        }
    }
}

/// Integrates the flow with coefficients in `C`.
///
/// `shift0` is the λ⁰ coefficient of `T − x₀`: zero at a point, `x − x₀`
/// in the bivariate case. Returns `(T − x₀, g)`.
fn integrate_flow<C: Coeff>(
    q: &Series,
    v: &Series,
    shift0: &C,
    order: usize,
) -> (Series<C>, Series<C>) {
    let mut s: Vec<C> = vec![shift0.clone()];
    let mut g: Vec<C> = vec![shift0.one_like()];
    for k in 0..order {
        let s_k = Series::new(LAMBDA, s.clone());
        let g_k = Series::new(LAMBDA, g.clone());
        let inv = Rational::new(1, (k + 1) as i64);
        let q_of_t = q.eval_at(&s_k);
        let v_g = &v.eval_at(&s_k) * &g_k;
        s.push(q_of_t.coeffs()[k].scale(&inv));
        g.push(v_g.coeffs()[k].scale(&inv));
    }
    (Series::new(LAMBDA, s), Series::new(LAMBDA, g))
}

fn check_input_order(which: &'static str, series: &Series, need: usize) -> Result<(), FlowError> {
    if series.order() < need {
        return Err(FlowError::InsufficientInputOrder {
            which,
            have: series.order(),
            need,
        });
    }
    Ok(())
}

/// Solves the flow at the point `x0` through `λ^order`.
///
/// `q` and `v` are Taylor series in `x − x₀`. Coefficient `λ^(k+1)` reads
/// the inputs only through `(x − x₀)^k`, so both must carry at least order
/// `order − 1`.
pub fn solve_flow(
    q: &Series,
    v: &Series,
    x0: &Rational,
    order: usize,
) -> Result<FlowSolution, FlowError> {
    let need = order.saturating_sub(1);
    check_input_order("q", q, need)?;
    check_input_order("v", v, need)?;
    let (s, g) = integrate_flow(q, v, &Rational::zero(), order);
    let mut t = s.into_coeffs();
    t[0] = &t[0] + x0;
    Ok(FlowSolution {
        t: Series::new(LAMBDA, t),
        g,
        x0: x0.clone(),
        q_series: q.clone(),
        v_series: v.clone(),
        q_expr: None,
        v_expr: None,
    })
}

/// Expands `q`, `v` at `x0` and solves the pointwise flow.
pub fn solve_flow_exprs(
    q: &Expr,
    v: &Expr,
    x0: &Rational,
    order: usize,
) -> Result<FlowSolution, FlowError> {
    let qs = q.taylor(x0, order)?;
    let vs = v.taylor(x0, order)?;
    let mut sol = solve_flow(&qs, &vs, x0, order)?;
    sol.q_expr = Some(q.to_string());
    sol.v_expr = Some(v.to_string());
    Ok(sol)
}

/// Solves the flow with coefficients in `x − x₀`, exact through `λ^order_lambda`
/// and `(x − x₀)^order_x`.
///
/// `q` and `v` are expanded through `(x − x₀)^(order_lambda + order_x)` so
/// that substituting `T(λ, x) − x₀ = (x − x₀) + O(λ)` loses nothing inside
/// the rectangle.
pub fn solve_flow_bivariate(
    q: &Expr,
    v: &Expr,
    x0: &Rational,
    order_lambda: usize,
    order_x: usize,
) -> Result<BivariateFlow, FlowError> {
    let long = order_lambda + order_x;
    let qs = q.taylor(x0, long)?;
    let vs = v.taylor(x0, long)?;
    let x_var = expansion_var(q.variable().or(v.variable()).unwrap_or("x"), x0);
    let u = Series::variable(&x_var, order_x);
    let (s, g) = integrate_flow(&qs, &vs, &u, order_lambda);
    let mut t = s.into_coeffs();
    t[0] = t[0].plus(&t[0].constant_like(x0));
    Ok(FlowSolution {
        t: Series::new(LAMBDA, t),
        g,
        x0: x0.clone(),
        q_series: qs,
        v_series: vs,
        q_expr: Some(q.to_string()),
        v_expr: Some(v.to_string()),
    })
}
