//! Powers of `W = q(x) d/dx + v(x)` in normal-ordered form.
//!
//! In the Bargmann picture `a† = x`, `a = d/dx`, and
//!
//! ```text
//! W^n = h_n(x) + Σ_{k=1..n} f_{n,k}(x) D^k
//! exp(λW) = :g(λ, a†) exp([T(λ, a†) − a†] a):
//! ```
//!
//! [`weyl_table`] produces `h_n`, `f_{n,k}` by applying `W` to row `n`;
//! [`normal_order_exp`] packages the flow `(T, g)`; [`bargmann_moments`]
//! evaluates coherent-state matrix elements by brute-force polynomial
//! calculus; [`central_identity_check`] compares the three.

mod bargmann;

pub use bargmann::{
    bargmann_moment, bargmann_moments, bargmann_moments_capped, bargmann_moments_series,
    oracle_budget, CoherentParams, Moment, ZParam, DEFAULT_BUDGET_CAP,
};

use serde::{Deserialize, Serialize};

use crate::expr::{expansion_var, Expr, ExprError};
use crate::flow::{solve_flow, solve_flow_bivariate, FlowError, LAMBDA};
use crate::poly::Polynomial;
use crate::rational::Rational;
use crate::series::{Coeff, Series};
use crate::sheffer::egf_polynomials;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeylError {
    #[error("oracle needs truncation budget {needed}, above the cap {cap}")]
    TruncationBudgetExceeded { needed: usize, cap: usize },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Row `n` of the expansion: `h_n` and `f_{n,1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylRow {
    pub h: Polynomial,
    /// `f[k-1]` is `f_{n,k}`.
    pub f: Vec<Polynomial>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylTable {
    pub n_max: usize,
    pub q: Polynomial,
    pub v: Polynomial,
    pub rows: Vec<WeylRow>,
}

impl WeylTable {
    pub fn h(&self, n: usize) -> &Polynomial {
        &self.rows[n].h
    }

    /// `f_{n,k}` for `1 ≤ k ≤ n`; zero outside that range.
    pub fn f(&self, n: usize, k: usize) -> Polynomial {
        if k == 0 || k > n {
            return Polynomial::zero();
        }
        self.rows[n].f[k - 1].clone()
    }

    /// `h_n(x₀) + Σ_k f_{n,k}(x₀) z^k`, a polynomial in `z`.
    pub fn coherent_moment(&self, n: usize, x0: &Rational) -> Polynomial {
        let row = &self.rows[n];
        let mut coeffs = vec![row.h.eval(x0)];
        coeffs.extend(row.f.iter().map(|f| f.eval(x0)));
        Polynomial::new(coeffs)
    }
}

/// Expands `W^n` for `n ≤ n_max`.
///
/// Row `n+1` is `W` applied to row `n`:
/// `f_{n+1,k} = q f′_{n,k} + q f_{n,k−1} + v f_{n,k}` with `f_{n,0} = h_n`.
pub fn weyl_table(q: &Polynomial, v: &Polynomial, n_max: usize) -> WeylTable {
    let mut rows = Vec::with_capacity(n_max + 1);
    // c[k] is the coefficient of D^k; c[0] = h_n.
    let mut c = vec![Polynomial::one()];
    for n in 0..=n_max {
        rows.push(WeylRow {
            h: c[0].clone(),
            f: c[1..].to_vec(),
        });
        if n == n_max {
            break;
        }
        let mut next = vec![Polynomial::zero(); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k] = &next[k] + &(&(q * &ck.derivative()) + &(v * ck));
            next[k + 1] = &next[k + 1] + &(q * ck);
        }
        c = next;
    }
    WeylTable {
        n_max,
        q: q.clone(),
        v: v.clone(),
        rows,
    }
}

/// `exp(λW) = :g(λ, a†) exp([T(λ, a†) − a†] a):` with both series truncated
/// at `λ^N` and each `λ^k` coefficient at `(a† − x₀)^N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalOrderedForm {
    pub prefunction: Series<Series>,
    pub shift: Series<Series>,
    pub display: String,
}

impl NormalOrderedForm {
    pub fn order(&self) -> usize {
        self.prefunction.order()
    }

    /// Coefficients of `D^0, …, D^n` in `W^n`, read off as
    /// `n!/k! [λ^n] g (T − x)^k`. Each is a series in `x − x₀`.
    pub fn operator_coefficients(&self, n: usize) -> Vec<Series> {
        assert!(n <= self.order(), "n = {n} exceeds the form's order");
        let mut power = Series::constant(LAMBDA, self.shift.coeffs()[0].one_like(), self.order());
        let n_fact = Rational::factorial(n);
        (0..=n)
            .map(|k| {
                if k > 0 {
                    power = &power * &self.shift;
                }
                let term = &self.prefunction * &power;
                term.coeffs()[n].scale(&(&n_fact / &Rational::factorial(k)))
            })
            .collect()
    }
}

/// Normal-ordered `exp[λ(q(a†) a + v(a†))]` through `λ^order`.
pub fn normal_order_exp(
    q: &Expr,
    v: &Expr,
    x0: &Rational,
    order: usize,
) -> Result<NormalOrderedForm, WeylError> {
    let sol = solve_flow_bivariate(q, v, x0, order, order)?;
    let mut shift = sol.t.clone().into_coeffs();
    shift[0] = shift[0].zero_like();
    let shift = Series::new(LAMBDA, shift);
    let display = render(&sol.g, &shift, x0);
    Ok(NormalOrderedForm {
        prefunction: sol.g,
        shift,
        display,
    })
}

fn render_lambda_series(s: &Series<Series>, ad: &str) -> String {
    let mut terms: Vec<String> = Vec::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let body = Polynomial::new(c.coeffs().to_vec()).display_in(ad);
        let body = if body.contains(' ') || body.starts_with('-') {
            format!("({body})")
        } else {
            body
        };
        terms.push(match (k, body.as_str()) {
            (0, _) => body,
            (1, "1") => "L".to_string(),
            (_, "1") => format!("L^{k}"),
            (1, _) => format!("{body}*L"),
            _ => format!("{body}*L^{k}"),
        });
    }
    if terms.is_empty() {
        terms.push("0".into());
    }
    terms.push(format!("O(L^{})", s.order() + 1));
    terms.join(" + ")
}

/// `:(g) * exp((T − ad)*a):` with `L` for `λ`, `ad` for `a†`, and
/// coefficients written in powers of `ad − x₀`.
fn render(g: &Series<Series>, shift: &Series<Series>, x0: &Rational) -> String {
    let ad = match expansion_var("ad", x0) {
        v if v == "ad" => v,
        v => format!("({v})"),
    };
    let g_trivial =
        g.coeffs()
            .iter()
            .enumerate()
            .all(|(k, c)| if k == 0 { c.is_one() } else { c.is_zero() });
    let s_trivial = shift.is_zero();
    let g_text = format!("({})", render_lambda_series(g, &ad));
    let e_text = format!("exp(({})*a)", render_lambda_series(shift, &ad));
    match (g_trivial, s_trivial) {
        (true, true) => ":1:".to_string(),
        (true, false) => format!(":{e_text}:"),
        (false, true) => format!(":{g_text}:"),
        (false, false) => format!(":{g_text} * {e_text}:"),
    }
}

/// Which computation paths disagreed first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityMismatch {
    pub n: usize,
    pub z_power: usize,
    pub paths: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralIdentityReport {
    pub x0: Rational,
    pub n_max: usize,
    pub passed: bool,
    /// False when the oracle's truncation budget was over the cap.
    pub oracle_checked: bool,
    pub first_mismatch: Option<IdentityMismatch>,
    /// `⟨z′|W^n|z⟩/⟨z′|z⟩` from the recurrence, as polynomials in `z`.
    pub moments: Vec<Polynomial>,
}

fn first_difference(a: &Polynomial, b: &Polynomial) -> Option<usize> {
    let len = a.coeffs().len().max(b.coeffs().len());
    (0..len).find(|&k| a.coeff(k) != b.coeff(k))
}

/// Checks `n! [λ^n] g(λ, x₀) e^{z(T(λ, x₀) − x₀)} = h_n(x₀) + Σ f_{n,k}(x₀) z^k`
/// for `n ≤ n_max`, and compares both with the Bargmann oracle at
/// `z′* = x₀` when its budget allows.
pub fn central_identity_check(
    q: &Polynomial,
    v: &Polynomial,
    x0: &Rational,
    n_max: usize,
) -> Result<CentralIdentityReport, WeylError> {
    let table = weyl_table(q, v, n_max);
    let var = expansion_var("x", x0);
    let sol = solve_flow(
        &q.taylor_at(&var, x0, n_max),
        &v.taylor_at(&var, x0, n_max),
        x0,
        n_max,
    )?;
    let mut shift = sol.t.clone().into_coeffs();
    shift[0] = Rational::zero();
    let flow_side = egf_polynomials(&sol.g, &Series::new(LAMBDA, shift), n_max);

    let params = CoherentParams {
        z_prime_star: x0.clone(),
        z: ZParam::Symbolic,
    };
    let oracle = match bargmann_moments(q, v, &params, n_max) {
        Ok(m) => Some(
            m.into_iter()
                .map(Moment::into_polynomial)
                .collect::<Vec<_>>(),
        ),
        Err(WeylError::TruncationBudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };

    let moments: Vec<Polynomial> = (0..=n_max).map(|n| table.coherent_moment(n, x0)).collect();
    let mut first_mismatch = None;
    for n in 0..=n_max {
        let mut others = vec![("table vs flow", &flow_side[n])];
        if let Some(o) = &oracle {
            others.push(("table vs oracle", &o[n]));
        }
        for (paths, other) in others {
            if let Some(z_power) = first_difference(&moments[n], other) {
                first_mismatch.get_or_insert(IdentityMismatch { n, z_power, paths });
            }
        }
    }
    Ok(CentralIdentityReport {
        x0: x0.clone(),
        n_max,
        passed: first_mismatch.is_none(),
        oracle_checked: oracle.is_some(),
        first_mismatch,
        moments,
    })
}

#[cfg(test)]
mod tests;
