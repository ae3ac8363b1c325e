//! Coherent-state matrix elements `⟨z′|W^n|z⟩ / ⟨z′|z⟩` by direct calculus.
//!
//! `|z⟩` is the truncated exponential `Σ_{m≤M} z^m x^m / m!`. Applying
//! `W = q(x) d/dx + v(x)` to each monomial, evaluating at `x = z′*` and
//! multiplying by `e^{−z z′*}` gives the matrix element as a polynomial in
//! `z`; the `z^k` coefficient only involves monomials `m ≤ k`, so truncation
//! at `M ≥ n` is harmless. Nothing here touches flows or series reversion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::expr::Expr;
use crate::poly::Polynomial;
use crate::rational::Rational;

use super::WeylError;

pub const DEFAULT_BUDGET_CAP: usize = 256;
const DEGREE_GUARD: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZParam {
    Symbolic,
    Value(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoherentParams {
    pub z_prime_star: Rational,
    pub z: ZParam,
}

impl CoherentParams {
    pub fn symbolic(z_prime_star: Rational) -> Self {
        CoherentParams {
            z_prime_star,
            z: ZParam::Symbolic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Moment {
    Symbolic(Polynomial),
    Value(Rational),
}

impl Moment {
    /// The moment as a polynomial in `z` (constant when `z` was numeric).
    pub fn into_polynomial(self) -> Polynomial {
        match self {
            Moment::Symbolic(p) => p,
            Moment::Value(c) => Polynomial::constant(c),
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Moment::Value(c) => Some(c),
            Moment::Symbolic(_) => None,
        }
    }
}

/// `M = n·(max(deg q, deg v) + 1) + 4`.
pub fn oracle_budget(q: &Polynomial, v: &Polynomial, n: usize) -> usize {
    let d = q.degree().unwrap_or(0).max(v.degree().unwrap_or(0));
    n * (d + 1) + DEGREE_GUARD
}

/// `W` with integer coefficients: `q = q_num / den`, `v = v_num / den`.
struct IntegerOperator {
    q_num: Vec<BigInt>,
    v_num: Vec<BigInt>,
    den: BigInt,
}

impl IntegerOperator {
    fn new(q: &Polynomial, v: &Polynomial) -> Self {
        let den = q
            .coeffs()
            .iter()
            .chain(v.coeffs())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled = |p: &Polynomial| -> Vec<BigInt> {
            p.coeffs()
                .iter()
                .map(|c| c.numer() * (&den / c.denom()))
                .collect()
        };
        IntegerOperator {
            q_num: scaled(q),
            v_num: scaled(v),
            den,
        }
    }

    /// `den · W p` for an integer polynomial `p`.
    fn apply(&self, p: &[BigInt]) -> Vec<BigInt> {
        let len = (p.len() + self.q_num.len()).max(p.len() + self.v_num.len());
        let mut out = vec![BigInt::zero(); len];
        for (i, qi) in self.q_num.iter().enumerate() {
            for (j, pj) in p.iter().enumerate().skip(1) {
                out[i + j - 1] += qi * pj * j;
            }
        }
        for (i, vi) in self.v_num.iter().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                out[i + j] += vi * pj;
            }
        }
        out
    }
}

/// `p(a/b)` for an integer polynomial `p`.
fn eval_integer(p: &[BigInt], at: &Rational) -> Rational {
    let (a, b) = (at.numer(), at.denom());
    let mut num = BigInt::zero();
    let mut b_pow = BigInt::one();
    for c in p.iter().rev() {
        num = num * a + c * &b_pow;
        b_pow *= b;
    }
    // b_pow ended one power too high.
    Rational::new(num * b, b_pow)
}

pub fn bargmann_moments_capped(
    q: &Polynomial,
    v: &Polynomial,
    params: &CoherentParams,
    n_max: usize,
    cap: usize,
) -> Result<Vec<Moment>, WeylError> {
    let budget = oracle_budget(q, v, n_max);
    if budget > cap {
        return Err(WeylError::TruncationBudgetExceeded {
            needed: budget,
            cap,
        });
    }
    let zp = &params.z_prime_star;
    let w = IntegerOperator::new(q, v);
    // paired[n][m] = (W^n x^m)(z′*) / m!, with W^n x^m = p / den^n.
    let mut paired = vec![Vec::with_capacity(budget + 1); n_max + 1];
    for m in 0..=budget {
        let mut scale = Rational::factorial(m);
        let mut p = vec![BigInt::zero(); m + 1];
        p[m] = BigInt::one();
        for (n, row) in paired.iter_mut().enumerate() {
            row.push(&eval_integer(&p, zp) / &scale);
            if n < n_max {
                p = w.apply(&p);
                scale *= &Rational::from(w.den.clone());
            }
        }
    }
    let damping: Vec<Rational> = (0..=budget)
        .map(|j| &(-zp).pow(j as i64) / &Rational::factorial(j))
        .collect();
    let moments = paired
        .into_iter()
        .map(|row| {
            let coeffs = (0..=budget)
                .map(|k| (0..=k).map(|m| &row[m] * &damping[k - m]).sum())
                .collect();
            let poly = Polynomial::new(coeffs);
            match &params.z {
                ZParam::Symbolic => Moment::Symbolic(poly),
                ZParam::Value(z) => Moment::Value(poly.eval(z)),
            }
        })
        .collect();
    Ok(moments)
}

/// Moments for `n = 0..=n_max` with the default budget cap.
pub fn bargmann_moments(
    q: &Polynomial,
    v: &Polynomial,
    params: &CoherentParams,
    n_max: usize,
) -> Result<Vec<Moment>, WeylError> {
    bargmann_moments_capped(q, v, params, n_max, DEFAULT_BUDGET_CAP)
}

pub fn bargmann_moment(
    q: &Polynomial,
    v: &Polynomial,
    params: &CoherentParams,
    n: usize,
) -> Result<Moment, WeylError> {
    let mut all = bargmann_moments(q, v, params, n)?;
    Ok(all.pop().expect("n + 1 moments"))
}

/// Oracle for non-polynomial `q`, `v`.
///
/// The `n`-th moment at `x = z′*` reads `q` and `v` only through their
/// derivatives of order `< n`, so replacing them by Taylor polynomials of
/// degree `n_max − 1` about `z′*` leaves every moment up to `n_max` unchanged.
pub fn bargmann_moments_series(
    q: &Expr,
    v: &Expr,
    params: &CoherentParams,
    n_max: usize,
) -> Result<Vec<Moment>, WeylError> {
    let zp = &params.z_prime_star;
    let degree = n_max.saturating_sub(1);
    let qp = Polynomial::from_series_at(&q.taylor(zp, degree)?, zp);
    let vp = Polynomial::from_series_at(&v.taylor(zp, degree)?, zp);
    bargmann_moments(&qp, &vp, params, n_max)
}
