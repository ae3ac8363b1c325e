//! Sheffer pairs `(A, B)` with `Σ S_n(z) λ^n/n! = A(λ) e^{z B(λ)}`.
//!
//! A flow solved at `x₀ = z′*` gives `A(λ) = g(λ, z′*)` and
//! `B(λ) = T(λ, z′*) − z′*`. Conversely, with `u = x − z′*`,
//! `q = B′(B⁻¹(u))` and `v = A′(B⁻¹(u)) / A(B⁻¹(u))`.

mod catalog;

pub use catalog::{catalog, catalog_entries, CatalogEntry, CatalogSpec, CrossCheck};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize, Serializer};

use crate::expr::{expansion_var, ExprError};
use crate::flow::{FlowError, FlowSolution, LAMBDA};
use crate::poly::Polynomial;
use crate::rational::Rational;
use crate::series::{Series, SeriesError};
use crate::weyl::WeylError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShefferError {
    #[error("A(0) must be 1, got {0}")]
    ANotNormalized(Rational),
    #[error("B(0) must be 0, got {0}")]
    BNotNormalized(Rational),
    #[error("B′(0) = 0: q(z′*) must be nonzero")]
    DegenerateB,
    #[error("pair is truncated at order {have}, but order {need} is required")]
    InsufficientOrder { have: usize, need: usize },
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("catalog: {0}")]
    Catalog(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShefferPair {
    #[serde(rename = "A")]
    pub a: Series,
    #[serde(rename = "B")]
    pub b: Series,
    pub z_prime_star: Rational,
}

impl ShefferPair {
    /// Checks `A(0) = 1`, `B(0) = 0`, `B′(0) ≠ 0`; both series are relabelled
    /// in `λ` and truncated to the shorter order.
    pub fn new(a: Series, b: Series, z_prime_star: Rational) -> Result<Self, ShefferError> {
        if !a.constant_term().is_one() {
            return Err(ShefferError::ANotNormalized(a.constant_term().clone()));
        }
        if !b.constant_term().is_zero() {
            return Err(ShefferError::BNotNormalized(b.constant_term().clone()));
        }
        if b.coeff(1).is_none_or(Rational::is_zero) {
            return Err(ShefferError::DegenerateB);
        }
        let order = a.order().min(b.order());
        Ok(ShefferPair {
            a: a.truncate(order).with_var(LAMBDA),
            b: b.truncate(order).with_var(LAMBDA),
            z_prime_star,
        })
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }
}

/// `A = g(λ, z′*)`, `B = T(λ, z′*) − z′*` from a flow solved at `z′* = x₀`.
pub fn sheffer_from_flow(sol: &FlowSolution) -> Result<ShefferPair, ShefferError> {
    ShefferPair::new(sol.g.clone(), sol.displacement(), sol.x0.clone())
}

/// `(q, v)` as series in `x − z′*` through `order`. The pair must carry
/// order `order + 1`, since `q` is read from `B′`.
pub fn flow_params_from_sheffer(
    pair: &ShefferPair,
    order: usize,
) -> Result<(Series, Series), ShefferError> {
    if pair.order() < order + 1 {
        return Err(ShefferError::InsufficientOrder {
            have: pair.order(),
            need: order + 1,
        });
    }
    let pair_order = order + 1;
    let a = pair.a.truncate(pair_order);
    let b = pair.b.truncate(pair_order);
    let b_inv = b.reversion()?.truncate(order);
    let q = b.differentiate().compose(&b_inv)?;
    let log_deriv = a.differentiate().try_div(&a.truncate(order))?;
    let v = log_deriv.compose(&b_inv)?;
    let var = expansion_var("x", &pair.z_prime_star);
    Ok((q.with_var(&var), v.with_var(&var)))
}

/// `S_n(z) = n! Σ_k z^k/k! [λ^n] A B^k` for `n ≤ n_max ≤` the series order.
/// No normalization of `A`, `B` is assumed.
pub fn egf_polynomials(a: &Series, b: &Series, n_max: usize) -> Vec<Polynomial> {
    let a = a.truncate(n_max);
    let b = b.truncate(n_max);
    // powers[k] = A B^k
    let mut powers = vec![a];
    for k in 1..=n_max {
        let next = &powers[k - 1] * &b;
        powers.push(next);
    }
    (0..=n_max)
        .map(|n| {
            let n_fact = Rational::factorial(n);
            let coeffs = (0..=n_max)
                .map(|k| &(&powers[k].coeffs()[n] * &n_fact) / &Rational::factorial(k))
                .collect();
            Polynomial::new(coeffs)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShefferPolynomial {
    pub n: usize,
    pub poly: Polynomial,
}

pub fn sheffer_polynomials(
    pair: &ShefferPair,
    n_max: usize,
) -> Result<Vec<ShefferPolynomial>, ShefferError> {
    if n_max > pair.order() {
        return Err(ShefferError::InsufficientOrder {
            have: pair.order(),
            need: n_max,
        });
    }
    Ok(egf_polynomials(&pair.a, &pair.b, n_max)
        .into_iter()
        .enumerate()
        .map(|(n, poly)| ShefferPolynomial { n, poly })
        .collect())
}

/// Where a sequence came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(serialize_with = "as_decimal")]
    pub z_prime_star: Rational,
    #[serde(serialize_with = "as_decimal")]
    pub z: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceResult {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    #[serde(serialize_with = "all_as_decimal")]
    pub values: Vec<Rational>,
    pub provenance: Provenance,
    /// True when every value is an integer.
    pub integral: bool,
    pub annotations: Vec<String>,
    pub cross_checks: Vec<CrossCheck>,
}

impl SequenceResult {
    /// `n,a(n)` rows under a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,a(n)\n");
        for (n, a) in self.values.iter().enumerate() {
            out.push_str(&format!("{n},{a}\n"));
        }
        out
    }

    /// True when every cross-check agreed.
    pub fn verified(&self) -> bool {
        self.cross_checks.iter().all(|c| c.agrees)
    }
}

fn as_decimal<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn all_as_decimal<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(ToString::to_string))
}

/// `a(n) = S_n(z)` for `n ≤ n_max`.
pub fn sequence_values(
    pair: &ShefferPair,
    z: &Rational,
    n_max: usize,
) -> Result<SequenceResult, ShefferError> {
    let values: Vec<Rational> = sheffer_polynomials(pair, n_max)?
        .iter()
        .map(|s| s.poly.eval(z))
        .collect();
    Ok(SequenceResult {
        name: "sheffer".into(),
        parameters: BTreeMap::new(),
        integral: values.iter().all(Rational::is_integer),
        values,
        provenance: Provenance {
            a: Some(pair.a.to_string()),
            b: Some(pair.b.to_string()),
            z_prime_star: pair.z_prime_star.clone(),
            z: z.clone(),
            ..Provenance::default()
        },
        annotations: Vec::new(),
        cross_checks: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinomialTypeReport {
    pub n_max: usize,
    pub passed: bool,
    pub first_failure: Option<usize>,
}

/// Dense two-variable polynomial, `c[i][j]` the coefficient of `z₁^i z₂^j`.
type Bivariate = Vec<Vec<Rational>>;

fn bivariate_zero(deg: usize) -> Bivariate {
    vec![vec![Rational::zero(); deg + 1]; deg + 1]
}

/// `S_n(z₁ + z₂) = Σ_k C(n, k) S_k(z₁) S_{n−k}(z₂)` for `n ≤ n_max`, compared
/// as polynomials in two variables. Holds for every pair with `A = 1`.
pub fn binomial_type_check(
    pair: &ShefferPair,
    n_max: usize,
) -> Result<BinomialTypeReport, ShefferError> {
    let polys: Vec<Polynomial> = sheffer_polynomials(pair, n_max)?
        .into_iter()
        .map(|s| s.poly)
        .collect();
    let mut first_failure = None;
    for n in 0..=n_max {
        let mut lhs = bivariate_zero(n_max);
        for (m, c) in polys[n].coeffs().iter().enumerate() {
            for i in 0..=m {
                lhs[i][m - i] += &(c * &Rational::binomial(m, i));
            }
        }
        let mut rhs = bivariate_zero(n_max);
        for k in 0..=n {
            let binom = Rational::binomial(n, k);
            for (i, a) in polys[k].coeffs().iter().enumerate() {
                for (j, b) in polys[n - k].coeffs().iter().enumerate() {
                    rhs[i][j] += &(&(a * b) * &binom);
                }
            }
        }
        if lhs != rhs {
            first_failure = Some(n);
            break;
        }
    }
    Ok(BinomialTypeReport {
        n_max,
        passed: first_failure.is_none(),
        first_failure,
    })
}

#[cfg(test)]
mod tests;
