//! Truncated univariate power series over a generic coefficient ring.
//!
//! A [`Series`] stores `c_0..c_N` and stands for the congruence class of
//! `Σ c_k t^k` modulo `t^(N+1)`. Binary operations truncate to the smaller
//! order of the two operands, so a result never claims more precision than
//! its inputs carry.
//!
//! The coefficient ring is anything implementing [`Coeff`]: [`Rational`]
//! for ordinary series, or `Series<Rational>` for the bivariate
//! `T(λ, x)` objects of the flow solver, where the outer variable is `λ`
//! and each coefficient is a series in `x − x₀`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::Rational;

/// Default truncation order used when a caller does not pick one.
pub const DEFAULT_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("division by a series whose constant term is not invertible")]
    DivisionByZeroConstantTerm,
    #[error("variable mismatch: `{left}` vs `{right}`")]
    VariableMismatch { left: String, right: String },
    #[error("inner series of a composition must have zero constant term")]
    NonzeroInnerConstantTerm,
    #[error("series is not reversible: {0}")]
    NotReversible(&'static str),
    #[error("{function} requires the constant term to be exactly {required}")]
    ConstantTermConstraintViolated {
        function: &'static str,
        required: &'static str,
    },
}

/// Ring operations needed by series arithmetic.
///
/// Constants are produced from an existing element (`zero_like`,
/// `constant_like`) because a nested series needs to know its own variable
/// and truncation order to build a zero.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn constant_like(&self, c: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn try_inverse(&self) -> Option<Self>;
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn constant_like(&self, c: &Rational) -> Self {
        c.clone()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn is_one(&self) -> bool {
        Rational::is_one(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
    fn try_inverse(&self) -> Option<Self> {
        self.recip()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transcendental {
    Exp,
    Log,
    Pow(Rational),
}

#[derive(Clone, PartialEq)]
pub struct Series<C = Rational> {
    var: Arc<str>,
    coeffs: Vec<C>,
}

impl<C: Coeff> Series<C> {
    /// Builds a series of order `coeffs.len() - 1`.
    ///
    /// Panics if `coeffs` is empty.
    pub fn new(var: impl AsRef<str>, coeffs: Vec<C>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least one coefficient"
        );
        Series {
            var: Arc::from(var.as_ref()),
            coeffs,
        }
    }

    /// `c + O(t^(order+1))`.
    pub fn constant(var: impl AsRef<str>, c: C, order: usize) -> Self {
        let zero = c.zero_like();
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = c;
        Series::new(var, coeffs)
    }

    fn with_coeffs(&self, coeffs: Vec<C>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Series {
            var: Arc::clone(&self.var),
            coeffs,
        }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `t^k`; `None` above the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&C> {
        self.coeffs.get(k)
    }

    pub fn constant_term(&self) -> &C {
        &self.coeffs[0]
    }

    pub fn with_var(mut self, var: impl AsRef<str>) -> Self {
        self.var = Arc::from(var.as_ref());
        self
    }

    /// Drops coefficients above `order`. A larger `order` is a no-op.
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        self.with_coeffs(self.coeffs[..=n].to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl FnMut(&C) -> D) -> Series<D> {
        Series::new(self.var(), self.coeffs.iter().map(f).collect())
    }

    fn check_var(&self, other: &Self) -> Result<(), SeriesError> {
        if self.var == other.var {
            Ok(())
        } else {
            Err(SeriesError::VariableMismatch {
                left: self.var.to_string(),
                right: other.var.to_string(),
            })
        }
    }

    fn zero_coeff(&self) -> C {
        self.coeffs[0].zero_like()
    }

    pub fn arith(&self, rhs: &Self, op: ArithOp) -> Result<Self, SeriesError> {
        match op {
            ArithOp::Add => self.try_add(rhs),
            ArithOp::Sub => self.try_sub(rhs),
            ArithOp::Mul => self.try_mul(rhs),
            ArithOp::Div => self.try_div(rhs),
        }
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_var(rhs)?;
        Ok(self.zip_with(rhs, C::plus))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_var(rhs)?;
        Ok(self.zip_with(rhs, C::minus))
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| f(a, b))
            .collect();
        self.with_coeffs(coeffs)
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_var(rhs)?;
        let n = self.order().min(rhs.order());
        let mut out = vec![self.zero_coeff(); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=n - i].iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Ok(self.with_coeffs(out))
    }

    /// Quotient by the direct recurrence `h_k = (f_k − Σ_{j≥1} g_j h_{k−j}) / g_0`.
    pub fn try_div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        self.check_var(rhs)?;
        let inv0 = rhs.coeffs[0]
            .try_inverse()
            .ok_or(SeriesError::DivisionByZeroConstantTerm)?;
        let n = self.order().min(rhs.order());
        let mut out: Vec<C> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                acc = acc.minus(&rhs.coeffs[j].times(&out[k - j]));
            }
            out.push(acc.times(&inv0));
        }
        Ok(self.with_coeffs(out))
    }

    /// `1 / self`.
    pub fn try_recip(&self) -> Result<Self, SeriesError> {
        let one = Series::constant(self.var(), self.coeffs[0].one_like(), self.order());
        one.try_div(self)
    }

    pub fn negate(&self) -> Self {
        self.with_coeffs(self.coeffs.iter().map(C::negate).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| a.scale(c)).collect())
    }

    /// Multiplies every coefficient by a ring element.
    pub fn mul_coeff(&self, c: &C) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    /// Multiplies by `t^k`, keeping the truncation order.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut out = vec![self.zero_coeff(); self.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i + k < out.len() {
                out[i + k] = a.clone();
            }
        }
        self.with_coeffs(out)
    }

    /// Integer power with non-negative exponent, by squaring.
    pub fn powi(&self, exp: u32) -> Self {
        let mut acc = Series::constant(self.var(), self.coeffs[0].one_like(), self.order());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self(inner(t))`. The inner series must have zero constant term.
    ///
    /// The result lives in `inner`'s variable with order
    /// `min(self.order(), inner.order())`.
    pub fn compose(&self, inner: &Series<C>) -> Result<Series<C>, SeriesError> {
        if !inner.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroInnerConstantTerm);
        }
        let n = self.order().min(inner.order());
        let inner = inner.truncate(n);
        let mut acc = Series::constant(inner.var(), self.coeffs[n].clone(), n);
        for c in self.coeffs[..n].iter().rev() {
            acc = &acc * &inner;
            acc.coeffs[0] = acc.coeffs[0].plus(c);
        }
        Ok(acc)
    }

    /// Compositional inverse by Lagrange inversion:
    /// `[t^n] f⁻¹ = (1/n) [w^(n−1)] (w / f(w))^n`.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NotReversible("constant term is nonzero"));
        }
        let n = self.order();
        if n == 0 {
            return Err(SeriesError::NotReversible("order 0 carries no linear term"));
        }
        if self.coeffs[1].try_inverse().is_none() {
            return Err(SeriesError::NotReversible("linear term is not invertible"));
        }
        // f(w)/w, then its reciprocal φ = w/f(w) of order n−1.
        let quotient = self.with_coeffs(self.coeffs[1..].to_vec());
        let phi = quotient.try_recip()?;
        let zero = self.zero_coeff();
        let mut out = vec![zero.clone(); n + 1];
        let mut phi_pow = Series::constant(self.var(), zero.one_like(), n - 1);
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            phi_pow = &phi_pow * &phi;
            *slot = phi_pow.coeffs[k - 1].scale(&Rational::new(1, k as i64));
        }
        Ok(self.with_coeffs(out))
    }

    pub fn transcend(&self, function: &Transcendental) -> Result<Self, SeriesError> {
        match function {
            Transcendental::Exp => self.exp(),
            Transcendental::Log => self.log(),
            Transcendental::Pow(r) => self.pow(r),
        }
    }

    /// `exp(f)` for `f(0) = 0`, from `h′ = f′ h`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::ConstantTermConstraintViolated {
                function: "exp",
                required: "0",
            });
        }
        let one = self.coeffs[0].one_like();
        let mut h: Vec<C> = vec![one];
        for k in 1..=self.order() {
            let mut acc = self.zero_coeff();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                let w = self.coeffs[j].times(&h[k - j]).scale(&Rational::from(j));
                acc = acc.plus(&w);
            }
            h.push(acc.scale(&Rational::new(1, k as i64)));
        }
        Ok(self.with_coeffs(h))
    }

    /// `log(f)` for `f(0) = 1`, from `f l′ = f′`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ConstantTermConstraintViolated {
                function: "log",
                required: "1",
            });
        }
        let mut l: Vec<C> = vec![self.zero_coeff()];
        for k in 1..=self.order() {
            let mut acc = self.coeffs[k].clone();
            for (j, lj) in l.iter().enumerate().skip(1) {
                if self.coeffs[k - j].is_zero() {
                    continue;
                }
                let w = lj
                    .times(&self.coeffs[k - j])
                    .scale(&Rational::new(j as i64, k as i64));
                acc = acc.minus(&w);
            }
            l.push(acc);
        }
        Ok(self.with_coeffs(l))
    }

    /// `f^α` for `f(0) = 1` and rational `α`, from `f h′ = α f′ h`.
    pub fn pow(&self, alpha: &Rational) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ConstantTermConstraintViolated {
                function: "pow",
                required: "1",
            });
        }
        let alpha1 = alpha + &Rational::one();
        let mut h: Vec<C> = vec![self.coeffs[0].one_like()];
        for k in 1..=self.order() {
            let mut acc = self.zero_coeff();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                let weight = &alpha1 * &Rational::from(j) - Rational::from(k);
                if weight.is_zero() {
                    continue;
                }
                acc = acc.plus(&self.coeffs[j].times(&h[k - j]).scale(&weight));
            }
            h.push(acc.scale(&Rational::new(1, k as i64)));
        }
        Ok(self.with_coeffs(h))
    }

    /// `d/dt`. The order drops by one; an order-0 input yields the order-0
    /// zero series.
    pub fn differentiate(&self) -> Self {
        if self.order() == 0 {
            return self.with_coeffs(vec![self.zero_coeff()]);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&Rational::from(i + 1)))
            .collect();
        self.with_coeffs(coeffs)
    }

    /// `∫₀^t`, capped at the input order (the top coefficient is dropped).
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(self.zero_coeff());
        for (i, c) in self.coeffs[..self.order()].iter().enumerate() {
            coeffs.push(c.scale(&Rational::new(1, (i + 1) as i64)));
        }
        self.with_coeffs(coeffs)
    }
}

impl Series<Rational> {
    /// Pads `coeffs` with zeros (or truncates) to exactly `order + 1` terms.
    pub fn from_rationals(var: impl AsRef<str>, coeffs: Vec<Rational>, order: usize) -> Self {
        let mut coeffs = coeffs;
        coeffs.resize(order + 1, Rational::zero());
        Series::new(var, coeffs)
    }

    pub fn zero(var: impl AsRef<str>, order: usize) -> Self {
        Series::from_rationals(var, vec![], order)
    }

    pub fn one(var: impl AsRef<str>, order: usize) -> Self {
        Series::from_rationals(var, vec![Rational::one()], order)
    }

    /// The series `t` itself.
    pub fn variable(var: impl AsRef<str>, order: usize) -> Self {
        Series::from_rationals(var, vec![Rational::zero(), Rational::one()], order)
    }

    /// Evaluates the stored polynomial part `Σ c_k y^k` at an element of any
    /// ring containing the rationals.
    ///
    /// When `y` is a series in another variable whose lowest terms are small
    /// (as with `T(λ, x) − x₀` substituted into a Taylor series in
    /// `x − x₀`), the result is exact wherever the discarded tail `c_k` for
    /// `k > N` cannot reach.
    pub fn eval_at<R: Coeff>(&self, y: &R) -> R {
        let mut acc = y.constant_like(&self.coeffs[self.order()]);
        for c in self.coeffs[..self.order()].iter().rev() {
            acc = acc.times(y).plus(&y.constant_like(c));
        }
        acc
    }
}

impl<C: Coeff> Series<Series<C>> {
    /// Sets the inner variable to zero, keeping the outer series.
    pub fn inner_constant_terms(&self) -> Series<C> {
        self.map_coeffs(|c| c.constant_term().clone())
    }
}

impl<C: Coeff> Coeff for Series<C> {
    fn zero_like(&self) -> Self {
        self.with_coeffs(vec![self.zero_coeff(); self.coeffs.len()])
    }
    fn one_like(&self) -> Self {
        Series::constant(self.var(), self.coeffs[0].one_like(), self.order())
    }
    fn constant_like(&self, c: &Rational) -> Self {
        Series::constant(self.var(), self.coeffs[0].constant_like(c), self.order())
    }
    fn is_zero(&self) -> bool {
        Series::is_zero(self)
    }
    fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Coeff::is_zero)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negate(&self) -> Self {
        Series::negate(self)
    }
    fn scale(&self, c: &Rational) -> Self {
        Series::scale(self, c)
    }
    fn try_inverse(&self) -> Option<Self> {
        self.try_recip().ok()
    }
}

// Operator forms panic on a variable mismatch; the `try_*` methods report it.
macro_rules! series_op {
    ($tr:ident, $m:ident, $try:ident) => {
        impl<C: Coeff> $tr<&Series<C>> for &Series<C> {
            type Output = Series<C>;
            fn $m(self, rhs: &Series<C>) -> Series<C> {
                match self.$try(rhs) {
                    Ok(s) => s,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl<C: Coeff> $tr<Series<C>> for Series<C> {
            type Output = Series<C>;
            fn $m(self, rhs: Series<C>) -> Series<C> {
                (&self).$m(&rhs)
            }
        }
    };
}
series_op!(Add, add, try_add);
series_op!(Sub, sub, try_sub);
series_op!(Mul, mul, try_mul);
series_op!(Div, div, try_div);

impl<C: Coeff> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        self.negate()
    }
}

impl<C: Coeff> Neg for Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        self.negate()
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Series<C> {
    /// Ascending powers, e.g. `1 + 2*t + (1/2)*t^2 + O(t^3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.var.chars().all(|c| c.is_alphanumeric() || c == '_') {
            self.var.to_string()
        } else {
            format!("({})", self.var)
        };
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_string();
            let simple = !text.contains(' ');
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if simple => (true, rest.to_string()),
                _ => (false, text.clone()),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let body = if simple { body } else { format!("({body})") };
            match k {
                0 => write!(f, "{body}")?,
                _ => {
                    if !c.is_one() && body != "1" {
                        write!(f, "{body}*")?;
                    }
                    if k == 1 {
                        write!(f, "{var}")?;
                    } else {
                        write!(f, "{var}^{k}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O({var}^{})", self.order() + 1)
    }
}

impl<C: Coeff + fmt::Debug> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Series")
            .field("var", &self.var)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

#[derive(Serialize)]
struct SeriesRef<'a, C> {
    var: &'a str,
    order: usize,
    coeffs: &'a [C],
}

#[derive(Deserialize)]
struct SeriesOwned<C> {
    var: String,
    order: usize,
    coeffs: Vec<C>,
}

impl<C: Coeff + Serialize> Serialize for Series<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesRef {
            var: &self.var,
            order: self.order(),
            coeffs: &self.coeffs,
        }
        .serialize(serializer)
    }
}

impl<'de, C: Coeff + Deserialize<'de>> Deserialize<'de> for Series<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SeriesOwned::<C>::deserialize(deserializer)?;
        if raw.coeffs.len() != raw.order + 1 {
            return Err(D::Error::custom(format!(
                "series of order {} needs {} coefficients, got {}",
                raw.order,
                raw.order + 1,
                raw.coeffs.len()
            )));
        }
        Ok(Series::new(raw.var, raw.coeffs))
    }
}
