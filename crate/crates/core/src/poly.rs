//! Dense univariate polynomials over [`Rational`] in the monomial basis.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::series::Series;

/// Coefficients `c_0..c_d` of `Σ c_k x^k`, trailing zeros trimmed.
/// The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl From<Vec<Rational>> for Polynomial {
    fn from(coeffs: Vec<Rational>) -> Self {
        Polynomial::new(coeffs)
    }
}

impl From<Polynomial> for Vec<Rational> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    /// `c·x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Polynomial::new(coeffs)
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Polynomial::monomial(Rational::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Rational::from(k))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Polynomial::one(), |acc, _| &acc * self)
    }

    /// `p(inner(x))`.
    pub fn compose(&self, inner: &Polynomial) -> Self {
        self.coeffs.iter().rev().fold(Polynomial::zero(), |acc, c| {
            &(&acc * inner) + &Polynomial::constant(c.clone())
        })
    }

    /// Taylor expansion about `x0`: the series of `p(x0 + u)` in `u`, truncated
    /// at `order`.
    pub fn taylor_at(&self, var: impl AsRef<str>, x0: &Rational, order: usize) -> Series {
        let shifted = self.compose(&Polynomial::new(vec![x0.clone(), Rational::one()]));
        Series::from_rationals(var, shifted.coeffs, order)
    }

    /// Re-centers a truncated Taylor series in `u = x − x0` to the monomial
    /// basis in `x`.
    pub fn from_series_at(series: &Series, x0: &Rational) -> Self {
        let p = Polynomial::new(series.coeffs().to_vec());
        p.compose(&Polynomial::new(vec![-x0, Rational::one()]))
    }

    /// Writes the polynomial in the variable `var`, e.g. `1 + 2*x^2`.
    pub fn display_in(&self, var: &str) -> String {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coeff = mag.to_string();
            match k {
                0 => out.push_str(&coeff),
                _ => {
                    if !mag.is_one() {
                        out.push_str(&coeff);
                        out.push('*');
                    }
                    out.push_str(var);
                    if k > 1 {
                        out.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

macro_rules! owned_op {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_op!(Add, add);
owned_op!(Sub, sub);
owned_op!(Mul, mul);
