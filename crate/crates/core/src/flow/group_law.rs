use serde::Serialize;

use crate::rational::Rational;

use super::{BivariateFlow, FlowError};

/// First coefficient `λ^i θ^j (x − x₀)^b` where the two sides differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawMismatch {
    pub identity: &'static str,
    pub lambda_power: usize,
    pub theta_power: usize,
    pub x_power: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupLawReport {
    /// Largest `i + j` compared.
    pub order: usize,
    pub x_order: usize,
    pub substitution_holds: bool,
    pub prefunction_holds: bool,
    pub coefficients_checked: usize,
    pub first_mismatch: Option<LawMismatch>,
}

impl GroupLawReport {
    pub fn passed(&self) -> bool {
        self.substitution_holds && self.prefunction_holds
    }
}

/// Checks `T(λ+θ, x) = T(θ, T(λ, x))` and
/// `g(λ+θ, x) = g(λ, x) g(θ, T(λ, x))` coefficient by coefficient.
///
/// Writing `T(θ, y) = Σ_j T_j(y) θ^j`, the `θ^j` part of the right-hand side
/// is `T_j` evaluated at `y − x₀ = T(λ, x) − x₀`; the `λ^i θ^j` part of the
/// left-hand side is `C(i+j, i) T_{i+j}(x)`. With `T_j` known through
/// `(x − x₀)^M`, the substitution is exact for `λ^i (x − x₀)^b` with
/// `i + b ≤ M`, so every coefficient with `i + j ≤ order` and `b ≤ M − i`
/// is compared.
pub fn group_law_check(sol: &BivariateFlow, order: usize) -> Result<GroupLawReport, FlowError> {
    if order > sol.order() {
        return Err(FlowError::InsufficientInputOrder {
            which: "flow solution",
            have: sol.order(),
            need: order,
        });
    }
    let x_order = sol.t.constant_term().order();
    let t = sol.t.truncate(order);
    let g = sol.g.truncate(order);
    let s = sol.displacement().truncate(order);

    let mut report = GroupLawReport {
        order,
        x_order,
        substitution_holds: true,
        prefunction_holds: true,
        coefficients_checked: 0,
        first_mismatch: None,
    };

    for j in 0..=order {
        let s_j = s.truncate(order - j);
        let t_rhs = t.coeffs()[j].eval_at(&s_j);
        let g_rhs = &g.truncate(order - j) * &g.coeffs()[j].eval_at(&s_j);
        for i in 0..=order - j {
            if i > x_order {
                break;
            }
            let binom = Rational::binomial(i + j, i);
            let t_lhs = t.coeffs()[i + j].scale(&binom);
            let g_lhs = g.coeffs()[i + j].scale(&binom);
            for b in 0..=x_order - i {
                report.coefficients_checked += 1;
                if t_lhs.coeffs()[b] != t_rhs.coeffs()[i].coeffs()[b] {
                    report.substitution_holds = false;
                    record(&mut report, "substitution", i, j, b);
                }
                if g_lhs.coeffs()[b] != g_rhs.coeffs()[i].coeffs()[b] {
                    report.prefunction_holds = false;
                    record(&mut report, "prefunction", i, j, b);
                }
            }
        }
    }
    Ok(report)
}

fn record(report: &mut GroupLawReport, identity: &'static str, i: usize, j: usize, b: usize) {
    if report.first_mismatch.is_none() {
        report.first_mismatch = Some(LawMismatch {
            identity,
            lambda_power: i,
            theta_power: j,
            x_power: b,
        });
    }
}
