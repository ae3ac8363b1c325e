#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;

use super::*;
use crate::expr::parse;
use crate::rational::rat;

fn p(coeffs: &[i64]) -> Polynomial {
    Polynomial::from_ints(coeffs)
}

fn e(text: &str) -> Expr {
    parse(text).unwrap()
}

/// Stirling numbers of the second kind by `S(n,k) = k S(n−1,k) + S(n−1,k−1)`.
fn stirling2(n_max: usize) -> Vec<Vec<i64>> {
    let mut s = vec![vec![0i64; n_max + 1]; n_max + 1];
    s[0][0] = 1;
    for n in 1..=n_max {
        for k in 1..=n {
            s[n][k] = k as i64 * s[n - 1][k] + s[n - 1][k - 1];
        }
    }
    s
}

#[test]
fn euler_operator_squared() {
    let t = weyl_table(&p(&[0, 1]), &Polynomial::zero(), 2);
    assert_eq!(t.f(2, 1), p(&[0, 1]));
    assert_eq!(t.f(2, 2), p(&[0, 0, 1]));
    assert!(t.h(2).is_zero());
}

#[test]
fn shifted_derivative_squared() {
    let t = weyl_table(&Polynomial::one(), &p(&[0, 1]), 2);
    assert_eq!(t.h(2), &p(&[1, 0, 1]));
    assert_eq!(t.f(2, 1), p(&[0, 2]));
    assert_eq!(t.f(2, 2), Polynomial::one());
}

#[test]
fn row_zero_is_identity() {
    let t = weyl_table(&p(&[3, -1, 2]), &p(&[1, 1]), 0);
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.h(0), &Polynomial::one());
    assert!(t.rows[0].f.is_empty());
}

#[test]
fn euler_operator_gives_stirling_numbers() {
    let s = stirling2(8);
    let t = weyl_table(&p(&[0, 1]), &Polynomial::zero(), 8);
    for n in 0..=8 {
        if n > 0 {
            assert!(t.h(n).is_zero());
        }
        for k in 1..=n {
            assert_eq!(
                t.f(n, k),
                Polynomial::monomial(rat(s[n][k], 1), k),
                "S({n},{k})"
            );
        }
    }
}

#[test]
fn pure_potential_row() {
    let v = p(&[2, -1, 1]);
    let t = weyl_table(&Polynomial::zero(), &v, 6);
    for n in 0..=6 {
        assert_eq!(t.h(n), &v.pow(n as u32));
        assert!(t.rows[n].f.iter().all(Polynomial::is_zero));
    }
}

#[test]
fn leading_normal_term_degree() {
    let q = p(&[1, 0, -2]);
    let t = weyl_table(&q, &p(&[0, 3]), 6);
    for n in 1..=6 {
        assert_eq!(t.f(n, n), q.pow(n as u32));
        assert_eq!(t.f(n, n).degree(), Some(2 * n));
    }
}

#[test]
fn bell_polynomial_from_oracle() {
    let params = CoherentParams::symbolic(rat(1, 1));
    let m = bargmann_moment(&p(&[0, 1]), &Polynomial::zero(), &params, 2).unwrap();
    assert_eq!(m, Moment::Symbolic(p(&[0, 1, 1])));
    let m0 = bargmann_moment(&p(&[1, 2, 3]), &p(&[-1, 0, 1]), &params, 0).unwrap();
    assert_eq!(m0, Moment::Symbolic(Polynomial::one()));
}

#[test]
fn bell_numbers_from_oracle() {
    let params = CoherentParams {
        z_prime_star: rat(1, 1),
        z: ZParam::Value(rat(1, 1)),
    };
    let values: Vec<Rational> = bargmann_moments(&p(&[0, 1]), &Polynomial::zero(), &params, 6)
        .unwrap()
        .iter()
        .map(|m| m.value().unwrap().clone())
        .collect();
    let bell: Vec<Rational> = [1, 1, 2, 5, 15, 52, 203]
        .iter()
        .map(|&b| rat(b, 1))
        .collect();
    assert_eq!(values, bell);
}

#[test]
fn oracle_budget_cap() {
    let q = Polynomial::monomial(rat(1, 1), 30);
    let params = CoherentParams::symbolic(rat(1, 1));
    assert_eq!(oracle_budget(&q, &Polynomial::zero(), 10), 314);
    assert_eq!(
        bargmann_moments(&q, &Polynomial::zero(), &params, 10),
        Err(WeylError::TruncationBudgetExceeded {
            needed: 314,
            cap: DEFAULT_BUDGET_CAP
        })
    );
    assert!(bargmann_moments_capped(&q, &Polynomial::zero(), &params, 1, 64).is_ok());
}

#[test]
fn oracle_series_mode_reproduces_bessel_numbers() {
    let params = CoherentParams {
        z_prime_star: rat(1, 1),
        z: ZParam::Value(rat(1, 1)),
    };
    let values: Vec<Rational> = bargmann_moments_series(&e("1/(2-x)"), &e("0"), &params, 8)
        .unwrap()
        .into_iter()
        .map(|m| m.into_polynomial().coeff(0))
        .collect();
    let expected: Vec<Rational> = [1, 1, 2, 7, 37, 266, 2431, 27007, 353522]
        .iter()
        .map(|&b| rat(b, 1))
        .collect();
    assert_eq!(values, expected);
}

#[test]
fn series_mode_matches_polynomial_mode() {
    let (q, v) = ("2 - x + x^3", "x^2 - 3");
    let params = CoherentParams::symbolic(rat(-1, 2));
    let a = bargmann_moments_series(&e(q), &e(v), &params, 6).unwrap();
    let b = bargmann_moments(
        &e(q).to_polynomial().unwrap(),
        &e(v).to_polynomial().unwrap(),
        &params,
        6,
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn central_identity_euler() {
    let r = central_identity_check(&p(&[0, 1]), &Polynomial::zero(), &rat(1, 1), 8).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.oracle_checked);
    assert_eq!(r.moments[3], p(&[0, 1, 3, 1]));
}

#[test]
fn central_identity_pure_shift() {
    let r = central_identity_check(&Polynomial::one(), &Polynomial::zero(), &rat(7, 3), 6).unwrap();
    assert!(r.passed);
    for (n, m) in r.moments.iter().enumerate() {
        assert_eq!(m, &Polynomial::monomial(rat(1, 1), n));
    }
}

#[test]
fn central_identity_quadratic() {
    let r = central_identity_check(&p(&[0, 0, 1]), &Polynomial::zero(), &rat(1, 1), 8).unwrap();
    assert!(r.passed && r.oracle_checked, "{r:?}");
}

#[test]
fn central_identity_without_oracle_over_budget() {
    let q = Polynomial::monomial(rat(1, 1), 40);
    let r = central_identity_check(&q, &Polynomial::zero(), &rat(1, 1), 7).unwrap();
    assert!(r.passed);
    assert!(!r.oracle_checked);
}

#[test]
fn normal_order_arrangements() {
    let form = normal_order_exp(&e("1"), &e("1/(2-x)"), &rat(1, 1), 6).unwrap();
    for k in 0..=6 {
        let expected = e(&format!("(2-x)^-{k}")).taylor(&rat(1, 1), 6).unwrap();
        assert_eq!(form.prefunction.coeffs()[k], expected, "λ^{k}");
    }
    assert!(form.shift.coeffs()[1].is_one());
    assert!(form.shift.coeffs()[2..].iter().all(|c| c.is_zero()));
    assert!(
        form.display.ends_with("* exp((L + O(L^7))*a):"),
        "{}",
        form.display
    );
    assert!(
        form.display.starts_with(":(1 + (1 + (ad-1) + (ad-1)^2"),
        "{}",
        form.display
    );
}

#[test]
fn normal_order_forest_shift() {
    let form = normal_order_exp(&e("x^2"), &e("0"), &rat(0, 1), 4).unwrap();
    assert!(form.shift.coeffs()[0].is_zero());
    for k in 1..=4 {
        let expected = Polynomial::monomial(rat(1, 1), k + 1).taylor_at("x", &rat(0, 1), 4);
        assert_eq!(form.shift.coeffs()[k], expected);
    }
    assert_eq!(
        form.display,
        ":exp((ad^2*L + ad^3*L^2 + ad^4*L^3 + O(L^5))*a):"
    );
}

#[test]
fn normal_order_zero_order_is_identity() {
    let form = normal_order_exp(&e("x^3 + 1"), &e("x"), &rat(2, 1), 0).unwrap();
    assert!(form.prefunction.coeffs()[0].is_one());
    assert!(form.shift.is_zero());
    assert_eq!(form.display, ":1:");
}

#[test]
fn normal_order_reproduces_table_rows() {
    let x0 = rat(1, 2);
    let (q, v) = (p(&[1, 0, 1]), p(&[0, -2, 1]));
    let form = normal_order_exp(&e(&q.to_string()), &e(&v.to_string()), &x0, 5).unwrap();
    let table = weyl_table(&q, &v, 5);
    let var = expansion_var("x", &x0);
    for n in 0..=5 {
        let ops = form.operator_coefficients(n);
        assert_eq!(ops[0], table.h(n).taylor_at(&var, &x0, 5), "h_{n}");
        for k in 1..=n {
            assert_eq!(ops[k], table.f(n, k).taylor_at(&var, &x0, 5), "f_{n},{k}");
        }
    }
}

#[test]
fn normal_ordered_form_json_round_trip() {
    let form = normal_order_exp(&e("x"), &e("x^2"), &rat(1, 1), 4).unwrap();
    let text = serde_json::to_string(&form).unwrap();
    let back: NormalOrderedForm = serde_json::from_str(&text).unwrap();
    assert_eq!(back, form);
}

#[test]
fn weyl_table_json_round_trip() {
    let t = weyl_table(&p(&[1, 1]), &p(&[0, 0, 2]), 3);
    let back: WeylTable = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
    assert_eq!(back, t);
}

fn small_poly() -> impl Strategy<Value = Polynomial> {
    proptest::collection::vec(-3i64..=3, 0..=4).prop_map(|c| Polynomial::from_ints(&c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn three_paths_agree(q in small_poly(), v in small_poly(), x0 in -2i64..=2) {
        let r = central_identity_check(&q, &v, &rat(x0, 1), 6).unwrap();
        prop_assert!(r.oracle_checked);
        prop_assert!(r.passed, "{:?}", r.first_mismatch);
    }

    #[test]
    fn vanishing_potential_has_no_vacuum_row(q in small_poly()) {
        let t = weyl_table(&q, &Polynomial::zero(), 6);
        for n in 1..=6 {
            prop_assert!(t.h(n).is_zero());
        }
    }
}
