//! The `verify --all` invariant suite. Random inputs come from a fixed seed,
//! so every run checks the same cases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::expr::{expansion_var, parse, Expr};
use crate::flow::{
    closed_form_catalog, closed_form_catalog_bivariate, group_law_check, solve_flow,
    solve_flow_bivariate, solve_flow_exprs, FlowExample, LAMBDA,
};
use crate::poly::Polynomial;
use crate::rational::Rational;
use crate::series::Series;
use crate::sheffer::{
    binomial_type_check, catalog, flow_params_from_sheffer, sheffer_from_flow, CatalogEntry,
    ShefferPair,
};
use crate::weyl::{central_identity_check, weyl_table};

const SEED: u64 = 0x6e6f726d6f7264;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Check = Result<String, String>;

fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> Polynomial {
    let degree = rng.gen_range(0..=max_degree);
    let coeffs: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-3..=3)).collect();
    Polynomial::from_ints(&coeffs)
}

fn poly_expr(p: &Polynomial) -> Expr {
    parse(&p.to_string()).expect("polynomial display parses")
}

fn catalog_examples() -> Vec<FlowExample> {
    vec![
        FlowExample::Ex1,
        FlowExample::Ex2 { r: 2 },
        FlowExample::Ex2 { r: 3 },
        FlowExample::Ex3 {
            v: parse("1/(2-x)").unwrap(),
        },
        FlowExample::Ex4,
        FlowExample::Ex5 { r: 2, s: 2 },
        FlowExample::Ex5 { r: 3, s: 1 },
    ]
}

fn check_residuals(rng: &mut ChaCha8Rng, order: usize) -> Check {
    for i in 0..10 {
        let (q, v) = (random_poly(rng, 3), random_poly(rng, 3));
        let x0 = Rational::from(rng.gen_range(-2..=2));
        let var = expansion_var("x", &x0);
        let sol = solve_flow(
            &q.taylor_at(&var, &x0, order),
            &v.taylor_at(&var, &x0, order),
            &x0,
            order,
        )
        .map_err(|e| e.to_string())?;
        let (rt, rg) = sol.residuals();
        if !rt.is_zero() || !rg.is_zero() {
            return Err(format!("case {i}: q = {q}, v = {v} leaves a residual"));
        }
        let free = solve_flow(
            &q.taylor_at(&var, &x0, order),
            &Series::zero(&var, order),
            &x0,
            order,
        )
        .map_err(|e| e.to_string())?;
        if free.g != Series::one(LAMBDA, order) {
            return Err(format!("case {i}: v = 0 but g ≠ 1"));
        }
    }
    Ok("10 random flows".into())
}

fn check_pointwise(rng: &mut ChaCha8Rng, order: usize) -> Check {
    for i in 0..5 {
        let (q, v) = (random_poly(rng, 3), random_poly(rng, 3));
        let x0 = Rational::from(rng.gen_range(-2..=2));
        let (qe, ve) = (poly_expr(&q), poly_expr(&v));
        let bi =
            solve_flow_bivariate(&qe, &ve, &x0, order, order.min(4)).map_err(|e| e.to_string())?;
        let pt = solve_flow_exprs(&qe, &ve, &x0, order).map_err(|e| e.to_string())?;
        let at = bi.at_point();
        if at.t != pt.t || at.g != pt.g {
            return Err(format!("case {i}: q = {q}, v = {v}"));
        }
    }
    Ok("5 random flows".into())
}

fn check_group_law(rng: &mut ChaCha8Rng, order: usize) -> Check {
    let one = Rational::one();
    let mut count = 0;
    for ex in catalog_examples() {
        let sol =
            closed_form_catalog_bivariate(&ex, &one, order, order).map_err(|e| e.to_string())?;
        let report = group_law_check(&sol, order).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(format!("{}: {:?}", ex.name(), report.first_mismatch));
        }
        count += 1;
    }
    for _ in 0..10 {
        let (q, v) = (random_poly(rng, 3), random_poly(rng, 3));
        let sol = solve_flow_bivariate(&poly_expr(&q), &poly_expr(&v), &one, order, order)
            .map_err(|e| e.to_string())?;
        let report = group_law_check(&sol, order).map_err(|e| e.to_string())?;
        if !report.passed() {
            return Err(format!("q = {q}, v = {v}: {:?}", report.first_mismatch));
        }
        count += 1;
    }
    Ok(format!("{count} flows through i + j ≤ {order}"))
}

fn check_closed_forms(order: usize) -> Check {
    for ex in catalog_examples() {
        for x0 in [Rational::one(), Rational::new(-1, 2)] {
            let closed = closed_form_catalog(&ex, &x0, order).map_err(|e| e.to_string())?;
            let solved = solve_flow_exprs(&ex.q_expr(), &ex.v_expr(), &x0, order)
                .map_err(|e| e.to_string())?;
            if closed.t != solved.t || closed.g != solved.g {
                return Err(format!("{} at x0 = {x0}", ex.name()));
            }
        }
    }
    Ok(format!("{} closed forms", catalog_examples().len()))
}

fn check_central_identity(rng: &mut ChaCha8Rng, order: usize) -> Check {
    let n_max = order.min(8);
    for i in 0..20 {
        let (q, v) = (random_poly(rng, 3), random_poly(rng, 3));
        let x0 = Rational::from(rng.gen_range(-2..=2));
        let r = central_identity_check(&q, &v, &x0, n_max).map_err(|e| e.to_string())?;
        if !r.passed || !r.oracle_checked {
            return Err(format!(
                "case {i}: q = {q}, v = {v}: {:?}",
                r.first_mismatch
            ));
        }
    }
    Ok(format!("20 random pairs, three paths, n ≤ {n_max}"))
}

fn check_stirling() -> Check {
    let table = weyl_table(&Polynomial::x(), &Polynomial::zero(), 8);
    let mut s = vec![vec![0i64; 9]; 9];
    s[0][0] = 1;
    for n in 1..=8 {
        for k in 1..=n {
            s[n][k] = k as i64 * s[n - 1][k] + s[n - 1][k - 1];
        }
    }
    for (n, row) in s.iter().enumerate().skip(1) {
        for (k, &count) in row.iter().enumerate().take(n + 1).skip(1) {
            if table.f(n, k) != Polynomial::monomial(Rational::from(count), k) {
                return Err(format!("f_{{{n},{k}}} ≠ S({n},{k}) x^{k}"));
            }
        }
    }
    Ok("S(n,k) x^k for n ≤ 8".into())
}

fn random_pair(rng: &mut ChaCha8Rng, order: usize) -> ShefferPair {
    let mut a = vec![Rational::one()];
    a.extend((0..order).map(|_| Rational::new(rng.gen_range(-3..=3), 2)));
    let b1 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let mut b = vec![Rational::zero(), Rational::from(b1)];
    b.extend((1..order).map(|_| Rational::new(rng.gen_range(-3..=3), 3)));
    let zp = Rational::from(rng.gen_range(-2..=2));
    ShefferPair::new(Series::new(LAMBDA, a), Series::new(LAMBDA, b), zp).expect("admissible")
}

fn check_round_trips(rng: &mut ChaCha8Rng, order: usize) -> Check {
    for i in 0..10 {
        let pair = random_pair(rng, order);
        let (q, v) = flow_params_from_sheffer(&pair, order - 1).map_err(|e| e.to_string())?;
        let sol = solve_flow(&q, &v, &pair.z_prime_star, order).map_err(|e| e.to_string())?;
        let back = sheffer_from_flow(&sol).map_err(|e| e.to_string())?;
        if back != pair {
            return Err(format!("pair {i}: (A, B) → (q, v) → (A, B) differs"));
        }
        let q0 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut qc = vec![q0];
        qc.extend((0..3).map(|_| rng.gen_range(-3..=3)));
        let qp = Polynomial::from_ints(&qc);
        let vp = random_poly(rng, 3);
        let zp = &pair.z_prime_star;
        let var = expansion_var("x", zp);
        // Coefficients are taken as powers of x − z′*, so q(z′*) = q0 ≠ 0.
        let qs = qp.taylor_at(&var, &Rational::zero(), order);
        let vs = vp.taylor_at(&var, &Rational::zero(), order);
        let sol = solve_flow(&qs, &vs, zp, order + 1).map_err(|e| e.to_string())?;
        let pair2 = sheffer_from_flow(&sol).map_err(|e| e.to_string())?;
        let (q2, v2) = flow_params_from_sheffer(&pair2, order).map_err(|e| e.to_string())?;
        if q2 != qs || v2 != vs {
            return Err(format!("flow {i}: (q, v) → (A, B) → (q, v) differs"));
        }
    }
    Ok(format!("10 random pairs at order {order}"))
}

fn check_binomial_type(order: usize) -> Check {
    let n_max = order.min(8);
    for ex in [FlowExample::Ex1, FlowExample::Ex2 { r: 2 }] {
        let sol = solve_flow_exprs(&ex.q_expr(), &ex.v_expr(), &Rational::one(), n_max)
            .map_err(|e| e.to_string())?;
        let pair = sheffer_from_flow(&sol).map_err(|e| e.to_string())?;
        let report = binomial_type_check(&pair, n_max).map_err(|e| e.to_string())?;
        if !report.passed {
            return Err(format!(
                "{} fails at n = {:?}",
                ex.name(),
                report.first_failure
            ));
        }
    }
    Ok(format!("ex1, ex2 for n ≤ {n_max}"))
}

fn check_catalog() -> Check {
    let mut notes = Vec::new();
    for entry in CatalogEntry::all_defaults() {
        let r = catalog(entry, 8).map_err(|e| e.to_string())?;
        if let Some(bad) = r.cross_checks.iter().find(|c| !c.agrees) {
            return Err(format!("{}: {} disagrees", r.name, bad.path));
        }
        notes.extend(r.annotations.iter().map(|a| format!("{}: {a}", r.name)));
    }
    if notes.is_empty() {
        Ok("all paths agree".into())
    } else {
        Ok(format!("all paths agree; {}", notes.join("; ")))
    }
}

/// Runs every check at truncation order `order` (at least 2).
pub fn verify_all(order: usize) -> Vec<VerifyOutcome> {
    let order = order.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut results: Vec<(&str, Check)> = Vec::new();
    results.push(("flow residuals", check_residuals(&mut rng, order)));
    results.push(("pointwise vs bivariate", check_pointwise(&mut rng, order)));
    results.push(("group law", check_group_law(&mut rng, order)));
    results.push(("closed forms", check_closed_forms(order)));
    results.push(("central identity", check_central_identity(&mut rng, order)));
    results.push(("stirling regression", check_stirling()));
    results.push(("sheffer round trips", check_round_trips(&mut rng, order)));
    results.push(("binomial type", check_binomial_type(order)));
    results.push(("catalog", check_catalog()));
    results
        .into_iter()
        .map(|(name, r)| {
            let (passed, detail) = match r {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            VerifyOutcome {
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect()
}
