use proptest::prelude::*;

use super::catalog::annotate;
use super::*;
use crate::expr::{parse, Expr};
use crate::flow::{solve_flow, solve_flow_exprs};
use crate::rational::rat;

fn e(text: &str) -> Expr {
    parse(text).unwrap()
}

fn lam(text: &str, order: usize) -> Series {
    e(text)
        .taylor(&Rational::zero(), order)
        .unwrap()
        .with_var(LAMBDA)
}

fn pair(a: &str, b: &str, order: usize) -> ShefferPair {
    ShefferPair::new(lam(a, order), lam(b, order), rat(1, 1)).unwrap()
}

fn ints(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| rat(v, 1)).collect()
}

#[test]
fn euler_flow_gives_exponential_polynomials() {
    let sol = solve_flow_exprs(&e("x"), &e("0"), &rat(1, 1), 8).unwrap();
    let p = sheffer_from_flow(&sol).unwrap();
    assert_eq!(p.a, Series::one(LAMBDA, 8));
    assert_eq!(p.b, lam("exp(L) - 1", 8));
    let s = sheffer_polynomials(&p, 2).unwrap();
    assert_eq!(s[2].poly, Polynomial::from_ints(&[0, 1, 1]));
}

#[test]
fn arrangements_flow_gives_geometric_pair() {
    let sol = solve_flow_exprs(&e("1"), &e("1/(2-x)"), &rat(1, 1), 8).unwrap();
    let p = sheffer_from_flow(&sol).unwrap();
    assert_eq!(p.a, lam("1/(1-L)", 8));
    assert_eq!(p.b, lam("L", 8));
    let s = sheffer_polynomials(&p, 2).unwrap();
    assert_eq!(s[2].poly, Polynomial::from_ints(&[2, 2, 1]));
}

#[test]
fn pure_shift_pair() {
    let sol = solve_flow_exprs(&e("1"), &e("0"), &rat(5, 1), 4).unwrap();
    let p = sheffer_from_flow(&sol).unwrap();
    assert_eq!(p.a, Series::one(LAMBDA, 4));
    assert_eq!(p.b, Series::variable(LAMBDA, 4));
    assert_eq!(p.z_prime_star, rat(5, 1));
}

#[test]
fn degenerate_b_is_an_error() {
    let sol = solve_flow_exprs(&e("x"), &e("1"), &rat(0, 1), 4).unwrap();
    assert_eq!(sheffer_from_flow(&sol), Err(ShefferError::DegenerateB));
}

#[test]
fn normalization_is_enforced() {
    let one = Series::one(LAMBDA, 3);
    let l = Series::variable(LAMBDA, 3);
    assert!(matches!(
        ShefferPair::new(one.scale(&rat(2, 1)), l.clone(), rat(1, 1)),
        Err(ShefferError::ANotNormalized(_))
    ));
    assert!(matches!(
        ShefferPair::new(one.clone(), &l + &one, rat(1, 1)),
        Err(ShefferError::BNotNormalized(_))
    ));
    assert_eq!(
        ShefferPair::new(one, l.powi(2), rat(1, 1)),
        Err(ShefferError::DegenerateB)
    );
}

#[test]
fn reverse_map_arrangements() {
    let (q, v) = flow_params_from_sheffer(&pair("1/(1-L)", "L", 9), 8).unwrap();
    assert_eq!(q, Series::one("x-1", 8));
    assert_eq!(v, e("1/(2-x)").taylor(&rat(1, 1), 8).unwrap());
}

#[test]
fn reverse_map_bessel() {
    let (q, v) = flow_params_from_sheffer(&pair("1", "1 - sqrt(1 - 2*L)", 9), 8).unwrap();
    assert_eq!(q, e("1/(2-x)").taylor(&rat(1, 1), 8).unwrap());
    assert!(v.is_zero());
}

#[test]
fn reverse_map_pure_shift() {
    let (q, v) = flow_params_from_sheffer(&pair("1", "L", 5), 4).unwrap();
    assert_eq!(q, Series::one("x-1", 4));
    assert_eq!(v, Series::zero("x-1", 4));
}

#[test]
fn reverse_map_needs_one_extra_order() {
    assert_eq!(
        flow_params_from_sheffer(&pair("1", "L", 5), 5),
        Err(ShefferError::InsufficientOrder { have: 5, need: 6 })
    );
    assert!(sheffer_polynomials(&pair("1", "L", 5), 6).is_err());
}

#[test]
fn polynomial_normalization_and_degree() {
    let p = pair("1/(1-L) + L^3", "2*L + L^2", 8);
    let s = sheffer_polynomials(&p, 8).unwrap();
    assert_eq!(s[0].poly, Polynomial::one());
    for sn in &s {
        assert_eq!(sn.poly.degree(), Some(sn.n));
        let a_n = &p.a.coeffs()[sn.n] * &Rational::factorial(sn.n);
        assert_eq!(sn.poly.coeff(0), a_n);
    }
}

#[test]
fn egf_consistency_at_sample_points() {
    let p = pair("1/(1-L) + L^3", "exp(L) - 1 + L^2", 9);
    let s = sheffer_polynomials(&p, 9).unwrap();
    for z in [rat(0, 1), rat(1, 1), rat(-2, 3), rat(5, 2)] {
        let egf = &p.a * &p.b.scale(&z).exp().unwrap();
        for sn in &s {
            assert_eq!(
                &sn.poly.eval(&z) / &Rational::factorial(sn.n),
                egf.coeffs()[sn.n],
                "n = {}, z = {z}",
                sn.n
            );
        }
    }
}

#[test]
fn sequence_values_and_integrality() {
    let r = sequence_values(&pair("1/(1-L)", "L", 8), &rat(1, 1), 8).unwrap();
    assert_eq!(r.values, ints(&[1, 2, 5, 16, 65, 326, 1957, 13700, 109601]));
    assert!(r.integral);
    let half = sequence_values(&pair("1", "L", 3), &rat(1, 2), 3).unwrap();
    assert_eq!(
        half.values,
        vec![rat(1, 1), rat(1, 2), rat(1, 4), rat(1, 8)]
    );
    assert!(!half.integral);
}

#[test]
fn sequence_result_serialization() {
    let mut r = sequence_values(&pair("1", "L", 2), &rat(3, 2), 2).unwrap();
    r.name = "powers".into();
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["values"], serde_json::json!(["1", "3/2", "9/4"]));
    assert_eq!(json["provenance"]["z"], "3/2");
    assert_eq!(json["integral"], false);
    assert_eq!(r.to_csv(), "n,a(n)\n0,1\n1,3/2\n2,9/4\n");
}

#[test]
fn binomial_type_for_delta_pairs() {
    let ex1 = pair("1", "exp(L) - 1", 8);
    assert!(binomial_type_check(&ex1, 8).unwrap().passed);
    let ex2 = pair("1", "1/(1-L) - 1", 8);
    assert!(binomial_type_check(&ex2, 8).unwrap().passed);
    let with_a = binomial_type_check(&pair("1/(1-L)", "L", 8), 8).unwrap();
    assert!(!with_a.passed);
    assert_eq!(with_a.first_failure, Some(1));
}

#[test]
fn annotations_name_omissions_and_typos() {
    let computed = ints(&[1, 2, 5, 16, 65, 326, 1957, 13700]);
    assert_eq!(
        annotate(&ints(&[1, 2, 5, 65, 326, 1957]), &computed),
        vec!["published list omits a(3) = 16".to_string()]
    );
    assert_eq!(
        annotate(
            &ints(&[1, 1, 3, 13, 73, 501, 451]),
            &ints(&[1, 1, 3, 13, 73, 501, 4051, 1])
        ),
        vec!["published a(6) = 451, computed 4051".to_string()]
    );
    assert!(annotate(&ints(&[1, 2, 5]), &computed).is_empty());
}

#[test]
fn catalog_matches_golden_values() {
    let entries = [
        CatalogEntry::Forests { r: 2 },
        CatalogEntry::Forests { r: 3 },
        CatalogEntry::Forests { r: 4 },
        CatalogEntry::PartitionsOfPartitions,
        CatalogEntry::Arrangements,
        CatalogEntry::Bessel,
    ];
    for entry in entries {
        let r = catalog(entry, 8).unwrap();
        assert_eq!(Some(r.values.clone()), entry.golden(), "{}", r.name);
        assert!(r.verified(), "{}: {:?}", r.name, r.cross_checks);
        assert!(r.integral);
        assert!(r.cross_checks.len() >= 3);
    }
}

#[test]
fn catalog_annotations() {
    let text = |entry| catalog(entry, 8).unwrap().annotations;
    assert_eq!(
        text(CatalogEntry::Forests { r: 2 }),
        vec!["published a(6) = 451, computed 4051"]
    );
    assert!(text(CatalogEntry::Forests { r: 3 }).is_empty());
    assert_eq!(
        text(CatalogEntry::PartitionsOfPartitions),
        vec!["published a(5) = 385, computed 358"]
    );
    assert_eq!(
        text(CatalogEntry::Arrangements),
        vec!["published list omits a(3) = 16"]
    );
    assert_eq!(
        text(CatalogEntry::Bessel),
        vec!["published list omits a(2) = 2"]
    );
}

#[test]
fn catalog_names() {
    assert_eq!(
        CatalogEntry::from_name("forests", Some(3)).unwrap(),
        CatalogEntry::Forests { r: 3 }
    );
    assert_eq!(
        CatalogEntry::from_name("forests", None).unwrap(),
        CatalogEntry::Forests { r: 2 }
    );
    assert!(CatalogEntry::from_name("forests", Some(1)).is_err());
    assert!(CatalogEntry::from_name("bessel", Some(3)).is_err());
    assert_eq!(
        CatalogEntry::from_name("trees", None),
        Err(ShefferError::UnknownEntry("trees".into()))
    );
    assert_eq!(catalog_entries().len(), 4);
}

fn admissible_pair() -> impl Strategy<Value = ShefferPair> {
    let coeffs = proptest::collection::vec(-3i64..=3, 10);
    (coeffs.clone(), coeffs, 1i64..=3, prop::bool::ANY, -2i64..=2).prop_map(
        |(a, b, b1, neg, zp)| {
            let mut ac = vec![rat(1, 1)];
            ac.extend(a.iter().map(|&c| rat(c, 2)));
            let mut bc = vec![rat(0, 1), rat(if neg { -b1 } else { b1 }, 1)];
            bc.extend(b[..9].iter().map(|&c| rat(c, 3)));
            ShefferPair::new(Series::new(LAMBDA, ac), Series::new(LAMBDA, bc), rat(zp, 1)).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pair_round_trip(p in admissible_pair()) {
        let (q, v) = flow_params_from_sheffer(&p, 9).unwrap();
        let sol = solve_flow(&q, &v, &p.z_prime_star, 10).unwrap();
        prop_assert_eq!(sheffer_from_flow(&sol).unwrap(), p);
    }

    #[test]
    fn flow_round_trip(
        q in proptest::collection::vec(-3i64..=3, 0..=4),
        v in proptest::collection::vec(-3i64..=3, 0..=4),
        q0 in prop_oneof![-3i64..=-1, 1i64..=3],
        zp in -2i64..=2,
    ) {
        let zp = rat(zp, 1);
        let var = crate::expr::expansion_var("x", &zp);
        // Force q(z′*) = q0 ≠ 0.
        let mut qc = vec![q0];
        qc.extend(&q);
        let qs = Polynomial::from_ints(&qc).taylor_at(&var, &Rational::zero(), 10);
        let vs = Polynomial::from_ints(&v).taylor_at(&var, &Rational::zero(), 10);
        let sol = solve_flow(&qs, &vs, &zp, 11).unwrap();
        let (q2, v2) = flow_params_from_sheffer(&sheffer_from_flow(&sol).unwrap(), 10).unwrap();
        prop_assert_eq!(q2, qs);
        prop_assert_eq!(v2, vs);
    }

    #[test]
    fn binomial_type_for_random_delta_pairs(p in admissible_pair()) {
        let p = ShefferPair::new(Series::one(LAMBDA, 6), p.b.truncate(6), p.z_prime_star).unwrap();
        prop_assert!(binomial_type_check(&p, 6).unwrap().passed);
    }
}
