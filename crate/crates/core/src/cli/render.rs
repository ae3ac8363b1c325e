use std::fmt::{Display, Write};

use crate::flow::GroupLawReport;
use crate::rational::Rational;
use crate::series::{Coeff, Series};
use crate::sheffer::{SequenceResult, ShefferPair, ShefferPolynomial};
use crate::weyl::WeylTable;

use super::VerifyOutcome;

pub(super) fn flow_csv<C: Coeff + Display>(t: &Series<C>, g: &Series<C>) -> String {
    let mut out = String::from("k,T,g\n");
    for (k, (tk, gk)) in t.coeffs().iter().zip(g.coeffs()).enumerate() {
        writeln!(out, "{k},{tk},{gk}").unwrap();
    }
    out
}

pub(super) fn flow_pretty<C: Coeff + Display>(
    t: &Series<C>,
    g: &Series<C>,
    law: Option<&GroupLawReport>,
) -> String {
    let mut out = format!("T = {t}\ng = {g}\n");
    if let Some(l) = law {
        let verdict = |ok| if ok { "holds" } else { "FAILS" };
        writeln!(
            out,
            "group law through order {}: substitution {}, prefunction {} ({} coefficients)",
            l.order,
            verdict(l.substitution_holds),
            verdict(l.prefunction_holds),
            l.coefficients_checked
        )
        .unwrap();
    }
    out
}

pub(super) fn weyl_csv(table: &WeylTable) -> String {
    let mut out = String::from("n,k,coefficient\n");
    for (n, row) in table.rows.iter().enumerate() {
        writeln!(out, "{n},0,{}", row.h).unwrap();
        for (k, f) in row.f.iter().enumerate() {
            writeln!(out, "{n},{},{f}", k + 1).unwrap();
        }
    }
    out
}

pub(super) fn weyl_pretty(table: &WeylTable) -> String {
    let mut out = format!("W = ({})*D", table.q);
    if !table.v.is_zero() {
        write!(out, " + ({})", table.v).unwrap();
    }
    out.push('\n');
    for (n, row) in table.rows.iter().enumerate() {
        let mut terms = Vec::new();
        if !row.h.is_zero() {
            terms.push(row.h.to_string());
        }
        for (k, f) in row.f.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let d = if k == 0 {
                "D".to_string()
            } else {
                format!("D^{}", k + 1)
            };
            terms.push(if *f == crate::poly::Polynomial::one() {
                d
            } else {
                format!("({f})*{d}")
            });
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        writeln!(out, "W^{n} = {}", terms.join(" + ")).unwrap();
    }
    out
}

pub(super) fn sheffer_csv(polys: &[ShefferPolynomial], values: Option<&[Rational]>) -> String {
    match values {
        Some(v) => {
            let mut out = String::from("n,a(n)\n");
            for (n, a) in v.iter().enumerate() {
                writeln!(out, "{n},{a}").unwrap();
            }
            out
        }
        None => {
            let mut out = String::from("n,S_n(z)\n");
            for s in polys {
                writeln!(out, "{},{}", s.n, s.poly.display_in("z")).unwrap();
            }
            out
        }
    }
}

pub(super) fn sheffer_pretty(
    pair: &ShefferPair,
    polys: &[ShefferPolynomial],
    values: Option<&[Rational]>,
) -> String {
    let mut out = format!(
        "A = {}\nB = {}\nz'* = {}\n",
        pair.a, pair.b, pair.z_prime_star
    );
    for s in polys {
        write!(out, "S_{}(z) = {}", s.n, s.poly.display_in("z")).unwrap();
        if let Some(v) = values {
            write!(out, "  ->  {}", v[s.n]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub(super) fn sequence_pretty(r: &SequenceResult) -> String {
    let values: Vec<String> = r.values.iter().map(ToString::to_string).collect();
    let mut out = r.name.clone();
    for (k, v) in &r.parameters {
        write!(out, " {k}={v}").unwrap();
    }
    writeln!(out, ": {}", values.join(", ")).unwrap();
    for c in &r.cross_checks {
        let verdict = if c.agrees { "agrees" } else { "DISAGREES" };
        writeln!(out, "  {}: {verdict}", c.path).unwrap();
    }
    for a in &r.annotations {
        writeln!(out, "  note: {a}").unwrap();
    }
    out
}

pub(super) fn verify_pretty(outcomes: &[VerifyOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{verdict} {}: {}", o.name, o.detail).unwrap();
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    writeln!(out, "{passed}/{} checks passed", outcomes.len()).unwrap();
    out
}

pub(super) fn verify_csv(outcomes: &[VerifyOutcome]) -> String {
    let mut out = String::from("check,passed\n");
    for o in outcomes {
        writeln!(out, "{},{}", o.name, o.passed).unwrap();
    }
    out
}
