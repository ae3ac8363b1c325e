//! Named combinatorial sequences, loaded from `catalog/sequences.json`.
//!
//! Each entry documents both a flow `(q, v)` and a pair `(A, B)`. The
//! `source` side is run through the full pipeline; the other side, the
//! Bargmann oracle and the frozen golden values serve as cross-checks.
//! Published values are compared against the computed ones and every
//! difference becomes an annotation.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::expr::{parse, Expr};
use crate::flow::{solve_flow, solve_flow_exprs, LAMBDA};
use crate::rational::Rational;
use crate::weyl::{bargmann_moments, bargmann_moments_series, CoherentParams, ZParam};

use super::{
    flow_params_from_sheffer, sequence_values, sheffer_from_flow, Provenance, SequenceResult,
    ShefferError, ShefferPair,
};

const CATALOG_JSON: &str = include_str!("../../catalog/sequences.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Flow,
    Pair,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowSource {
    pub q: String,
    pub v: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSource {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
}

/// One catalog record. Expressions may contain `{r}` and `{r-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogSpec {
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub parameter: Option<String>,
    #[serde(default)]
    pub default_parameter: Option<u32>,
    pub source: Source,
    pub flow: FlowSource,
    pub pair: PairSource,
    pub z_prime_star: String,
    pub z: String,
    /// Values as published, keyed by parameter value (`""` if none).
    pub published: BTreeMap<String, Vec<String>>,
    /// Oracle-confirmed values, keyed like `published`.
    pub golden: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
struct CatalogFile {
    entries: Vec<CatalogSpec>,
}

pub fn catalog_entries() -> &'static [CatalogSpec] {
    static ENTRIES: OnceLock<Vec<CatalogSpec>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        serde_json::from_str::<CatalogFile>(CATALOG_JSON)
            .expect("shipped catalog is valid JSON")
            .entries
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogEntry {
    Forests { r: u32 },
    PartitionsOfPartitions,
    Arrangements,
    Bessel,
}

impl CatalogEntry {
    pub fn name(&self) -> &'static str {
        match self {
            CatalogEntry::Forests { .. } => "forests",
            CatalogEntry::PartitionsOfPartitions => "partitions_of_partitions",
            CatalogEntry::Arrangements => "arrangements",
            CatalogEntry::Bessel => "bessel",
        }
    }

    /// Parses a catalog name; `r` applies to `forests` only.
    pub fn from_name(name: &str, r: Option<u32>) -> Result<Self, ShefferError> {
        let entry = match name {
            "forests" => CatalogEntry::Forests { r: r.unwrap_or(2) },
            "partitions_of_partitions" => CatalogEntry::PartitionsOfPartitions,
            "arrangements" => CatalogEntry::Arrangements,
            "bessel" => CatalogEntry::Bessel,
            other => return Err(ShefferError::UnknownEntry(other.to_string())),
        };
        if r.is_some() && !matches!(entry, CatalogEntry::Forests { .. }) {
            return Err(ShefferError::Catalog(format!(
                "`{name}` takes no --r parameter"
            )));
        }
        if let CatalogEntry::Forests { r } = entry {
            if r < 2 {
                return Err(ShefferError::Catalog(format!(
                    "forests needs r ≥ 2, got {r}"
                )));
            }
        }
        Ok(entry)
    }

    pub fn all_defaults() -> Vec<CatalogEntry> {
        vec![
            CatalogEntry::Forests { r: 2 },
            CatalogEntry::Forests { r: 3 },
            CatalogEntry::PartitionsOfPartitions,
            CatalogEntry::Arrangements,
            CatalogEntry::Bessel,
        ]
    }

    fn key(&self) -> String {
        match self {
            CatalogEntry::Forests { r } => r.to_string(),
            _ => String::new(),
        }
    }

    pub fn spec(&self) -> &'static CatalogSpec {
        catalog_entries()
            .iter()
            .find(|s| s.name == self.name())
            .expect("every entry is in the shipped catalog")
    }

    fn fill(&self, template: &str) -> String {
        match self {
            CatalogEntry::Forests { r } => template
                .replace("{r-1}", &(r - 1).to_string())
                .replace("{r}", &r.to_string()),
            _ => template.to_string(),
        }
    }

    fn expr(&self, template: &str) -> Result<Expr, ShefferError> {
        Ok(parse(&self.fill(template))?)
    }

    pub fn published(&self) -> Option<Vec<Rational>> {
        self.spec()
            .published
            .get(&self.key())
            .map(|v| parse_values(v))
    }

    pub fn golden(&self) -> Option<Vec<Rational>> {
        self.spec().golden.get(&self.key()).map(|v| parse_values(v))
    }
}

fn parse_values(values: &[String]) -> Vec<Rational> {
    values
        .iter()
        .map(|s| s.parse().expect("catalog values are rationals"))
        .collect()
}

fn parse_rational(s: &str) -> Result<Rational, ShefferError> {
    s.parse()
        .map_err(|_| ShefferError::Catalog(format!("`{s}` is not a rational")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    pub path: String,
    pub agrees: bool,
}

fn pair_from_exprs(
    a: &Expr,
    b: &Expr,
    z_prime_star: &Rational,
    order: usize,
) -> Result<ShefferPair, ShefferError> {
    let zero = Rational::zero();
    ShefferPair::new(
        a.taylor(&zero, order)?.with_var(LAMBDA),
        b.taylor(&zero, order)?.with_var(LAMBDA),
        z_prime_star.clone(),
    )
}

/// Differences between `published` and `computed`, as text.
///
/// A published list that equals the computed one with a single term dropped
/// is reported as one omission rather than a cascade of mismatches.
pub(crate) fn annotate(published: &[Rational], computed: &[Rational]) -> Vec<String> {
    let n = published.len().min(computed.len());
    if published[..n] == computed[..n] {
        return Vec::new();
    }
    if computed.len() > published.len() {
        for k in 0..=published.len() {
            let mut dropped = computed[..=published.len()].to_vec();
            dropped.remove(k);
            if dropped == published {
                return vec![format!("published list omits a({k}) = {}", computed[k])];
            }
        }
    }
    (0..n)
        .filter(|&k| published[k] != computed[k])
        .map(|k| {
            format!(
                "published a({k}) = {}, computed {}",
                published[k], computed[k]
            )
        })
        .collect()
}

/// Runs the full pipeline for `entry` through `a(n_max)`.
pub fn catalog(entry: CatalogEntry, n_max: usize) -> Result<SequenceResult, ShefferError> {
    let spec = entry.spec();
    let zp = parse_rational(&spec.z_prime_star)?;
    let z = parse_rational(&spec.z)?;
    let (q, v) = (entry.expr(&spec.flow.q)?, entry.expr(&spec.flow.v)?);
    let (a, b) = (entry.expr(&spec.pair.a)?, entry.expr(&spec.pair.b)?);
    let mut checks = Vec::new();

    let documented_pair = pair_from_exprs(&a, &b, &zp, n_max + 1)?;
    let pair = match spec.source {
        Source::Flow => sheffer_from_flow(&solve_flow_exprs(&q, &v, &zp, n_max)?)?,
        Source::Pair => {
            let (qs, vs) = flow_params_from_sheffer(&documented_pair, n_max)?;
            let agrees = qs == q.taylor(&zp, n_max)?.with_var(qs.var())
                && vs == v.taylor(&zp, n_max)?.with_var(vs.var());
            checks.push(CrossCheck {
                path: "documented flow".into(),
                agrees,
            });
            sheffer_from_flow(&solve_flow(&qs, &vs, &zp, n_max)?)?
        }
    };
    let mut result = sequence_values(&pair, &z, n_max)?;

    let other = match spec.source {
        Source::Flow => (
            "pair egf",
            sequence_values(&documented_pair, &z, n_max)?.values,
        ),
        Source::Pair => {
            let sol = solve_flow_exprs(&q, &v, &zp, n_max)?;
            (
                "documented flow egf",
                sequence_values(&sheffer_from_flow(&sol)?, &z, n_max)?.values,
            )
        }
    };
    checks.push(CrossCheck {
        path: other.0.into(),
        agrees: other.1 == result.values,
    });

    let params = CoherentParams {
        z_prime_star: zp.clone(),
        z: ZParam::Value(z.clone()),
    };
    let (oracle_path, moments) = match (q.to_polynomial(), v.to_polynomial()) {
        (Ok(qp), Ok(vp)) => (
            "bargmann oracle",
            bargmann_moments(&qp, &vp, &params, n_max)?,
        ),
        _ => (
            "bargmann oracle (series mode)",
            bargmann_moments_series(&q, &v, &params, n_max)?,
        ),
    };
    let oracle: Vec<Rational> = moments
        .iter()
        .map(|m| m.clone().into_polynomial().coeff(0))
        .collect();
    checks.push(CrossCheck {
        path: oracle_path.into(),
        agrees: oracle == result.values,
    });

    if let Some(golden) = entry.golden() {
        let n = golden.len().min(result.values.len());
        checks.push(CrossCheck {
            path: "golden values".into(),
            agrees: golden[..n] == result.values[..n],
        });
    }

    if let Some(published) = entry.published() {
        result.annotations = annotate(&published, &result.values);
    }
    result.name = spec.name.clone();
    if let Some(p) = &spec.parameter {
        result.parameters.insert(p.clone(), entry.key());
    }
    result.provenance = Provenance {
        q: Some(q.to_string()),
        v: Some(v.to_string()),
        a: Some(a.to_string()),
        b: Some(b.to_string()),
        z_prime_star: zp,
        z,
    };
    result.cross_checks = checks;
    Ok(result)
}
