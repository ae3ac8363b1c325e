//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 mathematical
//! precondition violated, 3 verification failure.

mod render;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::expr::{parse, Expr, ExprError};
use crate::flow::{
    group_law_check, solve_flow_bivariate, solve_flow_exprs, FlowError, FlowSolution,
    GroupLawReport, LAMBDA,
};
use crate::rational::Rational;
use crate::series::{Coeff, Series, DEFAULT_ORDER};
use crate::sheffer::{
    catalog, flow_params_from_sheffer, sheffer_from_flow, sheffer_polynomials, CatalogEntry,
    ShefferError, ShefferPair, ShefferPolynomial,
};
use crate::weyl::{normal_order_exp, weyl_table, WeylError};

pub use verify::{verify_all, VerifyOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(
    name = "normord",
    version,
    about = "Exact normal ordering of exp[λ(q(a†)a + v(a†))] and the Sheffer sequences it generates"
)]
struct Cli {
    /// Output format (default: csv for `sequence`, pretty for `verify`, json otherwise).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OrderArg {
    /// Truncation order in λ.
    #[arg(long, env = "NORMORD_ORDER", default_value_t = DEFAULT_ORDER)]
    order: usize,
}

#[derive(Debug, Args)]
struct FlowArgs {
    #[arg(long)]
    q: String,
    #[arg(long, default_value = "0")]
    v: String,
    #[arg(long, default_value = "0", value_parser = parse_rational, allow_hyphen_values = true)]
    x0: Rational,
    #[command(flatten)]
    order: OrderArg,
    /// Keep coefficients as series in x − x₀.
    #[arg(long)]
    bivariate: bool,
    /// Order in x − x₀ for `--bivariate` (default: the λ order).
    #[arg(long, requires = "bivariate")]
    xorder: Option<usize>,
    #[arg(long)]
    check_group_law: bool,
}

#[derive(Debug, Args)]
struct NormalOrderArgs {
    #[arg(long)]
    q: String,
    #[arg(long, default_value = "0")]
    v: String,
    #[arg(long, default_value = "0", value_parser = parse_rational, allow_hyphen_values = true)]
    x0: Rational,
    #[command(flatten)]
    order: OrderArg,
}

#[derive(Debug, Args)]
struct WeylArgs {
    #[arg(long)]
    q: String,
    #[arg(long, default_value = "0")]
    v: String,
    #[arg(long, default_value_t = 8)]
    nmax: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum ZArg {
    Symbolic,
    Value(Rational),
}

fn parse_z(s: &str) -> Result<ZArg, String> {
    if s == "symbolic" {
        Ok(ZArg::Symbolic)
    } else {
        parse_rational(s).map(ZArg::Value)
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["from_flow", "from_pair"])))]
struct ShefferArgs {
    #[arg(long)]
    from_flow: bool,
    #[arg(long)]
    from_pair: bool,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    v: Option<String>,
    #[arg(long = "A")]
    a: Option<String>,
    #[arg(long = "B")]
    b: Option<String>,
    #[arg(long, default_value = "1", value_parser = parse_rational, allow_hyphen_values = true)]
    zprime: Rational,
    #[arg(long, default_value_t = 8)]
    nmax: usize,
    /// A rational value or `symbolic`.
    #[arg(long, default_value = "symbolic", value_parser = parse_z, allow_hyphen_values = true)]
    z: ZArg,
}

#[derive(Debug, Args)]
struct SequenceArgs {
    #[arg(long)]
    catalog: String,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long, default_value_t = 8)]
    nmax: usize,
    /// Fail with exit code 3 unless every cross-check agrees.
    #[arg(long)]
    verify_oracle: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    order: OrderArg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the substitution flow T and prefunction g.
    Flow(FlowArgs),
    /// Normal-ordered form of exp[λ(q(a†)a + v(a†))].
    NormalOrder(NormalOrderArgs),
    /// Expansion coefficients h_n, f_{n,k} of (q D + v)^n.
    Weyl(WeylArgs),
    /// Sheffer pair and polynomials from a flow or from (A, B).
    Sheffer(ShefferArgs),
    /// A catalog sequence.
    Sequence(SequenceArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Math(String),
    Verification(String),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Math(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Math(m) => write!(f, "precondition violated: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Syntax { .. } | ExprError::MultipleVariables(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Expr(inner) => inner.into(),
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> Self {
        match e {
            WeylError::Expr(inner) => inner.into(),
            WeylError::Flow(inner) => inner.into(),
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<ShefferError> for CliError {
    fn from(e: ShefferError) -> Self {
        match e {
            ShefferError::Expr(inner) => inner.into(),
            ShefferError::Flow(inner) => inner.into(),
            ShefferError::Weyl(inner) => inner.into(),
            ShefferError::UnknownEntry(_) | ShefferError::Catalog(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

/// Runs the command line `args` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => match emit(&cli, &text, out) {
            Ok(()) => 0,
            Err(e) => report(err, &e),
        },
        Err((text, e)) => {
            if let Some(text) = text {
                if let Err(io) = emit(&cli, &text, out) {
                    return report(err, &io);
                }
            }
            report(err, &e)
        }
    }
}

fn report(err: &mut dyn Write, e: &CliError) -> i32 {
    let _ = writeln!(err, "error: {e}");
    e.exit_code()
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io),
        None => out.write_all(text.as_bytes()).map_err(CliError::Io),
    }
}

/// On failure, the optional text is output that should still be emitted.
type Outcome = Result<String, (Option<String>, CliError)>;

fn fail<E: Into<CliError>>(e: E) -> (Option<String>, CliError) {
    (None, e.into())
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn expr(text: &str) -> Result<Expr, CliError> {
    Ok(parse(text)?)
}

fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Flow(a) => run_flow(a, cli.format.unwrap_or(Format::Json)),
        Command::NormalOrder(a) => {
            run_normal_order(a, cli.format.unwrap_or(Format::Json)).map_err(|e| (None, e))
        }
        Command::Weyl(a) => run_weyl(a, cli.format.unwrap_or(Format::Json)).map_err(|e| (None, e)),
        Command::Sheffer(a) => {
            run_sheffer(a, cli.format.unwrap_or(Format::Json)).map_err(|e| (None, e))
        }
        Command::Sequence(a) => run_sequence(a, cli.format.unwrap_or(Format::Csv)),
        Command::Verify(a) => run_verify(a, cli.format.unwrap_or(Format::Pretty)),
    }
}

#[derive(Serialize)]
struct FlowWithLaw<'a, S: Serialize> {
    solution: &'a S,
    group_law: &'a GroupLawReport,
}

fn flow_text<C>(
    sol: &FlowSolution<C>,
    format: Format,
    law: Option<&GroupLawReport>,
) -> Result<String, CliError>
where
    C: Coeff + Serialize + std::fmt::Display,
{
    match (format, law) {
        (Format::Json, Some(l)) => json(&FlowWithLaw {
            solution: sol,
            group_law: l,
        }),
        (Format::Json, None) => json(sol),
        (Format::Csv, _) => Ok(render::flow_csv(&sol.t, &sol.g)),
        (Format::Pretty, _) => Ok(render::flow_pretty(&sol.t, &sol.g, law)),
    }
}

fn run_flow(a: &FlowArgs, format: Format) -> Outcome {
    let (q, v) = (expr(&a.q).map_err(fail)?, expr(&a.v).map_err(fail)?);
    let order = a.order.order;
    let law = if a.check_group_law {
        let xorder = a.xorder.unwrap_or(order);
        let bi = solve_flow_bivariate(&q, &v, &a.x0, order, xorder).map_err(fail)?;
        Some(group_law_check(&bi, order).map_err(fail)?)
    } else {
        None
    };
    let text = if a.bivariate {
        let xorder = a.xorder.unwrap_or(order);
        let sol = solve_flow_bivariate(&q, &v, &a.x0, order, xorder).map_err(fail)?;
        flow_text(&sol, format, law.as_ref())
    } else {
        let sol = solve_flow_exprs(&q, &v, &a.x0, order).map_err(fail)?;
        flow_text(&sol, format, law.as_ref())
    }
    .map_err(fail)?;
    match law {
        Some(l) if !l.passed() => Err((
            Some(text),
            CliError::Verification(format!("group law: first mismatch {:?}", l.first_mismatch)),
        )),
        _ => Ok(text),
    }
}

fn run_normal_order(a: &NormalOrderArgs, format: Format) -> Result<String, CliError> {
    let form = normal_order_exp(&expr(&a.q)?, &expr(&a.v)?, &a.x0, a.order.order)?;
    match format {
        Format::Json => json(&form),
        Format::Csv => Ok(render::flow_csv(&form.shift, &form.prefunction).replacen(
            "k,T,g",
            "k,shift,prefunction",
            1,
        )),
        Format::Pretty => Ok(form.display.clone() + "\n"),
    }
}

fn polynomial(text: &str) -> Result<crate::poly::Polynomial, CliError> {
    Ok(expr(text)?.to_polynomial()?)
}

fn run_weyl(a: &WeylArgs, format: Format) -> Result<String, CliError> {
    let table = weyl_table(&polynomial(&a.q)?, &polynomial(&a.v)?, a.nmax);
    match format {
        Format::Json => json(&table),
        Format::Csv => Ok(render::weyl_csv(&table)),
        Format::Pretty => Ok(render::weyl_pretty(&table)),
    }
}

#[derive(Serialize)]
struct ShefferOutput {
    pair: ShefferPair,
    #[serde(skip_serializing_if = "Option::is_none")]
    flow_params: Option<FlowParams>,
    polynomials: Vec<ShefferPolynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
}

#[derive(Serialize)]
struct FlowParams {
    q: Series,
    v: Series,
}

fn lambda_series(text: &str, order: usize) -> Result<Series, CliError> {
    Ok(expr(text)?
        .taylor(&Rational::zero(), order)?
        .with_var(LAMBDA))
}

fn run_sheffer(a: &ShefferArgs, format: Format) -> Result<String, CliError> {
    let (pair, flow_params) = if a.from_flow {
        let q =
            a.q.as_deref()
                .ok_or_else(|| CliError::Usage("--from-flow needs --q".into()))?;
        let v = a.v.as_deref().unwrap_or("0");
        let sol = solve_flow_exprs(&expr(q)?, &expr(v)?, &a.zprime, a.nmax)?;
        (sheffer_from_flow(&sol)?, None)
    } else {
        let (Some(ta), Some(tb)) = (&a.a, &a.b) else {
            return Err(CliError::Usage("--from-pair needs --A and --B".into()));
        };
        let long = ShefferPair::new(
            lambda_series(ta, a.nmax + 1)?,
            lambda_series(tb, a.nmax + 1)?,
            a.zprime.clone(),
        )?;
        let (q, v) = flow_params_from_sheffer(&long, a.nmax)?;
        let pair = ShefferPair::new(
            long.a.truncate(a.nmax),
            long.b.truncate(a.nmax),
            a.zprime.clone(),
        )?;
        (pair, Some(FlowParams { q, v }))
    };
    let polys = sheffer_polynomials(&pair, a.nmax)?;
    let values = match &a.z {
        ZArg::Symbolic => None,
        ZArg::Value(z) => Some(polys.iter().map(|s| s.poly.eval(z)).collect::<Vec<_>>()),
    };
    match format {
        Format::Json => json(&ShefferOutput {
            pair,
            flow_params,
            polynomials: polys,
            z: match &a.z {
                ZArg::Symbolic => None,
                ZArg::Value(z) => Some(z.to_string()),
            },
            values: values
                .as_ref()
                .map(|v| v.iter().map(ToString::to_string).collect()),
        }),
        Format::Csv => Ok(render::sheffer_csv(&polys, values.as_deref())),
        Format::Pretty => Ok(render::sheffer_pretty(&pair, &polys, values.as_deref())),
    }
}

fn run_sequence(a: &SequenceArgs, format: Format) -> Outcome {
    let entry = CatalogEntry::from_name(&a.catalog, a.r).map_err(fail)?;
    let result = catalog(entry, a.nmax).map_err(fail)?;
    let text = match format {
        Format::Json => json(&result).map_err(fail)?,
        Format::Csv => result.to_csv(),
        Format::Pretty => render::sequence_pretty(&result),
    };
    if a.verify_oracle && !result.verified() {
        let failed: Vec<&str> = result
            .cross_checks
            .iter()
            .filter(|c| !c.agrees)
            .map(|c| c.path.as_str())
            .collect();
        return Err((
            Some(text),
            CliError::Verification(format!("disagreeing paths: {}", failed.join(", "))),
        ));
    }
    Ok(text)
}

fn run_verify(a: &VerifyArgs, format: Format) -> Outcome {
    if !a.all {
        return Err(fail(CliError::Usage("verify needs --all".into())));
    }
    let outcomes = verify_all(a.order.order);
    let text = match format {
        Format::Json => json(&outcomes).map_err(fail)?,
        Format::Csv => render::verify_csv(&outcomes),
        Format::Pretty => render::verify_pretty(&outcomes),
    };
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err((
            Some(text),
            CliError::Verification(format!("{failed} of {} checks failed", outcomes.len())),
        ));
    }
    Ok(text)
}
