//! Command-line front end: builds certificate envelopes, verifies them,
//! and prints censuses, the trigonometric family, torsion probes, and
//! count profiles.
//!
//! Exit codes: 0 success, 1 verification failure, 2 precondition failure
//! (with a machine-readable error object on stdout), 3 I/O or parse
//! failure, 4 census resource-guard refusal.

mod envelope;
mod literals;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use trcert_core::{
    build_sum32, build_unit_pair, build_x_witness, census_with, kronecker_entry,
    probe_mu_trivial, search_four_squares, BuildError, CensusError, CensusParams, Exec,
    JrProfile, Rat, SearchError, DEFAULT_CELL_BUDGET,
};

use envelope::{encode, AnyCert, Envelope, Verification};
use literals::{parse_element, parse_rat, parse_tower, TowerContext};

const LITERALS_HELP: &str = "\
TOWERS are written as Q, Q(sqrt2), Q(sqrt2,sqrt3), Q(i), Q(zetaN), or as
the raw JSON object {\"base\": [...], \"steps\": [...]}. The radical sign
(\u{221a}2) is accepted for sqrt2.

ELEMENTS are written either in the nested-array JSON coordinate format or
in a small expression grammar: integer literals, the tower's generators
(sqrt2, sqrt5, i, zeta15, ...; sqrtN resolves to any square root the
tower contains), parentheses, and the operators + - * /. Examples:
'3 + 2*sqrt2', '(1 + sqrt5)/2', '-1'.

THRESHOLDS (t) are exact rationals written a/b or a, e.g. 39/10 or 4.

EXIT CODES: 0 success; 1 verification failure; 2 precondition failure,
with a machine-readable error object on stdout; 3 I/O or parse failure;
4 census resource-guard refusal (set TRCERT_CELL_BUDGET to raise the
cell budget).";

#[derive(Parser)]
#[command(
    name = "trcert",
    version,
    about = "Exact certificates for units, interior points, and censuses of totally positive algebraic integers",
    after_long_help = LITERALS_HELP
)]
struct Cli {
    /// Seed for randomized sampling. Reserved for reproducibility: every
    /// current subcommand is fully deterministic and ignores it.
    #[arg(long, global = true, default_value_t = 0x5EED)]
    seed: u64,
    /// Omit the provenance timestamp so repeated runs are byte-identical.
    #[arg(long, global = true)]
    reproducible: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a certificate and write its envelope as JSON.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Re-check a certificate envelope clause by clause.
    Verify {
        /// Envelope file to verify.
        path: PathBuf,
        /// Rewrite the envelope with the verification outcome.
        #[arg(long)]
        update: bool,
    },
    /// Enumerate algebraic integers with all conjugates in (0, t).
    Census {
        /// Largest degree to sweep.
        #[arg(long)]
        degree: u32,
        /// Open-interval threshold, as a/b.
        #[arg(long)]
        t: String,
        #[command(flatten)]
        out: TableOut,
    },
    /// Minimal polynomials of zeta_n + 1/zeta_n + 2 over a range of n.
    Kronecker {
        /// Range of orders, inclusive: A..B, or a single N. Orders start at 3.
        #[arg(long)]
        n: String,
        #[command(flatten)]
        out: TableOut,
    },
    /// Probe which roots of unity lie in the order Z + m O_L.
    ProbeMu {
        /// Cyclotomic tower: Q(i) or Q(zetaN).
        #[arg(long)]
        tower: String,
        /// Modulus of the order Z + m O_L.
        #[arg(long)]
        m: u64,
        /// Comma-separated root-of-unity orders to report on.
        #[arg(long)]
        orders: String,
        #[command(flatten)]
        out: TableOut,
    },
    /// Census element counts across a list of thresholds, as CSV.
    Profile {
        /// Largest degree to sweep.
        #[arg(long)]
        degree: u32,
        /// Comma-separated thresholds, each a/b.
        #[arg(long = "t-list")]
        t_list: String,
        #[command(flatten)]
        out: TableOut,
    },
}

#[derive(Args)]
struct TableOut {
    /// Emit machine-readable JSON instead of the human table.
    #[arg(long)]
    json: bool,
    /// Write to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructCommon {
    /// Ambient tower the parameter lives in.
    #[arg(long, default_value = "Q")]
    tower: String,
    /// Write the envelope to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ConstructKind {
    /// Unit u with u + 1/u = 2(2d + 1), from a parameter d.
    UnitPair {
        #[command(flatten)]
        common: ConstructCommon,
        /// Parameter d: a totally real algebraic integer with d^2 + d
        /// totally nonnegative.
        #[arg(long, allow_hyphen_values = true)]
        d: String,
    },
    /// Units u, v with 32 d = u^2 + u^-2 - v^2 - v^-2.
    Sum32 {
        #[command(flatten)]
        common: ConstructCommon,
        /// Parameter d: a totally real algebraic integer avoiding (-2, 0).
        #[arg(long, allow_hyphen_values = true)]
        d: String,
    },
    /// Interior-point witness pinning alpha through (alpha +- 1)^2.
    XWitness {
        #[command(flatten)]
        common: ConstructCommon,
        /// The totally real algebraic integer to witness.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Four-square decomposition placing x inside (0, a/b).
    FourSquares {
        #[command(flatten)]
        common: ConstructCommon,
        /// The algebraic integer to place.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Interval bound a/b.
        #[arg(long, default_value = "4/1")]
        t: String,
        /// Height bound on the witness coordinates.
        #[arg(long, default_value_t = 8)]
        height: u32,
    },
}

const EXIT_VERIFY_FAIL: i32 = 1;
const EXIT_PRECONDITION: i32 = 2;
const EXIT_IO: i32 = 3;
const EXIT_BUDGET: i32 = 4;

/// A failed command: the exit code plus the machine-readable error object.
struct Failure {
    code: i32,
    error: Value,
}

fn failure(code: i32, error_code: &str, message: impl Into<String>) -> Failure {
    Failure {
        code,
        error: json!({ "error": { "code": error_code, "message": message.into() } }),
    }
}

fn precondition(error_code: &str, message: impl std::fmt::Display) -> Failure {
    failure(EXIT_PRECONDITION, error_code, message.to_string())
}

fn io_error(message: impl std::fmt::Display) -> Failure {
    failure(EXIT_IO, "Io", message.to_string())
}

fn parse_failure(message: impl std::fmt::Display) -> Failure {
    failure(EXIT_IO, "Parse", message.to_string())
}

fn build_failure(e: BuildError) -> Failure {
    let code = match e {
        BuildError::NotAlgebraicInteger => "NotAlgebraicInteger",
        BuildError::NotTotallyReal => "NotTotallyReal",
        BuildError::NotTotallyNonnegative => "NotTotallyNonnegative",
        BuildError::ConjugateInForbiddenInterval => "ConjugateInForbiddenInterval",
        BuildError::Tower(_) => "TowerArithmetic",
        BuildError::Positivity(_) => "Positivity",
    };
    precondition(code, e)
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            println!("{}", serde_json::to_string_pretty(&f.error).expect("error objects serialize"));
            std::process::exit(f.code);
        }
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let timestamp = if cli.reproducible {
        None
    } else {
        Some(SystemTime::now().duration_since(UNIX_EPOCH).expect("clock after 1970").as_secs())
    };
    match cli.cmd {
        Cmd::Construct { kind } => cmd_construct(kind, timestamp),
        Cmd::Verify { path, update } => cmd_verify(&path, update),
        Cmd::Census { degree, t, out } => cmd_census(degree, &t, &out),
        Cmd::Kronecker { n, out } => cmd_kronecker(&n, &out),
        Cmd::ProbeMu { tower, m, orders, out } => cmd_probe_mu(&tower, m, &orders, &out),
        Cmd::Profile { degree, t_list, out } => cmd_profile(degree, &t_list, &out),
    }
}

fn emit(text: String, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| io_error(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_context(tower: &str) -> Result<TowerContext, Failure> {
    parse_tower(tower).map_err(|e| precondition("ParseTower", e))
}

fn parse_param(ctx: &TowerContext, text: &str, name: &str) -> Result<trcert_core::AlgNum, Failure> {
    parse_element(ctx, text).map_err(|e| precondition("ParseElement", format!("{name}: {e}")))
}

fn cmd_construct(kind: ConstructKind, timestamp: Option<u64>) -> Result<i32, Failure> {
    let builder = format!("trcert {}", env!("CARGO_PKG_VERSION"));
    let (cert, output) = match kind {
        ConstructKind::UnitPair { common, d } => {
            let ctx = parse_context(&common.tower)?;
            let d = parse_param(&ctx, &d, "--d")?;
            let cert = build_unit_pair(&d).map_err(build_failure)?;
            (AnyCert::UnitPair(cert), common.output)
        }
        ConstructKind::Sum32 { common, d } => {
            let ctx = parse_context(&common.tower)?;
            let d = parse_param(&ctx, &d, "--d")?;
            let cert = build_sum32(&d).map_err(build_failure)?;
            (AnyCert::Sum32(cert), common.output)
        }
        ConstructKind::XWitness { common, alpha } => {
            let ctx = parse_context(&common.tower)?;
            let alpha = parse_param(&ctx, &alpha, "--alpha")?;
            let cert = build_x_witness(&alpha).map_err(build_failure)?;
            (AnyCert::XWitness(cert), common.output)
        }
        ConstructKind::FourSquares { common, x, t, height } => {
            let ctx = parse_context(&common.tower)?;
            let x = parse_param(&ctx, &x, "--x")?;
            let t = parse_rat(&t).map_err(|e| precondition("ParseThreshold", e))?;
            let a: i64 = t.numer().try_into().map_err(|_| {
                precondition("ParseThreshold", "numerator of t does not fit in 64 bits")
            })?;
            let b: i64 = t.denom().try_into().map_err(|_| {
                precondition("ParseThreshold", "denominator of t does not fit in 64 bits")
            })?;
            let found = search_four_squares(&x, a, b, height).map_err(|e| match e {
                SearchError::PreconditionFailed => precondition("PreconditionFailed", e),
                SearchError::BudgetExceeded { cells, budget } => Failure {
                    code: EXIT_BUDGET,
                    error: json!({ "error": {
                        "code": "BudgetExceeded",
                        "message": e.to_string(),
                        "cells": cells.to_string(),
                        "budget": budget.to_string(),
                    }}),
                },
                other => precondition("SearchFailed", other),
            })?;
            let cert = found.ok_or_else(|| {
                precondition(
                    "SearchExhausted",
                    format!("no witness coordinates of height <= {height} decompose x"),
                )
            })?;
            (AnyCert::FourSquares(cert), common.output)
        }
    };
    let env = encode(&cert, builder, timestamp)
        .map_err(|e| precondition("Encode", e))?;
    let text = serde_json::to_string_pretty(&env.to_value()).expect("envelopes serialize") + "\n";
    emit(text, output.as_deref())?;
    Ok(0)
}

fn cmd_verify(path: &Path, update: bool) -> Result<i32, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| io_error(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| parse_failure(format!("{} is not JSON: {e}", path.display())))?;
    let mut env = Envelope::from_value(&value)
        .map_err(|e| parse_failure(format!("{} is not an envelope: {e}", path.display())))?;
    let cert = envelope::decode(&env)
        .map_err(|e| parse_failure(format!("{} payload is invalid: {e}", path.display())))?;
    let report = cert.verify();
    print!("{report}");
    let passed = report.passed();
    println!("verification: {}", if passed { "pass" } else { "fail" });
    if update {
        env.verification = if passed {
            Verification::Pass
        } else {
            let clause = report.first_failure().expect("failed reports name a clause");
            Verification::Fail { clause: clause.name.clone() }
        };
        let out = serde_json::to_string_pretty(&env.to_value()).expect("envelopes serialize") + "\n";
        fs::write(path, out).map_err(|e| io_error(format!("cannot rewrite {}: {e}", path.display())))?;
    }
    Ok(if passed { 0 } else { EXIT_VERIFY_FAIL })
}

fn cell_budget() -> Result<u64, Failure> {
    match std::env::var("TRCERT_CELL_BUDGET") {
        Ok(s) => s.trim().parse().map_err(|e| {
            precondition("ParseBudget", format!("TRCERT_CELL_BUDGET {s:?} is not an integer: {e}"))
        }),
        Err(_) => Ok(DEFAULT_CELL_BUDGET),
    }
}

fn census_failure(e: CensusError) -> Failure {
    match e {
        CensusError::BudgetExceeded { cells, budget } => Failure {
            code: EXIT_BUDGET,
            error: json!({ "error": {
                "code": "BudgetExceeded",
                "message": format!("{e}"),
                "cells": cells.to_string(),
                "budget": budget.to_string(),
                "required_budget": cells.to_string(),
            }}),
        },
        CensusError::InvalidParameters => precondition("InvalidParameters", e),
        CensusError::OrderTooSmall { .. } => precondition("OrderTooSmall", e),
        other => precondition("CensusFailed", other),
    }
}

fn cmd_census(degree: u32, t: &str, out: &TableOut) -> Result<i32, Failure> {
    let t = parse_rat(t).map_err(|e| precondition("ParseThreshold", e))?;
    let params = CensusParams { max_degree: degree, t, cell_budget: cell_budget()? };
    let table = census_with(&params, Exec::default()).map_err(census_failure)?;
    let text = if out.json {
        serde_json::to_string_pretty(&table.to_json()).expect("tables serialize") + "\n"
    } else {
        let mut s = format!(
            "census: degree <= {}, conjugates in (0, {})\n",
            table.max_degree, table.t
        );
        for e in &table.entries {
            let _ = writeln!(s, "  degree {}: {}", e.degree(), e.poly);
        }
        let _ = writeln!(
            s,
            "{} entries, {} elements counted with multiplicity degree",
            table.entries.len(),
            table.element_count()
        );
        s
    };
    emit(text, out.output.as_deref())?;
    Ok(0)
}

fn parse_order_range(text: &str) -> Result<(u64, u64), Failure> {
    let s = text.trim();
    let (lo, hi) = if let Some((a, b)) = s.split_once("..=") {
        (a, b)
    } else if let Some((a, b)) = s.split_once("..") {
        (a, b)
    } else {
        (s, s)
    };
    let lo: u64 = lo.trim().parse().map_err(|e| precondition("ParseRange", format!("bad order {lo:?}: {e}")))?;
    let hi: u64 = hi.trim().parse().map_err(|e| precondition("ParseRange", format!("bad order {hi:?}: {e}")))?;
    if lo > hi {
        return Err(precondition("ParseRange", format!("empty range {s:?}")));
    }
    Ok((lo, hi))
}

fn cmd_kronecker(range: &str, out: &TableOut) -> Result<i32, Failure> {
    let (lo, hi) = parse_order_range(range)?;
    let mut rows = Vec::new();
    for n in lo..=hi {
        rows.push(kronecker_entry(n).map_err(census_failure)?);
    }
    let text = if out.json {
        let items: Vec<Value> = rows
            .iter()
            .map(|e| {
                let coeffs: Vec<String> =
                    e.poly.coeffs().iter().map(|c| c.numer().to_string()).collect();
                json!({ "n": e.n, "degree": e.degree(), "coefficients": coeffs })
            })
            .collect();
        serde_json::to_string_pretty(&Value::Array(items)).expect("tables serialize") + "\n"
    } else {
        let mut s = String::from("n     degree  minimal polynomial of zeta_n + 1/zeta_n + 2\n");
        for e in &rows {
            let _ = writeln!(s, "{:<5} {:<7} {}", e.n, e.degree(), e.poly);
        }
        s
    };
    emit(text, out.output.as_deref())?;
    Ok(0)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn cmd_probe_mu(tower: &str, m: u64, orders: &str, out: &TableOut) -> Result<i32, Failure> {
    let ctx = parse_context(tower)?;
    let field = ctx.cyclotomic.as_ref().ok_or_else(|| {
        precondition("NotCyclotomic", "probe-mu needs a cyclotomic tower: Q(i) or Q(zetaN)")
    })?;
    let n0 = field.order();
    let mut requested = Vec::new();
    for part in orders.split(',') {
        let o: u64 = part.trim().parse().map_err(|e| {
            precondition("ParseOrders", format!("bad order {part:?}: {e}"))
        })?;
        if o < 3 {
            return Err(precondition("ParseOrders", "orders below 3 are rational (+-1) and always present"));
        }
        if !n0.is_multiple_of(o) {
            return Err(precondition(
                "OrderNotInField",
                format!("zeta_{o} does not lie in Q(zeta_{n0})"),
            ));
        }
        requested.push(o);
    }
    let report = probe_mu_trivial(field, m).map_err(|e| precondition("ProbeFailed", e))?;
    let mut all_pass = true;
    let mut lines = Vec::new();
    for &o in &requested {
        let offenders: Vec<u64> = report
            .nontrivial_members
            .iter()
            .copied()
            .filter(|&k| n0 / gcd(k, n0) == o)
            .collect();
        if offenders.is_empty() {
            lines.push((o, "pass".to_string(), offenders));
        } else {
            all_pass = false;
            lines.push((o, "fail".to_string(), offenders));
        }
    }
    let text = if out.json {
        let items: Vec<Value> = lines
            .iter()
            .map(|(o, status, offenders)| {
                json!({ "order": o, "modulus": m, "status": status, "exponents_inside": offenders })
            })
            .collect();
        serde_json::to_string_pretty(&json!({
            "field_order": n0,
            "results": items,
        }))
        .expect("reports serialize")
            + "\n"
    } else {
        let mut s = String::new();
        for (o, status, offenders) in &lines {
            if offenders.is_empty() {
                let _ = writeln!(s, "zeta_{o} outside Z + {m} O_L over Q(zeta_{n0}): {status}");
            } else {
                let _ = writeln!(
                    s,
                    "zeta_{o} inside Z + {m} O_L over Q(zeta_{n0}) at exponents {offenders:?}: {status}"
                );
            }
        }
        s
    };
    emit(text, out.output.as_deref())?;
    Ok(if all_pass { 0 } else { EXIT_VERIFY_FAIL })
}

fn cmd_profile(degree: u32, t_list: &str, out: &TableOut) -> Result<i32, Failure> {
    let mut ts: Vec<Rat> = Vec::new();
    for part in t_list.split(',') {
        ts.push(parse_rat(part).map_err(|e| precondition("ParseThreshold", e))?);
    }
    let budget = cell_budget()?;
    let mut rows = Vec::new();
    for t in &ts {
        let params = CensusParams { max_degree: degree, t: t.clone(), cell_budget: budget };
        let table = census_with(&params, Exec::default()).map_err(census_failure)?;
        rows.push((t.clone(), table.element_count()));
    }
    let profile = JrProfile { max_degree: degree, rows };
    let text = if out.json {
        let items: Vec<Value> = profile
            .rows
            .iter()
            .map(|(t, c)| json!({ "t": t.to_string(), "element_count": c }))
            .collect();
        serde_json::to_string_pretty(&json!({ "max_degree": degree, "rows": items }))
            .expect("profiles serialize")
            + "\n"
    } else {
        profile.to_csv()
    };
    emit(text, out.output.as_deref())?;
    Ok(0)
}
