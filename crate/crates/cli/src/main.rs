//! Command-line front end: parse the field configuration and inputs,
//! dispatch to the library, and emit deterministic JSON (or text for
//! `bounds`) on stdout. Timing goes to stderr so the stable section stays
//! byte-identical across runs.
//!
//! Exit codes: 0 = decided and verified, 2 = input error, 3 = internal
//! certificate or oracle failure (a bug, never silent).

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use ultraforms::bounds::{completion_case_trace, invariant_bounds, ExtNat, FieldInvariants};
use ultraforms::brauer::{self, BrauerExpr};
use ultraforms::decompose::{decompose, verify_decomposition, DecompositionResult};
use ultraforms::laurent::{parse_element, LaurentElement, LaurentField, LeadingData};
use ultraforms::quadform::{self, DiagonalForm};
use ultraforms::valgroup::{rational_rank, ExponentVector};
use ultraforms::{Error, Result};

#[derive(Parser)]
#[command(name = "ultraforms", version, about = "Quadratic forms and symbol algebras over F_p((t1))...((tn))")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct FieldArgs {
    /// Residue characteristic (odd prime)
    #[arg(long)]
    p: u64,
    /// Number of Laurent variables (1..=4)
    #[arg(long)]
    n: usize,
    /// Value-group basis as comma-separated monomials (default t1,...,tn)
    #[arg(long)]
    basis: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decompose elements modulo l-th powers over the basis
    Decompose {
        #[command(flatten)]
        field: FieldArgs,
        /// The prime l (coprime to p)
        #[arg(long, default_value_t = 2)]
        l: u64,
        /// Comma-separated element expressions
        elements: String,
    },
    /// Decide isotropy of a diagonal quadratic form
    Isotropy {
        #[command(flatten)]
        field: FieldArgs,
        /// Comma-separated coefficients of the diagonal form
        form: String,
    },
    /// Exhaustive anisotropic-dimension survey over square classes
    Survey {
        /// Residue characteristic (odd prime)
        #[arg(long)]
        p: u64,
        /// Number of Laurent variables (1..=4)
        #[arg(long)]
        n: usize,
        /// Maximum dimension to enumerate
        #[arg(long)]
        d_max: usize,
    },
    /// Decompose a symbol expression into unramified and ramified parts
    Symbol {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 2)]
        l: u64,
        /// Symbols as (expr,expr) pairs separated by ';'
        symbols: String,
    },
    /// Decide splitness of a quaternion symbol (l = 2)
    Split {
        #[command(flatten)]
        field: FieldArgs,
        /// The symbol as an (expr,expr) pair
        symbol: String,
    },
    /// Period-index bound, and the exact index when computable
    Index {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 2)]
        l: u64,
        /// Symbols as (expr,expr) pairs separated by ';'
        symbols: String,
    },
    /// Evaluate the invariant bounds and completion case traces
    Bounds {
        /// Rational rank of the value group
        #[arg(long)]
        n: u32,
        /// Br_l dim of the residue field
        #[arg(long)]
        d: Option<u64>,
        /// u of the residue field (integer or "inf")
        #[arg(long)]
        u_residue: Option<String>,
        /// u_s of the residue field (integer or "inf")
        #[arg(long)]
        us_residue: Option<String>,
        /// Added rational rank s for a completion trace
        #[arg(long, requires = "t")]
        s: Option<u32>,
        /// Added residue transcendence degree t for a completion trace
        #[arg(long, requires = "s")]
        t: Option<u32>,
        /// Emit JSON instead of text
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match run(cli.cmd) {
        Ok(()) => 0,
        Err(e @ (Error::Certificate(_) | Error::OracleDisagreement(_))) => {
            eprintln!("internal error: {e}");
            3
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    eprintln!("elapsed: {} ms", start.elapsed().as_millis());
    ExitCode::from(code)
}

fn make_field(args: &FieldArgs) -> Result<(LaurentField, Vec<LeadingData>)> {
    if args.n == 0 || args.n > 4 {
        return Err(Error::Precondition("n must be in 1..=4".into()));
    }
    let field = LaurentField::new(args.p, args.n)?;
    let basis = match &args.basis {
        None => quadform::standard_basis(field)?,
        Some(text) => {
            let leads = parse_csv(text, field)?
                .into_iter()
                .map(|e| {
                    if e.num_terms() != 1 {
                        return Err(Error::Precondition(format!(
                            "basis entry '{e}' is not a monomial"
                        )));
                    }
                    e.leading()
                })
                .collect::<Result<Vec<_>>>()?;
            if leads.len() != args.n {
                return Err(Error::Precondition(format!(
                    "basis must have {} entries",
                    args.n
                )));
            }
            let rows: Vec<ExponentVector> = leads
                .iter()
                .map(|d| ExponentVector::from_bigints(&d.expo))
                .collect();
            if rational_rank(&rows) != args.n {
                return Err(Error::RankDeficient);
            }
            leads
        }
    };
    Ok((field, basis))
}

fn parse_csv(text: &str, field: LaurentField) -> Result<Vec<LaurentElement>> {
    text.split(',')
        .map(|s| parse_element(s.trim(), field))
        .collect()
}

/// Parse "(expr,expr);(expr,expr);..." into slot pairs.
fn parse_symbols(text: &str, field: LaurentField) -> Result<Vec<(LaurentElement, LaurentElement)>> {
    text.split(';')
        .map(|part| {
            let part = part.trim();
            let inner = part
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Precondition(format!("symbol '{part}' must be (expr,expr)")))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| Error::Precondition(format!("symbol '{part}' must have two slots")))?;
            Ok((parse_element(a.trim(), field)?, parse_element(b.trim(), field)?))
        })
        .collect()
}

fn words(ws: &[ultraforms::GroupWord]) -> Vec<String> {
    ws.iter().map(|w| w.to_string()).collect()
}

fn certificate_json(r: &DecompositionResult) -> serde_json::Value {
    json!({
        "c": words(&r.c),
        "mu": r.mu,
        "b": words(&r.b),
        "u_class": r.u_class,
        "independent": r.independent,
    })
}

fn emit(v: serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
}

fn max_enum() -> u64 {
    std::env::var("ULTRAFORMS_MAX_ENUM")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1_000_000)
}

fn parse_extnat(s: &str) -> Result<ExtNat> {
    if s == "inf" {
        Ok(ExtNat::Inf)
    } else {
        s.parse()
            .map(ExtNat::Fin)
            .map_err(|_| Error::Precondition(format!("expected integer or 'inf', got '{s}'")))
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Decompose { field, l, elements } => {
            let (f, basis) = make_field(&field)?;
            let leads = parse_csv(&elements, f)?
                .iter()
                .map(|e| e.leading())
                .collect::<Result<Vec<_>>>()?;
            let result = decompose(&leads, &basis, l)?;
            if !verify_decomposition(&leads, &basis, l, &result)? {
                return Err(Error::Certificate(
                    "decomposition failed self-verification".into(),
                ));
            }
            emit(json!({
                "schema": 1,
                "command": "decompose",
                "p": field.p,
                "n": field.n,
                "l": l,
                "elements": elements.split(',').map(str::trim).collect::<Vec<_>>(),
                "basis": basis.iter().map(|d| d.to_element_string()).collect::<Vec<_>>(),
                "certificate": certificate_json(&result),
                "verified": true,
            }));
        }
        Cmd::Isotropy { field, form } => {
            let (f, basis) = make_field(&field)?;
            let q = DiagonalForm::new(f, parse_csv(&form, f)?)?;
            let (iso, cert) = quadform::is_isotropic(&q, &basis)?;
            let springer = quadform::is_isotropic_springer(&q)?;
            if iso != springer {
                return Err(Error::OracleDisagreement(format!(
                    "block oracle: {iso}, Springer oracle: {springer}"
                )));
            }
            emit(json!({
                "schema": 1,
                "command": "isotropy",
                "p": field.p,
                "n": field.n,
                "form": form.split(',').map(str::trim).collect::<Vec<_>>(),
                "isotropic": iso,
                "certificate": serde_json::to_value(&cert).expect("serializable"),
                "springer_oracle": springer,
            }));
        }
        Cmd::Survey { p, n, d_max } => {
            let report = quadform::anisotropic_survey(p, n, d_max, max_enum())?;
            emit(json!({
                "schema": 1,
                "command": "survey",
                "report": serde_json::to_value(&report).expect("serializable"),
            }));
        }
        Cmd::Symbol { field, l, symbols } => {
            let (f, basis) = make_field(&field)?;
            let pairs = parse_symbols(&symbols, f)?;
            let expr = BrauerExpr::new(f, l, pairs.into_iter().map(|(a, b)| (a, b, 1)).collect())?;
            let dec = brauer::symbol_decompose(&expr, &basis)?;
            emit(json!({
                "schema": 1,
                "command": "symbol",
                "p": field.p,
                "n": field.n,
                "l": l,
                "unramified": dec.unramified.iter().map(|u| json!({
                    "a": u.a.to_string(),
                    "b": u.b.to_string(),
                    "a_residue": u.a_residue,
                    "b_residue": u.b_residue,
                    "multiplicity": u.multiplicity,
                })).collect::<Vec<_>>(),
                "ramified": dec.ramified.iter().map(|r| json!({
                    "x": r.x.to_string(),
                    "c": r.c.to_string(),
                    "x_class": serde_json::to_value(&r.x_class).expect("serializable"),
                })).collect::<Vec<_>>(),
                "certificate": certificate_json(&dec.certificate),
                "verified": true,
            }));
        }
        Cmd::Split { field, symbol } => {
            let (f, _) = make_field(&field)?;
            let pairs = parse_symbols(&symbol, f)?;
            if pairs.len() != 1 {
                return Err(Error::Precondition("split takes exactly one symbol".into()));
            }
            let (a, b) = &pairs[0];
            let split = brauer::quaternion_split(a, b)?;
            let expr = BrauerExpr::new(f, 2, vec![(a.clone(), b.clone(), 1)])?;
            let by_residue = brauer::is_split(&expr)?;
            if split != by_residue {
                return Err(Error::OracleDisagreement(format!(
                    "conic oracle: {split}, residue oracle: {by_residue}"
                )));
            }
            emit(json!({
                "schema": 1,
                "command": "split",
                "p": field.p,
                "n": field.n,
                "split": split,
            }));
        }
        Cmd::Index { field, l, symbols } => {
            let (f, basis) = make_field(&field)?;
            let pairs = parse_symbols(&symbols, f)?;
            let expr = BrauerExpr::new(
                f,
                l,
                pairs.iter().map(|(a, b)| (a.clone(), b.clone(), 1)).collect(),
            )?;
            let bound = brauer::index_bound(&expr, &basis)?;
            let exact = if l == 2 && pairs.len() == 1 {
                let (a, b) = &pairs[0];
                Some(if brauer::quaternion_split(a, b)? { 1 } else { 2 })
            } else if l == 2 && pairs.len() == 2 {
                let (a1, b1) = &pairs[0];
                let (a2, b2) = &pairs[1];
                Some(brauer::biquaternion_index((a1, b1), (a2, b2))?)
            } else {
                None
            };
            if let Some(x) = exact {
                if x > bound {
                    return Err(Error::Certificate(format!(
                        "exact index {x} exceeds bound {bound}"
                    )));
                }
            }
            emit(json!({
                "schema": 1,
                "command": "index",
                "p": field.p,
                "n": field.n,
                "l": l,
                "bound": bound,
                "exact": exact,
            }));
        }
        Cmd::Bounds {
            n,
            d,
            u_residue,
            us_residue,
            s,
            t,
            json: as_json,
        } => {
            let inv = FieldInvariants {
                n,
                d,
                u_residue: u_residue.as_deref().map(parse_extnat).transpose()?,
                us_residue: us_residue.as_deref().map(parse_extnat).transpose()?,
            };
            let entries = invariant_bounds(&inv);
            let trace = match (s, t) {
                (Some(s), Some(t)) => Some(completion_case_trace(s, t, &inv)?),
                _ => None,
            };
            if as_json {
                emit(json!({
                    "schema": 1,
                    "command": "bounds",
                    "n": n,
                    "bounds": serde_json::to_value(&entries).expect("serializable"),
                    "completion_trace": serde_json::to_value(&trace).expect("serializable"),
                }));
            } else {
                for e in &entries {
                    println!("{} \u{2264} {}  [{}]", e.quantity, e.value, e.formula);
                }
                if let Some(tr) = &trace {
                    println!("completion case {}: {}", tr.case, tr.residue_extension);
                    println!("rank of value group: {}", tr.rank);
                    if let Some(u) = tr.u_bound {
                        println!("u(F_v) \u{2264} {u}");
                    }
                    if let Some(b) = tr.br_bound {
                        println!("Br_l dim(F_v) \u{2264} {b}");
                    }
                }
            }
        }
    }
    Ok(())
}
