//! Command-line surface. Every command prints one JSON report.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::constants::{eval_constant, i3_crosscheck};
use crate::error::Error;
use crate::frobenius::{annihilation_check, finite_singularities, is_apparent, local_basis_with_digits};
use crate::fuchsian::{is_fuchsian, singular_points, FuchsianOde, Point};
use crate::guess::{guess_ode_with, verify_annihilation, Method, SeriesData};
use crate::ising::{chi_tilde_series, nickel_singularities_with_digits};
use crate::kernel::rational::parse_rational;
use crate::kernel::complex::float_to_fixed;
use crate::kernel::BigComplex;
use crate::monodromy::fixtures::{c014_fixture, chi3_fixture_checks, C014_BASIS};
use crate::monodromy::{monodromy_generators, product_relation, Route};
use crate::recognize::{recognize_matrix, ConstantBasis};
use crate::transport::connect;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_UNRESOLVED: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "fuchsian", version, about = "Local analysis, connection and monodromy of Fuchsian ODEs")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct OdeArg {
    /// ODE JSON file: {"order": n, "coeffs": [["p/q", ...], ...]}.
    #[arg(long)]
    pub ode: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Singular points, exponents and apparent-singularity flags.
    Analyze {
        #[command(flatten)]
        ode: OdeArg,
    },
    /// Frobenius basis at a point.
    Frobenius {
        #[command(flatten)]
        ode: OdeArg,
        /// Rational point, `inf`, or `sing:K` (K-th singular point).
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 20)]
        order: usize,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    /// Connection matrix between two points.
    Connect {
        #[command(flatten)]
        ode: OdeArg,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 50)]
        digits: u32,
    },
    /// Monodromy generators at a base point and the product relation.
    Monodromy {
        #[command(flatten)]
        ode: OdeArg,
        #[arg(long)]
        base: String,
        /// Comma-separated points; defaults to every singular point, base included.
        #[arg(long, value_delimiter = ',')]
        around: Vec<String>,
        /// `POINT=RE:IM` waypoint for the route to POINT (repeatable). Routes to
        /// infinity default to one waypoint on the positive imaginary axis
        /// beyond every finite singular point.
        #[arg(long)]
        waypoint: Vec<String>,
        #[arg(long, default_value_t = 50)]
        digits: u32,
    },
    /// Guess an ODE annihilating a series file.
    Guess {
        #[arg(long)]
        series: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Modular)]
        method: MethodArg,
    },
    /// Recognize matrix entries over a constant basis.
    Recognize {
        /// Matrix JSON with "entries": [[[re, im], ...], ...].
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_delimiter = ',')]
        basis: Vec<String>,
        #[arg(long, default_value_t = 60)]
        digits: u32,
    },
    /// Evaluate a named constant or run the I3 cross-check.
    Constants {
        #[arg(long)]
        eval: Option<String>,
        #[arg(long)]
        crosscheck: bool,
        #[arg(long, default_value_t = 60)]
        digits: u32,
    },
    /// Ising layer.
    Ising {
        #[command(subcommand)]
        command: IsingCommand,
    },
    /// Built-in fixtures.
    Fixtures {
        #[arg(value_enum)]
        name: FixtureName,
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum IsingCommand {
    Nickel {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
    Series {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    Modular,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FixtureName {
    Chi3,
    C014,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionUnreachable(_) | Error::InsufficientPrecision(_) | Error::IllConditioned(_) => EXIT_PRECISION,
        Error::NeedMoreTerms(_) => EXIT_UNRESOLVED,
        _ => EXIT_PRECONDITION,
    }
}

struct Ctx {
    inputs: Vec<(String, Vec<u8>)>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String, Error> {
        let bytes = std::fs::read(path).map_err(|e| Error::Parse { position: path.display().to_string(), message: e.to_string() })?;
        let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Parse { position: path.display().to_string(), message: e.to_string() })?;
        self.inputs.push((path.display().to_string(), bytes));
        Ok(text)
    }

    fn ode(&mut self, a: &OdeArg) -> Result<FuchsianOde, Error> {
        let text = self.read(&a.ode)?;
        FuchsianOde::from_json(&text).map_err(|e| match e {
            Error::Parse { position, message } => Error::Parse { position: format!("{}: {position}", a.ode.display()), message },
            other => other,
        })
    }

    fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (name, bytes) in &self.inputs {
            h.update(name.as_bytes());
            h.update([0]);
            h.update(bytes);
        }
        hex::encode(h.finalize())
    }
}

/// `inf`, a rational, or `sing:K`.
pub fn parse_point(s: &str, ode: &FuchsianOde) -> Result<Point, Error> {
    let s = s.trim();
    if matches!(s, "inf" | "infinity" | "∞") {
        return Ok(Point::Infinity);
    }
    if let Some(k) = s.strip_prefix("sing:") {
        let k: usize = k.parse().map_err(|_| Error::Parse { position: s.into(), message: "bad singular point index".into() })?;
        let sps = singular_points(ode);
        return sps.get(k).map(|p| p.location.clone()).ok_or_else(|| Error::Precondition(format!("only {} singular points", sps.len())));
    }
    parse_rational(s).map(Point::Rational).map_err(|_| Error::Parse { position: s.into(), message: "expected a rational, `inf` or `sing:K`".into() })
}

fn analyze(ode: &FuchsianOde) -> Value {
    let (fuchsian, irregular) = is_fuchsian(ode);
    let points: Vec<Value> = singular_points(ode)
        .iter()
        .enumerate()
        .map(|(k, sp)| {
            json!({
                "index": k,
                "point": sp.location.label(),
                "regular": sp.regular,
                "exponents": sp.exponents.iter().map(|e| e.label()).collect::<Vec<_>>(),
                "apparent": sp.apparent,
                "note": sp.note,
            })
        })
        .collect();
    json!({
        "ode": ode.to_json(),
        "fuchsian": fuchsian,
        "irregular": irregular.iter().map(|p| p.label()).collect::<Vec<_>>(),
        "singular_points": points,
    })
}

/// Runs a parsed command; returns the exit code and the report.
pub fn run(cli: &Cli, echo: &[String]) -> (i32, Value) {
    let mut ctx = Ctx { inputs: vec![] };
    let result = dispatch(cli, &mut ctx);
    let (code, body) = match result {
        Ok((code, v)) => (code, json!({ "status": if code == EXIT_OK { "ok" } else { "unresolved" }, "result": v })),
        Err(e) => (exit_code(&e), json!({ "status": "error", "error": e.to_string() })),
    };
    let mut report = json!({ "command": echo, "inputs_digest": ctx.digest() });
    let (obj, extra) = (report.as_object_mut().unwrap(), body.as_object().unwrap().clone());
    obj.extend(extra);
    obj.insert("exit_code".into(), json!(code));
    (code, report)
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Result<(i32, Value), Error> {
    match &cli.command {
        Command::Analyze { ode } => {
            let ode = ctx.ode(ode)?;
            Ok((EXIT_OK, analyze(&ode)))
        }
        Command::Frobenius { ode, at, order, digits } => {
            let ode = ctx.ode(ode)?;
            let p = parse_point(at, &ode)?;
            let basis = local_basis_with_digits(&ode, &p, *order, *digits)?;
            let mut v = basis.to_json(*digits as usize);
            if let Some(exact) = basis.exact() {
                let checks = annihilation_check(exact);
                v["annihilation"] = json!(checks.iter().map(|(ok, n)| json!({"exact": ok, "verified_coefficients": n})).collect::<Vec<_>>());
            }
            if matches!(p, Point::Rational(_) | Point::Infinity) {
                v["apparent"] = json!(is_apparent(&ode, &p, Some(*order)).ok());
            }
            v["precision"] = json!({ "digits": digits });
            Ok((EXIT_OK, v))
        }
        Command::Connect { ode, from, to, digits } => {
            let ode = ctx.ode(ode)?;
            let (p, q) = (parse_point(from, &ode)?, parse_point(to, &ode)?);
            let c = connect(&ode, &p, &q, *digits)?;
            let mut v = c.to_json(c.digits as usize);
            v["requested_digits"] = json!(digits);
            v["condition"] = json!(format!("{:.3e}", c.condition));
            Ok((EXIT_OK, v))
        }
        Command::Monodromy { ode, base, around, waypoint, digits } => {
            let ode = ctx.ode(ode)?;
            let b = parse_point(base, &ode)?;
            let points: Vec<Point> = if around.is_empty() {
                singular_points(&ode).into_iter().map(|s| s.location).collect()
            } else {
                around.iter().map(|s| parse_point(s, &ode)).collect::<Result<_, _>>()?
            };
            let wd = *digits + 20;
            let mut extra: Vec<(String, BigComplex)> = vec![];
            for w in waypoint {
                let perr = || Error::Parse { position: w.clone(), message: "expected POINT=RE:IM".into() };
                let (p, z) = w.split_once('=').ok_or_else(perr)?;
                let (re, im) = z.split_once(':').ok_or_else(perr)?;
                extra.push((parse_point(p, &ode)?.label(), BigComplex::parse(re, im, wd).ok_or_else(perr)?));
            }
            let radius = finite_singularities(&ode, 20).iter().map(|z| z.abs_f64()).fold(0.0, f64::max);
            let routes: Vec<Route> = points
                .into_iter()
                .map(|p| {
                    let mut ws: Vec<BigComplex> = extra.iter().filter(|(l, _)| *l == p.label()).map(|(_, z)| z.clone()).collect();
                    if ws.is_empty() && p.is_infinity() {
                        ws.push(BigComplex::from_f64(0.0, (radius + 1.0).ceil(), wd));
                    }
                    Route { point: p, waypoints: ws }
                })
                .collect();
            let route_json: Vec<Value> = routes
                .iter()
                .map(|r| json!({ "point": r.point.label(), "waypoints": r.waypoints.iter().map(|z| { let (a, b) = z.to_decimal_strings(10); vec![a, b] }).collect::<Vec<_>>() }))
                .collect();
            let gens = monodromy_generators(&ode, &b, &routes, *digits)?;
            let rel = product_relation(&gens, *digits);
            let shown = gens.iter().map(|g| g.digits).min().unwrap_or(*digits) as usize;
            Ok((
                EXIT_OK,
                json!({
                    "base": b.label(),
                    "digits": shown,
                    "routes": route_json,
                    "generators": gens.iter().map(|g| g.to_json(shown)).collect::<Vec<_>>(),
                    "product_relation": rel.to_json(),
                }),
            ))
        }
        Command::Guess { series, max_order, max_degree, method } => {
            let text = ctx.read(series)?;
            let s = SeriesData::parse(&text, &series.display().to_string()).map_err(|e| match e {
                Error::Parse { position, message } => Error::Parse { position: format!("{}: {position}", series.display()), message },
                other => other,
            })?;
            let m = match method {
                MethodArg::Modular => Method::Modular,
                MethodArg::Exact => Method::Exact,
            };
            match guess_ode_with(&s, *max_order, *max_degree, m)? {
                Some(g) => {
                    let mut v = g.to_json();
                    v["ode_json"] = g.ode.to_json();
                    v["terms"] = json!(s.n() + 1);
                    v["annihilates_through"] = json!(verify_annihilation(&g.ode, &s));
                    Ok((EXIT_OK, v))
                }
                None => Ok((EXIT_UNRESOLVED, json!({ "ode": null, "terms": s.n() + 1, "reason": "no shape within the bounds annihilates the series" }))),
            }
        }
        Command::Recognize { matrix, basis, digits } => {
            let text = ctx.read(matrix)?;
            let m = parse_matrix(&text, *digits + 20).map_err(|e| match e {
                Error::Parse { position, message } => Error::Parse { position: format!("{}: {position}", matrix.display()), message },
                other => other,
            })?;
            let names: Vec<&str> = basis.iter().map(|s| s.as_str()).collect();
            let b = ConstantBasis::new(&names, *digits)?;
            let r = recognize_matrix(&m, &b, *digits);
            let code = if r.unresolved.is_empty() { EXIT_OK } else { EXIT_UNRESOLVED };
            Ok((code, r.to_json()))
        }
        Command::Constants { eval, crosscheck, digits } => {
            if *crosscheck {
                let c = i3_crosscheck(*digits)?;
                return Ok((EXIT_OK, c.to_json()));
            }
            let name = eval.as_deref().ok_or_else(|| Error::Precondition("pass --eval NAME or --crosscheck".into()))?;
            let v = eval_constant(name, *digits + 10)?;
            let (re, im) = v.to_decimal_strings(*digits as usize);
            let fixed = float_to_fixed(&v.re, *digits as usize);
            let mut out = json!({ "name": name, "digits": digits, "value": fixed, "value_sci": re });
            if !v.is_real() {
                out["imag"] = json!(im);
            }
            Ok((EXIT_OK, out))
        }
        Command::Ising { command } => match command {
            IsingCommand::Nickel { n, digits } => {
                let list = nickel_singularities_with_digits(*n, *digits)?;
                Ok((EXIT_OK, json!({ "n": n, "digits": digits, "singularities": list.iter().map(|s| s.to_json(*digits as usize)).collect::<Vec<_>>() })))
            }
            IsingCommand::Series { n, order } => {
                // here --out names the series file; the report goes to stdout
                let series_out = &cli.out;
                let s = chi_tilde_series(*n, *order)?;
                let mut v = json!({ "n": n, "order": order });
                match series_out {
                    Some(p) => {
                        std::fs::write(p, s.to_text()).map_err(|e| Error::Precondition(format!("{}: {e}", p.display())))?;
                        v["written"] = json!(p.display().to_string());
                    }
                    None => v["coefficients"] = json!(s.coeffs.iter().map(crate::kernel::rational::fmt_rational).collect::<Vec<_>>()),
                }
                Ok((EXIT_OK, v))
            }
        },
        Command::Fixtures { name, check } => match name {
            FixtureName::Chi3 => {
                let r = chi3_fixture_checks();
                let code = if !*check || r.all_identities_hold() { EXIT_OK } else { EXIT_UNRESOLVED };
                Ok((code, r.to_json()))
            }
            FixtureName::C014 => {
                let cells: Vec<Vec<String>> = c014_fixture().iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
                Ok((EXIT_OK, json!({ "basis": C014_BASIS, "cells": cells })))
            }
        },
    }
}

/// Reads `"entries": [[[re, im], ...], ...]` (strings or numbers; a bare
/// string is a real entry).
pub fn parse_matrix(text: &str, digits: u32) -> Result<Vec<Vec<BigComplex>>, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse { position: format!("line {}, column {}", e.line(), e.column()), message: e.to_string() })?;
    let perr = |pos: String, m: &str| Error::Parse { position: pos, message: m.into() };
    let rows = v.get("entries").and_then(|e| e.as_array()).ok_or_else(|| perr("root".into(), "missing array `entries`"))?;
    let as_str = |x: &Value| -> Option<String> {
        match x {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) => Some(n.to_string()),
            _ => None,
        }
    };
    let mut out = vec![];
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| perr(format!("entries[{i}]"), "expected an array"))?;
        let mut r = vec![];
        for (j, cell) in row.iter().enumerate() {
            let pos = format!("entries[{i}][{j}]");
            let (re, im) = match cell {
                Value::Array(p) if p.len() == 2 => (as_str(&p[0]), as_str(&p[1])),
                other => (as_str(other), Some("0".into())),
            };
            let (re, im) = (re.ok_or_else(|| perr(pos.clone(), "expected a decimal string"))?, im.ok_or_else(|| perr(pos.clone(), "expected a decimal string"))?);
            r.push(BigComplex::parse(&re, &im, digits).ok_or_else(|| perr(pos, "bad decimal"))?);
        }
        out.push(r);
    }
    if out.is_empty() || out.iter().any(|r| r.len() != out[0].len()) {
        return Err(perr("entries".into(), "ragged or empty matrix"));
    }
    Ok(out)
}

/// Parses argv, runs, and writes the report. Returns the exit code.
pub fn main_with_args(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PRECONDITION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (code, report) = run(&cli, &args[1..]);
    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    let report_out = match &cli.command {
        Command::Ising { command: IsingCommand::Series { .. } } => None,
        _ => cli.out.as_ref(),
    };
    match report_out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("cannot write {}: {e}", p.display());
                return EXIT_PRECONDITION;
            }
        }
        None => print!("{text}"),
    }
    code
}
