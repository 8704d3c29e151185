//! Command-line front end. Reports go to standard output as JSON with
//! sorted keys; a short summary goes to standard error.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::chern::{
    chern_simons, equivariant_chern_simons, equivariant_chern_weil, equivariant_connection, polynomial_in_weil,
    resolve_polynomial, weil_injectivity_witness, ChernError,
};
use crate::diffcoh::DiffCohError;
use crate::exactlin::FGAbelianGroup;
use crate::gstar::{build_weil, check_gstar, cohomology};
use crate::modelfile::{load, parse_model, print_model, Loaded};

pub const SCHEMA_VERSION: u32 = 1;

/// Shipped model files, by name.
pub static MODELS: &[(&str, &str)] = &[
    ("u1", include_str!("../models/u1.toml")),
    ("r2", include_str!("../models/r2.toml")),
    ("su2", include_str!("../models/su2.toml")),
    ("u2", include_str!("../models/u2.toml")),
    ("heisenberg3", include_str!("../models/heisenberg3.toml")),
    ("su2_x3", include_str!("../models/su2_x3.toml")),
    ("rotation", include_str!("../models/rotation.toml")),
    ("product", include_str!("../models/product.toml")),
    ("cp8", include_str!("../models/cp8.toml")),
    ("rp9", include_str!("../models/rp9.toml")),
    ("lens3_7", include_str!("../models/lens3_7.toml")),
    ("point", include_str!("../models/point.toml")),
];

/// Text of a built-in model: a shipped file, or `cpN`, `rpN`, `lensM_N`
/// generated in the same format.
pub fn builtin_model_text(name: &str) -> Option<String> {
    if let Some((_, text)) = MODELS.iter().find(|(n, _)| *n == name) {
        return Some(text.to_string());
    }
    if let Some(n) = name.strip_prefix("cp").and_then(|n| n.parse::<usize>().ok()) {
        return Some(format!("[model]\nkind = \"cp\"\nn = {n}\n"));
    }
    if let Some(n) = name.strip_prefix("rp").and_then(|n| n.parse::<usize>().ok()) {
        return Some(format!("[model]\nkind = \"rp\"\nn = {n}\n"));
    }
    let (m, n) = name.strip_prefix("lens")?.split_once('_')?;
    let (m, n) = (m.parse::<u64>().ok()?, n.parse::<usize>().ok()?);
    Some(format!("[model]\nkind = \"lens\"\nn = {n}\norder = {m}\n"))
}

#[derive(Debug, Parser)]
#[command(name = "eqcoh", version, about = "Exact equivariant Chern-Weil and differential cohomology computations")]
pub struct Cli {
    /// Write the JSON report to this file instead of standard output.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Coefficient pair Λ ⊂ V.
    #[arg(long, global = true, value_enum, default_value_t = Coeff::ZInQ)]
    pub coeff: Coeff,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Coeff {
    #[value(name = "z-in-q")]
    ZInQ,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the G★ relations through a degree.
    CheckGstar(ModelArgs),
    /// Cohomology of the algebra over ℚ.
    WeilCohomology(ModelArgs),
    /// Chern-Simons transgression form in the Weil algebra.
    ChernSimons(ModelArgs),
    /// Equivariant connection, curvature and Chern-Weil forms.
    EquivCw(ModelArgs),
    /// Differential cohomology of a geometric model.
    Diffcoh(ModelArgs),
    /// Verify both short exact sequences and the commuting square.
    VerifySes(ModelArgs),
    /// Evaluate the injectivity witness.
    WitnessInj(ModelArgs),
    /// Run the `[task]` section of a model file.
    Run {
        path: PathBuf,
        #[command(flatten)]
        params: Params,
    },
    /// Print a model file in canonical form.
    Fmt { path: PathBuf },
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Built-in model name.
    pub name: Option<String>,
    /// Model file to load instead of a built-in.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Params {
    #[arg(long)]
    pub max_degree: Option<u32>,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Invariant polynomial: `sigmaK`, `sigmaK^p` or an expression in `u`.
    #[arg(long)]
    pub poly: Option<String>,
    /// One-based basis indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub indices: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

/// A finished computation.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub summary: String,
}

/// Bad input: exit code 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn ok(result: Value, summary: String) -> Result<Outcome, InputError> {
    Ok(Outcome { status: Status::Ok, result, summary })
}

fn failed(counterexample: String) -> Result<Outcome, InputError> {
    Ok(Outcome { status: Status::Failed, result: json!({ "counterexample": counterexample }), summary: format!("verification failed: {counterexample}") })
}

/// Verification failures become a failed outcome, other errors bad input.
fn chern<T>(r: Result<T, ChernError>) -> Result<Result<T, String>, InputError> {
    match r {
        Ok(x) => Ok(Ok(x)),
        Err(ChernError::Axiom(s)) => Ok(Err(s)),
        Err(e) => Err(e.into()),
    }
}

fn require<'a, T>(x: &'a Option<T>, what: &str, op: &str) -> Result<&'a T, InputError> {
    x.as_ref().ok_or_else(|| InputError(format!("`{op}` needs a model with {what}")))
}

fn require_param<T: Clone>(x: &Option<T>, flag: &str, op: &str) -> Result<T, InputError> {
    x.clone().ok_or_else(|| InputError(format!("`{op}` needs --{flag}")))
}

fn superscript(n: usize) -> String {
    n.to_string().chars().map(|c| "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().nth(c.to_digit(10).unwrap() as usize).unwrap()).collect()
}

/// `H⁰=ℚ; H¹..H⁶=0` with equal neighbours merged.
pub fn format_dimensions(groups: &[FGAbelianGroup]) -> String {
    let value = |d: usize| match d {
        0 => "0".to_string(),
        1 => "ℚ".to_string(),
        d => format!("ℚ^{d}"),
    };
    let mut parts = Vec::new();
    let mut i = 0;
    while i < groups.len() {
        let mut j = i;
        while j + 1 < groups.len() && groups[j + 1].free_rank == groups[i].free_rank {
            j += 1;
        }
        let label = if i == j { format!("H{}", superscript(i)) } else { format!("H{}..H{}", superscript(i), superscript(j)) };
        parts.push(format!("{label}={}", value(groups[i].free_rank)));
        i = j + 1;
    }
    parts.join("; ")
}

/// Execute one operation on a loaded model.
pub fn execute(op: &str, loaded: &Loaded, p: &Params) -> Result<Outcome, InputError> {
    match op {
        "check-gstar" => {
            let a = require(&loaded.gstar, "an [algebra]", op)?;
            let max = p.max_degree.unwrap_or(8);
            let report = check_gstar(a, max)?;
            let mut result = serde_json::to_value(&report)?;
            result["algebra"] = json!(a.name);
            if let Some(v) = report.violations.first() {
                return Ok(Outcome { status: Status::Failed, result, summary: format!("G★ relation failed: {v}") });
            }
            ok(result, format!("G★ relations hold on {} through degree {max} ({} basis monomials)", a.name, report.checked_monomials))
        }
        "weil-cohomology" => {
            let a = require(&loaded.gstar, "an [algebra]", op)?;
            let max = p.max_degree.unwrap_or(6);
            let groups = cohomology(a, max)?;
            let dims: Vec<usize> = groups.iter().map(|g| g.free_rank).collect();
            let acyclic = dims.first() == Some(&1) && dims.iter().skip(1).all(|&d| d == 0);
            let summary = format_dimensions(&groups);
            ok(json!({ "algebra": a.name, "max_degree": max, "dimensions": dims, "acyclic": acyclic, "summary": summary }), summary)
        }
        "chern-simons" => {
            let g = require(&loaded.lie, "a [lie] section", op)?;
            let text = require_param(&p.poly, "poly", op)?;
            let omega = resolve_polynomial(&text, g)?;
            let (w, _) = build_weil(g)?;
            let target = polynomial_in_weil(&omega, &w);
            match chern(chern_simons(&omega, g))? {
                Ok(cs) => ok(
                    json!({ "lie": g.name, "polynomial": text, "omega": target.to_string(), "chern_simons": cs.to_string(), "d_cs_equals_omega": true }),
                    format!("CS = {cs}"),
                ),
                Err(s) => failed(s),
            }
        }
        "equiv-cw" => {
            let a = require(&loaded.gstar, "an [algebra]", op)?;
            let theta = require(&loaded.connection, "a connection", op)?;
            let text = require_param(&p.poly, "poly", op)?;
            let ec = match chern(equivariant_connection(a, theta))? {
                Ok(ec) => ec,
                Err(s) => return failed(s),
            };
            if let Err(s) = chern(ec.verify())? {
                return failed(s);
            }
            let omega = resolve_polynomial(&text, &ec.k)?;
            let cw = match chern(equivariant_chern_weil(&omega, &ec))? {
                Ok(x) => x,
                Err(s) => return failed(s),
            };
            let cs = match chern(equivariant_chern_simons(&omega, &ec))? {
                Ok(x) => x,
                Err(s) => return failed(s),
            };
            let strings = |v: &[crate::gca::Element]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
            let theta_g = strings(&ec.theta_g.components);
            let omega_g = strings(&ec.omega_g_weil);
            let cartan = strings(&ec.omega_g_cartan);
            let summary = format!(
                "Θ_G = {}; Ω_G = {}; Cartan Ω_G = {}; ω(Ω_G) = {cw}; CS = {cs}",
                theta_g.join(", "),
                omega_g.join(", "),
                cartan.join(", ")
            );
            ok(
                json!({
                    "polynomial": text,
                    "theta_g": theta_g,
                    "omega_g": omega_g,
                    "omega_g_cartan": cartan,
                    "chern_weil": cw.to_string(),
                    "chern_simons": cs.to_string(),
                    "d_g_cs_equals_chern_weil": true,
                }),
                summary,
            )
        }
        "diffcoh" => {
            let m = require(&loaded.geometric, "a [model]", op)?;
            let degrees = degree_range(p, m.certified_max(), m.top(), op)?;
            let mut reports = Vec::new();
            let mut lines = Vec::new();
            for n in degrees {
                let r = m.diff_cohomology(n).map_err(diff_input)?;
                lines.push(format!("Ȟ^{n}({}) ≅ {}: rank {}, torsion {:?}", m.name, r.total, r.total.rank, r.total.torsion));
                for g in &r.generators {
                    let order = g.order.map(|o| format!(" of order {o}")).unwrap_or_default();
                    lines.push(format!("  {} generator{order} {}", g.kind, g.triple));
                }
                reports.push(serde_json::to_value(&r)?);
            }
            ok(json!({ "group": m.group, "normalization": m.normalization, "reports": reports }), lines.join("\n"))
        }
        "verify-ses" => {
            let m = require(&loaded.geometric, "a [model]", op)?;
            let degrees = degree_range(p, m.certified_max(), m.top(), op)?;
            let mut reports = Vec::new();
            let mut lines = Vec::new();
            let mut all = true;
            for n in degrees {
                let r = m.verify_ses(n).map_err(diff_input)?;
                all &= r.ok;
                for c in &r.checks {
                    lines.push(format!("degree {n}: {} {}", if c.passed { "pass" } else { "FAIL" }, c.name));
                    for x in &c.counterexamples {
                        lines.push(format!("  counterexample: {x}"));
                    }
                }
                reports.push(serde_json::to_value(&r)?);
            }
            let status = if all { Status::Ok } else { Status::Failed };
            Ok(Outcome { status, result: json!({ "reports": reports }), summary: lines.join("\n") })
        }
        "witness-inj" => {
            let g = require(&loaded.lie, "a [lie] section", op)?;
            let text = require_param(&p.poly, "poly", op)?;
            let omega = resolve_polynomial(&text, g)?;
            let idx: Option<Vec<usize>> = match &p.indices {
                Some(ix) if ix.contains(&0) => return Err(InputError("indices are one-based".into())),
                Some(ix) => Some(ix.iter().map(|i| i - 1).collect()),
                None => None,
            };
            let r = match chern(weil_injectivity_witness(&omega, g, idx.as_deref()))? {
                Ok(r) => r,
                Err(s) => return failed(s),
            };
            let summary = format!(
                "indices {:?}: evaluation {} vs {}!·ω = {} ({})",
                r.indices,
                r.evaluation,
                r.n,
                r.expected,
                if r.ok { "nonzero, equal" } else { "mismatch" }
            );
            let status = if r.ok { Status::Ok } else { Status::Failed };
            Ok(Outcome { status, result: serde_json::to_value(&r)?, summary })
        }
        other => Err(InputError(format!("unknown operation `{other}`"))),
    }
}

fn diff_input(e: DiffCohError) -> InputError {
    InputError(e.to_string())
}

fn degree_range(p: &Params, certified: usize, top: usize, op: &str) -> Result<Vec<usize>, InputError> {
    if let Some(n) = p.degree {
        return Ok(vec![n]);
    }
    match p.max_degree {
        Some(m) => Ok((0..=(m as usize).min(certified)).collect()),
        None if certified == usize::MAX => Ok((0..=top).collect()),
        None => Err(InputError(format!("`{op}` needs --degree or --max-degree"))),
    }
}

fn merge(flags: &Params, task: Option<&crate::modelfile::TaskSection>) -> Params {
    let t = task.cloned().unwrap_or_default();
    Params {
        max_degree: flags.max_degree.or(t.max_degree),
        degree: flags.degree.or(t.degree),
        poly: flags.poly.clone().or(t.poly),
        indices: flags.indices.clone().or(t.indices),
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn located(path: &str, e: impl std::fmt::Display) -> InputError {
    InputError(format!("{path}:{e}"))
}

/// Load the model named by the arguments; returns it with its label.
fn load_args(args: &ModelArgs) -> Result<(Loaded, String), InputError> {
    match (&args.model, &args.name) {
        (Some(path), _) => {
            let label = path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
            let text = read(path)?;
            Ok((load(&text).map_err(|e| located(&label, e))?, label))
        }
        (None, Some(name)) => {
            let text = builtin_model_text(name).ok_or_else(|| InputError(format!("unknown model `{name}`")))?;
            Ok((load(&text).map_err(|e| located(name, e))?, name.clone()))
        }
        (None, None) => Err(InputError("give a model name or --model <path>".into())),
    }
}

fn envelope(command: &str, model: &str, o: &Outcome) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "model": model,
        "status": o.status,
        "result": o.result,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("reports serialize");
    s.push('\n');
    s
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (command, result) = match &cli.command {
        Command::Fmt { path } => {
            return match read(path).and_then(|t| parse_model(&t).map_err(|e| located(&path.display().to_string(), e))) {
                Ok(f) => {
                    let _ = out.write_all(print_model(&f).as_bytes());
                    0
                }
                Err(e) => {
                    let _ = writeln!(err, "error: {}", e.0);
                    2
                }
            };
        }
        Command::Run { path, params } => {
            let r = (|| {
                let label = path.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned());
                let text = read(path)?;
                let loaded = load(&text).map_err(|e| located(&label, e))?;
                let task = loaded.file.task.clone().ok_or_else(|| InputError(format!("{label} has no [task] section")))?;
                let o = execute(&task.op, &loaded, &merge(params, Some(&task)))?;
                Ok((task.op, label, o))
            })();
            match r {
                Ok((op, label, o)) => (op, Ok((label, o))),
                Err(e) => ("run".to_string(), Err(e)),
            }
        }
        other => {
            let (name, args) = match other {
                Command::CheckGstar(a) => ("check-gstar", a),
                Command::WeilCohomology(a) => ("weil-cohomology", a),
                Command::ChernSimons(a) => ("chern-simons", a),
                Command::EquivCw(a) => ("equiv-cw", a),
                Command::Diffcoh(a) => ("diffcoh", a),
                Command::VerifySes(a) => ("verify-ses", a),
                Command::WitnessInj(a) => ("witness-inj", a),
                Command::Run { .. } | Command::Fmt { .. } => unreachable!(),
            };
            let r = load_args(args).and_then(|(loaded, label)| {
                let p = merge(&args.params, None);
                Ok((label, execute(name, &loaded, &p)?))
            });
            (name.to_string(), r)
        }
    };
    match result {
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.0);
            2
        }
        Ok((label, o)) => {
            let text = envelope(&command, &label, &o);
            let written = match &cli.json {
                Some(path) => fs::write(path, &text).map_err(|e| e.to_string()),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: cannot write report: {e}");
                return 2;
            }
            let _ = writeln!(err, "{}", o.summary);
            match o.status {
                Status::Ok => 0,
                Status::Failed => 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("eqcoh").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn weil_cohomology_su2() {
        let (code, out, err) = call(&["weil-cohomology", "su2", "--max-degree", "6"]);
        assert_eq!(code, 0);
        assert_eq!(err.trim(), "H⁰=ℚ; H¹..H⁶=0");
        assert!(out.contains("\"schema_version\": 1"));
    }

    #[test]
    fn chern_simons_u1() {
        let (code, _, err) = call(&["chern-simons", "u1", "--poly", "u^2"]);
        assert_eq!((code, err.trim()), (0, "CS = θ·u"));
    }

    #[test]
    fn diffcoh_cp8() {
        let (code, _, err) = call(&["diffcoh", "cp8", "--degree", "4"]);
        assert_eq!(code, 0);
        assert!(err.contains("rank 1, torsion []"), "{err}");
        assert!(err.contains("(α^2, 0, t^2)"), "{err}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["diffcoh", "nosuchmodel", "--degree", "1"]).0, 2);
        assert_eq!(call(&["diffcoh", "cp8", "--degree", "40"]).0, 2);
        assert_eq!(call(&["chern-simons", "su2", "--poly", "u1"]).0, 2);
        assert_eq!(call(&["witness-inj", "su2", "--poly", "sigma2", "--indices", "1,2"]).0, 1);
        assert_eq!(call(&["bogus"]).0, 2);
    }

    #[test]
    fn dimension_formatting() {
        let g = |d| FGAbelianGroup::free(d);
        assert_eq!(format_dimensions(&[g(1), g(0), g(0), g(2), g(1)]), "H⁰=ℚ; H¹..H²=0; H³=ℚ^2; H⁴=ℚ");
    }
}
