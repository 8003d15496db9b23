//! Command-line front end: map description files and subcommands.
//!
//! A description is a TOML file with a `[model]` table and an optional
//! `[options]` table:
//!
//! ```toml
//! [model]
//! kind = "p1"            # or "affine", "poly-chart"
//! p = 3
//! numerator = "x^2 - 4*x + 3"
//! denominator = "1"
//!
//! [options]
//! precision = 6
//! ```
//!
//! Affine models give `variables`, `relations` and `map` as string arrays;
//! polynomial charts give `polynomial` and optionally `val_floor`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::cubic::{cubic_report, CubicError};
use crate::engine::{Certification, EngineError, Session};
use crate::models::{AffineModel, ExactP1, ExactPoint, Extension, Model, ModelError, PolyChart, RationalMapP1};
use crate::padic::{PadicError, DEFAULT_PRECISION};
use crate::parse::ParseError;
use crate::poly::IntPolynomial;
use crate::report::{self, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid description: {0}")]
    Description(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Cubic(#[from] CubicError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Description(_) | CliError::Parse(_) => EXIT_USAGE,
            CliError::Model(e) => model_code(e),
            CliError::Engine(e) => engine_code(e),
            CliError::Cubic(CubicError::Engine(e)) => engine_code(e),
            CliError::Cubic(CubicError::Model(e)) => model_code(e),
            CliError::Cubic(CubicError::Padic(e)) => padic_code(e),
            CliError::Cubic(_) => EXIT_USAGE,
        }
    }
}

fn padic_code(e: &PadicError) -> i32 {
    match e {
        PadicError::PrecisionExhausted(_) => EXIT_PRECISION,
        _ => EXIT_USAGE,
    }
}

fn model_code(e: &ModelError) -> i32 {
    match e {
        ModelError::Padic(e) => padic_code(e),
        _ => EXIT_USAGE,
    }
}

fn engine_code(e: &EngineError) -> i32 {
    match e {
        EngineError::Rejected(_) => EXIT_REJECTED,
        EngineError::Model(e) => model_code(e),
        e if e.is_precision_related() => EXIT_PRECISION,
        _ => EXIT_USAGE,
    }
}

/// The kinds of model a description can ask for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapKind {
    P1 { variable: String, numerator: String, denominator: String },
    Affine { variables: Vec<String>, relations: Vec<String>, map: Vec<String> },
    PolyChart { variable: String, polynomial: String, val_floor: Option<u32> },
}

/// A parsed description file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapDescription {
    pub p: u64,
    pub kind: MapKind,
    pub precision: Option<u32>,
    pub point: Option<String>,
}

fn field_str(t: &toml::Table, key: &str) -> Result<Option<String>, CliError> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(CliError::Description(format!("'{key}' must be a string"))),
    }
}

fn field_uint(t: &toml::Table, key: &str) -> Result<Option<u64>, CliError> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
        Some(_) => Err(CliError::Description(format!("'{key}' must be a nonnegative integer"))),
    }
}

fn field_list(t: &toml::Table, key: &str) -> Result<Option<Vec<String>>, CliError> {
    match t.get(key) {
        None => Ok(None),
        Some(toml::Value::Array(a)) => a
            .iter()
            .map(|v| match v {
                toml::Value::String(s) => Ok(s.clone()),
                _ => Err(CliError::Description(format!("'{key}' must be a list of strings"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
        Some(_) => Err(CliError::Description(format!("'{key}' must be a list of strings"))),
    }
}

fn required<T>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Description(format!("missing '{key}'")))
}

fn check_keys(t: &toml::Table, table: &str, allowed: &[&str]) -> Result<(), CliError> {
    match t.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::Description(format!("unknown key '{k}' in [{table}]"))),
        None => Ok(()),
    }
}

fn small(v: Option<u64>, key: &str) -> Result<Option<u32>, CliError> {
    v.map(|x| u32::try_from(x).map_err(|_| CliError::Description(format!("'{key}' is too large"))))
        .transpose()
}

impl MapDescription {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Description(e.to_string()))?;
        check_keys(&doc, "", &["model", "options"])?;
        let model = match doc.get("model") {
            Some(toml::Value::Table(t)) => t,
            _ => return Err(CliError::Description("missing [model] table".into())),
        };
        let empty = toml::Table::new();
        let options = match doc.get("options") {
            Some(toml::Value::Table(t)) => t,
            None => &empty,
            Some(_) => return Err(CliError::Description("[options] must be a table".into())),
        };
        check_keys(options, "options", &["precision", "point"])?;
        let p = required(field_uint(model, "p")?, "p")?;
        let kind = required(field_str(model, "kind")?, "kind")?;
        let kind = match kind.as_str() {
            "p1" => {
                check_keys(model, "model", &["kind", "p", "variable", "numerator", "denominator"])?;
                MapKind::P1 {
                    variable: field_str(model, "variable")?.unwrap_or_else(|| "x".into()),
                    numerator: required(field_str(model, "numerator")?, "numerator")?,
                    denominator: field_str(model, "denominator")?.unwrap_or_else(|| "1".into()),
                }
            }
            "affine" => {
                check_keys(model, "model", &["kind", "p", "variables", "relations", "map"])?;
                MapKind::Affine {
                    variables: required(field_list(model, "variables")?, "variables")?,
                    relations: field_list(model, "relations")?.unwrap_or_default(),
                    map: required(field_list(model, "map")?, "map")?,
                }
            }
            "poly-chart" => {
                check_keys(model, "model", &["kind", "p", "variable", "polynomial", "val_floor"])?;
                MapKind::PolyChart {
                    variable: field_str(model, "variable")?.unwrap_or_else(|| "z".into()),
                    polynomial: required(field_str(model, "polynomial")?, "polynomial")?,
                    val_floor: small(field_uint(model, "val_floor")?, "val_floor")?,
                }
            }
            other => return Err(CliError::Description(format!("unknown kind '{other}'"))),
        };
        Ok(MapDescription {
            p,
            kind,
            precision: small(field_uint(options, "precision")?, "precision")?,
            point: field_str(options, "point")?,
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    /// The model, with an optional override of the polynomial-chart floor.
    pub fn model(&self, floor: Option<u32>) -> Result<Model, CliError> {
        let p = self.p;
        match &self.kind {
            MapKind::P1 { variable, numerator, denominator } => {
                let vars = [variable.as_str()];
                let num = IntPolynomial::parse(numerator, &vars, Some(p))?;
                let den = IntPolynomial::parse(denominator, &vars, Some(p))?;
                Ok(Model::P1(RationalMapP1::from_fraction(p, &num, &den)?))
            }
            MapKind::Affine { variables, relations, map } => {
                let parse = |s: &String| IntPolynomial::parse(s, variables, Some(p));
                let rels = relations.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
                let maps = map.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
                Ok(Model::Affine(AffineModel::new(p, variables.clone(), rels, maps)?))
            }
            MapKind::PolyChart { variable, polynomial, val_floor } => {
                let f = IntPolynomial::parse(polynomial, &[variable.as_str()], Some(p))?;
                Ok(Model::PolyChart(PolyChart::new(p, f, floor.or(*val_floor))?))
            }
        }
    }

    /// The polynomial behind a polynomial chart, or a `p1` map with
    /// denominator 1.
    pub fn polynomial(&self) -> Result<IntPolynomial, CliError> {
        match &self.kind {
            MapKind::PolyChart { variable, polynomial, .. } => {
                Ok(IntPolynomial::parse(polynomial, &[variable.as_str()], Some(self.p))?)
            }
            MapKind::P1 { variable, numerator, denominator } => {
                let vars = [variable.as_str()];
                let den = IntPolynomial::parse(denominator, &vars, Some(self.p))?;
                if den != IntPolynomial::from_int(&vars, 1) {
                    return Err(CliError::Description("the cubic workflow needs a polynomial map".into()));
                }
                Ok(IntPolynomial::parse(numerator, &vars, Some(self.p))?)
            }
            MapKind::Affine { .. } => {
                Err(CliError::Description("the cubic workflow needs a univariate polynomial".into()))
            }
        }
    }
}

fn rational(text: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Description(format!("cannot read '{text}' as a rational number"));
    let t = text.trim();
    match t.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Read a point: `inf`, a rational, or a parenthesized tuple of rationals.
pub fn parse_point(model: &Model, text: &str) -> Result<ExactPoint, CliError> {
    let t = text.trim();
    match model {
        Model::P1(_) if matches!(t, "inf" | "infinity" | "∞") => Ok(ExactPoint::P1(ExactP1::Infinity)),
        Model::P1(_) => Ok(ExactPoint::P1(ExactP1::Finite(rational(t)?))),
        Model::PolyChart(_) => Ok(ExactPoint::Window(rational(t)?)),
        Model::Affine(m) => {
            let inner = t.trim_start_matches('(').trim_end_matches(')');
            let coords = inner.split(',').map(rational).collect::<Result<Vec<_>, _>>()?;
            if coords.len() != m.ambient_dimension() {
                return Err(CliError::Description(format!(
                    "point has {} coordinates, model has {}",
                    coords.len(),
                    m.ambient_dimension()
                )));
            }
            Ok(ExactPoint::Affine(coords))
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "padic-periods", version, about = "Periodic points of p-adic maps and their period bounds")]
pub struct Cli {
    /// Emit canonical JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Map description file.
    pub file: PathBuf,
    /// Precision k (points are computed modulo p^k).
    #[arg(long)]
    pub precision: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model checks, special-fiber statistics, d' and bounds.
    Analyze(Common),
    /// Certified periodic points.
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Valuation floor override for polynomial charts.
        #[arg(long)]
        val_floor: Option<u32>,
    },
    /// Period decomposition of the cycle through one point.
    Decompose {
        #[command(flatten)]
        common: Common,
        /// A point on the cycle: a rational, "inf", or a tuple like "(1, 3)".
        #[arg(long)]
        point: Option<String>,
    },
    /// Enumerate, decompose and check every claimed inequality.
    Verify(Common),
    /// Fixed points, repelling test and bound for a cubic polynomial.
    Cubic {
        #[command(flatten)]
        common: Common,
        /// Valuation floor override for the window.
        #[arg(long)]
        val_floor: Option<u32>,
    },
}

struct Job {
    desc: MapDescription,
    input: String,
    k: u32,
}

fn load(common: &Common) -> Result<Job, CliError> {
    let input = std::fs::read_to_string(&common.file)
        .map_err(|source| CliError::Io { path: common.file.display().to_string(), source })?;
    let desc = MapDescription::from_toml(&input)?;
    let k = common.precision.or(desc.precision).unwrap_or(DEFAULT_PRECISION);
    Ok(Job { desc, input, k })
}

fn session(job: &Job, floor: Option<u32>) -> Result<Session, CliError> {
    Ok(Session::new(job.desc.model(floor)?, job.k)?)
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Analyze(common) => {
            let job = load(common)?;
            let model = job.desc.model(None)?;
            let extension = model.check_extends(job.k)?;
            if let Extension::Rejected(why) = &extension {
                return Err(EngineError::Rejected(why.clone()).into());
            }
            Ok(report::analyze(&model, job.k, &extension, &job.input)?)
        }
        Command::Enumerate { common, val_floor } => {
            let job = load(common)?;
            if val_floor.is_some() && !matches!(job.desc.kind, MapKind::PolyChart { .. }) {
                return Err(CliError::Description("--val-floor applies to poly-chart models only".into()));
            }
            Ok(report::enumerate(&session(&job, *val_floor)?, &job.input)?)
        }
        Command::Decompose { common, point } => {
            let job = load(common)?;
            let s = session(&job, None)?;
            let text = point
                .clone()
                .or_else(|| job.desc.point.clone())
                .ok_or_else(|| CliError::Description("decompose needs --point".into()))?;
            let exact = parse_point(s.model(), &text)?;
            let pt = s.reduce_exact(&exact)?;
            let raw = s.cycle_through(&pt)?;
            match s.certify(&raw)? {
                Certification::Certified(c) => Ok(report::decompose(&s, &c, &job.input)?),
                Certification::Uncertified(reason) => Err(EngineError::Padic(PadicError::PrecisionExhausted(
                    format!("cycle {raw} is not certified at k = {}: {reason}", job.k),
                ))
                .into()),
            }
        }
        Command::Verify(common) => {
            let job = load(common)?;
            Ok(report::verify(&session(&job, None)?, &job.input)?)
        }
        Command::Cubic { common, val_floor } => {
            let job = load(common)?;
            let phi = job.desc.polynomial()?;
            let floor = val_floor.or(match &job.desc.kind {
                MapKind::PolyChart { val_floor, .. } => *val_floor,
                _ => None,
            });
            let r = cubic_report(&phi, job.desc.p, job.k, floor)?;
            Ok(report::cubic(&r, &job.input)?)
        }
    }
}

/// Run with explicit arguments (the first is the program name) and return
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let body = if cli.json { report.to_json_string() } else { report.text.clone() };
            let _ = out.write_all(body.as_bytes());
            for f in &report.failures {
                let _ = writeln!(err, "error: {f}");
            }
            if report.failures.is_empty() {
                EXIT_OK
            } else {
                EXIT_PRECISION
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_each_kind() {
        let d = MapDescription::from_toml(
            "[model]\nkind = \"p1\"\np = 3\nnumerator = \"x^2 - 4*x + 3\"\n[options]\nprecision = 6\n",
        )
        .unwrap();
        assert_eq!(d.precision, Some(6));
        assert!(matches!(d.model(None).unwrap(), Model::P1(_)));

        let d = MapDescription::from_toml(
            "[model]\nkind = \"affine\"\np = 3\nvariables = [\"x\", \"y\"]\nrelations = [\"x*y - 3\"]\nmap = [\"y\", \"x\"]\n",
        )
        .unwrap();
        assert!(matches!(d.model(None).unwrap(), Model::Affine(_)));

        let d = MapDescription::from_toml("[model]\nkind = \"poly-chart\"\np = 3\npolynomial = \"z + z^2 + 3*z^3\"\n").unwrap();
        let Model::PolyChart(c) = d.model(Some(3)).unwrap() else { panic!() };
        assert_eq!(c.floor(), 3);
    }

    #[test]
    fn rejects_bad_descriptions() {
        for text in [
            "[model]\nkind = \"p1\"\n",
            "[model]\nkind = \"cone\"\np = 3\n",
            "[model]\nkind = \"p1\"\np = 3\nnumerator = \"x\"\ncolour = \"red\"\n",
            "not toml at all [",
        ] {
            let e = MapDescription::from_toml(text).unwrap_err();
            assert_eq!(e.exit_code(), EXIT_USAGE, "{text}");
        }
        let d = MapDescription::from_toml("[model]\nkind = \"p1\"\np = 3\nnumerator = \"x/3\"\n").unwrap();
        assert_eq!(d.model(None).unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn points() {
        let d = MapDescription::from_toml("[model]\nkind = \"p1\"\np = 3\nnumerator = \"x^2\"\n").unwrap();
        let m = d.model(None).unwrap();
        assert_eq!(parse_point(&m, "inf").unwrap(), ExactPoint::P1(ExactP1::Infinity));
        assert_eq!(
            parse_point(&m, "-1/4").unwrap(),
            ExactPoint::P1(ExactP1::Finite(BigRational::new((-1).into(), 4.into())))
        );
        assert!(parse_point(&m, "1/0").is_err());
    }
}
