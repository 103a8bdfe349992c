//! `ccfinder` command line front end.
//!
//! ```text
//! ccfinder <command> [args] [--tol T] [--format json|csv] [--out PATH]
//!
//!   evaluate X Y [M]       m1, m2, F; with M also the reduced λ values and the
//!                          full residual of the realized configuration
//!   trace Y_MIN Y_MAX STEP branch x = φ(y) through the hexagon
//!   verify FILE            CC check of a JSON configuration file
//!   masses X Y             nullspace masses for the family geometry
//!   certify X Y            ∂m1/∂x, ∂m2/∂x, ∂F/∂x
//! ```
//!
//! Numeric arguments accept the token `sqrt3`. Exit codes: 0 success, 2 input
//! or domain error, 3 singular closed form, 4 anchor failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::continuation::{
    ift_certificate, trace_curve_with, CurveTrace, IftCertificate, TraceOptions,
    DEFAULT_ROOT_TOLERANCE, DEGENERACY_THRESHOLD,
};
use crate::error::{CcError, Result};
use crate::family::{self, build_configuration, FamilyEvaluation, FamilyParams};
use crate::geometry::PlanarConfiguration;
use crate::mass_solver::{check_symmetry_relations, solve_masses, MassSolution, SymmetryReport, RANK_TOLERANCE};
use crate::potential::{cc_residual_direct, cc_residual_weighted, lambda_of, CcScalars};

pub const DEFAULT_VERIFY_TOLERANCE: f64 = 1e-10;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;
pub const EXIT_ANCHOR: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "ccfinder", version, about = "Central configurations of the six-body two-triangle family")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Tolerance: verify threshold, trace root tolerance, or masses rank threshold.
    #[arg(long, global = true, value_parser = parse_scalar)]
    pub tol: Option<f64>,

    /// Output format. Defaults to csv for trace and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form masses m1, m2 and F = m1 - m2 at (x, y).
    #[command(allow_negative_numbers = true)]
    Evaluate {
        #[arg(value_parser = parse_scalar)]
        x: f64,
        #[arg(value_parser = parse_scalar)]
        y: f64,
        #[arg(value_parser = parse_scalar)]
        m: Option<f64>,
    },
    /// Trace the solution branch x = φ(y) over [y_min, y_max].
    #[command(allow_negative_numbers = true)]
    Trace {
        #[arg(value_parser = parse_scalar)]
        y_min: f64,
        #[arg(value_parser = parse_scalar)]
        y_max: f64,
        #[arg(value_parser = parse_scalar)]
        step: f64,
    },
    /// Check whether a configuration file is a central configuration.
    Verify { file: PathBuf },
    /// Solve for all mass vectors making the family geometry central.
    #[command(allow_negative_numbers = true)]
    Masses {
        #[arg(value_parser = parse_scalar)]
        x: f64,
        #[arg(value_parser = parse_scalar)]
        y: f64,
    },
    /// Finite-difference x-derivatives of m1, m2 and F.
    #[command(allow_negative_numbers = true)]
    Certify {
        #[arg(value_parser = parse_scalar)]
        x: f64,
        #[arg(value_parser = parse_scalar)]
        y: f64,
    },
}

/// A decimal number or the token `sqrt3`.
pub fn parse_scalar(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("sqrt3") {
        return Ok(3f64.sqrt());
    }
    t.parse::<f64>()
        .map_err(|e| format!("'{s}' is not a number: {e}"))
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{s}' is not finite"))
            }
        })
}

pub fn exit_code(err: &CcError) -> i32 {
    match err {
        CcError::Singular { .. } => EXIT_SINGULAR,
        CcError::AnchorFailure(_) => EXIT_ANCHOR,
        _ => EXIT_INPUT,
    }
}

/// Seventeen significant digits, which round-trips every `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Pretty JSON with every float written by [`format_f64`].
struct Sig17Formatter<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl serde_json::ser::Formatter for Sig17Formatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let formatter = Sig17Formatter {
        inner: serde_json::ser::PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value
        .serialize(&mut ser)
        .map_err(|e| CcError::Io(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CcError::Io(e.to_string()))
}

/// Flattens a report into `key,value` rows; nested keys are joined with `.`
/// and array entries by index.
pub fn to_key_value_csv<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| CcError::Io(e.to_string()))?;
    let mut rows = Vec::new();
    flatten("", &v, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&k);
        out.push(',');
        out.push_str(&v);
        out.push('\n');
    }
    Ok(out)
}

fn flatten(prefix: &str, v: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    use serde_json::Value;
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, rows)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, rows)),
        Value::Number(n) => {
            let text = match n.as_f64() {
                Some(f) if !n.is_i64() && !n.is_u64() => format_f64(f),
                _ => n.to_string(),
            };
            rows.push((prefix.to_string(), text));
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::Bool(b) => rows.push((prefix.to_string(), b.to_string())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
    }
}

/// Curve table with header `y,x,m,lambda,dFdx,residual`, ascending in `y`.
pub fn trace_to_csv(trace: &CurveTrace) -> String {
    let mut out = String::from("y,x,m,lambda,dFdx,residual\n");
    for p in &trace.points {
        let row = [p.y, p.x, p.m, p.lambda, p.dfdx, p.residual_norm]
            .map(format_f64)
            .join(",");
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Reads the rows of a [`trace_to_csv`] table back as `(y, x, m)`.
pub fn read_trace_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("y,x,m,lambda,dFdx,residual") => {}
        other => return Err(CcError::Parse(format!("unexpected trace header {other:?}"))),
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let cols: Vec<f64> = l
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|e| CcError::Parse(format!("{c}: {e}"))))
                .collect::<Result<_>>()?;
            if cols.len() != 6 {
                return Err(CcError::Parse(format!("expected 6 columns in '{l}'")));
            }
            Ok((cols[0], cols[1], cols[2]))
        })
        .collect()
}

/// Input of `verify`: `{"positions": [[x, y], …], "masses": [m, …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub positions: Vec<[f64; 2]>,
    pub masses: Vec<f64>,
}

impl ConfigFile {
    pub fn from_configuration(config: &PlanarConfiguration) -> Self {
        Self {
            positions: config.positions().iter().map(|q| [q.x, q.y]).collect(),
            masses: config.masses().to_vec(),
        }
    }

    pub fn to_configuration(&self) -> Result<PlanarConfiguration> {
        PlanarConfiguration::from_pairs(&self.positions, &self.masses)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CcError::Parse(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluateReport {
    #[serde(flatten)]
    pub evaluation: FamilyEvaluation,
    /// `U / I` of the realized configuration, when `m` is given.
    pub lambda_full: Option<f64>,
    /// Direct CC residual at `U / I`, when `m` is given.
    pub residual: Option<f64>,
}

pub fn cmd_evaluate(x: f64, y: f64, m: Option<f64>) -> Result<EvaluateReport> {
    let evaluation = family::evaluate(x, y, m)?;
    let (lambda_full, residual) = match m {
        Some(m) => {
            let config = build_configuration(&FamilyParams::new(x, y, m)?);
            let lambda = lambda_of(&config)?.lambda;
            (Some(lambda), Some(cc_residual_direct(&config, lambda)?.max_norm))
        }
        None => (None, None),
    };
    Ok(EvaluateReport {
        evaluation,
        lambda_full,
        residual,
    })
}

pub fn cmd_trace(y_min: f64, y_max: f64, step: f64, tol: Option<f64>) -> Result<CurveTrace> {
    let options = TraceOptions {
        step,
        root_tolerance: tol.unwrap_or(DEFAULT_ROOT_TOLERANCE),
        ..TraceOptions::default()
    };
    if !(options.root_tolerance > 0.0) {
        return Err(CcError::Domain(format!("tolerance {} must be positive", options.root_tolerance)));
    }
    trace_curve_with(y_min, y_max, options)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSummary {
    pub max_norm: f64,
    pub per_body: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub bodies: usize,
    /// Center of mass of the input, removed before checking.
    pub center_of_mass: [f64; 2],
    #[serde(flatten)]
    pub scalars: CcScalars,
    pub direct: ResidualSummary,
    pub weighted: ResidualSummary,
    pub tol: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Centers `config`, sets `λ = U/I` and passes when both residual forms stay
/// below `tol`.
pub fn verify_configuration(config: &PlanarConfiguration, tol: f64) -> Result<VerifyReport> {
    if !(tol > 0.0) {
        return Err(CcError::Domain(format!("tolerance {tol} must be positive")));
    }
    let cm = config.center_of_mass();
    let centered = config.translate_to_cm();
    let scalars = lambda_of(&centered)?;
    let summarize = |r: crate::potential::ResidualReport| ResidualSummary {
        max_norm: r.max_norm,
        per_body: r.per_body.iter().map(|v| [v.x, v.y]).collect(),
    };
    let direct = summarize(cc_residual_direct(&centered, scalars.lambda)?);
    let weighted = summarize(cc_residual_weighted(
        &centered,
        scalars.lambda / scalars.total_mass,
    )?);
    let verdict = if direct.max_norm < tol && weighted.max_norm < tol {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(VerifyReport {
        bodies: config.len(),
        center_of_mass: [cm.x, cm.y],
        scalars,
        direct,
        weighted,
        tol,
        verdict,
    })
}

pub fn cmd_verify(path: &Path, tol: Option<f64>) -> Result<VerifyReport> {
    let config = ConfigFile::read(path)?.to_configuration()?;
    verify_configuration(&config, tol.unwrap_or(DEFAULT_VERIFY_TOLERANCE))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassesReport {
    #[serde(flatten)]
    pub solution: MassSolution,
    pub symmetry: Option<SymmetryReport>,
    pub message: String,
}

pub fn cmd_masses(x: f64, y: f64, tol: Option<f64>) -> Result<MassesReport> {
    let solution = solve_masses(x, y, tol.unwrap_or(RANK_TOLERANCE))?;
    let symmetry = match solution.masses {
        Some(m) if solution.nullspace_dim == 1 => Some(check_symmetry_relations(&m, y)?),
        _ => None,
    };
    let message = match (solution.nullspace_dim, solution.valid) {
        (0, _) => "no central configuration at this geometry".to_string(),
        (1, true) => "central configuration found".to_string(),
        (1, false) => "nullspace vector is not a physical solution".to_string(),
        (d, _) => format!("degenerate rank: nullspace dimension {d}"),
    };
    Ok(MassesReport {
        solution,
        symmetry,
        message,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    #[serde(flatten)]
    pub certificate: IftCertificate,
    pub degeneracy_threshold: f64,
    pub certified: bool,
}

pub fn cmd_certify(x: f64, y: f64) -> Result<CertifyReport> {
    let certificate = ift_certificate(x, y)?;
    Ok(CertifyReport {
        certificate,
        degeneracy_threshold: DEGENERACY_THRESHOLD,
        certified: certificate.certifies(DEGENERACY_THRESHOLD),
    })
}

fn render<T: Serialize>(value: &T, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => to_json(value),
        OutputFormat::Csv => to_key_value_csv(value),
    }
}

/// Runs a parsed command and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<String> {
    let format = cli.format.unwrap_or(match cli.command {
        Command::Trace { .. } => OutputFormat::Csv,
        _ => OutputFormat::Json,
    });
    match &cli.command {
        Command::Evaluate { x, y, m } => render(&cmd_evaluate(*x, *y, *m)?, format),
        Command::Trace { y_min, y_max, step } => {
            let trace = cmd_trace(*y_min, *y_max, *step, cli.tol)?;
            match format {
                OutputFormat::Csv => Ok(trace_to_csv(&trace)),
                OutputFormat::Json => to_json(&trace),
            }
        }
        Command::Verify { file } => render(&cmd_verify(file, cli.tol)?, format),
        Command::Masses { x, y } => render(&cmd_masses(*x, *y, cli.tol)?, format),
        Command::Certify { x, y } => render(&cmd_certify(*x, *y)?, format),
    }
}

/// Parses `args`, runs, writes the output and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_SUCCESS };
            let _ = if code == EXIT_SUCCESS {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    let output = match execute(&cli) {
        Ok(output) => output,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &output),
        None => stdout.write_all(output.as_bytes()),
    };
    match written {
        Ok(()) => EXIT_SUCCESS,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}
