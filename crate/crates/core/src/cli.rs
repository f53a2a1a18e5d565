//! Command-line front end.
//!
//! Exit codes: 0 success, 1 not correctable, 2 bad input, 3 dimension
//! mismatch, 4 theorem violation or internal inconsistency, 5 unwritable
//! output path.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::channels::{random_channel, KrausChannel};
use crate::correction::{self, CorrectionResult};
use crate::error::Error;
use crate::info::{self, ChannelReport, DpiReport};
use crate::io::{self, ChannelFamily, ChannelSpec, MatrixFile, SpecError, StateSpec, SweepRange};
use crate::states::{random_density, DensityOperator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CORRECTABLE: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_UNWRITABLE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "qchannel", version, about = "Entanglement fidelity, coherent information and perfect error correction for quantum channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fidelity, entropy exchange and coherent information of one channel.
    Analyze(AnalyzeArgs),
    /// Check S(ρ) ≥ I_e1 ≥ I_e12 for two channels applied in sequence.
    Dpi(DpiArgs),
    /// Decide perfect correctability and build the recovery channel.
    Correct(CorrectArgs),
    /// Tabulate the report over a one-parameter channel family.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub channel: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DpiArgs {
    #[arg(long, required_unless_present = "random")]
    pub state: Option<String>,
    #[arg(long, required_unless_present = "random")]
    pub channel: Option<String>,
    #[arg(long, required_unless_present = "random")]
    pub channel2: Option<String>,
    /// Random state and channels, `d=<dim>`.
    #[arg(long, conflicts_with_all = ["state", "channel", "channel2"])]
    pub random: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CorrectArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long)]
    pub channel: String,
    /// Directory receiving the recovery operators as A_<i>.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = correction::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub state: String,
    /// Channel spec containing a `<p>` placeholder.
    #[arg(long)]
    pub channel: String,
    /// `start,stop,steps`
    #[arg(long)]
    pub range: String,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Error carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        Self::new(EXIT_BAD_INPUT, e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. } => EXIT_DIMENSION,
            Error::Inconsistent { .. } | Error::ToleranceInconsistency { .. } => EXIT_VIOLATION,
            _ => EXIT_BAD_INPUT,
        };
        Self::new(code, e.to_string())
    }
}

/// Fixed six-decimal rendering without a negative zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

fn key_values(fields: &[(&str, f64)]) -> String {
    let mut out = String::new();
    for (k, v) in fields {
        let _ = writeln!(out, "{k}={}", fmt6(*v));
    }
    out
}

fn load_state(spec: &str) -> Result<DensityOperator, CliError> {
    Ok(StateSpec::parse(spec)?.resolve()?)
}

fn load_channel(spec: &str) -> Result<KrausChannel, CliError> {
    Ok(ChannelSpec::parse(spec)?.resolve()?)
}

fn check_dims(rho: &DensityOperator, chs: &[&KrausChannel]) -> Result<(), CliError> {
    for ch in chs {
        if ch.dim() != rho.dim() {
            return Err(CliError::new(
                EXIT_DIMENSION,
                format!("state has dimension {} but channel acts on dimension {}", rho.dim(), ch.dim()),
            ));
        }
    }
    Ok(())
}

pub fn render_report(r: &ChannelReport, format: Format) -> String {
    match format {
        Format::Text => key_values(&r.fields()),
        Format::Json => serde_json::to_string_pretty(r).expect("report serializes") + "\n",
    }
}

pub fn render_dpi(r: &DpiReport, format: Format) -> String {
    let verdict = if r.chain_holds() { "PASS" } else { "FAIL" };
    match format {
        Format::Text => {
            let mut out = key_values(&r.fields());
            let _ = writeln!(
                out,
                "chain: {} >= {} >= {} {verdict}",
                fmt6(r.input_entropy),
                fmt6(r.ie_stage1),
                fmt6(r.ie_both)
            );
            out
        }
        Format::Json => {
            let mut v = serde_json::to_value(r).expect("report serializes");
            v["chain_holds"] = Value::Bool(r.chain_holds());
            serde_json::to_string_pretty(&v).expect("json value") + "\n"
        }
    }
}

pub fn render_correction(r: &CorrectionResult, format: Format) -> String {
    let verdict = if r.correctable { "CORRECTABLE" } else { "NOT CORRECTABLE" };
    match format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "deficit={}", fmt6(r.deficit));
            let _ = writeln!(out, "verdict={verdict}");
            if let Some(f) = r.verified_fidelity {
                let _ = writeln!(out, "verified_fidelity={}", fmt6(f));
            }
            let _ = writeln!(out, "product_defect={}", fmt6(r.product_defect));
            if let Some(c) = &r.corrector {
                let _ = writeln!(out, "corrector_operators={}", c.len());
            }
            out
        }
        Format::Json => {
            let mut m = Map::new();
            m.insert("deficit".into(), json!(r.deficit));
            m.insert("correctable".into(), json!(r.correctable));
            m.insert("verdict".into(), json!(verdict));
            m.insert("verified_fidelity".into(), json!(r.verified_fidelity));
            m.insert("product_defect".into(), json!(r.product_defect));
            let ops: Option<Vec<MatrixFile>> = r
                .corrector
                .as_ref()
                .map(|c| c.operators().iter().map(MatrixFile::from_matrix).collect());
            m.insert("corrector".into(), json!(ops));
            serde_json::to_string_pretty(&Value::Object(m)).expect("json value") + "\n"
        }
    }
}

/// Runs a parsed command, writing the report to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let (text, code) = match cli.command {
        Command::Analyze(a) => analyze(&a)?,
        Command::Dpi(a) => dpi(&a)?,
        Command::Correct(a) => correct(&a)?,
        Command::Sweep(a) => sweep(&a)?,
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::new(EXIT_UNWRITABLE, format!("writing report: {e}")))?;
    Ok(code)
}

fn analyze(a: &AnalyzeArgs) -> Result<(String, i32), CliError> {
    let rho = load_state(&a.state)?;
    let ch = load_channel(&a.channel)?;
    check_dims(&rho, &[&ch])?;
    let r = info::report(&rho, &ch)?;
    let code = if r.fano_holds() && r.coherent_bound_holds() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok((render_report(&r, a.format), code))
}

fn parse_random(spec: &str) -> Result<usize, CliError> {
    let d = spec
        .strip_prefix("d=")
        .and_then(|d| d.parse::<usize>().ok())
        .filter(|&d| d >= 1)
        .ok_or_else(|| CliError::new(EXIT_BAD_INPUT, format!("bad token `{spec}`: expected d=<dim>")))?;
    Ok(d)
}

fn dpi(a: &DpiArgs) -> Result<(String, i32), CliError> {
    let (rho, ch1, ch2) = match &a.random {
        Some(spec) => {
            let d = parse_random(spec)?;
            let s = a.seed;
            (
                random_density(d, d, s)?,
                random_channel(d, 1 + (s as usize % 4), s.wrapping_add(1))?,
                random_channel(d, 1 + ((s as usize / 4) % 4), s.wrapping_add(2))?,
            )
        }
        None => (
            load_state(a.state.as_deref().unwrap_or_default())?,
            load_channel(a.channel.as_deref().unwrap_or_default())?,
            load_channel(a.channel2.as_deref().unwrap_or_default())?,
        ),
    };
    check_dims(&rho, &[&ch1, &ch2])?;
    let r = info::dpi_report(&rho, &ch1, &ch2)?;
    let code = if r.chain_holds() { EXIT_OK } else { EXIT_VIOLATION };
    Ok((render_dpi(&r, a.format), code))
}

fn correct(a: &CorrectArgs) -> Result<(String, i32), CliError> {
    let rho = load_state(&a.state)?;
    let ch = load_channel(&a.channel)?;
    check_dims(&rho, &[&ch])?;
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(CliError::new(EXIT_BAD_INPUT, format!("bad token `{}`: tolerance must be positive", a.tol)));
    }
    let r = correction::construct_corrector(&rho, &ch, a.tol)?;
    if let (Some(dir), Some(corrector)) = (&a.out, &r.corrector) {
        io::write_kraus_dir(dir, corrector)
            .map_err(|e| CliError::new(EXIT_UNWRITABLE, format!("cannot write to {}: {e}", dir.display())))?;
    }
    let code = if r.correctable {
        EXIT_OK
    } else {
        EXIT_NOT_CORRECTABLE
    };
    Ok((render_correction(&r, a.format), code))
}

pub const SWEEP_HEADER: &str = "p,F_e,S_e,I_e,S_in,S_out,deficit";

fn sweep(a: &SweepArgs) -> Result<(String, i32), CliError> {
    let rho = load_state(&a.state)?;
    let family = ChannelFamily::parse(&a.channel)?;
    let range = SweepRange::parse(&a.range)?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for p in range.points() {
        let ch = family.at(p)?.resolve()?;
        check_dims(&rho, &[&ch])?;
        let r = info::report(&rho, &ch)?;
        let deficit = (r.input_entropy - r.coherent_information).max(0.0);
        let row = [
            p,
            r.entanglement_fidelity,
            r.entropy_exchange,
            r.coherent_information,
            r.input_entropy,
            r.output_entropy,
            deficit,
        ];
        let cells: Vec<String> = row.iter().map(|&x| fmt6(x)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    match &a.out {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| CliError::new(EXIT_UNWRITABLE, format!("cannot write {}: {e}", path.display())))?;
            Ok((String::new(), EXIT_OK))
        }
        None => Ok((csv, EXIT_OK)),
    }
}
