//! `iso`: construct, verify and numerically compare partner Hamiltonians.
//!
//! Exit codes: 0 success, 1 bad input, 2 outside the domain of a
//! construction (constraint violated, pole in the box), 3 an identity or
//! comparison failed, 4 the eigensolver did not converge.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isospec::expr::{parse_rational, ExprError};
use isospec::pair::{PairFile, PairKind};
use isospec::spectra::{self, BoxDomain, BoxFrame, NumericParams, StencilOrder};
use isospec::Error;

use config::{JobConfig, NumericConfig, OutputPaths};

#[derive(Parser)]
#[command(name = "iso", version, about = "Isospectral partner Hamiltonians: construction, exact verification, numeric spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a pair and write its JSON pair file.
    Construct(ConstructArgs),
    /// Re-check every identity for a pair file.
    Verify(VerifyArgs),
    /// Finite-difference spectra of both partners.
    Spectrum(SpectrumArgs),
    /// Compare two spectrum CSV files.
    Compare(CompareArgs),
}

#[derive(Args)]
struct ConstructArgs {
    /// 1d-order1, 1d-order2, 3d-translational, 3d-axial, 3d-screw or 3d-family.
    #[arg(long)]
    kind: Option<String>,
    /// Superpotential (1d-order1, 3d-translational, 3d-axial).
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// First-order coefficient of the second-order intertwiner.
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Spectator potential in y, z.
    #[arg(long = "v-yz", allow_hyphen_values = true)]
    v_yz: Option<String>,
    /// Spectator potential in rho, z.
    #[arg(long = "v-rhoz", allow_hyphen_values = true)]
    v_rhoz: Option<String>,
    /// Screw potential; `phi` stands for the screw angle.
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long = "b-z", allow_hyphen_values = true)]
    b_z: Option<String>,
    /// JSON object of constants, e.g. family parameters.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Full job description; flags above are then not allowed.
    #[arg(long, conflicts_with_all = ["kind", "params"])]
    config: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    pair: PathBuf,
    /// Where to write the JSON check report (stdout if absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    pair: PathBuf,
    /// `lo:hi` per axis, comma separated; one interval is used on every axis.
    #[arg(long = "box", allow_hyphen_values = true)]
    box_text: Option<String>,
    #[arg(long, default_value = "standard")]
    frame: String,
    /// Interior points per axis.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Matching tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Interpret the tolerance relative to the level.
    #[arg(long)]
    relative: bool,
    /// Stencil order, 2 or 4 (default 2 in 1D, 4 in 3D).
    #[arg(long)]
    order: Option<u8>,
    /// Minimum distance from singular lines (default one grid spacing).
    #[arg(long)]
    margin: Option<String>,
    /// Job description holding the numeric section.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Full JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    first: PathBuf,
    second: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

/// A message and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Expr(ExprError::Pole { .. }) => 2,
            Error::Expr(_) | Error::InvalidRequest(_) => 1,
            Error::Precondition(_) | Error::Constraint(_) | Error::Inconsistent(_) | Error::PoleInBox(_) => 2,
            Error::NonConvergence { .. } => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {}", path.display(), e)))
}

fn write_out(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("cannot write {}: {}", p.display(), e))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.write_all(b"\n")).map_err(|e| Failure::input(e.to_string()))
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn construct(args: ConstructArgs) -> Outcome {
    let job = match &args.config {
        Some(path) => serde_json::from_str::<JobConfig>(&read(path)?).map_err(|e| Failure::input(format!("malformed job file: {}", e)))?,
        None => {
            let kind_text = args.kind.as_deref().ok_or_else(|| Failure::input("--kind is required"))?;
            let kind: PairKind = kind_text.parse()?;
            let mut parameters = match &args.params {
                Some(p) => config::read_params(&read(p)?)?,
                None => Default::default(),
            };
            for (key, value) in [("c", &args.c), ("d", &args.d), ("b_z", &args.b_z)] {
                if let Some(v) = value {
                    parameters.insert(key.into(), v.clone());
                }
            }
            let mut expressions = std::collections::BTreeMap::new();
            let w_key = "w";
            for (key, value) in [(w_key, &args.w), ("v", &args.v), ("V_yz", &args.v_yz), ("V_rhoz", &args.v_rhoz), ("V", &args.potential)] {
                if let Some(v) = value {
                    expressions.insert(key.to_string(), v.clone());
                }
            }
            JobConfig { kind, parameters, expressions, numeric: None, output: Default::default() }
        }
    };
    let pair = job.construct()?;
    let out = args.output.as_deref().or(job.output.pair.as_deref());
    write_out(out, &pair.to_json())
}

fn verify(args: VerifyArgs) -> Outcome {
    let pair = PairFile::from_json(&read(&args.pair)?)?;
    let report = pair.verify()?;
    write_out(args.output.as_deref(), &json(&report))?;
    match report.first_failure() {
        None => Ok(()),
        Some(e) => Err(Failure { code: 3, message: format!("identity fails: {} (residual {})", e.tag, e.residual) }),
    }
}

fn spectrum(args: SpectrumArgs) -> Outcome {
    let pair = PairFile::from_json(&read(&args.pair)?)?;
    let sp = pair.spectral_pair()?;
    let (from_file, paths): (Option<NumericConfig>, OutputPaths) = match &args.config {
        Some(p) => {
            let job: JobConfig = serde_json::from_str(&read(p)?).map_err(|e| Failure::input(format!("malformed job file: {}", e)))?;
            (Some(job.numeric.ok_or_else(|| Failure::input("job file has no numeric section"))?), job.output)
        }
        None => (None, OutputPaths::default()),
    };
    let csv_path = args.output.clone().or(paths.csv);
    let report_path = args.report.clone().or(paths.report);
    let box_text = args.box_text.clone().or(from_file.as_ref().map(|c| c.box_text.clone())).ok_or_else(|| Failure::input("--box is required"))?;
    let frame: BoxFrame = match &from_file {
        Some(c) if args.frame == "standard" => c.frame,
        _ => args.frame.parse()?,
    };
    let margin_text = args.margin.clone().or(from_file.as_ref().and_then(|c| c.margin.clone()));
    let margin = match margin_text {
        Some(t) => Some(parse_rational(&t).ok_or_else(|| Failure::input(format!("margin is not an exact rational: '{}'", t)))?),
        None => None,
    };
    let n = if args.n.is_empty() { from_file.as_ref().map(|c| c.n.clone()).unwrap_or_default() } else { args.n.clone() };
    if n.is_empty() {
        return Err(Failure::input("--n is required"));
    }
    let k = args.k.or(from_file.as_ref().map(|c| c.k)).ok_or_else(|| Failure::input("--k is required"))?;
    let tol = args.tol.or(from_file.as_ref().map(|c| c.match_tol)).ok_or_else(|| Failure::input("--tol is required"))?;
    let relative = args.relative || from_file.as_ref().is_some_and(|c| c.relative);
    let default_order = if sp.dim == 1 { 2 } else { 4 };
    let order_num = args.order.or(from_file.as_ref().and_then(|c| c.stencil_order)).unwrap_or(default_order);
    let stencil_order = StencilOrder::try_from(order_num).map_err(Failure::input)?;
    let domain = BoxDomain::parse(&box_text, sp.dim, frame, margin)?;
    let params = NumericParams { n, k, match_tol: tol, relative, stencil_order };
    let report = spectra::pair_spectrum(&sp, &domain, &params)?;

    let mut csv_bytes = Vec::new();
    spectra::write_csv(&report, &mut csv_bytes)?;
    let csv_text = String::from_utf8(csv_bytes).expect("CSV is UTF-8");
    match &csv_path {
        Some(p) => fs::write(p, &csv_text).map_err(|e| Failure::input(format!("cannot write {}: {}", p.display(), e)))?,
        None => print!("{}", csv_text),
    }
    if let Some(p) = &report_path {
        write_out(Some(p), &json(&report))?;
    }
    let summary = json(&report.summary());
    if csv_path.is_some() {
        write_out(None, &summary)?;
    } else {
        eprintln!("{}", summary);
    }
    Ok(())
}

fn compare(args: CompareArgs) -> Outcome {
    let load = |p: &Path| -> Result<Vec<spectra::CsvRow>, Failure> { Ok(spectra::read_csv(read(p)?.as_bytes())?) };
    let report = spectra::compare_csv(&load(&args.first)?, &load(&args.second)?, args.tol)?;
    write_out(None, &json(&report))?;
    if report.equal {
        Ok(())
    } else {
        Err(Failure { code: 3, message: format!("spectra differ in {} place(s)", report.differences.len()) })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Construct(a) => construct(a),
        Command::Verify(a) => verify(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Compare(a) => compare(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("iso: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
