//! The `oscchain` command line.
//!
//! Exit codes: 0 success, 2 usage or precondition, 3 verification
//! discrepancy, 4 resource cap.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::chain::{ChainConfig, Topology};
use crate::chebyshev::p_poly_recurrence;
use crate::commutant::{
    cayley_hamilton_check, commutant_basis, commutant_dimension_probe, decompose, Decomposition,
    DimensionProbe, EXACT_CAP,
};
use crate::dynamics::{default_dt, verlet_run, InitialState, ModalEvolution, SimulationConfig};
use crate::error::Error;
use crate::matrix::{Int, IntMatrix};
use crate::spectra::{self, ModeRecord};
use crate::symmetry::symmetry_report;
use crate::verify::{self, oracle_run, SPECTRUM_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DISCREPANCY: i32 = 3;
pub const EXIT_CAP: i32 = 4;

const PROBE_TRIALS: usize = 4;
const PROBE_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(
    name = "oscchain",
    version,
    about = "Normal modes and symmetries of harmonic oscillator chains"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form spectrum checked against the eigensolvers.
    Spectrum(SpectrumArgs),
    /// Exact commutation relations between the structural operators.
    Symmetry(SymmetryArgs),
    /// Chebyshev basis of the open-chain commutant.
    Commutant(CommutantArgs),
    /// Velocity-Verlet trajectory compared with the modal solution.
    Simulate(SimulateArgs),
    /// Runs the acceptance checks up to a chain length.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TopologyArg {
    Circular,
    Linear,
}

impl From<TopologyArg> for Topology {
    fn from(t: TopologyArg) -> Self {
        match t {
            TopologyArg::Circular => Topology::Circular,
            TopologyArg::Linear => Topology::Linear,
        }
    }
}

#[derive(Debug, Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long, value_enum, default_value_t = TopologyArg::Linear)]
    topology: TopologyArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    omega0: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct SymmetryArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct CommutantArgs {
    #[arg(long)]
    n: usize,
    /// JSON matrix to expand in the basis.
    #[arg(long, value_name = "FILE")]
    decompose: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("start").required(true).args(["initial", "mode"])))]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = TopologyArg::Linear)]
    topology: TopologyArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    omega0: f64,
    /// Defaults to 0.05 / omega_max.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// JSON file `{"positions": [...], "velocities": [...]}`.
    #[arg(long, value_name = "FILE")]
    initial: Option<PathBuf>,
    /// Start at rest in the unit-norm mode with this index.
    #[arg(long, value_name = "K")]
    mode: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 64)]
    n_max: usize,
    #[command(flatten)]
    out: Output,
}

/// A failed command: its exit code and the message for the error stream.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ExactCapExceeded { .. } | Error::Overflow(_) => EXIT_CAP,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::usage(format!("i/o error: {e}"))
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn open_output<'a>(
    path: Option<&Path>,
    stdout: &'a mut dyn Write,
) -> io::Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    out.flush()
}

fn write_json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    out.flush()
}

fn read_json(path: &Path) -> std::result::Result<serde_json::Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{} is not valid JSON: {e}", path.display())))
}

/// Accepts the `{"side", "kind", "rows"}` wire form or a bare array of rows.
fn read_int_matrix(path: &Path) -> std::result::Result<IntMatrix, Failure> {
    let value = read_json(path)?;
    let bad =
        |e: String| Failure::usage(format!("{} is not an integer matrix: {e}", path.display()));
    if value.is_array() {
        let rows: Vec<Vec<Int>> = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
        IntMatrix::from_rows(rows).map_err(|e| bad(e.to_string()))
    } else {
        serde_json::from_value(value).map_err(|e| bad(e.to_string()))
    }
}

#[derive(Serialize)]
struct OracleEigenvalues {
    jacobi: Vec<f64>,
    sturm: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct SpectrumReport {
    topology: Topology,
    n: usize,
    omega0: f64,
    /// Closed-form eigenvalues, ascending.
    lambda: Vec<f64>,
    modes: Vec<ModeRecord>,
    degeneracy_clusters: Vec<Vec<usize>>,
    oracle: OracleEigenvalues,
    max_discrepancy: f64,
    tolerance: f64,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn cmd_spectrum(args: &SpectrumArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let cfg = ChainConfig::with_omega0(args.topology.into(), args.n, args.omega0)?;
    let spectrum = spectra::spectrum(&cfg);
    let run = oracle_run(cfg.topology(), cfg.n());
    let jacobi = run.jacobi.map_err(|e| Failure {
        code: EXIT_DISCREPANCY,
        message: e,
    })?;
    let sturm = run.sturm.transpose().map_err(|e| Failure {
        code: EXIT_DISCREPANCY,
        message: e,
    })?;
    let mut max_discrepancy = max_abs_diff(&spectrum.eigenvalues, &jacobi);
    if let Some(s) = &sturm {
        max_discrepancy = max_discrepancy.max(max_abs_diff(&spectrum.eigenvalues, s));
    }

    let mut out = open_output(args.out.output.as_deref(), stdout)?;
    match args.format {
        Format::Json => {
            let report = SpectrumReport {
                topology: cfg.topology(),
                n: cfg.n(),
                omega0: cfg.omega0(),
                lambda: spectrum.eigenvalues.clone(),
                modes: spectrum.records(),
                degeneracy_clusters: spectrum.degeneracy_clusters.clone(),
                oracle: OracleEigenvalues { jacobi, sturm },
                max_discrepancy,
                tolerance: SPECTRUM_TOL,
            };
            write_json(&mut out, &report)?;
        }
        Format::Csv => {
            spectrum.write_csv(&mut out)?;
            out.flush()?;
        }
    }
    if max_discrepancy < SPECTRUM_TOL {
        Ok(EXIT_OK)
    } else {
        writeln!(
            stderr,
            "closed form and oracle differ by {max_discrepancy:e}"
        )?;
        Ok(EXIT_DISCREPANCY)
    }
}

fn cmd_symmetry(args: &SymmetryArgs, stdout: &mut dyn Write) -> Outcome {
    let report = symmetry_report(args.n)?;
    let mut out = open_output(args.out.output.as_deref(), stdout)?;
    write_json(&mut out, &report)?;
    Ok(if report.all_match {
        EXIT_OK
    } else {
        EXIT_DISCREPANCY
    })
}

#[derive(Serialize)]
struct BasisElement {
    index: usize,
    polynomial: String,
    matrix: IntMatrix,
}

#[derive(Serialize)]
struct CommutantReport {
    n: usize,
    basis: Vec<BasisElement>,
    dimension_probe: DimensionProbe,
    cayley_hamilton: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<Decomposition>,
}

fn cmd_commutant(args: &CommutantArgs, stdout: &mut dyn Write) -> Outcome {
    let n = args.n;
    if n < 2 {
        return Err(Error::TooFewMasses(n).into());
    }
    if n > EXACT_CAP {
        return Err(Error::ExactCapExceeded { n, cap: EXACT_CAP }.into());
    }
    let target = args.decompose.as_deref().map(read_int_matrix).transpose()?;
    if let Some(m) = &target {
        if m.side() != n {
            return Err(Failure::usage(format!(
                "matrix has side {} but --n is {n}",
                m.side()
            )));
        }
    }

    let basis = commutant_basis(n)?
        .into_iter()
        .enumerate()
        .map(|(index, matrix)| {
            Ok(BasisElement {
                index,
                polynomial: p_poly_recurrence(index)?.to_string(),
                matrix,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let report = CommutantReport {
        n,
        basis,
        dimension_probe: commutant_dimension_probe(n, PROBE_TRIALS, PROBE_SEED)?,
        cayley_hamilton: cayley_hamilton_check(n)?,
        decomposition: target.map(|m| decompose(&m, n)).transpose()?,
    };

    let mut out = open_output(args.out.output.as_deref(), stdout)?;
    write_json(&mut out, &report)?;
    let exact = report.dimension_probe.passed()
        && report.cayley_hamilton
        && report
            .decomposition
            .as_ref()
            .and_then(Decomposition::in_span)
            .is_none_or(|d| d.residual_zero);
    Ok(if exact { EXIT_OK } else { EXIT_DISCREPANCY })
}

#[derive(Serialize)]
struct SimulationSummary {
    steps: usize,
    dt: f64,
    final_time: f64,
    energy_drift: f64,
    max_deviation: f64,
}

#[derive(Serialize)]
struct SummaryLine<T> {
    summary: T,
}

fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Outcome {
    let cfg = ChainConfig::with_omega0(args.topology.into(), args.n, args.omega0)?;
    let initial = match (&args.initial, args.mode) {
        (Some(path), _) => {
            serde_json::from_value::<InitialState>(read_json(path)?).map_err(|e| {
                Failure::usage(format!("{} is not an initial state: {e}", path.display()))
            })?
        }
        (None, Some(k)) => verify::mode_initial_state(cfg.topology(), cfg.n(), k)?,
        (None, None) => return Err(Failure::usage("one of --initial or --mode is required")),
    };
    let dt = args.dt.unwrap_or_else(|| default_dt(&cfg));
    let sim = SimulationConfig::new(cfg, dt, args.steps, initial)?;
    let exact = ModalEvolution::new(&cfg, &sim.initial)?;

    let mut out = open_output(args.out.output.as_deref(), stdout)?;
    let n = cfg.n();
    if args.format == Format::Csv {
        let xs = (0..n).map(|i| format!("x{i}"));
        let vs = (0..n).map(|i| format!("v{i}"));
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain(xs)
            .chain(vs)
            .chain(std::iter::once("energy".to_string()))
            .collect();
        writeln!(out, "{}", header.join(","))?;
    }

    let mut e0 = None;
    let mut worst_energy = 0.0f64;
    let mut max_deviation = 0.0f64;
    let mut final_time = 0.0;
    let mut write_error: Option<io::Error> = None;
    verlet_run(&sim, |s| {
        let e0 = *e0.get_or_insert(s.energy);
        worst_energy = worst_energy.max((s.energy - e0).abs());
        let reference = exact.state_at(s.time);
        for (a, b) in s.positions.iter().zip(&reference.positions) {
            max_deviation = max_deviation.max((a - b).abs());
        }
        final_time = s.time;
        if write_error.is_some() {
            return;
        }
        let written = match args.format {
            Format::Csv => {
                let mut line = format!("{:?}", s.time);
                for v in s.positions.iter().chain(&s.velocities) {
                    line.push_str(&format!(",{v:?}"));
                }
                writeln!(out, "{line},{:?}", s.energy)
            }
            Format::Json => write_json_line(&mut out, s),
        };
        if let Err(e) = written {
            write_error = Some(e);
        }
    })?;
    if let Some(e) = write_error {
        return Err(e.into());
    }

    let e0 = e0.unwrap_or(0.0);
    let summary = SimulationSummary {
        steps: sim.steps,
        dt,
        final_time,
        energy_drift: if e0 == 0.0 {
            worst_energy
        } else {
            worst_energy / e0.abs()
        },
        max_deviation,
    };
    match args.format {
        Format::Csv => writeln!(
            out,
            "# energy_drift={:?},max_deviation={:?}",
            summary.energy_drift, summary.max_deviation
        )?,
        Format::Json => write_json_line(&mut out, &SummaryLine { summary })?,
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Outcome {
    if args.n_max < 2 {
        return Err(Error::TooFewMasses(args.n_max).into());
    }
    let mut out = open_output(args.out.output.as_deref(), stdout)?;
    let mut write_error: Option<io::Error> = None;
    let summary = verify::run(args.n_max, |report| {
        if write_error.is_none() {
            write_error = write_json_line(&mut out, report).err();
        }
    });
    if let Some(e) = write_error {
        return Err(e.into());
    }
    write_json_line(&mut out, &SummaryLine { summary: &summary })?;
    Ok(if summary.all_passed {
        EXIT_OK
    } else {
        EXIT_DISCREPANCY
    })
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, stdout, stderr),
        Command::Symmetry(a) => cmd_symmetry(a, stdout),
        Command::Commutant(a) => cmd_commutant(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("oscchain").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn spectrum_linear_two() {
        let (code, out, _) = call(&["spectrum", "--topology", "linear", "--n", "2"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let lambda: Vec<f64> = serde_json::from_value(v["lambda"].clone()).unwrap();
        assert_eq!(lambda.len(), 2);
        assert!((lambda[0] + 3.0).abs() < 1e-12 && (lambda[1] + 1.0).abs() < 1e-12);
        assert!(v["max_discrepancy"].as_f64().unwrap() < 1e-12);
    }

    #[test]
    fn spectrum_rejects_single_mass() {
        let (code, out, err) = call(&["spectrum", "--n", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(out.is_empty());
        assert!(err.contains("at least two"));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["spectrum"]).0, EXIT_USAGE);
        assert_eq!(call(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(call(&["simulate", "--n", "3"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn commutant_cap() {
        let (code, _, err) = call(&["commutant", "--n", "64"]);
        assert_eq!(code, EXIT_CAP);
        assert!(err.contains("cap"));
    }

    #[test]
    fn verify_rejects_tiny_range() {
        assert_eq!(call(&["verify", "--n-max", "1"]).0, EXIT_USAGE);
    }
}
