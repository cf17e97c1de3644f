//! `qpolar`: construct quantum polar codes, run logical error rate
//! simulations from job files, and analyze weight spectra and distances.

mod beta;
mod code;
mod commands;
mod error;
mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpolar::ConstructionKind;

use crate::code::CodeParams;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "qpolar", version, about = "Quantum polar codes: construction, decoding and simulation")]
struct Cli {
    /// Worker threads for simulation and analysis. Results do not depend on it.
    /// [default: all cores]
    #[arg(long, global = true, env = "QPOLAR_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a code and print its description as JSON.
    Construct(ConstructArgs),
    /// Run the simulation described by a JSON job file and write results CSV.
    Simulate(SimulateArgs),
    /// Weight spectra, distance bounds and Q1 index scans.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    /// Polarization weight
    Pw,
    /// Second-order polarization weight
    Hpw,
    /// Reed-Muller row weight
    Rm,
    /// Single logical qubit at a chosen row
    Q1,
}

impl From<KindArg> for ConstructionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Pw => ConstructionKind::Pw,
            KindArg::Hpw => ConstructionKind::Hpw,
            KindArg::Rm => ConstructionKind::Rm,
            KindArg::Q1 => ConstructionKind::Q1,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct CodeArgs {
    /// Log2 of the blocklength (N = 2^n).
    #[arg(long)]
    n: usize,
    /// Logical qubits of a symmetric code (Kx = Kz = (N + K) / 2).
    #[arg(long, conflicts_with_all = ["kx", "kz"])]
    k: Option<usize>,
    /// Dimension of the X-side classical code.
    #[arg(long, requires = "kz")]
    kx: Option<usize>,
    /// Dimension of the Z-side classical code.
    #[arg(long, requires = "kx")]
    kz: Option<usize>,
    /// Row ranking.
    #[arg(long, value_enum, default_value = "pw")]
    construction: KindArg,
    /// Polarization weight base: a decimal, `2^(1/4)`, or `2^(1/4)-0.12`.
    /// Values above 2 act as 2. [default: 2^(1/4)]
    #[arg(long, value_parser = beta::parse_beta, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Information row of a q1 code (1..=N-2); fixes Kx = i + 1, Kz = N - i.
    #[arg(long)]
    q1_index: Option<usize>,
}

impl CodeArgs {
    fn params(&self) -> CodeParams {
        CodeParams {
            n: self.n,
            k: self.k,
            k_x: self.kx,
            k_z: self.kz,
            kind: Some(self.construction.into()),
            beta: self.beta,
            q1_index: self.q1_index,
        }
    }
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON job file.
    job: PathBuf,
    /// Results CSV path; overrides the job's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum AnalyzeCommand {
    /// Per-class weight histograms for syndromes of sampled noise.
    Spectrum(SpectrumArgs),
    /// Row-weight bound and list search for the lightest logical operator.
    Distance(DistanceArgs),
    /// SC-decoded X, Z and combined rates of the Q1 code per information row.
    Q1scan(Q1ScanArgs),
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Seed for the noise that produces the syndromes.
    #[arg(long)]
    seed: u64,
    /// Number of syndromes.
    #[arg(long, default_value_t = 100)]
    syndromes: u64,
    /// Flip probability of the noise whose syndromes are analyzed.
    #[arg(long, default_value_t = 0.1)]
    noise_p: f64,
    /// List size of the syndrome decoder.
    #[arg(long, default_value_t = 1024, conflicts_with = "exhaustive")]
    list: usize,
    /// Enumerate whole cosets instead (N <= 32, Kz <= 26).
    #[arg(long)]
    exhaustive: bool,
    /// Flip probability behind the decoder's LLRs.
    #[arg(long, default_value_t = qpolar::DEFAULT_SPECTRUM_P)]
    decode_p: f64,
    /// Output CSV path. [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DistanceArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// List size for the zero-syndrome search.
    #[arg(long, default_value_t = 4096)]
    list: usize,
    /// Output CSV path. [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Q1ScanArgs {
    /// Log2 of the blocklength (N = 2^n).
    #[arg(long)]
    n: usize,
    /// Rows to scan, e.g. `3,5,9-12` (ranges inclusive). [default: 1..=N-2]
    #[arg(long)]
    candidates: Option<String>,
    /// Comma-separated flip probabilities, each in (0, 0.5).
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    p_grid: Vec<f64>,
    /// Monte Carlo trials per row, probability and error type.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Master seed of the noise.
    #[arg(long)]
    seed: u64,
    /// Output CSV path. [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Domain(e.to_string()))?;
    }
    match cli.command {
        Command::Construct(a) => commands::construct(&a.code.params(), a.out.as_deref()),
        Command::Simulate(a) => commands::simulate(&a.job, a.out.as_deref()),
        Command::Analyze { what } => match what {
            AnalyzeCommand::Spectrum(a) => {
                let mode = if a.exhaustive {
                    qpolar::SpectrumMode::Exhaustive
                } else {
                    qpolar::SpectrumMode::List {
                        list_size: a.list,
                        decode_p: a.decode_p,
                    }
                };
                commands::spectrum(&a.code.params(), mode, a.syndromes, a.noise_p, a.seed, a.out.as_deref())
            }
            AnalyzeCommand::Distance(a) => commands::distance(&a.code.params(), a.list, a.out.as_deref()),
            AnalyzeCommand::Q1scan(a) => {
                let len = 1usize.checked_shl(a.n as u32).unwrap_or(0);
                let candidates = match &a.candidates {
                    Some(text) => commands::parse_candidates(text)?,
                    None if len >= 3 => (1..=len - 2).collect(),
                    None => return Err(CliError::Usage(format!("no Q1 rows for n = {}", a.n))),
                };
                commands::q1scan(a.n, &candidates, &a.p_grid, a.trials, a.seed, a.out.as_deref())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
