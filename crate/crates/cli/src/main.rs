//! `stern`: command-line access to the Stern measure toolkit.

mod commands;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use stern_measure::FourierSettings;

use commands::Globals;

const USAGE_ERROR: u8 = 2;
const CHECK_FAILED: u8 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "stern",
    version,
    about = "Stern's diatomic sequence and its singular continuous measure"
)]
#[command(
    after_help = "The worker thread count defaults to all cores; RAYON_NUM_THREADS overrides it when --threads is absent."
)]
struct Cli {
    /// Absolute tail tolerance for the truncated Fourier products.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Minimum product depth; also the level decimals are snapped to.
    #[arg(long, global = true, default_value_t = 24)]
    depth: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Grid size for scans and figure 1.
    #[arg(long, global = true, default_value_t = 10_000)]
    grid: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// s(N).
    Stern { n: u64 },
    /// Summatory function at real X ≥ 1 with its main term.
    Sum { x: f64 },
    /// Exact weights of the level-N measure.
    Weights { n: u32 },
    /// Fourier coefficient at integer K (or real K with --real).
    Fourier {
        #[arg(allow_hyphen_values = true)]
        k: String,
        #[arg(long)]
        real: bool,
    },
    /// Distribution function F at a dyadic X.
    Cdf { x: String },
    /// The pair (f0, f1) at a dyadic T.
    Dilation { t: String },
    /// Mass of [2M/2^K, (2M+1)/2^K].
    Interval { m: u64, k: u32 },
    /// Averaged squared coefficients up to 2^NMAX with decay checks.
    Wiener { nmax: u32 },
    /// Coefficient ratio bound over [0, 1].
    Scan,
    /// Coefficient inequalities and the doubling bound for Σ(N).
    Appendix {
        #[arg(long, default_value_t = 4096)]
        kmax: i64,
        #[arg(long, default_value_t = 1 << 16)]
        nmax: u64,
    },
    /// Moments of the convolution factors.
    Moments {
        #[arg(long, default_value_t = 8)]
        rmax: u32,
        #[arg(long, default_value_t = 32)]
        mmax: u32,
    },
    /// Data behind figure 1 (|mu_hat|), 2 (F) or 3 (f0, f1).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
    },
    /// Run the acceptance suite.
    Verify,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_ERROR } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(USAGE_ERROR);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(CHECK_FAILED);
        }
    }
    let settings = match FourierSettings::new(cli.tol, cli.depth) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let globals = Globals {
        settings,
        depth: cli.depth,
        grid: cli.grid,
    };

    let start = Instant::now();
    let is_verify = matches!(cli.command, Command::Verify);
    let result = match &cli.command {
        Command::Stern { n } => commands::stern(*n),
        Command::Sum { x } => commands::sum(*x),
        Command::Weights { n } => commands::weights(*n),
        Command::Fourier { k, real } => commands::fourier(k, *real, &globals),
        Command::Cdf { x } => commands::cdf(x, &globals),
        Command::Dilation { t } => commands::dilation(t, &globals),
        Command::Interval { m, k } => commands::interval(*m, *k),
        Command::Wiener { nmax } => commands::wiener(*nmax, &globals),
        Command::Scan => commands::scan(&globals),
        Command::Appendix { kmax, nmax } => commands::appendix(*kmax, *nmax, &globals),
        Command::Moments { rmax, mmax } => commands::moments(*rmax, *mmax),
        Command::Figure { which } => commands::figure(*which, &globals),
        Command::Verify => commands::verify(&globals),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let text = match cli.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(CHECK_FAILED);
    }
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    if is_verify && !report.passed() {
        return ExitCode::from(CHECK_FAILED);
    }
    ExitCode::SUCCESS
}
