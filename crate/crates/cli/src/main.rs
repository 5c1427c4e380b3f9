use clap::{Parser, Subcommand};
use shiftlab::config::{self, SpaceKind};
use shiftlab::report::{self, SuiteReport, Verdict};
use shiftlab::runner::{self, RunContext};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "shiftlab",
    version,
    about = "Truncated shift-operator experiments on Hardy and Bergman spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config; the built-in corpus is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report.json and residuals.csv (default: current dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed for all randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Truncation-order override.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Boundary-grid-size override.
    #[arg(long, global = true)]
    grid: Option<usize>,
}

#[derive(Clone, Copy, Subcommand)]
enum Command {
    /// Pythagorean mate a of b with |a|² + |b|² = 1 on the boundary grid.
    Mate,
    /// H(b) norms via the witness embedding, cross-checked by the Gram route.
    HbNorm,
    /// Quotient-by-inner norm monotonicity over random divisible pairs.
    FProperty,
    /// Boundary spectral density u_{f,g} and its moment identities.
    Spectral,
    /// Weighted-moment identity for co-analytic Toeplitz actions.
    TheoremC,
    /// Model-space lattice enumeration with trace and divisor round-trips.
    Invariance,
    /// Krylov-rank saturation probe for backward-shift orbits.
    Cyclicity,
    /// Sub-Bergman Gram positivity and shift-compression diagonals.
    Bergman,
    /// Douglas range-inclusion criteria on random factor pairs.
    Douglas,
    /// Identity-chain discrepancies and norm-equivalence ratio.
    ChainProbe,
    /// Every check over the built-in corpus.
    Suite,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Mate => "mate",
            Command::HbNorm => "hb-norm",
            Command::FProperty => "f-property",
            Command::Spectral => "spectral",
            Command::TheoremC => "theorem-c",
            Command::Invariance => "invariance",
            Command::Cyclicity => "cyclicity",
            Command::Bergman => "bergman",
            Command::Douglas => "douglas",
            Command::ChainProbe => "chain-probe",
            Command::Suite => "suite",
        }
    }
}

fn allowed_spaces(cmd: Command) -> Option<&'static [SpaceKind]> {
    use SpaceKind::{Hb, Model, Subbergman};
    match cmd {
        Command::Mate | Command::HbNorm => Some(&[Hb, Subbergman]),
        Command::FProperty | Command::Spectral | Command::TheoremC | Command::Cyclicity => {
            Some(&[Hb])
        }
        Command::Invariance => Some(&[Hb, Model]),
        Command::Bergman | Command::ChainProbe => Some(&[Subbergman]),
        Command::Douglas | Command::Suite => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => match config::load(path) {
            Ok(c) => Some(c),
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    if let Some(cfg) = &config {
        if let Some(allowed) = allowed_spaces(cli.command) {
            if !allowed.contains(&cfg.space) {
                eprintln!(
                    "config error: space '{}' is not valid for command '{}' (expected {})",
                    cfg.space,
                    cli.command.name(),
                    allowed
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(" | ")
                );
                return ExitCode::from(2);
            }
        }
        if matches!(cli.command, Command::Suite) {
            eprintln!("note: suite always runs the built-in corpus; config coefficients are ignored");
        }
    }
    let seed = cli
        .seed
        .or_else(|| config.as_ref().and_then(|c| c.seed))
        .unwrap_or(0);
    let ctx = RunContext {
        seed,
        n: cli.n,
        grid: cli.grid,
        config,
    };
    let records = match cli.command {
        Command::Mate => runner::run_mate(&ctx),
        Command::HbNorm => runner::run_hb_norm(&ctx),
        Command::FProperty => runner::run_f_property(&ctx),
        Command::Spectral => runner::run_spectral(&ctx),
        Command::TheoremC => runner::run_theorem_c(&ctx),
        Command::Invariance => runner::run_invariance(&ctx),
        Command::Cyclicity => runner::run_cyclicity(&ctx),
        Command::Bergman => runner::run_bergman(&ctx),
        Command::Douglas => runner::run_douglas(&ctx),
        Command::ChainProbe => runner::run_chain_probe(&ctx),
        Command::Suite => runner::run_suite(&ctx),
    };
    // Write errors (e.g. EPIPE from `shiftlab ... | head`) must not abort the
    // run: the report files and exit code are the contract, stdout is advisory.
    let mut stdout = std::io::stdout();
    for r in &records {
        let flag = match r.verdict {
            Verdict::Pass => "PASS ",
            Verdict::Fail => "FAIL ",
            Verdict::Error => "ERROR",
        };
        let _ = writeln!(
            stdout,
            "{flag} {:<44} residual {:>12.5e}  tol {:>9.1e}  [{} ms]",
            r.check, r.residual, r.tolerance, r.millis
        );
        if r.verdict == Verdict::Error {
            if let Some(d) = &r.detail {
                let _ = writeln!(stdout, "       {d}");
            }
        }
    }
    let report = SuiteReport::new(cli.command.name(), seed, records);
    let _ = writeln!(
        stdout,
        "aggregate: {} ({} checks)",
        report.aggregate,
        report.checks.len()
    );
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    if let Err(e) = report::write_report(&out_dir, &report) {
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
