//! `qmn`: command-line access to quiver moduli and network computations.

mod cmd;
mod error;
mod load;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmd::example::ExampleCmd;
use cmd::moduli::ModuliCmd;
use cmd::net::NetCmd;
use cmd::relu::ReluCmd;
use cmd::thin::ThinCmd;
use cmd::{Ctx, ValidateArgs};
use error::{CliError, CliResult};
use output::{Format, Report};

#[derive(Debug, Parser)]
#[command(name = "qmn", version, about = "Double-framed quiver representations and neural networks")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance; each command documents its own default.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a quiver file and classify its vertices.
    Validate(ValidateArgs),
    /// Moduli-space coordinates, ranks and dimensions.
    #[command(subcommand)]
    Moduli(ModuliCmd),
    /// Network function, knowledge map and training.
    #[command(subcommand)]
    Net(NetCmd),
    /// Tensor structure and morphisms of thin representations.
    #[command(subcommand)]
    Thin(ThinCmd),
    /// Momentum map and balancing for ReLU networks.
    #[command(subcommand)]
    Relu(ReluCmd),
    /// Worked examples.
    #[command(subcommand)]
    Example(ExampleCmd),
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("QMN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("QMN_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    let ctx = Ctx {
        seed: cli.seed,
        tol: cli.tol,
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    match &cli.command {
        Command::Validate(a) => cmd::validate(a),
        Command::Moduli(c) => cmd::moduli::run(c, ctx),
        Command::Net(c) => cmd::net::run(c, ctx),
        Command::Thin(c) => cmd::thin::run(c, ctx),
        Command::Relu(c) => cmd::relu::run(c, ctx),
        Command::Example(c) => cmd::example::run(c, ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = init_threads().and_then(|_| {
        let report = dispatch(&cli)?;
        let stdout = io::stdout();
        let mut out = stdout.lock();
        report.render(cli.format, &mut out)?;
        let _ = out.flush();
        match report.failure {
            Some(msg) => Err(CliError::Failed(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
