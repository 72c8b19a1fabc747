use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tanaka_core::commands::{self, CommandError, Config, OutputFormat, Rendered};

#[derive(Parser)]
#[command(name = "tanaka", version, about = "Symbol algebras, Tanaka prolongation and finite-type checks for polynomial distributions")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Point as rationals separated by commas or spaces (default: model base point or origin).
    #[arg(long, global = true, allow_hyphen_values = true)]
    point: Option<String>,
    #[arg(long, global = true, default_value_t = 10)]
    max_degree: usize,
    /// Number of random probe points added to the analysis point.
    #[arg(long, global = true, default_value_t = 8)]
    samples: usize,
    #[arg(long, global = true, env = "TANAKA_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 50_000)]
    groebner_budget: usize,
    /// Write the JSON report to this path (`-` for stdout).
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Suppress the text summary.
    #[arg(long, global = true)]
    quiet: bool,
    /// Run inner loops sequentially.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full pipeline: flag, symbol algebra, prolongation, characteristic variety, verdicts.
    Analyze { model: PathBuf },
    /// Tanaka prolongation of the symbol algebra at the point.
    Prolong { model: PathBuf },
    /// h0, characteristic variety and finiteness verdicts.
    Fintype { model: PathBuf },
    /// Free truncated algebra dimensions and the symmetry bound.
    Freedim { n: u32, k: u32 },
    /// Checks a field (by name or expression) for being a symmetry.
    CheckSym { model: PathBuf, field: String },
    /// Prints a constructed model: cartan-jet K, monge M N, e13, mixed-jet M N, product M N L, goursat-chain K.
    Model { kind: String, params: Vec<usize> },
}

impl Opts {
    fn config(&self) -> Config {
        Config {
            max_degree: self.max_degree,
            probe_samples: self.samples,
            seed: self.seed,
            groebner_budget: self.groebner_budget,
            output: if self.json.is_some() { OutputFormat::Json } else { OutputFormat::Text },
            exec: if self.sequential { tanaka_core::Exec::Sequential } else { tanaka_core::Exec::default() },
            ..Config::default()
        }
    }
}

fn emit<R: Rendered>(r: &R, opts: &Opts) -> Result<(), CommandError> {
    match &opts.json {
        Some(p) if p.as_os_str() == "-" => print!("{}", r.json()),
        Some(p) => std::fs::write(p, r.json())
            .map_err(|e| CommandError::Io { path: p.display().to_string(), message: e.to_string() })?,
        None => {}
    }
    let json_on_stdout = opts.json.as_ref().is_some_and(|p| p.as_os_str() == "-");
    if !opts.quiet && !json_on_stdout {
        print!("{}", r.text());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CommandError> {
    let cfg = cli.opts.config();
    let point = cli.opts.point.as_deref();
    match &cli.cmd {
        Cmd::Analyze { model } => emit(&commands::cmd_analyze(&commands::load_model(model)?, point, &cfg)?, &cli.opts),
        Cmd::Prolong { model } => emit(&commands::cmd_prolong(&commands::load_model(model)?, point, &cfg)?, &cli.opts),
        Cmd::Fintype { model } => emit(&commands::cmd_fintype(&commands::load_model(model)?, point, &cfg)?, &cli.opts),
        Cmd::Freedim { n, k } => emit(&commands::cmd_freedim(*n, *k)?, &cli.opts),
        Cmd::CheckSym { model, field } => {
            emit(&commands::cmd_check_sym(&commands::load_model(model)?, field, point, &cfg)?, &cli.opts)
        }
        Cmd::Model { kind, params } => {
            print!("{}", commands::cmd_model(kind, params)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tanaka: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
