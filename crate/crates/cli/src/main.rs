use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use sasaki_spectra::legendrian::{self, REGISTERED};
use sasaki_spectra_cli::config::SUITES;
use sasaki_spectra_cli::{run_suite, Format, Generator, Suite, SuiteConfig, UsageError};

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "sasaki-spectra", version, about = "Verification suites for Laplacian eigenfunctions on minimal Legendrians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite and write its report.
    Run(RunArgs),
    /// List suites, registered immersions and algebra dimensions.
    List,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Restrict to immersions (or spheres) of this dimension.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    immersion: Option<String>,
    /// Mesh resolutions for the spectrum suite, coarse to fine.
    #[arg(long, value_delimiter = ',')]
    resolution: Vec<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// `key=value` threshold override; repeatable.
    #[arg(long = "tolerance", value_name = "KEY=VALUE")]
    tolerances: Vec<String>,
    /// `basis`, `reeb`, or a basis index.
    #[arg(long, default_value = "basis")]
    generator: String,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
    format: String,
    /// Include wall time in the report (breaks byte-identical output).
    #[arg(long)]
    timing: bool,
}

fn build_config(args: &RunArgs) -> Result<SuiteConfig, UsageError> {
    let mut config = SuiteConfig::new(Suite::parse(&args.suite)?);
    config.n = args.n;
    config.immersion = args.immersion.clone();
    config.resolution = args.resolution.clone();
    config.seed = args.seed;
    config.generator = Generator::parse(&args.generator)?;
    config.output = args.output.clone();
    config.format = if args.format == "csv" { Format::Csv } else { Format::Json };
    for t in &args.tolerances {
        config.apply_override(t)?;
    }
    config.validate()?;
    Ok(config)
}

fn list() {
    println!("suites:");
    for s in SUITES {
        println!("  {s}");
    }
    println!("immersions:");
    for name in REGISTERED {
        let l = legendrian::by_name(name).expect("registered names resolve");
        println!("  {name} (n = {}, S^{})", l.n(), 2 * l.n() + 1);
    }
    println!("algebras:");
    for n in 1..=3 {
        println!("  n = {n}: dim u({}) = {}", n + 1, (n + 1) * (n + 1));
    }
}

fn run(args: RunArgs) -> ExitCode {
    let config = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let start = Instant::now();
    let mut report = run_suite(&config);
    if args.timing {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    let text = match config.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(args) => run(args),
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
    }
}
