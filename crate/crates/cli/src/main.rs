use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use contrast_asym_cli::{check_assumptions, load_config, oracle, plot, run, CliError};

#[derive(Parser)]
#[command(name = "contrast-asym", version, about = "Rate checks for small-volume, extreme-contrast inclusions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a configuration file.
    Run {
        config: PathBuf,
        /// Overrides the configured output directory.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print closed-form reference solutions as CSV.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Evaluate the inclusion-family assumptions of a configuration.
    CheckAssumptions { config: PathBuf },
    /// Render a rate table CSV as a log-log SVG.
    Plot {
        csv: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Layered radial inclusion with power-law coefficients.
    Radial {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
    /// Confocal elliptic inclusions with the exact polarization tensors.
    Elliptic {
        #[arg(long, allow_negative_numbers = true)]
        q: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CONTRAST_ASYM_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("CONTRAST_ASYM_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("CONTRAST_ASYM_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run { config, output } => {
            let mut cfg = load_config(&config)?;
            if let Some(o) = output {
                cfg.output = o;
            }
            let manifest = run(&cfg)?;
            print!("{}", manifest.summary());
            println!("results in {}", cfg.output.display());
            Ok(manifest.exit_code as u8)
        }
        Command::Oracle(OracleCmd::Radial { d, alpha, beta, n }) => {
            print!("{}", oracle::radial_table(d, alpha, beta, &n)?);
            Ok(0)
        }
        Command::Oracle(OracleCmd::Elliptic { q, n }) => {
            print!("{}", oracle::elliptic_table(q, &n)?);
            Ok(0)
        }
        Command::CheckAssumptions { config } => {
            let cfg = load_config(&config)?;
            let out = check_assumptions(&cfg)?;
            for (_, body) in &out.files {
                print!("{body}");
            }
            for (k, v) in &out.numbers {
                println!("{k} = {v}");
            }
            println!("{}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
            Ok(if out.pass { 0 } else { 1 })
        }
        Command::Plot { csv, output } => {
            let text = std::fs::read_to_string(&csv).map_err(|e| CliError::io(&csv, e))?;
            let table = plot::parse_rate_csv(&csv, &text)?;
            std::fs::write(&output, plot::render_svg(&table)).map_err(|e| CliError::io(&output, e))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
