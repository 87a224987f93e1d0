use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fano_memory::scenario::{cmd_check, cmd_dispersion, cmd_simulate, cmd_spectra, Preset, ScenarioConfig};
use fano_memory::{Error, Result};

#[derive(Parser)]
#[command(name = "fano-memory", version, about = "Fano-medium slow light and photon storage")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// fig3 | ideal | custom (custom reads --config).
    #[arg(long, global = true)]
    preset: Option<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Response functions over the frequency grid.
    Spectra,
    /// Polariton branches over the k grid.
    Dispersion,
    /// Write, store and retrieve a pulse.
    Simulate,
    /// Validity conditions at the operating point.
    Check,
}

fn load(cli: &Cli) -> Result<ScenarioConfig> {
    let preset = cli.preset.as_deref().map(str::parse::<Preset>).transpose()?;
    match (preset, &cli.config) {
        (None | Some(Preset::Custom), Some(path)) => ScenarioConfig::load(path),
        (Some(p), None) => ScenarioConfig::preset(p),
        (None, None) => Err(Error::Config("give --preset fig3|ideal or --config <path>".into())),
        (Some(_), Some(_)) => Err(Error::Config("--config only combines with --preset custom".into())),
    }
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = load(cli)?;
    match cli.command {
        Command::Spectra => cmd_spectra(&cfg, &cli.out),
        Command::Dispersion => cmd_dispersion(&cfg, &cli.out),
        Command::Simulate => cmd_simulate(&cfg, &cli.out),
        Command::Check => cmd_check(&cfg, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
