use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fluctoptics_cli::config::{parse_config, Format, Scenario};
use fluctoptics_cli::error::CliError;
use fluctoptics_cli::output::precision_from_env;
use fluctoptics_cli::presets::{self, PRESETS};
use fluctoptics_cli::run::{run_scenario, Command};

#[derive(Parser)]
#[command(name = "fluctoptics", version, about = "Birefringence and probe propagation driven by field fluctuations")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normally ordered <E^2> over the scenario's sweep.
    E2(RunArgs),
    /// <E^2> and the induced index shift delta n.
    Birefringence(RunArgs),
    /// Probe wave through the modulated medium: snapshots and spectrum.
    Propagate(RunArgs),
    /// Thermal and Casimir <E^2>.
    Ambient(RunArgs),
    /// List presets, or print one as a scenario file.
    Presets { name: Option<String> },
    /// Check a scenario and report every problem.
    Validate(#[command(flatten)] Source),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Scenario file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Output format; defaults to the scenario's `outputs`.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

fn load(source: &Source) -> Result<Scenario, CliError> {
    let text = match (&source.config, &source.preset) {
        (Some(path), _) => fs::read_to_string(path).map_err(|e| CliError::MissingFile(path.clone(), e))?,
        (None, Some(name)) => match presets::find(name) {
            Some(p) => p.text.to_string(),
            None => return Err(CliError::Usage(format!("unknown preset `{name}`"))),
        },
        (None, None) => unreachable!("clap requires a source"),
    };
    parse_config(&text).map_err(CliError::Config)
}

fn execute(args: &RunArgs, command: Command) -> Result<(), CliError> {
    let digits = precision_from_env()?;
    let scenario = load(&args.source)?;
    let formats = match args.format {
        None => scenario.outputs.clone(),
        Some(FormatArg::Csv) => vec![Format::Csv],
        Some(FormatArg::Json) => vec![Format::Json],
        Some(FormatArg::Both) => vec![Format::Csv, Format::Json],
    };
    let output = run_scenario(&scenario, command)?;
    let mut stdout = io::stdout().lock();
    if let Some(Some(warnings)) = output.meta.get("warnings").map(|w| w.as_array()) {
        for w in warnings {
            eprintln!("warning: {}", w.as_str().unwrap_or_default());
        }
    }
    for path in output.write(&args.out, &formats, digits)? {
        let _ = writeln!(stdout, "{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::E2(a) => execute(a, Command::E2),
        Cmd::Birefringence(a) => execute(a, Command::Birefringence),
        Cmd::Propagate(a) => execute(a, Command::Propagate),
        Cmd::Ambient(a) => execute(a, Command::Ambient),
        Cmd::Presets { name: None } => {
            for p in PRESETS {
                println!("{:<18} {:<14} {}", p.name, p.command, p.summary);
            }
            Ok(())
        }
        Cmd::Presets { name: Some(name) } => match presets::find(name) {
            Some(p) => {
                print!("{}", p.text);
                Ok(())
            }
            None => Err(CliError::Usage(format!("unknown preset `{name}`"))),
        },
        Cmd::Validate(source) => load(source).map(|s| println!("ok: {} ({} state)", s.name, s.state.kind())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
