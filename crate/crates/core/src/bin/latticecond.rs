use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use latticecond::config::{parse_config, Mode, CONFIG_KEYS};
use latticecond::run::run;
use latticecond::verify::Level;

#[derive(Parser, Debug)]
#[command(version, about = "Bands, conductivity sweeps and checks for a spin-orbit lattice electron", after_help = CONFIG_KEYS)]
struct Cli {
    /// bands | sweep | scatter | verify
    mode: Mode,
    /// Flat `key = value` configuration file
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (overrides the config)
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory (overrides the config)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Run the full verification level
    #[arg(long)]
    full: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let mut config = match parse_config(&text, Some(cli.mode)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        config.threads = Some(n);
    }
    if let Some(dir) = cli.output {
        config.output_dir = dir;
    }
    if cli.full {
        config.level = Level::Full;
    }

    match run(&config) {
        Ok(summary) => {
            if let Some(report) = &summary.report {
                println!("{report}");
            }
            print!("{}", summary.manifest);
            if summary.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
