use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

use crate::config::{parse_config, ConfigErrors, Engine, Kind, RunConfig, DESK_TRAPS};
use crate::output::{render, write_atomic};
use crate::provenance::provenance;
use crate::run::execute;

#[derive(Debug, Parser)]
#[command(name = "trapwalk", version, about = "Quantum walks of single atoms in moving optical traps")]
struct Args {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output prefix; writes <prefix>.csv (or <prefix>_<i>.csv per sweep point) and <prefix>.json.
    #[arg(long, default_value = "trapwalk")]
    out: String,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write distributions every n steps (the last step is always written).
    #[arg(long)]
    record_every: Option<usize>,
    /// Allow full integrations of rows longer than 14 traps.
    #[arg(long)]
    long_jobs: bool,
    /// Print the build identifier and the parameter table, then exit.
    #[arg(long)]
    provenance: bool,
    /// Add the elapsed run time to the metrics file.
    #[arg(long)]
    wall_clock: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigErrors),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Run(#[from] trapwalk::Error),
}

impl CliError {
    /// 1 for configuration and I/O problems, 2 when a numerical guard fired.
    pub fn exit_code(&self) -> i32 {
        use trapwalk::Error as E;
        match self {
            CliError::Run(
                E::Boundary { .. }
                | E::Leakage { .. }
                | E::Unreachable { .. }
                | E::NoConvergence
                | E::NotUnitary(_)
                | E::Truncation { .. }
                | E::TooManyLevels { .. },
            ) => 2,
            _ => 1,
        }
    }
}

fn load(args: &Args) -> Result<Option<RunConfig>, CliError> {
    let Some(path) = &args.config else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let mut config = parse_config(&text)?;
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(n) = args.record_every {
        if n == 0 {
            return Err(CliError::Usage("--record-every must be at least 1".into()));
        }
        config.record_every = n;
    }
    Ok(Some(config))
}

fn run(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let config = load(args)?.ok_or_else(|| CliError::Usage("--config <path> is required".into()))?;
    let long = config.kind == Kind::Physical
        && config.physical.engine == Engine::Full
        && config.physical.n_traps > DESK_TRAPS;
    if long && !args.long_jobs {
        return Err(CliError::Usage(format!(
            "a full integration of {} traps is a long job; pass --long-jobs to run it",
            config.physical.n_traps
        )));
    }
    let start = Instant::now();
    let report = execute(&config)?;
    let elapsed = args.wall_clock.then(|| start.elapsed().as_secs_f64());
    let files = render(&config, &report, &args.out, elapsed);
    for f in &files {
        write_atomic(&f.path, &f.contents).map_err(|source| CliError::Io {
            path: f.path.clone(),
            source,
        })?;
    }
    Ok(files.into_iter().map(|f| f.path).collect())
}

/// Runs the command line and returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if args.provenance {
        return match load(&args) {
            Ok(config) => {
                let seed = config.as_ref().map_or(args.seed.unwrap_or(0), |c| c.seed);
                print!("{}", provenance(config.as_ref(), seed));
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        };
    }
    match run(&args) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
