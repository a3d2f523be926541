mod commands;
mod config;
mod error;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{PipelineCommand, SeedFlags};
use config::PipelineConfig;
use error::CliError;
use run::{file_hash, Manifest, Run};

/// Environment variable overriding the output directory.
const OUT_DIR_ENV: &str = "SOCDIM_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "socdim",
    version,
    about = "Social dimensions of online communities"
)]
struct Cli {
    /// TOML configuration; flags override it, it overrides the defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $SOCDIM_OUT_DIR, then `paths.out`, then `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Reject runs whose randomized steps have no explicit seed.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    #[command(flatten)]
    Pipeline(PipelineCommand),
    /// Re-run a command from its manifest and check the outputs match byte for byte.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
}

fn out_dir(flag: Option<&Path>, config: &PipelineConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| config.paths.out.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let command = match cli.command {
        Command::Pipeline(c) => c,
        Command::Replay(r) => return replay(&r.manifest, cli.out.as_deref()),
    };
    let (mut config, file_seed) = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => (PipelineConfig::default(), false),
    };
    if cli.workers.is_some() {
        config.workers = cli.workers;
    }
    let mut seeds = SeedFlags::default();
    let mut issues = command.apply(&mut config, &mut seeds);
    match &command {
        PipelineCommand::Train(_) if !(seeds.train || file_seed) => {
            if cli.strict {
                issues.push("train has no explicit seed (set [train] seed or --seed)".into());
            } else {
                eprintln!("note: no training seed given, using {}", config.train.seed);
            }
        }
        PipelineCommand::Null(commands::NullCommand::Shuffle(_)) if config.null.seed.is_none() => {
            if cli.strict {
                issues.push("null shuffle has no explicit seed (set [null] seed or --seed)".into());
            } else {
                eprintln!("note: no shuffle seed given, using 1");
            }
            config.null.seed = Some(1);
        }
        _ => {}
    }
    config.train.workers = config.workers();
    config.workers = Some(config.workers());
    issues.extend(config.issues());
    if !issues.is_empty() {
        return Err(CliError::Config(issues));
    }
    let out = std::path::absolute(out_dir(cli.out.as_deref(), &config))
        .map_err(|e| CliError::io(Path::new("."), e))?;
    let mut command = command;
    command.resolve(&out, &config);
    let manifest = run_command(&command, out.clone(), config)?;
    for rel in manifest.outputs.keys() {
        println!("{}", out.join(rel).display());
    }
    Ok(())
}

fn run_command(
    command: &PipelineCommand,
    out: PathBuf,
    config: PipelineConfig,
) -> Result<Manifest, CliError> {
    let mut run = Run::new(out, config);
    command.execute(&mut run)?;
    run.finish(command)
}

fn replay(path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let manifest = Manifest::load(path)?;
    let mut changed = Vec::new();
    for (p, h) in &manifest.inputs {
        if !Path::new(p).is_file() {
            return Err(CliError::Input(format!(
                "{p}: input recorded in the manifest is missing"
            )));
        }
        if &file_hash(Path::new(p))? != h {
            changed.push(p.clone());
        }
    }
    if !changed.is_empty() {
        return Err(CliError::Input(format!(
            "inputs changed since the run: {}",
            changed.join(", ")
        )));
    }
    manifest.config.validate()?;
    let out = match out
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
    {
        Some(o) => o,
        None => path
            .parent()
            .and_then(Path::parent)
            .map(|p| p.join("replay"))
            .unwrap_or_else(|| PathBuf::from("replay")),
    };
    let out = std::path::absolute(&out).map_err(|e| CliError::io(&out, e))?;
    let again = run_command(&manifest.command, out, manifest.config.clone())?;
    let mut diffs = Vec::new();
    for (rel, h) in &manifest.outputs {
        match again.outputs.get(rel) {
            Some(h2) if h2 == h => println!("match\t{rel}"),
            Some(_) => {
                println!("DIFFERS\t{rel}");
                diffs.push(rel.clone());
            }
            None => {
                println!("MISSING\t{rel}");
                diffs.push(rel.clone());
            }
        }
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(diffs))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
