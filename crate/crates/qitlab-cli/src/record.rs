//! Run records: enough provenance to re-execute a command and verify the
//! output byte-for-byte.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::Parser;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{execute, Cli, CliError, Command};

pub const RECORD_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub record_version: u32,
    /// Full argv of the original invocation, `--record` pair removed.
    pub command: Vec<String>,
    /// SHA-256 of the input state file, if the command reads one.
    pub input_sha256: Option<String>,
    pub seed: u64,
    pub tol_rank: f64,
    pub grid_points: usize,
    pub refine_tol: f64,
    /// Exact CSV text the command produced.
    pub outputs: String,
    pub wall_time_ms: u64,
}

fn input_file(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Divergence { file, .. }
        | Command::Channel { file, .. }
        | Command::Hyptest { file, .. }
        | Command::Sw { file, .. }
        | Command::SecondOrder { file, .. } => Some(file),
        Command::Replay { .. } => None,
    }
}

fn sha256_hex(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Drop `--record <path>` from a recorded argv so replays do not re-record.
fn strip_record_flag(argv: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut skip = false;
    for (i, arg) in argv.iter().enumerate() {
        if skip {
            skip = false;
            continue;
        }
        if arg == "--record" {
            skip = true;
            continue;
        }
        if arg.starts_with("--record=") {
            continue;
        }
        out.push(argv[i].clone());
    }
    out
}

pub fn write_record(
    path: &Path,
    argv: &[String],
    cli: &Cli,
    outputs: &str,
    elapsed: Duration,
) -> Result<(), CliError> {
    let input_sha256 = match input_file(&cli.command) {
        Some(file) => Some(sha256_hex(file)?),
        None => None,
    };
    let record = RunRecord {
        record_version: RECORD_VERSION,
        command: strip_record_flag(argv),
        input_sha256,
        seed: cli.seed,
        tol_rank: cli.tol_rank,
        grid_points: cli.grid_points,
        refine_tol: cli.refine_tol,
        outputs: outputs.to_string(),
        wall_time_ms: elapsed.as_millis() as u64,
    };
    let text = serde_json::to_string_pretty(&record)
        .map_err(|e| CliError::input(format!("cannot serialize record: {e}")))?;
    std::fs::write(path, text)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

/// Re-run a recorded command and compare outputs byte-for-byte. Returns the
/// (identical) CSV text for stdout.
pub fn replay(path: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let record: RunRecord =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("bad run record: {e}")))?;
    if record.record_version != RECORD_VERSION {
        return Err(CliError::input(format!(
            "unsupported record version {}",
            record.record_version
        )));
    }
    let cli = Cli::try_parse_from(&record.command)
        .map_err(|e| CliError::input(format!("recorded command does not parse: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(CliError::input("nested replay records are not supported"));
    }
    if let (Some(file), Some(expected)) = (input_file(&cli.command), &record.input_sha256) {
        let actual = sha256_hex(file)?;
        if &actual != expected {
            return Err(CliError::mismatch(format!(
                "input file {} hash changed: recorded {expected}, found {actual}",
                file.display()
            )));
        }
    }
    let outputs = execute(&cli)?;
    if outputs != record.outputs {
        return Err(CliError::mismatch(
            "replayed output differs from the recorded output".to_string(),
        ));
    }
    eprintln!("replay OK: {} bytes identical", outputs.len());
    Ok(outputs)
}
