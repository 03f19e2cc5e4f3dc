//! Command-line front end. Each subcommand plays one role: the data owner
//! (`setup`, `authorize`), a data source (`ingest`), a query processor
//! (`scan`) and a querier (`decrypt`).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::aoe::{MToken, MasterPublicKey, MasterSecretKey, PToken};
use crate::bench::{self, BenchConfig};
use crate::bilinear::SUPPORTED_SECURITY_BITS;
use crate::error::Error;
use crate::secharness::{self, Coalition, Instance};
use crate::sss::{self, AccessRequest, Row};
use crate::store::{self, Stream};

pub const MPK_FILE: &str = "mpk.bin";
pub const MSK_FILE: &str = "msk.bin";
pub const PTOKEN_FILE: &str = "ptoken.bin";
pub const MTOKEN_FILE: &str = "mtoken.bin";
/// Printed by `decrypt` for records the message token does not open.
pub const DECRYPT_FAIL: &str = "DECRYPT-FAIL";

#[derive(Debug, Parser)]
#[command(name = "selstream", version, about = "Selective encrypted streams")]
pub struct Cli {
    /// Seed the random generator (reproducible runs; not for production keys).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a key pair for rows of N cells.
    Setup {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out_dir: PathBuf,
        /// Overwrite existing key files.
        #[arg(long)]
        force: bool,
    },
    /// Encrypt one row and append it to the stream.
    Ingest {
        #[arg(long)]
        mpk: PathBuf,
        #[arg(long)]
        stream: PathBuf,
        /// Comma-separated cells.
        #[arg(long)]
        row: String,
        /// Source id stored next to the record.
        #[arg(long, default_value = "")]
        source: String,
    },
    /// Issue the token pair for an access request.
    Authorize {
        #[arg(long)]
        msk: PathBuf,
        /// JSON file: {"policy": [null, "value", ...], "k": 1}
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Copy the rows selected by a predicate token to a new stream file.
    Scan {
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        ptoken: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Open cell K of every selected row.
    Decrypt {
        #[arg(long)]
        selected: PathBuf,
        #[arg(long)]
        mtoken: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Compare amortized and per-cell encryption.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64, 128])]
        cols: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        rows: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the leakage of an instance to a coalition and check the simulator.
    Audit {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        coalition: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Failed(#[from] Error),
    /// The command ran but its check did not pass.
    #[error("check failed")]
    CheckFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) | CliError::CheckFailed => 1,
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Failed(Error::malformed(format!("{}: {e}", path.display()))))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_slice(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

#[cfg(unix)]
fn write_secret(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    use std::os::unix::fs::OpenOptionsExt;
    let mut f = fs::OpenOptions::new()
        .write(true)
        .create(true)
        .truncate(true)
        .mode(0o600)
        .open(path)?;
    f.write_all(bytes)?;
    f.sync_all()
}

#[cfg(not(unix))]
fn write_secret(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    fs::write(path, bytes)
}

/// Printable form of a recovered cell: the text itself when it is UTF-8 on
/// one line, otherwise `hex:` followed by the bytes in hex.
pub fn display_cell(cell: &[u8]) -> String {
    match std::str::from_utf8(cell) {
        Ok(s) if !s.contains(['\n', '\r']) && !s.starts_with("hex:") && s != DECRYPT_FAIL => s.to_owned(),
        _ => format!("hex:{}", hex::encode(cell)),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut rng = match cli.seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    };
    let io = |e: std::io::Error| CliError::Failed(e.into());

    match cli.command {
        Command::Setup { n, out_dir, force } => {
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            let mpk_path = out_dir.join(MPK_FILE);
            let msk_path = out_dir.join(MSK_FILE);
            if !force && (mpk_path.exists() || msk_path.exists()) {
                return Err(usage(format!(
                    "key files already exist in {}; pass --force to overwrite",
                    out_dir.display()
                )));
            }
            fs::create_dir_all(&out_dir).map_err(io)?;
            let keys = sss::init(SUPPORTED_SECURITY_BITS, n, &mut rng)?;
            write_secret(&msk_path, &keys.msk.to_bytes()).map_err(io)?;
            fs::write(&mpk_path, keys.mpk.to_bytes()).map_err(io)?;
            writeln!(out, "wrote {} and {}", mpk_path.display(), msk_path.display()).map_err(io)?;
        }

        Command::Ingest { mpk, stream, row, source } => {
            let mpk = MasterPublicKey::from_bytes(&read(&mpk)?)?;
            let n = sss::stream_width(mpk.params())?;
            let row = Row::from_strs(&row.split(',').collect::<Vec<_>>());
            if row.len() != n {
                return Err(usage(format!("row has {} cells, stream expects {n}", row.len())));
            }
            let erow = sss::encrypt_row(&mpk, &row, &mut rng)?;
            Stream::new(stream).append(n, &source, &erow)?;
        }

        Command::Authorize { msk, policy, out: dir } => {
            let msk = MasterSecretKey::from_bytes(&read(&msk)?)?;
            let n = sss::stream_width(msk.params())?;
            let req: AccessRequest = read_json(&policy)?;
            if req.policy.len() != n {
                return Err(usage(format!("policy has {} entries, stream has {n} cells", req.policy.len())));
            }
            if !(1..=n).contains(&req.k) {
                return Err(usage(format!("k = {} is outside 1..={n}", req.k)));
            }
            let pt = sss::authorize_sel(&msk, &req.policy, &mut rng)?;
            let mt = sss::authorize_dec(&msk, &req.policy, req.k, &mut rng)?;
            fs::create_dir_all(&dir).map_err(io)?;
            fs::write(dir.join(PTOKEN_FILE), pt.to_bytes()).map_err(io)?;
            fs::write(dir.join(MTOKEN_FILE), mt.to_bytes()).map_err(io)?;
        }

        Command::Scan { stream, ptoken, out: dest } => {
            let pt = PToken::from_bytes(&read(&ptoken)?)?;
            let contents = Stream::new(&stream).read()?;
            if pt.params().n() != contents.n {
                return Err(usage(format!(
                    "token is for {}-cell rows, stream has {} cells",
                    pt.params().n(),
                    contents.n
                )));
            }
            if contents.trailing > 0 {
                writeln!(err, "warning: ignoring {} bytes of a torn trailing record", contents.trailing).map_err(io)?;
            }
            let mut selected = Vec::new();
            for (i, rec) in contents.records.into_iter().enumerate() {
                match rec.decode().and_then(|e| sss::select(&e, &pt)) {
                    Ok(true) => selected.push(rec),
                    Ok(false) => {}
                    Err(e) => writeln!(err, "warning: skipping record {}: {e}", i + 1).map_err(io)?,
                }
            }
            store::write_all(&dest, contents.n, &selected)?;
            writeln!(out, "matched {}", selected.len()).map_err(io)?;
        }

        Command::Decrypt { selected, mtoken, k } => {
            let mt = MToken::from_bytes(&read(&mtoken)?)?;
            if mt.k() != k {
                return Err(usage(format!("message token opens cell {}, not cell {k}", mt.k())));
            }
            let contents = Stream::new(&selected).read()?;
            for rec in &contents.records {
                let erow = rec.decode()?;
                match sss::decrypt_cell(&erow, &mt, k) {
                    Ok(cell) => writeln!(out, "{}", display_cell(&cell)),
                    Err(Error::DecryptionFailed) => writeln!(out, "{DECRYPT_FAIL}"),
                    Err(e) => return Err(e.into()),
                }
                .map_err(io)?;
            }
        }

        Command::Bench { cols, rows, reps, out: dest } => {
            if cols.iter().any(|&c| c < 2) || rows == 0 || reps == 0 {
                return Err(usage("columns must be at least 2; rows and reps at least 1"));
            }
            let config = BenchConfig { cols, rows, reps };
            writeln!(out, "{:>6} {:>12} {:>12} {:>8} {:>8}", "cols", "amort ms", "base ms", "x time", "x mem")
                .map_err(io)?;
            let report = bench::run(&config, &mut rng, |r| {
                let _ = writeln!(
                    out,
                    "{:>6} {:>12.2} {:>12.2} {:>8.2} {:>8.2}",
                    r.cols, r.t_amortized_ms, r.t_baseline_ms, r.ratio_time, r.ratio_mem
                );
            })?;
            let json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
            match dest {
                Some(p) => fs::write(p, json).map_err(io)?,
                None => writeln!(out, "{json}").map_err(io)?,
            }
        }

        Command::Audit { instance, coalition } => {
            let inst: Instance = read_json(&instance)?;
            let c: Coalition = read_json(&coalition)?;
            inst.validate().map_err(|e| usage(e.to_string()))?;
            let report = secharness::fixed_point_check(SUPPORTED_SECURITY_BITS, &c, &inst, &mut rng)?;
            let json = serde_json::to_string_pretty(&report.leakage).map_err(Error::from)?;
            writeln!(out, "{json}").map_err(io)?;
            let verdict = if report.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "{verdict}").map_err(io)?;
            if !report.passed() {
                writeln!(err, "{report:?}").map_err(io)?;
                return Err(CliError::CheckFailed);
            }
        }
    }
    Ok(())
}
