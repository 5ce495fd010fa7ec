use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

/// Record of one CLI invocation, enough to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    /// Arguments after the program name.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub master_seed: u64,
    pub version: String,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

impl Manifest {
    pub fn new(
        command: &str,
        args: &[String],
        config: serde_json::Value,
        master_seed: u64,
        started: Instant,
        outputs: &[PathBuf],
    ) -> Result<Self> {
        let elapsed = started.elapsed();
        let start = SystemTime::now().checked_sub(elapsed).unwrap_or(UNIX_EPOCH);
        Ok(Manifest {
            command: command.into(),
            args: args.to_vec(),
            config,
            master_seed,
            version: env!("CARGO_PKG_VERSION").into(),
            started_unix: start.duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            wall_clock_seconds: elapsed.as_secs_f64(),
            outputs: outputs
                .iter()
                .map(|p| Ok(OutputDigest { path: p.display().to_string(), sha256: sha256_file(p)? }))
                .collect::<Result<_>>()?,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }
}

/// `out.csv` -> `out.csv.manifest.json`.
pub(crate) fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    let mut f = File::open(path)?;
    let mut buf = [0u8; 8192];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}
