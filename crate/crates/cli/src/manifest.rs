use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use consensus_core::io::write_json;

use crate::{CliError, Command};

/// Record of one invocation, written beside its outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub invocation: Command,
    pub seed: u64,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub duration_secs: f64,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_json(
            BufWriter::new(File::create(path).map_err(consensus_core::Error::from)?),
            self,
        )?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| {
            consensus_core::Error::Validation(format!("cannot read {}: {e}", path.display()))
        })?;
        serde_json::from_reader(file).map_err(|e| {
            CliError::Core(consensus_core::Error::Parse(format!(
                "manifest {}: {e}",
                path.display()
            )))
        })
    }
}

/// `<path>.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    with_suffix(output, ".manifest.json")
}

pub fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
