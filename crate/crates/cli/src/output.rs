use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::CliError;

/// Where a command sends its documents: a directory, or stdout when absent.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| CliError::Input(format!("cannot create {}: {e}", d.display())))?;
        }
        Ok(Sink { dir })
    }

    /// Write `name` atomically; without an output directory only `report.json`
    /// is printed, to stdout.
    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        match &self.dir {
            Some(d) => write_atomic(&d.join(name), contents.as_bytes()),
            None => {
                if name == "report.json" {
                    print!("{contents}");
                }
                Ok(())
            }
        }
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        self.write(name, &sl_spectra::io::to_json_pretty(value))
    }
}

/// Temp file in the target directory, then rename over the destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
