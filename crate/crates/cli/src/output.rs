//! Output files. Every artifact is rendered in memory first and then
//! written through a temporary file in the target directory, so a failed
//! run leaves no partial files behind.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

/// A rendered artifact and where it goes; `None` means standard output.
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail =
        |e: std::io::Error| CliError::Numerical(format!("cannot write {}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// Writes the artifacts one after another.
pub fn emit(artifacts: &[Artifact]) -> Result<(), CliError> {
    for a in artifacts {
        match &a.path {
            Some(p) => write_atomic(p, &a.contents)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(a.contents.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Numerical(format!("cannot write to stdout: {e}")))?;
            }
        }
    }
    Ok(())
}
