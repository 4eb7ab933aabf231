//! Experiment harness: instance generation, sweeps, landscape slices,
//! summaries, and SVG plots. Owns all file formats and seeding; the
//! algorithms live in the `wsvqe` crate.

pub mod experiment;
pub mod instance;
pub mod landscape;
pub mod plot;
pub mod summarize;

use std::path::Path;

/// Harness-level failure. Everything here maps to exit code 2; argument
/// validation problems are reported as `Usage` and map to exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] wsvqe::Error),
    #[error("i/o on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("csv in {path}: {message}")]
    Csv { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, HarnessError>;

pub(crate) fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io { path: path.display().to_string(), source }
}

/// Writes `bytes` atomically: temp file in the destination directory,
/// then rename over the target.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}
