//! File formats, synthetic workloads and the command-line driver for
//! [`hcst_core`].
//!
//! - [`libsvm`]: LIBSVM sparse text datasets.
//! - [`model_file`]: text model files.
//! - [`trace_file`]: kernel-row access traces.
//! - [`report`]: stats JSON and analytics CSVs.
//! - [`workload`]: seeded Zipf and two-phase trace generators.
//! - [`cli`]: the `hcst` command.

pub mod cli;
pub mod libsvm;
pub mod model_file;
pub mod report;
pub mod trace_file;
pub mod workload;

use std::path::{Path, PathBuf};

pub use hcst_core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] hcst_core::Error),
}

pub fn read_file(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Read and parse a LIBSVM file, with the file name in parse errors.
pub fn load_dataset(path: &Path) -> Result<hcst_core::Dataset, Error> {
    libsvm::parse_libsvm(&read_file(path)?).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Format(format!("{}:{line}: {msg}", path.display())),
        other => other,
    })
}
