//! Text artifacts: profile tables, meshes of revolution and phase portraits.
//!
//! Everything here produces strings or writes to a caller-supplied writer;
//! file handling is left to the caller.

mod mesh;
mod portrait;
mod table;

use thiserror::Error;

pub use mesh::{resample, revolve, to_obj, Mesh};
pub use portrait::{render_orbits, render_phase_portrait, Portrait};
pub use table::{
    profile_csv, read_profile_csv, recomputed_residual, verify_samples, write_profile_csv,
    VerifyReport, COLUMNS, VERIFY_TOL,
};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unexpected CSV header {found:?}")]
    Header { found: Vec<String> },
    #[error("row {row}, column {column}: cannot parse {value:?}")]
    Field {
        row: usize,
        column: &'static str,
        value: String,
    },
    #[error("a mesh needs at least 3 angular segments, got {segments}")]
    Segments { segments: usize },
}
