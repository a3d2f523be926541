use std::path::Path;

use socdim::ErrorKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] socdim::Error),
    #[error("replay differs from the manifest: {}", .0.join(", "))]
    Mismatch(Vec<String>),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Input(_) => 3,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Input => 3,
                ErrorKind::Numerical => 4,
            },
            CliError::Mismatch(_) => 4,
        }
    }
}

macro_rules! from_core {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        })*
    };
}

from_core!(
    socdim::ingest::IngestError,
    socdim::embed::EmbedError,
    socdim::geometry::GeometryError,
    socdim::dimensions::DimensionError,
    socdim::polarization::PolarizationError,
    socdim::nullmodels::NullModelError,
    socdim::validation::ValidationError
);
