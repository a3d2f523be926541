//! Social dimensions of online communities from co-membership embeddings.
//!
//! The pipeline runs `ingest` → `embed` → `geometry` / `dimensions` →
//! `polarization` / `nullmodels` / `validation`. Numeric code is generic over
//! [`scalar::Real`] (`f32` or `f64`); the aliases below fix the common choices.

pub mod dimensions;
pub mod embed;
pub mod geometry;
pub mod ingest;
pub mod month;
pub mod nullmodels;
pub mod polarization;
pub mod scalar;
pub mod stats;
mod util;
pub mod validation;

pub use util::sha256_hex;

pub type Embedding32 = embed::Embedding<f32>;
pub type Embedding64 = embed::Embedding<f64>;
pub type NeighborIndex32<'a> = geometry::NeighborIndex<'a, f32>;
pub type NeighborIndex64<'a> = geometry::NeighborIndex<'a, f64>;

/// Broad failure class, used to pick process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid parameters or configuration.
    Config,
    /// Missing, unreadable, or inconsistent input data.
    Input,
    /// A computation had no defined result (divergence, zero variance, degenerate vectors).
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Embed(#[from] embed::EmbedError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Dimension(#[from] dimensions::DimensionError),
    #[error(transparent)]
    Polarization(#[from] polarization::PolarizationError),
    #[error(transparent)]
    NullModel(#[from] nullmodels::NullModelError),
    #[error(transparent)]
    Validation(#[from] validation::ValidationError),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use dimensions::DimensionError as D;
        use embed::EmbedError as E;
        use ingest::IngestError as I;
        use polarization::PolarizationError as P;
        use validation::ValidationError as V;
        match self {
            Error::Ingest(I::UnknownFormat(_) | I::InvalidTopN) => ErrorKind::Config,
            Error::Ingest(_) => ErrorKind::Input,
            Error::Embed(E::InvalidConfig(_)) => ErrorKind::Config,
            Error::Embed(E::Diverged { .. } | E::NonFinite) => ErrorKind::Numerical,
            Error::Embed(_) => ErrorKind::Input,
            Error::Geometry(g) => geometry_kind(g),
            Error::Dimension(D::Degenerate { .. } | D::ZeroVariance | D::Exhausted { .. }) => {
                ErrorKind::Numerical
            }
            Error::Dimension(D::SameCommunity(_) | D::NoPairs | D::TooFewCommunities { .. }) => {
                ErrorKind::Config
            }
            Error::Dimension(D::Geometry(g)) => geometry_kind(g),
            Error::Dimension(_) => ErrorKind::Input,
            Error::Polarization(
                P::BadCoverage(_) | P::BadThreshold(_) | P::UnknownWing(_) | P::UnknownPeriod(_),
            ) => ErrorKind::Config,
            Error::Polarization(P::ScoreMismatch { .. } | P::EmptyCluster(_)) => ErrorKind::Input,
            Error::Polarization(_) => ErrorKind::Numerical,
            Error::NullModel(_) => ErrorKind::Config,
            Error::Validation(V::BadTable { .. } | V::Io(_) | V::TooFewMatches { .. }) => {
                ErrorKind::Input
            }
            Error::Validation(_) => ErrorKind::Numerical,
        }
    }
}

fn geometry_kind(g: &geometry::GeometryError) -> ErrorKind {
    use geometry::GeometryError as G;
    match g {
        G::ZeroVector => ErrorKind::Numerical,
        G::TooManyNeighbors { .. } | G::BadClusterCount { .. } | G::UnknownLinkage(_) => {
            ErrorKind::Config
        }
        _ => ErrorKind::Input,
    }
}
