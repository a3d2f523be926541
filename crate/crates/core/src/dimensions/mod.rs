//! Social dimensions: seed augmentation, averaged directions, and community/word scores.

mod build;
mod scores;
mod seed;
mod words;

pub use build::{
    augment_seed, build_dimension, candidate_pairs, derive_dimension, rank_candidates, RankedPair,
    SocialDimension, DEFAULT_NEIGHBORS, DEFAULT_PAIRS, DEGENERATE_NORM,
};
pub use scores::{compare_dimensions, score_communities, ScoreTable, SCORE_HEADER};
pub use seed::{available_presets, preset, SeedPair, PRESETS};
pub use words::{
    word_scores, write_word_scores, ScoreKind, WordScore, WordUsageTable, DEFAULT_USAGE_CAP,
    WORD_SCORE_HEADER, WORD_USAGE_HEADER,
};

use crate::geometry::GeometryError;

#[derive(Debug, thiserror::Error)]
pub enum DimensionError {
    #[error("unknown community `{0}`")]
    UnknownCommunity(String),
    #[error("seed pair uses `{0}` on both sides")]
    SameCommunity(String),
    #[error("need at least one pair")]
    NoPairs,
    #[error("community `{0}` appears in more than one pair")]
    Overlap(String),
    #[error("only {found} of {needed} disjoint augmentation pairs available")]
    Exhausted { found: usize, needed: usize },
    #[error("degenerate dimension: vector norm {norm:e} is not above the threshold")]
    Degenerate { norm: f64 },
    #[error("{nn_k} nearest neighbors requested but only {n} communities exist")]
    TooFewCommunities { nn_k: usize, n: usize },
    #[error("dimension has {dimension} components but embedding has {embedding}")]
    DimMismatch { dimension: usize, embedding: usize },
    #[error("scores have zero variance")]
    ZeroVariance,
    #[error("score tables cover different communities")]
    VocabMismatch,
    #[error("word `{0}` has zero total usage")]
    UnusedWord(String),
    #[error("corrupt dimension file {0}")]
    Corrupt(String),
    #[error("{path}:{line}: {reason}")]
    BadTable {
        path: String,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
