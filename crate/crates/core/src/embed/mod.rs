//! Community embedding training (SGNS over community/user pairs) and persistence.

mod config;
pub mod io;
mod model;
mod pairs;
mod pmi;
mod train;

pub use config::TrainConfig;
pub use io::{load_embedding, read_text, save_embedding, write_text};
pub use model::{
    dot, norm, normalize_in_place, ContextVectors, Embedding, LossTrace, TrainingMeta,
};
pub use pairs::{
    expand_pairs, keep_probabilities, keep_probability, NegativeSampler, TrainingPair, NOISE_POWER,
};
pub use pmi::{pmi_matrix, PmiMatrix, MAX_PMI_CELLS};
pub use train::{
    learning_rate, neg_log_sigmoid, pair_gradient, pair_loss, sigmoid, train, SgnsModel,
    SharedMatrix, StepScratch,
};

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("invalid training config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error("no training pairs")]
    EmptyCorpus,
    #[error("pair table has {table} communities but vocabulary has {vocab}")]
    VocabMismatch { table: usize, vocab: usize },
    #[error("training diverged (non-finite update) at step {step}")]
    Diverged { step: u64 },
    #[error("embedding contains non-finite values")]
    NonFinite,
    #[error("matrix of {rows} rows × {dim} expects {} values, got {len}", rows * dim)]
    Shape { rows: usize, dim: usize, len: usize },
    #[error("unknown community `{0}`")]
    UnknownCommunity(String),
    #[error("not an embedding file (bad magic)")]
    BadMagic,
    #[error("unsupported embedding format version {0}")]
    UnsupportedVersion(u32),
    #[error("embedding file truncated")]
    Truncated,
    #[error("corrupt embedding file: {0}")]
    Corrupt(String),
    #[error("PMI matrix of {cells} cells exceeds the diagnostic limit {limit}")]
    TooLarge { cells: usize, limit: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
