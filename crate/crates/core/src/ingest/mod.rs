//! Log ingestion: parsing, vocabulary construction and count tables.

mod counts;
pub mod io;
mod parse;
mod record;
mod shard;
mod tables;
mod vocab;

use std::path::PathBuf;

pub use counts::{build_vocab, count_pairs, monthly_activity, IngestCounts};
pub use parse::{open_log, parse_interactions, parse_line, InteractionReader, LineStats};
pub use record::{InteractionRecord, LogFormat, DELETED_AUTHOR, MIN_TIMESTAMP};
pub use shard::ingest_paths;
pub use tables::{DropStats, MonthlyActivityTable, MonthlyRow, PairCount, PairCountTable};
pub use vocab::{Coverage, Vocabulary};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Open {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{malformed} of {lines} lines malformed; is `{format}` the right format?")]
    WrongFormat {
        format: LogFormat,
        malformed: u64,
        lines: u64,
    },
    #[error("unknown log format `{0}` (expected jsonl or tsv)")]
    UnknownFormat(String),
    #[error("no communities to build a vocabulary from")]
    EmptyVocabulary,
    #[error("top_n must be at least 1")]
    InvalidTopN,
    #[error("duplicate community id in vocabulary")]
    DuplicateCommunity,
    #[error("pair (user {user}, community {community}) appears more than once")]
    DuplicatePair { user: u32, community: u32 },
    #[error("dense id out of range")]
    IdOutOfRange,
    #[error("{path}:{line}: {reason}")]
    BadTable {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
