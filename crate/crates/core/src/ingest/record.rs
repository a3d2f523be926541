use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IngestError;

/// Author token carried by comments whose author has been withheld.
pub const DELETED_AUTHOR: &str = "[deleted]";

/// Earliest accepted timestamp (2005-01-01T00:00:00Z).
pub const MIN_TIMESTAMP: i64 = 1_104_537_600;

/// One comment event.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub user_id: String,
    pub community_id: String,
    pub timestamp: i64,
    pub deleted: bool,
}

impl InteractionRecord {
    pub fn new(
        user_id: impl Into<String>,
        community_id: impl Into<String>,
        timestamp: i64,
    ) -> Self {
        let user_id = user_id.into();
        let deleted = user_id == DELETED_AUTHOR;
        InteractionRecord {
            user_id,
            community_id: community_id.into(),
            timestamp,
            deleted,
        }
    }

    pub fn deleted(community_id: impl Into<String>, timestamp: i64) -> Self {
        InteractionRecord {
            user_id: DELETED_AUTHOR.to_string(),
            community_id: community_id.into(),
            timestamp,
            deleted: true,
        }
    }

    /// Checks the record invariants, returning a description of the first violation.
    pub fn check(&self) -> Result<(), &'static str> {
        if self.community_id.is_empty() {
            return Err("empty community id");
        }
        if !self.deleted && self.user_id.is_empty() {
            return Err("empty user id on non-deleted record");
        }
        if self.timestamp < MIN_TIMESTAMP {
            return Err("timestamp precedes 2005-01-01");
        }
        Ok(())
    }

    /// Serializes as one line of the `tsv` log format (without newline).
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}",
            self.user_id,
            self.community_id,
            self.timestamp,
            u8::from(self.deleted)
        )
    }
}

/// Declared layout of an interaction log.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogFormat {
    /// One JSON object per line with `author`, `subreddit`, `created_utc`.
    Jsonl,
    /// `user<TAB>community<TAB>epoch_seconds<TAB>0|1`.
    Tsv,
}

impl FromStr for LogFormat {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" | "ndjson" => Ok(LogFormat::Jsonl),
            "tsv" => Ok(LogFormat::Tsv),
            other => Err(IngestError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for LogFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogFormat::Jsonl => f.write_str("jsonl"),
            LogFormat::Tsv => f.write_str("tsv"),
        }
    }
}
