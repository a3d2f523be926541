use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::month::YearMonth;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairCount {
    pub user: u32,
    pub community: u32,
    pub count: u64,
}

/// Input lines that did not become pair counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropStats {
    pub out_of_vocab: u64,
    pub deleted: u64,
    pub malformed: u64,
}

/// Sparse (user, community) comment counts with marginals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCountTable {
    users: Vec<String>,
    triples: Vec<PairCount>,
    user_totals: Vec<u64>,
    community_totals: Vec<u64>,
    total: u64,
    dropped: DropStats,
}

impl PairCountTable {
    /// Builds a table from dense triples. Triples are sorted by (user,
    /// community); zero counts are discarded.
    pub fn from_parts(
        users: Vec<String>,
        n_communities: usize,
        mut triples: Vec<PairCount>,
        dropped: DropStats,
    ) -> Result<Self, IngestError> {
        triples.retain(|t| t.count > 0);
        triples.sort_unstable();
        let mut user_totals = vec![0; users.len()];
        let mut community_totals = vec![0; n_communities];
        let mut total = 0;
        for w in triples.windows(2) {
            if (w[0].user, w[0].community) == (w[1].user, w[1].community) {
                return Err(IngestError::DuplicatePair {
                    user: w[0].user,
                    community: w[0].community,
                });
            }
        }
        for t in &triples {
            let (u, c) = (t.user as usize, t.community as usize);
            if u >= users.len() || c >= n_communities {
                return Err(IngestError::IdOutOfRange);
            }
            user_totals[u] += t.count;
            community_totals[c] += t.count;
            total += t.count;
        }
        Ok(PairCountTable {
            users,
            triples,
            user_totals,
            community_totals,
            total,
            dropped,
        })
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_communities(&self) -> usize {
        self.community_totals.len()
    }

    pub fn triples(&self) -> &[PairCount] {
        &self.triples
    }

    pub fn user_totals(&self) -> &[u64] {
        &self.user_totals
    }

    pub fn community_totals(&self) -> &[u64] {
        &self.community_totals
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn dropped(&self) -> DropStats {
        self.dropped
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Multiplies every count by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        let triples = self
            .triples
            .iter()
            .map(|t| PairCount {
                count: t.count * k,
                ..*t
            })
            .collect();
        Self::from_parts(
            self.users.clone(),
            self.n_communities(),
            triples,
            self.dropped,
        )
        .expect("scaling preserves validity")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthlyRow {
    pub month: YearMonth,
    pub community: u32,
    /// `None` for deleted comments.
    pub user: Option<u32>,
    pub count: u64,
}

/// Comment counts per (month, community, user), deleted comments kept under
/// a sentinel user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonthlyActivityTable {
    users: Vec<String>,
    rows: Vec<MonthlyRow>,
    dropped_out_of_vocab: u64,
}

impl MonthlyActivityTable {
    /// Rows are sorted by (month, community, user) with deleted rows first and
    /// duplicate keys summed.
    pub fn from_parts(
        users: Vec<String>,
        mut rows: Vec<MonthlyRow>,
        dropped_out_of_vocab: u64,
    ) -> Self {
        rows.retain(|r| r.count > 0);
        rows.sort_unstable();
        let mut merged: Vec<MonthlyRow> = Vec::with_capacity(rows.len());
        for r in rows {
            match merged.last_mut() {
                Some(last)
                    if (last.month, last.community, last.user)
                        == (r.month, r.community, r.user) =>
                {
                    last.count += r.count
                }
                _ => merged.push(r),
            }
        }
        MonthlyActivityTable {
            users,
            rows: merged,
            dropped_out_of_vocab,
        }
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn rows(&self) -> &[MonthlyRow] {
        &self.rows
    }

    pub fn dropped_out_of_vocab(&self) -> u64 {
        self.dropped_out_of_vocab
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn months(&self) -> Vec<YearMonth> {
        let set: HashSet<_> = self.rows.iter().map(|r| r.month).collect();
        let mut v: Vec<_> = set.into_iter().collect();
        v.sort_unstable();
        v
    }
}
