use std::collections::HashMap;

use super::parse::LineStats;
use super::record::InteractionRecord;
use super::tables::{DropStats, MonthlyActivityTable, MonthlyRow, PairCount, PairCountTable};
use super::vocab::{Coverage, Vocabulary};
use super::IngestError;
use crate::month::YearMonth;

/// Interned-user sentinel for deleted comments in the monthly tally.
const DELETED: u32 = u32::MAX;

#[derive(Clone, Debug, Default)]
struct Interner {
    ids: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.names.len() as u32;
        self.ids.insert(s.to_string(), id);
        self.names.push(s.to_string());
        id
    }
}

/// String-keyed raw tallies accumulated from a record stream.
///
/// Accumulators built over disjoint shards of the input merge into the same
/// tallies regardless of shard boundaries or merge order; every table derived
/// from them is sorted, so the outputs do not depend on the worker count.
#[derive(Clone, Debug, Default)]
pub struct IngestCounts {
    communities: Interner,
    users: Interner,
    community_comments: Vec<u64>,
    pairs: HashMap<(u32, u32), u64>,
    monthly: HashMap<(i64, u32, u32), u64>,
    deleted: u64,
    records: u64,
    lines: LineStats,
}

impl IngestCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records<'a, I>(records: I) -> Self
    where
        I: IntoIterator<Item = &'a InteractionRecord>,
    {
        let mut counts = Self::new();
        for rec in records {
            counts.add(rec);
            counts.lines.lines += 1;
        }
        counts
    }

    pub fn add(&mut self, rec: &InteractionRecord) {
        let c = self.communities.intern(&rec.community_id);
        if c as usize == self.community_comments.len() {
            self.community_comments.push(0);
        }
        self.community_comments[c as usize] += 1;
        self.records += 1;
        let month = YearMonth::from_timestamp(rec.timestamp).ordinal();
        let u = if rec.deleted {
            self.deleted += 1;
            DELETED
        } else {
            let u = self.users.intern(&rec.user_id);
            *self.pairs.entry((u, c)).or_insert(0) += 1;
            u
        };
        *self.monthly.entry((month, c, u)).or_insert(0) += 1;
    }

    pub(crate) fn add_line_stats(&mut self, stats: LineStats) {
        self.lines.merge(stats);
    }

    pub fn line_stats(&self) -> LineStats {
        self.lines
    }

    pub fn record_count(&self) -> u64 {
        self.records
    }

    pub fn deleted_count(&self) -> u64 {
        self.deleted
    }

    pub fn merge(&mut self, other: IngestCounts) {
        let cmap: Vec<u32> = other
            .communities
            .names
            .iter()
            .map(|n| self.communities.intern(n))
            .collect();
        self.community_comments
            .resize(self.communities.names.len(), 0);
        for (i, n) in other.community_comments.iter().enumerate() {
            self.community_comments[cmap[i] as usize] += n;
        }
        let umap: Vec<u32> = other
            .users
            .names
            .iter()
            .map(|n| self.users.intern(n))
            .collect();
        let remap_user = |u: u32| {
            if u == DELETED {
                DELETED
            } else {
                umap[u as usize]
            }
        };
        for ((u, c), n) in other.pairs {
            *self
                .pairs
                .entry((remap_user(u), cmap[c as usize]))
                .or_insert(0) += n;
        }
        for ((m, c, u), n) in other.monthly {
            *self
                .monthly
                .entry((m, cmap[c as usize], remap_user(u)))
                .or_insert(0) += n;
        }
        self.deleted += other.deleted;
        self.records += other.records;
        self.lines.merge(other.lines);
    }

    /// Per-community comment totals, deleted comments included.
    pub fn community_totals(&self) -> impl Iterator<Item = (&str, u64)> {
        self.communities
            .names
            .iter()
            .zip(&self.community_comments)
            .map(|(n, c)| (n.as_str(), *c))
    }

    pub fn vocabulary(&self, top_n: usize) -> Result<(Vocabulary, Coverage), IngestError> {
        let vocab = Vocabulary::from_counts(
            self.community_totals().map(|(n, c)| (n.to_string(), c)),
            top_n,
        )?;
        let coverage = self.coverage(&vocab);
        Ok((vocab, coverage))
    }

    pub fn coverage(&self, vocab: &Vocabulary) -> Coverage {
        let to_vocab = self.community_map(vocab);
        let comments_retained = self
            .community_comments
            .iter()
            .enumerate()
            .filter(|(c, _)| to_vocab[*c].is_some())
            .map(|(_, n)| *n)
            .sum();
        let mut retained = vec![false; self.users.names.len()];
        for &(u, c) in self.pairs.keys() {
            if to_vocab[c as usize].is_some() {
                retained[u as usize] = true;
            }
        }
        Coverage {
            comments_retained,
            comments_total: self.records,
            users_retained: retained.iter().filter(|r| **r).count() as u64,
            users_total: self.users.names.len() as u64,
        }
    }

    fn community_map(&self, vocab: &Vocabulary) -> Vec<Option<u32>> {
        self.communities.names.iter().map(|n| vocab.id(n)).collect()
    }

    /// Users with at least one non-deleted in-vocabulary comment, sorted by id,
    /// plus the interned → dense map.
    fn dense_users(&self, to_vocab: &[Option<u32>]) -> (Vec<String>, Vec<Option<u32>>) {
        let mut keep = vec![false; self.users.names.len()];
        for &(u, c) in self.pairs.keys() {
            if to_vocab[c as usize].is_some() {
                keep[u as usize] = true;
            }
        }
        let mut order: Vec<u32> = (0..keep.len() as u32)
            .filter(|u| keep[*u as usize])
            .collect();
        order.sort_unstable_by(|a, b| {
            self.users.names[*a as usize].cmp(&self.users.names[*b as usize])
        });
        let mut dense = vec![None; keep.len()];
        let names = order
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                dense[u as usize] = Some(i as u32);
                self.users.names[u as usize].clone()
            })
            .collect();
        (names, dense)
    }

    pub fn pair_table(&self, vocab: &Vocabulary) -> PairCountTable {
        let to_vocab = self.community_map(vocab);
        let (users, dense) = self.dense_users(&to_vocab);
        let mut out_of_vocab = 0;
        let mut triples = Vec::with_capacity(self.pairs.len());
        for (&(u, c), &n) in &self.pairs {
            match to_vocab[c as usize] {
                Some(vc) => triples.push(PairCount {
                    user: dense[u as usize].expect("retained user"),
                    community: vc,
                    count: n,
                }),
                None => out_of_vocab += n,
            }
        }
        let dropped = DropStats {
            out_of_vocab,
            deleted: self.deleted,
            malformed: self.lines.malformed,
        };
        PairCountTable::from_parts(users, vocab.len(), triples, dropped)
            .expect("interned pairs are unique")
    }

    pub fn monthly_table(&self, vocab: &Vocabulary) -> MonthlyActivityTable {
        let to_vocab = self.community_map(vocab);
        let (users, dense) = self.dense_users(&to_vocab);
        let mut dropped = 0;
        let mut rows = Vec::with_capacity(self.monthly.len());
        for (&(m, c, u), &n) in &self.monthly {
            let Some(vc) = to_vocab[c as usize] else {
                dropped += n;
                continue;
            };
            let user = if u == DELETED {
                None
            } else {
                dense[u as usize]
            };
            rows.push(MonthlyRow {
                month: YearMonth::from_ordinal(m),
                community: vc,
                user,
                count: n,
            });
        }
        MonthlyActivityTable::from_parts(users, rows, dropped)
    }
}

/// Builds the top-`top_n` vocabulary from a record stream.
pub fn build_vocab<'a, I>(records: I, top_n: usize) -> Result<(Vocabulary, Coverage), IngestError>
where
    I: IntoIterator<Item = &'a InteractionRecord>,
{
    IngestCounts::from_records(records).vocabulary(top_n)
}

/// Tallies non-deleted in-vocabulary comments per (user, community).
pub fn count_pairs<'a, I>(records: I, vocab: &Vocabulary) -> PairCountTable
where
    I: IntoIterator<Item = &'a InteractionRecord>,
{
    IngestCounts::from_records(records).pair_table(vocab)
}

/// Tallies in-vocabulary comments per (month, community, user), keeping deleted ones.
pub fn monthly_activity<'a, I>(records: I, vocab: &Vocabulary) -> MonthlyActivityTable
where
    I: IntoIterator<Item = &'a InteractionRecord>,
{
    IngestCounts::from_records(records).monthly_table(vocab)
}
