use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::scores::ScoreTable;
use super::DimensionError;

/// Usages of one word in one community by one commenter count at most this many times.
pub const DEFAULT_USAGE_CAP: u64 = 100;

pub const WORD_USAGE_HEADER: &str = "word\tcommunity\tcommenter\tcount";
pub const WORD_SCORE_HEADER: &str = "word\tscore\tweight";

/// Word × community usage counts after the per-commenter cap.
#[derive(Clone, Debug, PartialEq)]
pub struct WordUsageTable {
    pub cap: u64,
    /// `(word, community) → capped count`, ordered by word then community.
    pub counts: BTreeMap<(String, String), u64>,
}

impl WordUsageTable {
    /// Aggregates `(word, community, commenter, count)` records; repeated records for the
    /// same triple are summed before capping.
    pub fn from_records<I, S>(records: I, cap: u64) -> Self
    where
        I: IntoIterator<Item = (S, S, S, u64)>,
        S: Into<String>,
    {
        let mut per_commenter: HashMap<(String, String, String), u64> = HashMap::new();
        for (w, c, u, n) in records {
            *per_commenter
                .entry((w.into(), c.into(), u.into()))
                .or_default() += n;
        }
        let mut counts = BTreeMap::new();
        for ((w, c, _), n) in per_commenter {
            *counts.entry((w, c)).or_default() += n.min(cap);
        }
        WordUsageTable { cap, counts }
    }

    pub fn load(path: &Path, cap: u64) -> Result<Self, DimensionError> {
        let bad = |line: usize, reason: String| DimensionError::BadTable {
            path: path.display().to_string(),
            line,
            reason,
        };
        let mut records = Vec::new();
        for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
            let line = line?;
            if (i == 0 && line == WORD_USAGE_HEADER) || line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let [w, c, u, n] = f[..] else {
                return Err(bad(i + 1, format!("expected 4 fields, got {}", f.len())));
            };
            let n: u64 = n
                .parse()
                .map_err(|_| bad(i + 1, format!("bad count `{n}`")))?;
            records.push((w.to_string(), c.to_string(), u.to_string(), n));
        }
        Ok(Self::from_records(records, cap))
    }

    /// Keeps only usages in communities accepted by `keep`.
    pub fn restrict_to(&self, keep: impl Fn(&str) -> bool) -> Self {
        WordUsageTable {
            cap: self.cap,
            counts: self
                .counts
                .iter()
                .filter(|((_, c), _)| keep(c))
                .map(|(k, &v)| (k.clone(), v))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Raw,
    #[default]
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordScore {
    pub word: String,
    pub score: f64,
    pub weight: u64,
}

/// Usage-weighted mean community score for every word, ordered by word.
pub fn word_scores(
    usage: &WordUsageTable,
    scores: &ScoreTable,
    kind: ScoreKind,
) -> Result<Vec<WordScore>, DimensionError> {
    let index = scores.index();
    let column = match kind {
        ScoreKind::Raw => &scores.raw,
        ScoreKind::Z => &scores.z,
    };
    let mut acc: BTreeMap<&str, (f64, u64)> = BTreeMap::new();
    for ((w, c), &n) in &usage.counts {
        let &i = index
            .get(c.as_str())
            .ok_or_else(|| DimensionError::UnknownCommunity(c.clone()))?;
        let e = acc.entry(w.as_str()).or_default();
        e.0 += n as f64 * column[i];
        e.1 += n;
    }
    acc.into_iter()
        .map(|(w, (s, n))| {
            if n == 0 {
                return Err(DimensionError::UnusedWord(w.to_string()));
            }
            Ok(WordScore {
                word: w.to_string(),
                score: s / n as f64,
                weight: n,
            })
        })
        .collect()
}

pub fn write_word_scores(scores: &[WordScore], path: &Path) -> Result<(), DimensionError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{WORD_SCORE_HEADER}")?;
    for s in scores {
        writeln!(w, "{}\t{}\t{}", s.word, s.score, s.weight)?;
    }
    w.flush()?;
    Ok(())
}
