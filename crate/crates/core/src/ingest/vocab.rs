use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::IngestError;
use crate::util::hex;

/// Community vocabulary ordered by descending comment count.
///
/// Ties are broken by ascending community id, so the order is a total function
/// of the counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, u32>,
}

/// Share of the input retained by a truncated vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub comments_retained: u64,
    pub comments_total: u64,
    pub users_retained: u64,
    pub users_total: u64,
}

impl Coverage {
    pub fn comment_fraction(&self) -> f64 {
        ratio(self.comments_retained, self.comments_total)
    }

    pub fn user_fraction(&self) -> f64 {
        ratio(self.users_retained, self.users_total)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        1.0
    } else {
        a as f64 / b as f64
    }
}

impl Vocabulary {
    /// Keeps the `top_n` most commented communities.
    pub fn from_counts<I>(counts: I, top_n: usize) -> Result<Self, IngestError>
    where
        I: IntoIterator<Item = (String, u64)>,
    {
        if top_n == 0 {
            return Err(IngestError::InvalidTopN);
        }
        let mut entries: Vec<(String, u64)> = counts.into_iter().filter(|(_, n)| *n > 0).collect();
        if entries.is_empty() {
            return Err(IngestError::EmptyVocabulary);
        }
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.truncate(top_n);
        Ok(Self::from_entries_unchecked(entries))
    }

    /// Rebuilds a vocabulary from already ordered entries, e.g. when loading
    /// from disk. Fails on duplicate ids.
    pub fn from_entries(entries: Vec<(String, u64)>) -> Result<Self, IngestError> {
        let vocab = Self::from_entries_unchecked(entries);
        if vocab.index.len() != vocab.entries.len() {
            return Err(IngestError::DuplicateCommunity);
        }
        Ok(vocab)
    }

    fn from_entries_unchecked(entries: Vec<(String, u64)>) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (id, _))| (id.clone(), i as u32))
            .collect();
        Vocabulary { entries, index }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, community: &str) -> Option<u32> {
        self.index.get(community).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.entries[id as usize].0
    }

    pub fn count(&self, id: u32) -> u64 {
        self.entries[id as usize].1
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    /// Hex SHA-256 over the ordered ids and counts.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (id, n) in &self.entries {
            h.update((id.len() as u64).to_le_bytes());
            h.update(id.as_bytes());
            h.update(n.to_le_bytes());
        }
        hex(&h.finalize())
    }
}
