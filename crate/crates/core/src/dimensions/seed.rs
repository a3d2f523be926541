use serde::{Deserialize, Serialize};

use super::DimensionError;
use crate::ingest::Vocabulary;

/// Two communities differing mainly in one social construct; positive scores lean toward `right`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedPair {
    pub left: String,
    pub right: String,
}

impl SeedPair {
    pub fn new(left: impl Into<String>, right: impl Into<String>) -> Result<Self, DimensionError> {
        let (left, right) = (left.into(), right.into());
        if left == right {
            return Err(DimensionError::SameCommunity(left));
        }
        Ok(SeedPair { left, right })
    }

    /// Dense ids of both members.
    pub fn resolve(&self, vocab: &Vocabulary) -> Result<(u32, u32), DimensionError> {
        let id = |c: &str| {
            vocab
                .id(c)
                .ok_or_else(|| DimensionError::UnknownCommunity(c.to_string()))
        };
        Ok((id(&self.left)?, id(&self.right)?))
    }

    pub fn swapped(&self) -> Self {
        SeedPair {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }
}

/// Named seed pairs for the dimensions studied on Reddit: `(name, left, right)`.
pub const PRESETS: &[(&str, &str, &str)] = &[
    ("age", "teenagers", "RedditForGrownups"),
    ("gender", "AskMen", "AskWomen"),
    ("partisan", "democrats", "Conservative"),
    ("age_b", "AskMen", "AskMenOver30"),
    ("gender_b", "Daddit", "Mommit"),
    ("partisan_b", "hillaryclinton", "The_Donald"),
    ("affluence", "vagabond", "backpacking"),
];

pub fn preset(name: &str) -> Option<SeedPair> {
    PRESETS
        .iter()
        .find(|(n, _, _)| n.eq_ignore_ascii_case(name))
        .map(|&(_, l, r)| SeedPair {
            left: l.into(),
            right: r.into(),
        })
}

/// Presets whose two communities both exist in `vocab`.
pub fn available_presets(vocab: &Vocabulary) -> Vec<(&'static str, SeedPair)> {
    PRESETS
        .iter()
        .filter(|(_, l, r)| vocab.id(l).is_some() && vocab.id(r).is_some())
        .map(|&(n, l, r)| {
            (
                n,
                SeedPair {
                    left: l.into(),
                    right: r.into(),
                },
            )
        })
        .collect()
}
