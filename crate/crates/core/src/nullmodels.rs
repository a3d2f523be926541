//! Author-shuffle null model and size-matched political bins in the null embedding.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dimensions::ScoreTable;
use crate::ingest::InteractionRecord;
use crate::polarization::{PoliticalAssignment, PoliticalSubset, BINS};

#[derive(Debug, thiserror::Error)]
pub enum NullModelError {
    #[error("{n_political} political communities requested but the vocabulary has {vocab}")]
    TooManyPolitical { n_political: usize, vocab: usize },
    #[error("bin sizes sum to {sum}, expected {n_political}")]
    BinSizeMismatch { sum: usize, n_political: usize },
    #[error("score tables cover {a} and {b} communities")]
    ScoreMismatch { a: usize, b: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuffleConfig {
    pub seed: u64,
}

/// Permutes the author column over all non-deleted records; everything else stays in place.
pub fn shuffle_authors(
    records: &[InteractionRecord],
    config: &ShuffleConfig,
) -> Vec<InteractionRecord> {
    let slots: Vec<usize> = (0..records.len())
        .filter(|&i| !records[i].deleted)
        .collect();
    let mut authors: Vec<&str> = slots.iter().map(|&i| records[i].user_id.as_str()).collect();
    authors.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let mut out = records.to_vec();
    for (&i, a) in slots.iter().zip(authors) {
        out[i].user_id = a.to_string();
    }
    out
}

/// Political subset and bins chosen in a null embedding to match a real run's counts.
#[derive(Clone, Debug, PartialEq)]
pub struct NullBins {
    pub subset: PoliticalSubset,
    pub assignment: PoliticalAssignment,
    pub bin_sizes: [usize; 5],
    /// Boundaries (political cutoff and the four bin edges) that fell between equal scores
    /// and were split by community id.
    pub ties_split: usize,
}

/// Top `n_political` communities by null `-ness`, binned along the null partisan axis so
/// each bin holds exactly `bin_sizes[i]` communities (bins ordered −2..=2).
pub fn null_political_bins(
    null_ness: &ScoreTable,
    null_partisan: &ScoreTable,
    n_political: usize,
    bin_sizes: [usize; 5],
) -> Result<NullBins, NullModelError> {
    let n = null_ness.len();
    if null_partisan.len() != n {
        return Err(NullModelError::ScoreMismatch {
            a: n,
            b: null_partisan.len(),
        });
    }
    if n_political > n {
        return Err(NullModelError::TooManyPolitical {
            n_political,
            vocab: n,
        });
    }
    let sum: usize = bin_sizes.iter().sum();
    if sum != n_political {
        return Err(NullModelError::BinSizeMismatch { sum, n_political });
    }
    let mut ties_split = 0;
    let mut by_ness: Vec<u32> = (0..n as u32).collect();
    by_ness.sort_by(|&a, &b| {
        null_ness.raw[b as usize]
            .total_cmp(&null_ness.raw[a as usize])
            .then(a.cmp(&b))
    });
    if n_political > 0
        && n_political < n
        && null_ness.raw[by_ness[n_political - 1] as usize]
            == null_ness.raw[by_ness[n_political] as usize]
    {
        ties_split += 1;
    }
    let mut members = by_ness[..n_political].to_vec();
    members.sort_by(|&a, &b| {
        null_partisan.raw[a as usize]
            .total_cmp(&null_partisan.raw[b as usize])
            .then(a.cmp(&b))
    });
    let mut bin = vec![None; n];
    let mut start = 0;
    for (i, &size) in bin_sizes.iter().enumerate() {
        for &c in &members[start..start + size] {
            bin[c as usize] = Some(BINS[i]);
        }
        let end = start + size;
        if size > 0 && end < members.len() {
            let (x, y) = (members[end - 1] as usize, members[end] as usize);
            if null_partisan.raw[x] == null_partisan.raw[y] {
                ties_split += 1;
            }
        }
        start = end;
    }
    let ness_cutoff = members
        .iter()
        .map(|&c| null_ness.raw[c as usize])
        .fold(f64::INFINITY, f64::min);
    members.sort_unstable();
    Ok(NullBins {
        subset: PoliticalSubset {
            members,
            ness_cutoff,
            coverage: 1.0,
            cluster: 0,
            cluster_size: n_political,
            vocab_size: n,
        },
        assignment: PoliticalAssignment {
            z: null_partisan.z.clone(),
            bin,
        },
        bin_sizes,
        ties_split,
    })
}
