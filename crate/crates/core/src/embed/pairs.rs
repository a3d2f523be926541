use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use super::config::TrainConfig;
use super::EmbedError;
use crate::ingest::PairCountTable;

/// Exponent applied to user frequencies in the noise distribution.
pub const NOISE_POWER: f64 = 0.75;

/// One (community, user) training instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrainingPair {
    pub word: u32,
    pub context: u32,
}

/// Probability of keeping one instance of a community with corpus frequency
/// `freq`, using word2vec's downsampling rule. `sample == 0` keeps everything.
pub fn keep_probability(freq: f64, sample: f64) -> f64 {
    if sample <= 0.0 || freq <= 0.0 {
        return 1.0;
    }
    (((freq / sample).sqrt() + 1.0) * sample / freq).min(1.0)
}

/// Per-community keep probabilities for a count table.
pub fn keep_probabilities(table: &PairCountTable, sample: f64) -> Vec<f64> {
    let total = table.total() as f64;
    table
        .community_totals()
        .iter()
        .map(|&n| keep_probability(n as f64 / total, sample))
        .collect()
}

/// Expands every (user, community, count) triple into `count` instances,
/// each independently kept with its community's downsampling probability,
/// then shuffles the sequence when `config.shuffled`.
pub fn expand_pairs<R: Rng>(
    table: &PairCountTable,
    config: &TrainConfig,
    rng: &mut R,
) -> Vec<TrainingPair> {
    let keep = keep_probabilities(table, config.sample);
    let mut pairs = Vec::with_capacity(table.total() as usize);
    for t in table.triples() {
        let p = keep[t.community as usize];
        let pair = TrainingPair {
            word: t.community,
            context: t.user,
        };
        for _ in 0..t.count {
            if p >= 1.0 || rng.random::<f64>() < p {
                pairs.push(pair);
            }
        }
    }
    if config.shuffled {
        pairs.shuffle(rng);
    }
    pairs
}

/// Draws users from the unigram distribution raised to [`NOISE_POWER`].
#[derive(Clone, Debug)]
pub struct NegativeSampler {
    alias: WeightedAliasIndex<f64>,
    n: usize,
}

impl NegativeSampler {
    pub fn new(user_counts: &[u64]) -> Result<Self, EmbedError> {
        let weights: Vec<f64> = user_counts
            .iter()
            .map(|&c| (c as f64).powf(NOISE_POWER))
            .collect();
        let alias = WeightedAliasIndex::new(weights).map_err(|_| EmbedError::EmptyCorpus)?;
        Ok(NegativeSampler {
            alias,
            n: user_counts.len(),
        })
    }

    /// The exact noise probabilities.
    pub fn probabilities(user_counts: &[u64]) -> Vec<f64> {
        let w: Vec<f64> = user_counts
            .iter()
            .map(|&c| (c as f64).powf(NOISE_POWER))
            .collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn draw<R: Rng>(&self, rng: &mut R) -> u32 {
        self.alias.sample(rng) as u32
    }
}
