//! Skip-gram with negative sampling over arbitrary (community, user) pairs.
//!
//! Communities play the role of words and users the role of contexts. Each
//! positive pair gets one SGD step on
//!
//! ```text
//! loss = -log σ(w·v_pos) - Σ_i log σ(-w·v_neg_i)
//! ```
//!
//! with the word vector updated after all context updates, as in word2vec.
//! Multiple workers update the shared matrices without locks; only
//! `workers == 1` is deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::TrainConfig;
use super::model::{ContextVectors, Embedding, LossTrace, TrainingMeta};
use super::pairs::{expand_pairs, NegativeSampler, TrainingPair};
use super::EmbedError;
use crate::ingest::{PairCountTable, Vocabulary};
use crate::scalar::{Real, TrainReal};

const LOSS_BUCKETS: usize = 100;

#[inline]
pub fn sigmoid<F: Real>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

/// `-log σ(x)` evaluated without overflow.
#[inline]
pub fn neg_log_sigmoid<F: Real>(x: F) -> F {
    (-x).max(F::zero()) + (-(x.abs())).exp().ln_1p()
}

/// Per-pair SGNS loss for one word vector against its positive and negative contexts.
pub fn pair_loss<F: Real>(word: &[F], positive: &[F], negatives: &[&[F]]) -> F {
    let dot = |a: &[F], b: &[F]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<F>();
    let mut loss = neg_log_sigmoid(dot(word, positive));
    for n in negatives {
        loss += neg_log_sigmoid(-dot(word, n));
    }
    loss
}

/// Analytic gradient of [`pair_loss`]: (d/dword, d/dpositive, d/dnegative_i).
pub fn pair_gradient<F: Real>(
    word: &[F],
    positive: &[F],
    negatives: &[&[F]],
) -> (Vec<F>, Vec<F>, Vec<Vec<F>>) {
    let dot = |a: &[F], b: &[F]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<F>();
    let dim = word.len();
    let mut gw = vec![F::zero(); dim];
    let coef = sigmoid(dot(word, positive)) - F::one();
    for i in 0..dim {
        gw[i] += coef * positive[i];
    }
    let gp = word.iter().map(|&w| coef * w).collect();
    let mut gn = Vec::with_capacity(negatives.len());
    for n in negatives {
        let coef = sigmoid(dot(word, n));
        for i in 0..dim {
            gw[i] += coef * n[i];
        }
        gn.push(word.iter().map(|&w| coef * w).collect());
    }
    (gw, gp, gn)
}

/// Parameter matrix of lock-free cells.
pub struct SharedMatrix<F: TrainReal> {
    cells: Vec<F::Cell>,
    dim: usize,
}

impl<F: TrainReal> SharedMatrix<F> {
    pub fn from_values(values: &[F], dim: usize) -> Self {
        SharedMatrix {
            cells: values.iter().map(|&v| F::new_cell(v)).collect(),
            dim,
        }
    }

    #[inline]
    fn row(&self, i: u32) -> &[F::Cell] {
        let s = i as usize * self.dim;
        &self.cells[s..s + self.dim]
    }

    pub fn to_values(&self) -> Vec<F> {
        self.cells.iter().map(F::load).collect()
    }
}

/// Word (community) and context (user) parameters plus the SGD kernel.
pub struct SgnsModel<F: TrainReal> {
    pub words: SharedMatrix<F>,
    pub contexts: SharedMatrix<F>,
    dim: usize,
}

impl<F: TrainReal> SgnsModel<F> {
    /// word2vec initialization: words uniform in ±0.5/dim, contexts zero.
    pub fn init<R: Rng>(n_words: usize, n_contexts: usize, dim: usize, rng: &mut R) -> Self {
        let half = 0.5 / dim as f64;
        let words: Vec<F> = (0..n_words * dim)
            .map(|_| F::of(rng.random_range(-half..half)))
            .collect();
        let contexts = vec![F::zero(); n_contexts * dim];
        Self::from_values(&words, &contexts, dim)
    }

    pub fn from_values(words: &[F], contexts: &[F], dim: usize) -> Self {
        SgnsModel {
            words: SharedMatrix::from_values(words, dim),
            contexts: SharedMatrix::from_values(contexts, dim),
            dim,
        }
    }

    /// One SGD step at learning rate `lr`. Returns the pre-update loss, or
    /// `None` if any intermediate value is non-finite.
    ///
    /// Negatives equal to the positive context are skipped.
    pub fn step(
        &self,
        pair: TrainingPair,
        negatives: &[u32],
        lr: F,
        scratch: &mut StepScratch<F>,
    ) -> Option<F> {
        let dim = self.dim;
        let w = self.words.row(pair.word);
        scratch.word.clear();
        scratch.word.extend(w.iter().map(F::load));
        scratch.grad.clear();
        scratch.grad.resize(dim, F::zero());
        let mut loss = F::zero();
        let targets = std::iter::once((pair.context, true)).chain(
            negatives
                .iter()
                .filter(|&&n| n != pair.context)
                .map(|&n| (n, false)),
        );
        for (target, positive) in targets {
            let ctx = self.contexts.row(target);
            let mut f = F::zero();
            for (c, &x) in ctx.iter().zip(&scratch.word) {
                f += F::load(c) * x;
            }
            let label = if positive { F::one() } else { F::zero() };
            loss += if positive {
                neg_log_sigmoid(f)
            } else {
                neg_log_sigmoid(-f)
            };
            let g = (label - sigmoid(f)) * lr;
            if !g.is_finite() {
                return None;
            }
            for ((c, acc), &x) in ctx.iter().zip(scratch.grad.iter_mut()).zip(&scratch.word) {
                let cv = F::load(c);
                *acc += g * cv;
                F::store(c, cv + g * x);
            }
        }
        for (cell, &d) in w.iter().zip(&scratch.grad) {
            let v = F::load(cell) + d;
            if !v.is_finite() {
                return None;
            }
            F::store(cell, v);
        }
        loss.is_finite().then_some(loss)
    }
}

#[derive(Default)]
pub struct StepScratch<F> {
    word: Vec<F>,
    grad: Vec<F>,
}

/// Linearly decayed learning rate at training progress `progress` in [0, 1].
pub fn learning_rate(config: &TrainConfig, progress: f64) -> f64 {
    let min = config.min_alpha();
    config.alpha - (config.alpha - min) * progress.clamp(0.0, 1.0)
}

struct Shard<'a> {
    pairs: &'a [TrainingPair],
    /// Offset of this shard in the epoch's pair sequence.
    offset: usize,
}

#[allow(clippy::too_many_arguments)]
fn run_shard<F: TrainReal>(
    model: &SgnsModel<F>,
    sampler: &NegativeSampler,
    config: &TrainConfig,
    shard: Shard<'_>,
    epoch: usize,
    epoch_len: usize,
    step_base: u64,
    rng: &mut ChaCha8Rng,
) -> Result<LossTrace, EmbedError> {
    let mut trace = LossTrace::with_buckets(LOSS_BUCKETS);
    let mut scratch = StepScratch::default();
    let mut negatives = vec![0u32; config.negative];
    let run_len = (config.epochs * epoch_len) as f64;
    let local_len = shard.pairs.len().max(1) as f64;
    for (i, &pair) in shard.pairs.iter().enumerate() {
        // progress follows the shard's own position so workers decay in step
        let progress = (epoch as f64 + i as f64 / local_len) / config.epochs as f64;
        let lr = F::of(learning_rate(config, progress));
        for n in negatives.iter_mut() {
            *n = sampler.draw(rng);
        }
        let global = epoch * epoch_len + shard.offset + i;
        let loss = model
            .step(pair, &negatives, lr, &mut scratch)
            .ok_or(EmbedError::Diverged {
                step: step_base + (shard.offset + i) as u64,
            })?;
        let bucket = ((global as f64 / run_len) * LOSS_BUCKETS as f64) as usize;
        let bucket = bucket.min(LOSS_BUCKETS - 1);
        trace.sums[bucket] += loss.as_f64();
        trace.counts[bucket] += 1;
    }
    Ok(trace)
}

/// Trains community vectors from a pair count table.
pub fn train<F: TrainReal>(
    table: &PairCountTable,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<Embedding<F>, EmbedError> {
    config.validate()?;
    if table.is_empty() {
        return Err(EmbedError::EmptyCorpus);
    }
    if table.n_communities() != vocab.len() {
        return Err(EmbedError::VocabMismatch {
            table: table.n_communities(),
            vocab: vocab.len(),
        });
    }
    let sampler = NegativeSampler::new(table.user_totals())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let model = SgnsModel::<F>::init(vocab.len(), table.n_users(), config.dim, &mut rng);

    let mut trace = LossTrace::with_buckets(LOSS_BUCKETS);
    let mut trained = 0u64;
    // Epoch lengths vary with downsampling; the schedule uses the first
    // epoch's length for every epoch.
    let mut epoch_len = None;
    for epoch in 0..config.epochs {
        let pairs = expand_pairs(table, config, &mut rng);
        if pairs.is_empty() {
            return Err(EmbedError::EmptyCorpus);
        }
        let len = *epoch_len.get_or_insert(pairs.len());
        let workers = config.workers.min(pairs.len());
        let chunk = pairs.len().div_ceil(workers);
        let mut worker_rngs: Vec<ChaCha8Rng> = (0..workers)
            .map(|w| {
                let mut r = ChaCha8Rng::seed_from_u64(config.seed);
                r.set_stream((epoch * workers + w + 1) as u64);
                r
            })
            .collect();
        let results: Vec<Result<LossTrace, EmbedError>> = if workers == 1 {
            vec![run_shard(
                &model,
                &sampler,
                config,
                Shard {
                    pairs: &pairs,
                    offset: 0,
                },
                epoch,
                len,
                trained,
                &mut worker_rngs[0],
            )]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = pairs
                    .chunks(chunk)
                    .zip(worker_rngs.iter_mut())
                    .enumerate()
                    .map(|(w, (slice, wrng))| {
                        let (model, sampler) = (&model, &sampler);
                        s.spawn(move || {
                            run_shard(
                                model,
                                sampler,
                                config,
                                Shard {
                                    pairs: slice,
                                    offset: w * chunk,
                                },
                                epoch,
                                len,
                                trained,
                                wrng,
                            )
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .collect()
            })
        };
        for r in results {
            trace.add(&r?);
        }
        trained += pairs.len() as u64;
    }

    let words = model.words.to_values();
    let mut emb =
        Embedding::new(vocab.clone(), config.dim, words).map_err(|_| EmbedError::NonFinite)?;
    if config.keep_context {
        emb = emb.with_context(ContextVectors {
            users: table.users().to_vec(),
            vectors: model.contexts.to_values(),
        })?;
    }
    Ok(emb.with_meta(TrainingMeta {
        config_hash: config.hash(),
        config: Some(serde_json::to_value(config).expect("config serializes")),
        pairs_trained: trained,
        loss: trace,
    }))
}
