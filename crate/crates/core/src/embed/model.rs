use serde::{Deserialize, Serialize};

use super::EmbedError;
use crate::ingest::Vocabulary;
use crate::scalar::Real;

/// Per-pair loss averaged into fixed fractions of the training run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossTrace {
    pub sums: Vec<f64>,
    pub counts: Vec<u64>,
}

impl LossTrace {
    pub fn with_buckets(n: usize) -> Self {
        LossTrace {
            sums: vec![0.0; n],
            counts: vec![0; n],
        }
    }

    pub fn add(&mut self, other: &LossTrace) {
        for (i, (s, c)) in other.sums.iter().zip(&other.counts).enumerate() {
            self.sums[i] += s;
            self.counts[i] += c;
        }
    }

    /// Mean loss over the bucket range `[from, to)` given as fractions of the run.
    pub fn mean_between(&self, from: f64, to: f64) -> Option<f64> {
        let n = self.sums.len() as f64;
        let (a, b) = ((from * n).round() as usize, (to * n).round() as usize);
        let s: f64 = self.sums[a..b].iter().sum();
        let c: u64 = self.counts[a..b].iter().sum();
        (c > 0).then(|| s / c as f64)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub config_hash: String,
    pub config: Option<serde_json::Value>,
    pub pairs_trained: u64,
    pub loss: LossTrace,
}

/// User (context) vectors retained from training.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextVectors<F> {
    pub users: Vec<String>,
    pub vectors: Vec<F>,
}

/// Community vectors indexed by vocabulary dense id.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding<F> {
    vocab: Vocabulary,
    dim: usize,
    vectors: Vec<F>,
    context: Option<ContextVectors<F>>,
    meta: TrainingMeta,
}

impl<F: Real> Embedding<F> {
    pub fn new(vocab: Vocabulary, dim: usize, vectors: Vec<F>) -> Result<Self, EmbedError> {
        if dim == 0 || vectors.len() != vocab.len() * dim {
            return Err(EmbedError::Shape {
                rows: vocab.len(),
                dim,
                len: vectors.len(),
            });
        }
        if vectors.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::NonFinite);
        }
        Ok(Embedding {
            vocab,
            dim,
            vectors,
            context: None,
            meta: TrainingMeta::default(),
        })
    }

    pub fn with_context(mut self, context: ContextVectors<F>) -> Result<Self, EmbedError> {
        if context.vectors.len() != context.users.len() * self.dim {
            return Err(EmbedError::Shape {
                rows: context.users.len(),
                dim: self.dim,
                len: context.vectors.len(),
            });
        }
        self.context = Some(context);
        Ok(self)
    }

    pub fn with_meta(mut self, meta: TrainingMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vector(&self, id: u32) -> &[F] {
        let i = id as usize * self.dim;
        &self.vectors[i..i + self.dim]
    }

    pub fn vectors(&self) -> &[F] {
        &self.vectors
    }

    pub fn context(&self) -> Option<&ContextVectors<F>> {
        self.context.as_ref()
    }

    pub fn meta(&self) -> &TrainingMeta {
        &self.meta
    }

    /// SHA-256 over the vocabulary and the community vectors.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.vocab.hash().as_bytes());
        h.update((self.dim as u64).to_le_bytes());
        for v in &self.vectors {
            h.update(v.as_f64().to_le_bytes());
        }
        crate::util::hex(&h.finalize())
    }

    pub fn id(&self, community: &str) -> Result<u32, EmbedError> {
        self.vocab
            .id(community)
            .ok_or_else(|| EmbedError::UnknownCommunity(community.to_string()))
    }

    /// Row-wise unit-normalized copy of the community vectors. Zero rows stay zero.
    pub fn unit_vectors(&self) -> Vec<F> {
        let mut out = self.vectors.clone();
        for row in out.chunks_exact_mut(self.dim) {
            normalize_in_place(row);
        }
        out
    }

    pub fn unit_vector(&self, id: u32) -> Vec<F> {
        let mut v = self.vector(id).to_vec();
        normalize_in_place(&mut v);
        v
    }

    /// Converts every stored value to another scalar type.
    pub fn cast<G: Real>(&self) -> Embedding<G> {
        let conv = |v: &[F]| v.iter().map(|x| G::of(x.as_f64())).collect::<Vec<G>>();
        Embedding {
            vocab: self.vocab.clone(),
            dim: self.dim,
            vectors: conv(&self.vectors),
            context: self.context.as_ref().map(|c| ContextVectors {
                users: c.users.clone(),
                vectors: conv(&c.vectors),
            }),
            meta: self.meta.clone(),
        }
    }

    /// Applies `f` to every community vector, keeping vocabulary and metadata.
    pub fn map_vectors(&self, mut f: impl FnMut(&[F]) -> Vec<F>) -> Result<Self, EmbedError> {
        let mut vectors = Vec::with_capacity(self.vectors.len());
        for row in self.vectors.chunks_exact(self.dim) {
            let out = f(row);
            if out.len() != self.dim {
                return Err(EmbedError::Shape {
                    rows: self.len(),
                    dim: self.dim,
                    len: out.len(),
                });
            }
            vectors.extend(out);
        }
        let mut e = Embedding::new(self.vocab.clone(), self.dim, vectors)?;
        e.meta = self.meta.clone();
        Ok(e)
    }
}

pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<F: Real>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

pub fn normalize_in_place<F: Real>(v: &mut [F]) {
    let n = norm(v);
    if n > F::zero() {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}
