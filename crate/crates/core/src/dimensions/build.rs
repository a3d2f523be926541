use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::seed::SeedPair;
use super::DimensionError;
use crate::geometry::NeighborIndex;
use crate::scalar::Real;

/// Norm at or below which a dimension vector is considered degenerate.
pub const DEGENERATE_NORM: f64 = 1e-8;

pub const DEFAULT_PAIRS: usize = 10;
pub const DEFAULT_NEIGHBORS: usize = 10;

fn unit_f64<F: Real>(index: &NeighborIndex<'_, F>, id: u32) -> Vec<f64> {
    index.unit(id).iter().map(|v| v.as_f64()).collect()
}

fn difference<F: Real>(index: &NeighborIndex<'_, F>, left: u32, right: u32) -> Vec<f64> {
    index
        .unit(right)
        .iter()
        .zip(index.unit(left))
        .map(|(b, a)| b.as_f64() - a.as_f64())
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn cos(a: &[f64], b: &[f64]) -> Option<f64> {
    let (na, nb) = (norm(a), norm(b));
    (na > 0.0 && nb > 0.0).then(|| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb))
}

/// Every ordered pair `(c1, c2)` with `c2` among the `nn_k` nearest neighbors of `c1`,
/// grouped by `c1` and ordered by neighbor rank.
pub fn candidate_pairs<F: Real>(
    index: &NeighborIndex<'_, F>,
    nn_k: usize,
    workers: usize,
) -> Result<Vec<(u32, u32)>, DimensionError> {
    let n = index.len();
    if nn_k >= n {
        return Err(DimensionError::TooFewCommunities { nn_k, n });
    }
    let workers = workers.clamp(1, n.max(1));
    let chunk = n.div_ceil(workers);
    let parts: Vec<Result<Vec<(u32, u32)>, DimensionError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    let mut out = Vec::new();
                    for c in (w * chunk..((w + 1) * chunk).min(n)).map(|c| c as u32) {
                        for nb in index.nearest(c, nn_k)? {
                            out.push((c, nb.id));
                        }
                    }
                    Ok(out)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("candidate worker panicked"))
            .collect()
    });
    let mut all = Vec::with_capacity(n * nn_k);
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

/// A candidate pair with its alignment to the seed direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankedPair {
    pub left: u32,
    pub right: u32,
    pub cosine: f64,
}

/// Candidates ordered by `cos(s2 − s1, c2 − c1)` (descending, ties by `(c1, c2)`).
/// Candidates whose members have identical unit vectors have no direction and are dropped.
pub fn rank_candidates<F: Real>(
    index: &NeighborIndex<'_, F>,
    seed: (u32, u32),
    candidates: &[(u32, u32)],
) -> Result<Vec<RankedPair>, DimensionError> {
    let s = difference(index, seed.0, seed.1);
    if norm(&s) <= DEGENERATE_NORM {
        return Err(DimensionError::Degenerate { norm: norm(&s) });
    }
    let mut ranked: Vec<RankedPair> = candidates
        .iter()
        .filter_map(|&(l, r)| {
            cos(&s, &difference(index, l, r)).map(|cosine| RankedPair {
                left: l,
                right: r,
                cosine,
            })
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.cosine
            .total_cmp(&a.cosine)
            .then((a.left, a.right).cmp(&(b.left, b.right)))
    });
    Ok(ranked)
}

/// Seed followed by the `k − 1` best-aligned candidates sharing no community with
/// the seed or with each other.
pub fn augment_seed<F: Real>(
    index: &NeighborIndex<'_, F>,
    seed: (u32, u32),
    candidates: &[(u32, u32)],
    k: usize,
) -> Result<Vec<(u32, u32)>, DimensionError> {
    if k == 0 {
        return Err(DimensionError::NoPairs);
    }
    if seed.0 == seed.1 {
        return Err(DimensionError::SameCommunity(
            index.embedding().vocab().name(seed.0).into(),
        ));
    }
    let mut used: HashSet<u32> = [seed.0, seed.1].into();
    let mut out = vec![seed];
    for p in rank_candidates(index, seed, candidates)? {
        if out.len() == k {
            break;
        }
        if p.left != p.right && !used.contains(&p.left) && !used.contains(&p.right) {
            used.insert(p.left);
            used.insert(p.right);
            out.push((p.left, p.right));
        }
    }
    if out.len() < k {
        return Err(DimensionError::Exhausted {
            found: out.len() - 1,
            needed: k - 1,
        });
    }
    Ok(out)
}

/// Averaged difference (`diff`) and sum (`ness`) directions over community-disjoint pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SocialDimension {
    pub name: String,
    pub pairs: Vec<SeedPair>,
    pub k: usize,
    pub diff: Vec<f64>,
    pub ness: Vec<f64>,
    /// Cosine of each pair's difference with `diff`; `None` when either is zero.
    pub pair_alignment: Vec<Option<f64>>,
    pub embedding_hash: String,
}

impl SocialDimension {
    pub fn dim(&self) -> usize {
        self.diff.len()
    }

    pub fn diff_norm(&self) -> f64 {
        norm(&self.diff)
    }

    pub fn is_degenerate(&self) -> bool {
        self.diff_norm() <= DEGENERATE_NORM
    }

    /// The same dimension with every pair's sides exchanged.
    pub fn swapped(&self) -> Self {
        SocialDimension {
            name: self.name.clone(),
            pairs: self.pairs.iter().map(SeedPair::swapped).collect(),
            k: self.k,
            diff: self.diff.iter().map(|v| -v).collect(),
            ness: self.ness.clone(),
            pair_alignment: self.pair_alignment.clone(),
            embedding_hash: self.embedding_hash.clone(),
        }
    }

    /// The `-ness` companion: the sum direction used as a dimension of its own.
    pub fn ness_dimension(&self) -> Self {
        SocialDimension {
            name: format!("{}-ness", self.name),
            pairs: self.pairs.clone(),
            k: self.k,
            diff: self.ness.clone(),
            ness: self.ness.clone(),
            pair_alignment: vec![None; self.pairs.len()],
            embedding_hash: self.embedding_hash.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), DimensionError> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, DimensionError> {
        let d: SocialDimension = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        if d.ness.len() != d.diff.len() || d.pairs.len() != d.k {
            return Err(DimensionError::Corrupt(path.display().to_string()));
        }
        Ok(d)
    }
}

/// Builds a dimension from resolved `(left, right)` pairs.
pub fn build_dimension<F: Real>(
    index: &NeighborIndex<'_, F>,
    name: &str,
    pairs: &[(u32, u32)],
) -> Result<SocialDimension, DimensionError> {
    if pairs.is_empty() {
        return Err(DimensionError::NoPairs);
    }
    let vocab = index.embedding().vocab();
    let mut seen = HashSet::new();
    for &(l, r) in pairs {
        for c in [l, r] {
            if !seen.insert(c) {
                return Err(DimensionError::Overlap(vocab.name(c).to_string()));
            }
        }
    }
    let dim = index.embedding().dim();
    let k = pairs.len() as f64;
    let (mut diff, mut ness) = (vec![0.0; dim], vec![0.0; dim]);
    for &(l, r) in pairs {
        let (a, b) = (unit_f64(index, l), unit_f64(index, r));
        for i in 0..dim {
            diff[i] += b[i] - a[i];
            ness[i] += b[i] + a[i];
        }
    }
    diff.iter_mut().chain(ness.iter_mut()).for_each(|v| *v /= k);
    let pair_alignment = pairs
        .iter()
        .map(|&(l, r)| cos(&difference(index, l, r), &diff))
        .collect();
    Ok(SocialDimension {
        name: name.to_string(),
        pairs: pairs
            .iter()
            .map(|&(l, r)| SeedPair {
                left: vocab.name(l).into(),
                right: vocab.name(r).into(),
            })
            .collect(),
        k: pairs.len(),
        diff,
        ness,
        pair_alignment,
        embedding_hash: index.embedding().fingerprint(),
    })
}

/// Seed → augmentation → averaged dimension in one call.
pub fn derive_dimension<F: Real>(
    index: &NeighborIndex<'_, F>,
    name: &str,
    seed: &SeedPair,
    candidates: &[(u32, u32)],
    k: usize,
) -> Result<SocialDimension, DimensionError> {
    let s = seed.resolve(index.embedding().vocab())?;
    let pairs = augment_seed(index, s, candidates, k)?;
    build_dimension(index, name, &pairs)
}
