use std::cmp::Ordering;

use super::GeometryError;
use crate::embed::{dot, norm, Embedding};
use crate::scalar::Real;

/// Cosine similarity; fails if either vector is zero.
pub fn cosine<F: Real>(a: &[F], b: &[F]) -> Result<F, GeometryError> {
    let (na, nb) = (norm(a), norm(b));
    if na == F::zero() || nb == F::zero() {
        return Err(GeometryError::ZeroVector);
    }
    Ok((dot(a, b) / (na * nb)).max(-F::one()).min(F::one()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor<F> {
    pub id: u32,
    pub similarity: F,
}

/// Unit-normalized view of an embedding for similarity queries.
///
/// Rankings order by descending similarity; equal similarities fall back to
/// ascending community id (string order).
#[derive(Clone, Debug)]
pub struct NeighborIndex<'a, F> {
    emb: &'a Embedding<F>,
    unit: Vec<F>,
    name_rank: Vec<u32>,
}

impl<'a, F: Real> NeighborIndex<'a, F> {
    pub fn new(emb: &'a Embedding<F>) -> Self {
        let mut order: Vec<u32> = (0..emb.len() as u32).collect();
        order.sort_by(|&a, &b| emb.vocab().name(a).cmp(emb.vocab().name(b)));
        let mut name_rank = vec![0; emb.len()];
        for (r, &id) in order.iter().enumerate() {
            name_rank[id as usize] = r as u32;
        }
        NeighborIndex {
            emb,
            unit: emb.unit_vectors(),
            name_rank,
        }
    }

    pub fn embedding(&self) -> &'a Embedding<F> {
        self.emb
    }

    pub fn len(&self) -> usize {
        self.emb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emb.is_empty()
    }

    pub fn unit(&self, id: u32) -> &[F] {
        let d = self.emb.dim();
        &self.unit[id as usize * d..(id as usize + 1) * d]
    }

    pub fn id(&self, community: &str) -> Result<u32, GeometryError> {
        self.emb
            .vocab()
            .id(community)
            .ok_or_else(|| GeometryError::UnknownCommunity(community.to_string()))
    }

    pub(crate) fn ranking_order(&self, a: &Neighbor<F>, b: &Neighbor<F>) -> Ordering {
        b.similarity
            .partial_cmp(&a.similarity)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.name_rank[a.id as usize].cmp(&self.name_rank[b.id as usize]))
    }

    /// Similarity of every community to the direction `query` (need not be unit length),
    /// skipping `exclude`.
    fn scores(&self, query: &[F], exclude: &[u32]) -> Result<Vec<Neighbor<F>>, GeometryError> {
        let qn = norm(query);
        if qn == F::zero() {
            return Err(GeometryError::ZeroVector);
        }
        Ok((0..self.len() as u32)
            .filter(|id| !exclude.contains(id))
            .map(|id| Neighbor {
                id,
                similarity: dot(self.unit(id), query) / qn,
            })
            .collect())
    }

    /// Top `k` of the full ranking, via partial selection.
    pub fn top_k(
        &self,
        query: &[F],
        exclude: &[u32],
        k: usize,
    ) -> Result<Vec<Neighbor<F>>, GeometryError> {
        let mut all = self.scores(query, exclude)?;
        let k = k.min(all.len());
        if k == 0 {
            return Ok(Vec::new());
        }
        if k < all.len() {
            all.select_nth_unstable_by(k - 1, |a, b| self.ranking_order(a, b));
            all.truncate(k);
        }
        all.sort_by(|a, b| self.ranking_order(a, b));
        Ok(all)
    }

    /// Full ranking by sorting every candidate.
    pub fn rank_all(
        &self,
        query: &[F],
        exclude: &[u32],
    ) -> Result<Vec<Neighbor<F>>, GeometryError> {
        let mut all = self.scores(query, exclude)?;
        all.sort_by(|a, b| self.ranking_order(a, b));
        Ok(all)
    }

    /// The `k` most similar communities to `id`, excluding itself.
    pub fn nearest(&self, id: u32, k: usize) -> Result<Vec<Neighbor<F>>, GeometryError> {
        if k >= self.len() {
            return Err(GeometryError::TooManyNeighbors { k, n: self.len() });
        }
        self.top_k(self.unit(id), &[id], k)
    }
}

/// The `k` nearest neighbors of `community` by cosine similarity.
pub fn nearest_neighbors<F: Real>(
    emb: &Embedding<F>,
    community: &str,
    k: usize,
) -> Result<Vec<Neighbor<F>>, GeometryError> {
    let index = NeighborIndex::new(emb);
    index.nearest(index.id(community)?, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Vocabulary;

    pub(crate) fn emb_from(rows: &[&[f64]]) -> Embedding<f64> {
        let entries = (0..rows.len()).map(|i| (format!("c{i:02}"), 1)).collect();
        let vocab = Vocabulary::from_entries(entries).unwrap();
        let dim = rows[0].len();
        Embedding::new(
            vocab,
            dim,
            rows.iter().flat_map(|r| r.iter().copied()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn cosine_identities() {
        let v = [0.3f64, -1.2, 2.0];
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        assert!((cosine(&v, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(GeometryError::ZeroVector)
        ));
    }

    #[test]
    fn exhaustive_neighbors_and_ties() {
        let emb = emb_from(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 2.0], &[1.0, 1.0]]);
        let nn = nearest_neighbors(&emb, "c00", 3).unwrap();
        assert_eq!(nn.iter().map(|n| n.id).collect::<Vec<_>>(), [3, 1, 2]);
        assert!(matches!(
            nearest_neighbors(&emb, "c00", 4),
            Err(GeometryError::TooManyNeighbors { .. })
        ));
        assert!(matches!(
            nearest_neighbors(&emb, "zz", 1),
            Err(GeometryError::UnknownCommunity(_))
        ));
    }
}
