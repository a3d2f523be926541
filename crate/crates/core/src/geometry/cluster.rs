use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::embed::Embedding;
use crate::ingest::Vocabulary;
use crate::scalar::Real;

pub const CLUSTERING_HEADER: &str = "community_id\tcluster_id\tlabel";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Ward,
    Average,
    Complete,
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Ward => "ward",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
        })
    }
}

impl FromStr for Linkage {
    type Err = GeometryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ward" => Ok(Linkage::Ward),
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            _ => Err(GeometryError::UnknownLinkage(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    /// Surviving slot (the smaller of the two slot indices).
    pub into: u32,
    pub from: u32,
    pub distance: f64,
    pub size: usize,
}

/// Full merge history of `n` points; cutting it after `n - k` merges gives `k` clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n: usize,
    pub linkage: Linkage,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Cluster ids ordered by each cluster's smallest member.
    pub fn cut(&self, k: usize) -> Result<Vec<u32>, GeometryError> {
        if k == 0 || k > self.n {
            return Err(GeometryError::BadClusterCount { k, n: self.n });
        }
        let mut parent: Vec<u32> = (0..self.n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for m in &self.merges[..self.n - k] {
            let (a, b) = (find(&mut parent, m.into), find(&mut parent, m.from));
            let (lo, hi) = (a.min(b), a.max(b));
            parent[hi as usize] = lo;
        }
        let mut label = HashMap::new();
        Ok((0..self.n as u32)
            .map(|i| {
                let root = find(&mut parent, i);
                let next = label.len() as u32;
                *label.entry(root).or_insert(next)
            })
            .collect())
    }
}

/// Condensed upper-triangular distance storage.
struct Condensed<F> {
    n: usize,
    d: Vec<F>,
}

impl<F: Copy> Condensed<F> {
    fn at(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }
    fn get(&self, i: usize, j: usize) -> F {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.d[self.at(a, b)]
    }
    fn set(&mut self, i: usize, j: usize, v: F) {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let k = self.at(a, b);
        self.d[k] = v;
    }
}

/// Agglomerative clustering over the rows of `points` (`n × dim`, row-major).
///
/// Ward works on squared Euclidean distances (reported merge heights are
/// their square roots); average and complete on plain Euclidean distances.
/// On equal distances the pair with the lowest `(i, j)` merges first.
pub fn linkage<F: Real>(points: &[F], dim: usize, method: Linkage) -> Dendrogram {
    let n = if dim == 0 { 0 } else { points.len() / dim };
    let mut dist = Condensed {
        n,
        d: vec![F::zero(); n * n.saturating_sub(1) / 2],
    };
    for i in 0..n {
        let pi = &points[i * dim..(i + 1) * dim];
        for j in i + 1..n {
            let pj = &points[j * dim..(j + 1) * dim];
            let sq = pi
                .iter()
                .zip(pj)
                .fold(F::zero(), |s, (&a, &b)| s + (a - b) * (a - b));
            let v = if method == Linkage::Ward {
                sq
            } else {
                sq.sqrt()
            };
            dist.set(i, j, v);
        }
    }
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut nn = vec![usize::MAX; n];
    let mut nn_d = vec![F::infinity(); n];

    let refresh =
        |i: usize, active: &[bool], dist: &Condensed<F>, nn: &mut [usize], nn_d: &mut [F]| {
            nn[i] = usize::MAX;
            nn_d[i] = F::infinity();
            for j in i + 1..n {
                if active[j] {
                    let v = dist.get(i, j);
                    if v < nn_d[i] {
                        nn_d[i] = v;
                        nn[i] = j;
                    }
                }
            }
        };
    for i in 0..n {
        refresh(i, &active, &dist, &mut nn, &mut nn_d);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let mut i = usize::MAX;
        for r in 0..n {
            if active[r] && nn[r] != usize::MAX && (i == usize::MAX || nn_d[r] < nn_d[i]) {
                i = r;
            }
        }
        let j = nn[i];
        let d_ij = nn_d[i];
        let (ni, nj) = (F::of_count(size[i] as u64), F::of_count(size[j] as u64));
        for k in 0..n {
            if !active[k] || k == i || k == j {
                continue;
            }
            let (dki, dkj) = (dist.get(k, i), dist.get(k, j));
            let v = match method {
                Linkage::Ward => {
                    let nk = F::of_count(size[k] as u64);
                    ((nk + ni) * dki + (nk + nj) * dkj - nk * d_ij) / (ni + nj + nk)
                }
                Linkage::Average => (ni * dki + nj * dkj) / (ni + nj),
                Linkage::Complete => dki.max(dkj),
            };
            dist.set(k, i, v);
        }
        active[j] = false;
        size[i] += size[j];
        let height = if method == Linkage::Ward {
            d_ij.max(F::zero()).sqrt()
        } else {
            d_ij
        };
        merges.push(Merge {
            into: i as u32,
            from: j as u32,
            distance: height.as_f64(),
            size: size[i],
        });
        refresh(i, &active, &dist, &mut nn, &mut nn_d);
        for k in 0..n {
            if !active[k] || k == i {
                continue;
            }
            if nn[k] == i || nn[k] == j {
                refresh(k, &active, &dist, &mut nn, &mut nn_d);
            } else if k < i {
                let v = dist.get(k, i);
                if v < nn_d[k] || (v == nn_d[k] && i < nn[k]) {
                    nn_d[k] = v;
                    nn[k] = i;
                }
            }
        }
    }
    Dendrogram {
        n,
        linkage: method,
        merges,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterConfig {
    pub k: usize,
    pub linkage: Linkage,
    /// Cluster unit-normalized vectors instead of raw ones.
    pub normalize: bool,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            k: 30,
            linkage: Linkage::Ward,
            normalize: true,
        }
    }
}

/// Community → cluster assignment with contiguous cluster ids.
#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub assignment: Vec<u32>,
    pub k: usize,
    pub linkage: Linkage,
    pub labels: Vec<Option<String>>,
}

impl Clustering {
    pub fn from_assignment(assignment: Vec<u32>, linkage: Linkage) -> Result<Self, GeometryError> {
        let k = assignment.iter().max().map_or(0, |&m| m as usize + 1);
        let mut seen = vec![false; k];
        for &a in &assignment {
            seen[a as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(GeometryError::BadClustering(
                "cluster ids are not contiguous".into(),
            ));
        }
        Ok(Clustering {
            assignment,
            k,
            linkage,
            labels: vec![None; k],
        })
    }

    pub fn members(&self, cluster: u32) -> Vec<u32> {
        (0..self.assignment.len() as u32)
            .filter(|&c| self.assignment[c as usize] == cluster)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &a in &self.assignment {
            s[a as usize] += 1;
        }
        s
    }

    pub fn cluster_of(&self, community: u32) -> u32 {
        self.assignment[community as usize]
    }

    /// Finds the cluster carrying `label` (case-insensitive).
    pub fn labelled(&self, label: &str) -> Option<u32> {
        self.labels
            .iter()
            .position(|l| l.as_deref().is_some_and(|l| l.eq_ignore_ascii_case(label)))
            .map(|p| p as u32)
    }

    pub fn set_label(
        &mut self,
        cluster: u32,
        label: impl Into<String>,
    ) -> Result<(), GeometryError> {
        let slot = self
            .labels
            .get_mut(cluster as usize)
            .ok_or_else(|| GeometryError::BadClustering(format!("no cluster {cluster}")))?;
        *slot = Some(label.into());
        Ok(())
    }

    pub fn write_tsv(&self, vocab: &Vocabulary, path: &Path) -> Result<(), GeometryError> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{CLUSTERING_HEADER}")?;
        for (c, &a) in self.assignment.iter().enumerate() {
            let label = self.labels[a as usize].as_deref().unwrap_or("");
            writeln!(w, "{}\t{a}\t{label}", vocab.name(c as u32))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a clustering export; every vocabulary community must appear exactly once.
    pub fn read_tsv(
        path: &Path,
        vocab: &Vocabulary,
        linkage: Linkage,
    ) -> Result<Self, GeometryError> {
        let bad = |line: usize, reason: String| GeometryError::BadTable {
            path: path.display().to_string(),
            line,
            reason,
        };
        let mut assignment = vec![None; vocab.len()];
        let mut labels: HashMap<u32, String> = HashMap::new();
        for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
            let line = line?;
            if i == 0 && line.starts_with("community_id") || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() < 2 || f.len() > 3 {
                return Err(bad(
                    i + 1,
                    format!("expected 2 or 3 fields, got {}", f.len()),
                ));
            }
            let c = vocab
                .id(f[0])
                .ok_or_else(|| bad(i + 1, format!("community `{}` not in vocabulary", f[0])))?;
            let a: u32 = f[1]
                .parse()
                .map_err(|_| bad(i + 1, format!("bad cluster id `{}`", f[1])))?;
            if assignment[c as usize].replace(a).is_some() {
                return Err(bad(i + 1, format!("community `{}` listed twice", f[0])));
            }
            if let Some(l) = f.get(2).filter(|l| !l.is_empty()) {
                labels.insert(a, l.to_string());
            }
        }
        let assignment = assignment
            .into_iter()
            .enumerate()
            .map(|(c, a)| {
                a.ok_or_else(|| {
                    bad(
                        0,
                        format!("community `{}` unassigned", vocab.name(c as u32)),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Clustering::from_assignment(assignment, linkage)?;
        for (a, l) in labels {
            out.set_label(a, l)?;
        }
        Ok(out)
    }
}

/// Partitions the embedding's communities into `config.k` clusters.
pub fn cluster<F: Real>(
    emb: &Embedding<F>,
    config: &ClusterConfig,
) -> Result<Clustering, GeometryError> {
    let dendrogram = dendrogram(emb, config);
    cluster_from(&dendrogram, config.k)
}

pub fn dendrogram<F: Real>(emb: &Embedding<F>, config: &ClusterConfig) -> Dendrogram {
    if config.normalize {
        linkage(&emb.unit_vectors(), emb.dim(), config.linkage)
    } else {
        linkage(emb.vectors(), emb.dim(), config.linkage)
    }
}

pub fn cluster_from(dendrogram: &Dendrogram, k: usize) -> Result<Clustering, GeometryError> {
    Clustering::from_assignment(dendrogram.cut(k)?, dendrogram.linkage)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook O(n^3) agglomeration recomputing cluster distances from members.
    fn naive(points: &[[f64; 2]], method: Linkage, k: usize) -> Vec<u32> {
        let d = |a: &[f64; 2], b: &[f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let mut clusters: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
        let cd = |x: &Vec<usize>, y: &Vec<usize>| -> f64 {
            match method {
                Linkage::Complete => x
                    .iter()
                    .flat_map(|&a| y.iter().map(move |&b| (a, b)))
                    .map(|(a, b)| d(&points[a], &points[b]))
                    .fold(0.0, f64::max),
                Linkage::Average => {
                    let s: f64 = x
                        .iter()
                        .flat_map(|&a| y.iter().map(move |&b| d(&points[a], &points[b])))
                        .sum();
                    s / (x.len() * y.len()) as f64
                }
                Linkage::Ward => {
                    let c = |m: &Vec<usize>| {
                        let n = m.len() as f64;
                        [
                            m.iter().map(|&i| points[i][0]).sum::<f64>() / n,
                            m.iter().map(|&i| points[i][1]).sum::<f64>() / n,
                        ]
                    };
                    let (cx, cy) = (c(x), c(y));
                    let (nx, ny) = (x.len() as f64, y.len() as f64);
                    2.0 * nx * ny / (nx + ny) * d(&cx, &cy).powi(2)
                }
            }
        };
        while clusters.len() > k {
            let mut best = (f64::INFINITY, 0, 0);
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    let v = cd(&clusters[i], &clusters[j]);
                    if v < best.0 - 1e-12 {
                        best = (v, i, j);
                    }
                }
            }
            let moved = clusters.remove(best.2);
            clusters[best.1].extend(moved);
        }
        let mut a = vec![0u32; points.len()];
        let mut order: Vec<usize> = (0..clusters.len()).collect();
        order.sort_by_key(|&c| clusters[c].iter().min().copied());
        for (label, &c) in order.iter().enumerate() {
            for &m in &clusters[c] {
                a[m] = label as u32;
            }
        }
        a
    }

    fn lcg_points(n: usize, seed: u64) -> Vec<[f64; 2]> {
        let mut s = seed;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..n).map(|_| [next() * 10.0, next() * 10.0]).collect()
    }

    #[test]
    fn matches_naive_agglomeration() {
        for method in [Linkage::Ward, Linkage::Average, Linkage::Complete] {
            for seed in 0..15 {
                let pts = lcg_points(25, seed);
                let flat: Vec<f64> = pts.iter().flatten().copied().collect();
                let dg = linkage(&flat, 2, method);
                for k in [1, 2, 3, 5, 8, 25] {
                    assert_eq!(
                        dg.cut(k).unwrap(),
                        naive(&pts, method, k),
                        "{method} seed {seed} k {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn ties_merge_lowest_pair_first() {
        // four corners of a unit square: every side ties
        let flat = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let dg = linkage(&flat, 2, Linkage::Average);
        assert_eq!((dg.merges[0].into, dg.merges[0].from), (0, 1));
        assert_eq!(dg.cut(3).unwrap(), [0, 0, 1, 2]);
    }

    #[test]
    fn trivial_cuts() {
        let flat: Vec<f64> = lcg_points(6, 3).into_iter().flatten().collect();
        let dg = linkage(&flat, 2, Linkage::Ward);
        assert_eq!(dg.cut(6).unwrap(), [0, 1, 2, 3, 4, 5]);
        assert_eq!(dg.cut(1).unwrap(), [0; 6]);
        assert!(matches!(
            dg.cut(7),
            Err(GeometryError::BadClusterCount { .. })
        ));
        let heights: Vec<f64> = dg.merges.iter().map(|m| m.distance).collect();
        assert!(
            heights.windows(2).all(|w| w[0] <= w[1] + 1e-12),
            "{heights:?}"
        );
    }

    #[test]
    fn labels_round_trip() {
        let vocab =
            Vocabulary::from_entries(vec![("a".into(), 3), ("b".into(), 2), ("c".into(), 1)])
                .unwrap();
        let mut cl = Clustering::from_assignment(vec![0, 1, 0], Linkage::Average).unwrap();
        cl.set_label(1, "Politics").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.tsv");
        cl.write_tsv(&vocab, &p).unwrap();
        let back = Clustering::read_tsv(&p, &vocab, Linkage::Average).unwrap();
        assert_eq!(back, cl);
        assert_eq!(back.labelled("politics"), Some(1));
        assert!(Clustering::from_assignment(vec![0, 2], Linkage::Ward).is_err());
    }
}
