use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::similarity::{Neighbor, NeighborIndex};
use super::GeometryError;
use crate::scalar::Real;

/// Quadruples `a : b :: c : d` of community ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnalogySet {
    pub name: String,
    pub quadruples: Vec<[String; 4]>,
}

impl AnalogySet {
    pub fn new(
        name: impl Into<String>,
        quadruples: Vec<[String; 4]>,
    ) -> Result<Self, GeometryError> {
        for (i, q) in quadruples.iter().enumerate() {
            if q[0] == q[1] || q[2] == q[3] {
                return Err(GeometryError::BadAnalogy {
                    line: i + 1,
                    reason: "a = b or c = d".into(),
                });
            }
        }
        Ok(AnalogySet {
            name: name.into(),
            quadruples,
        })
    }

    /// Reads `a<TAB>b<TAB>c<TAB>d` lines; blank lines and `#` comments are skipped.
    pub fn load(path: &Path) -> Result<Self, GeometryError> {
        let reader = BufReader::new(File::open(path)?);
        let mut quadruples = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = t.split('\t').map(str::trim).collect();
            let [a, b, c, d] = f[..] else {
                return Err(GeometryError::BadAnalogy {
                    line: i + 1,
                    reason: format!("expected 4 fields, got {}", f.len()),
                });
            };
            if a == b || c == d {
                return Err(GeometryError::BadAnalogy {
                    line: i + 1,
                    reason: "a = b or c = d".into(),
                });
            }
            quadruples.push([a, b, c, d].map(String::from));
        }
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(AnalogySet { name, quadruples })
    }
}

/// Ranked answers to `a : b :: c : ?`, excluding the three query communities.
pub fn solve_analogy<F: Real>(
    index: &NeighborIndex<'_, F>,
    a: u32,
    b: u32,
    c: u32,
    top_n: usize,
) -> Result<Vec<Neighbor<F>>, GeometryError> {
    let target: Vec<F> = (index.unit(b).iter().zip(index.unit(a)).zip(index.unit(c)))
        .map(|((&vb, &va), &vc)| vb - va + vc)
        .collect();
    index.top_k(&target, &[a, b, c], top_n)
}

/// Same as [`solve_analogy`] but addressed by community id.
pub fn solve_analogy_named<F: Real>(
    index: &NeighborIndex<'_, F>,
    a: &str,
    b: &str,
    c: &str,
    top_n: usize,
) -> Result<Vec<Neighbor<F>>, GeometryError> {
    solve_analogy(index, index.id(a)?, index.id(b)?, index.id(c)?, top_n)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AnalogyScore {
    pub top1: f64,
    pub top5: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Fraction of quadruples whose expected answer ranks first / within the top five.
pub fn evaluate_analogies<F: Real>(
    index: &NeighborIndex<'_, F>,
    set: &AnalogySet,
) -> Result<AnalogyScore, GeometryError> {
    let mut score = AnalogyScore::default();
    let (mut hit1, mut hit5) = (0usize, 0usize);
    for q in &set.quadruples {
        let ids: Vec<Option<u32>> = q.iter().map(|s| index.embedding().vocab().id(s)).collect();
        let [Some(a), Some(b), Some(c), Some(d)] = ids[..] else {
            score.skipped += 1;
            continue;
        };
        score.evaluated += 1;
        let ranked = match solve_analogy(index, a, b, c, 5) {
            Ok(r) => r,
            Err(GeometryError::ZeroVector) => Vec::new(),
            Err(e) => return Err(e),
        };
        if let Some(pos) = ranked.iter().position(|n| n.id == d) {
            hit5 += 1;
            if pos == 0 {
                hit1 += 1;
            }
        }
    }
    if score.evaluated == 0 {
        return Err(GeometryError::NothingToEvaluate {
            skipped: score.skipped,
        });
    }
    score.top1 = hit1 as f64 / score.evaluated as f64;
    score.top5 = hit5 as f64 / score.evaluated as f64;
    Ok(score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::Embedding;
    use crate::ingest::Vocabulary;

    fn emb(names: &[&str], rows: &[[f64; 3]]) -> Embedding<f64> {
        let vocab =
            Vocabulary::from_entries(names.iter().map(|n| (n.to_string(), 1)).collect()).unwrap();
        Embedding::new(vocab, 3, rows.iter().flatten().copied().collect()).unwrap()
    }

    #[test]
    fn zero_offset_returns_neighbor_of_c() {
        let e = emb(
            &["a", "c", "x", "y"],
            &[
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.1, 1.0, 0.0],
                [0.0, 0.0, 1.0],
            ],
        );
        let idx = NeighborIndex::new(&e);
        let r = solve_analogy_named(&idx, "a", "a", "c", 1).unwrap();
        assert_eq!(e.vocab().name(r[0].id), "x");
    }

    #[test]
    fn query_terms_are_excluded() {
        // b − a + c lands closest to b itself; the answer must come from elsewhere
        let e = emb(
            &["a", "b", "c", "d"],
            &[
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.9, 0.1, 0.0],
                [0.0, 0.5, 1.0],
            ],
        );
        let idx = NeighborIndex::new(&e);
        let all = idx.rank_all(&[-0.1, 1.1, 0.0], &[]).unwrap();
        assert_eq!(e.vocab().name(all[0].id), "b");
        let r = solve_analogy_named(&idx, "a", "b", "c", 1).unwrap();
        assert_eq!(e.vocab().name(r[0].id), "d");
    }

    #[test]
    fn out_of_vocab_quadruples_are_skipped() {
        let e = emb(
            &["a", "b", "c", "d"],
            &[
                [1.0, 0.0, 0.0],
                [1.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 1.0, 1.0],
            ],
        );
        let idx = NeighborIndex::new(&e);
        let q = |s: [&str; 4]| s.map(String::from);
        let set =
            AnalogySet::new("t", vec![q(["a", "b", "c", "d"]), q(["a", "b", "c", "zz"])]).unwrap();
        let s = evaluate_analogies(&idx, &set).unwrap();
        assert_eq!((s.evaluated, s.skipped, s.top1, s.top5), (1, 1, 1.0, 1.0));
        let none = AnalogySet::new("t", vec![q(["a", "b", "c", "zz"])]).unwrap();
        assert!(matches!(
            evaluate_analogies(&idx, &none),
            Err(GeometryError::NothingToEvaluate { skipped: 1 })
        ));
    }

    #[test]
    fn loader_skips_comments_and_rejects_degenerate_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("uni.tsv");
        std::fs::write(&p, "# header\n\na\tb\tc\td\n").unwrap();
        let set = AnalogySet::load(&p).unwrap();
        assert_eq!((set.name.as_str(), set.quadruples.len()), ("uni", 1));
        std::fs::write(&p, "a\ta\tc\td\n").unwrap();
        assert!(matches!(
            AnalogySet::load(&p),
            Err(GeometryError::BadAnalogy { line: 1, .. })
        ));
    }
}
