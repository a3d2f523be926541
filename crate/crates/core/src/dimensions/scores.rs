use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::build::SocialDimension;
use super::DimensionError;
use crate::geometry::NeighborIndex;
use crate::scalar::Real;
use crate::stats;

pub const SCORE_HEADER: &str = "community_id\traw\tz\tpercentile";

/// Per-community scores on one dimension, indexed by dense id.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    pub dimension: String,
    pub communities: Vec<String>,
    pub raw: Vec<f64>,
    pub z: Vec<f64>,
    /// Average rank scaled to (0, 100].
    pub percentile: Vec<f64>,
    pub mean: f64,
    /// Population standard deviation of `raw`.
    pub sd: f64,
}

impl ScoreTable {
    pub fn from_raw(
        dimension: &str,
        communities: Vec<String>,
        raw: Vec<f64>,
    ) -> Result<Self, DimensionError> {
        let mean = stats::mean(&raw).ok_or(DimensionError::ZeroVariance)?;
        let sd = stats::population_sd(&raw).ok_or(DimensionError::ZeroVariance)?;
        if !(sd > 0.0) {
            return Err(DimensionError::ZeroVariance);
        }
        let z = raw.iter().map(|r| (r - mean) / sd).collect();
        let n = raw.len() as f64;
        let percentile = stats::average_ranks(&raw)
            .into_iter()
            .map(|r| 100.0 * r / n)
            .collect();
        Ok(ScoreTable {
            dimension: dimension.to_string(),
            communities,
            raw,
            z,
            percentile,
            mean,
            sd,
        })
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn index(&self) -> HashMap<&str, usize> {
        self.communities
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect()
    }

    pub fn z_of(&self, community: &str) -> Option<f64> {
        self.communities
            .iter()
            .position(|c| c == community)
            .map(|i| self.z[i])
    }

    pub fn write_tsv(&self, path: &Path) -> Result<(), DimensionError> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{SCORE_HEADER}")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                self.communities[i], self.raw[i], self.z[i], self.percentile[i]
            )?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a score export; z-scores and percentiles are recomputed from the raw column.
    pub fn read_tsv(path: &Path, dimension: &str) -> Result<Self, DimensionError> {
        let bad = |line: usize, reason: String| DimensionError::BadTable {
            path: path.display().to_string(),
            line,
            reason,
        };
        let (mut communities, mut raw) = (Vec::new(), Vec::new());
        for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
            let line = line?;
            if i == 0 {
                if line != SCORE_HEADER {
                    return Err(bad(1, format!("expected header `{SCORE_HEADER}`")));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(bad(i + 1, format!("expected 4 fields, got {}", f.len())));
            }
            let r: f64 = f[1]
                .parse()
                .map_err(|_| bad(i + 1, format!("bad raw score `{}`", f[1])))?;
            communities.push(f[0].to_string());
            raw.push(r);
        }
        ScoreTable::from_raw(dimension, communities, raw)
    }
}

/// Projects every unit-normalized community vector onto the dimension.
pub fn score_communities<F: Real>(
    index: &NeighborIndex<'_, F>,
    dimension: &SocialDimension,
) -> Result<ScoreTable, DimensionError> {
    if dimension.dim() != index.embedding().dim() {
        return Err(DimensionError::DimMismatch {
            dimension: dimension.dim(),
            embedding: index.embedding().dim(),
        });
    }
    if dimension.is_degenerate() {
        return Err(DimensionError::Degenerate {
            norm: dimension.diff_norm(),
        });
    }
    let raw = (0..index.len() as u32)
        .map(|c| {
            index
                .unit(c)
                .iter()
                .zip(&dimension.diff)
                .map(|(u, d)| u.as_f64() * d)
                .sum()
        })
        .collect();
    let names = index
        .embedding()
        .vocab()
        .names()
        .map(String::from)
        .collect();
    ScoreTable::from_raw(&dimension.name, names, raw)
}

/// Pearson correlation of two score tables over the same communities.
pub fn compare_dimensions(a: &ScoreTable, b: &ScoreTable) -> Result<f64, DimensionError> {
    if a.communities != b.communities {
        return Err(DimensionError::VocabMismatch);
    }
    stats::pearson(&a.raw, &b.raw).ok_or(DimensionError::ZeroVariance)
}
