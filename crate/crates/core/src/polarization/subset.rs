use serde::{Deserialize, Serialize};

use super::PolarizationError;
use crate::dimensions::ScoreTable;
use crate::geometry::Clustering;

pub const DEFAULT_COVERAGE: f64 = 0.8;

/// Communities whose `-ness` score reaches the cutoff derived from the politics cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoliticalSubset {
    /// Dense ids, ascending.
    pub members: Vec<u32>,
    pub ness_cutoff: f64,
    pub coverage: f64,
    pub cluster: u32,
    pub cluster_size: usize,
    pub vocab_size: usize,
}

impl PoliticalSubset {
    pub fn contains(&self, community: u32) -> bool {
        self.members.binary_search(&community).is_ok()
    }

    pub fn fraction(&self) -> f64 {
        self.members.len() as f64 / self.vocab_size as f64
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.vocab_size];
        for &c in &self.members {
            m[c as usize] = true;
        }
        m
    }
}

/// The cutoff is the highest `-ness` value reached by at least `coverage` of the
/// politics cluster; every community at or above it, in any cluster, is political.
pub fn select_political(
    ness: &ScoreTable,
    clustering: &Clustering,
    politics_cluster: u32,
    coverage: f64,
) -> Result<PoliticalSubset, PolarizationError> {
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(PolarizationError::BadCoverage(coverage));
    }
    if clustering.assignment.len() != ness.len() {
        return Err(PolarizationError::ScoreMismatch {
            scores: ness.len(),
            communities: clustering.assignment.len(),
        });
    }
    let mut cluster_scores: Vec<f64> = clustering
        .members(politics_cluster)
        .iter()
        .map(|&c| ness.raw[c as usize])
        .collect();
    if cluster_scores.is_empty() {
        return Err(PolarizationError::EmptyCluster(politics_cluster));
    }
    cluster_scores.sort_by(|a, b| b.total_cmp(a));
    let needed = ((coverage * cluster_scores.len() as f64) - 1e-9)
        .ceil()
        .max(1.0) as usize;
    let cutoff = cluster_scores[needed - 1];
    let members = (0..ness.len() as u32)
        .filter(|&c| ness.raw[c as usize] >= cutoff)
        .collect();
    Ok(PoliticalSubset {
        members,
        ness_cutoff: cutoff,
        coverage,
        cluster: politics_cluster,
        cluster_size: cluster_scores.len(),
        vocab_size: ness.len(),
    })
}
