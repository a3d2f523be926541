use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::comments::PoliticalComments;
use super::PolarizationError;

pub const DEFAULT_BIN_WIDTH: f64 = 0.25;
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// `D_KL(P ‖ Q)` in bits. When some `q_i = 0` has `p_i > 0`, both distributions are
/// smoothed by adding `epsilon` to every cell and renormalizing; returns whether that happened.
pub fn kl_divergence_bits(p: &[f64], q: &[f64], epsilon: f64) -> (f64, bool) {
    assert_eq!(p.len(), q.len(), "distributions over different supports");
    let smooth = p.iter().zip(q).any(|(&pi, &qi)| pi > 0.0 && qi == 0.0);
    let adjust = |v: &[f64]| -> Vec<f64> {
        if !smooth {
            return v.to_vec();
        }
        let total: f64 = v.iter().sum::<f64>() + epsilon * v.len() as f64;
        v.iter().map(|x| (x + epsilon) / total).collect()
    };
    let (p, q) = (adjust(p), adjust(q));
    let kl = p
        .iter()
        .zip(&q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi / qi).log2())
        .sum();
    (kl, smooth)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeletedComparison {
    pub kept: u64,
    pub deleted: u64,
    pub kept_fraction: f64,
    pub mean_kept: f64,
    pub mean_deleted: f64,
    /// `mean_kept − mean_deleted`.
    pub delta_mean: f64,
    /// `D_KL(kept ‖ deleted)` over z histograms.
    pub kl_bits: f64,
    pub bin_width: f64,
    pub epsilon: f64,
    pub smoothed: bool,
}

/// Compares the z distributions of authored (P) and deleted (Q) political comments.
pub fn compare_deleted(
    comments: &PoliticalComments,
    bin_width: f64,
    epsilon: f64,
) -> Result<DeletedComparison, PolarizationError> {
    if !(bin_width > 0.0) {
        return Err(PolarizationError::BadThreshold(format!(
            "histogram bin width {bin_width}"
        )));
    }
    let mut hist: BTreeMap<i64, (u64, u64)> = BTreeMap::new();
    let (mut kept, mut deleted) = ((0.0, 0u64), (0.0, 0u64));
    for r in comments.rows() {
        let cell = hist.entry((r.z / bin_width).floor() as i64).or_default();
        let acc = if r.user.is_some() {
            cell.0 += r.count;
            &mut kept
        } else {
            cell.1 += r.count;
            &mut deleted
        };
        acc.0 += r.count as f64 * r.z;
        acc.1 += r.count;
    }
    if kept.1 == 0 {
        return Err(PolarizationError::EmptyGroup("non-deleted"));
    }
    if deleted.1 == 0 {
        return Err(PolarizationError::EmptyGroup("deleted"));
    }
    let p: Vec<f64> = hist.values().map(|c| c.0 as f64 / kept.1 as f64).collect();
    let q: Vec<f64> = hist
        .values()
        .map(|c| c.1 as f64 / deleted.1 as f64)
        .collect();
    let (kl_bits, smoothed) = kl_divergence_bits(&p, &q, epsilon);
    let (mean_kept, mean_deleted) = (kept.0 / kept.1 as f64, deleted.0 / deleted.1 as f64);
    Ok(DeletedComparison {
        kept: kept.1,
        deleted: deleted.1,
        kept_fraction: kept.1 as f64 / (kept.1 + deleted.1) as f64,
        mean_kept,
        mean_deleted,
        delta_mean: mean_kept - mean_deleted,
        kl_bits,
        bin_width,
        epsilon,
        smoothed,
    })
}
