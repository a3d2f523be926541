//! Political-activity measurements over partisan-scored communities.

mod comments;
mod decompose;
mod deleted;
mod implicit;
mod measures;
mod subset;
mod users;

pub use comments::{
    bin_index, bin_of, BinEdges, CommentRow, PoliticalAssignment, PoliticalComments, Wing, BINS,
};
pub use decompose::{
    decompose_change, decompose_period, DecompositionRow, Period, DEFAULT_LAG_MONTHS,
};
pub use deleted::{
    compare_deleted, kl_divergence_bits, DeletedComparison, DEFAULT_BIN_WIDTH, DEFAULT_EPSILON,
};
pub use implicit::{implicit_explicit, ImplicitExplicit, PriorShare, DEFAULT_IMPLICIT_Z};
pub use measures::{
    bin_activity, cohort_series, community_selection, extreme_share, monthly_polarization,
    selection_distribution, selection_matrix, BinDistribution, CohortAxis, CohortPoint,
    ExtremeShare, MonthlyValue,
};
pub use subset::{select_political, PoliticalSubset, DEFAULT_COVERAGE};
pub use users::{
    correlation_matrix, polarization_fraction, polarization_matrix, user_correlation,
    user_month_scores, MonthMatrix, UserMonthScores, DEFAULT_DELTA, DEFAULT_MIN_COMMENTS,
};

use serde::{Deserialize, Serialize};

pub const DEFAULT_EXTREME_Z: f64 = 3.0;

#[derive(Debug, thiserror::Error)]
pub enum PolarizationError {
    #[error("cluster {0} has no members")]
    EmptyCluster(u32),
    #[error("coverage must be in (0, 1], got {0}")]
    BadCoverage(f64),
    #[error("score table has {scores} communities but {communities} are expected")]
    ScoreMismatch { scores: usize, communities: usize },
    #[error("no political comments")]
    NoComments,
    #[error("no author has activity in bin {0}")]
    NoAuthorsInBin(i8),
    #[error("no author has activity in community {0}")]
    NoAuthorsInCommunity(u32),
    #[error("no political activity in period {0}")]
    EmptyPeriod(String),
    #[error("no {0} comments to compare")]
    EmptyGroup(&'static str),
    #[error("invalid threshold: {0}")]
    BadThreshold(String),
    #[error("unknown wing `{0}` (expected left, center or right)")]
    UnknownWing(String),
    #[error("unknown period `{0}` (expected year or month)")]
    UnknownPeriod(String),
}

/// Polarization series, decomposition, and cohort means restricted to one wing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WingReport {
    pub wing: Wing,
    pub monthly: Vec<MonthlyValue>,
    pub decomposition: Vec<DecompositionRow>,
    pub cohorts: Vec<CohortPoint>,
}

pub fn wing_analyses(
    comments: &PoliticalComments,
    wing: Wing,
    edges: &BinEdges,
    period: Period,
    lag: i64,
) -> WingReport {
    let sub = comments.wing_with(wing, edges);
    WingReport {
        wing,
        monthly: monthly_polarization(&sub),
        decomposition: decompose_change(&sub, period, lag),
        cohorts: cohort_series(&sub, CohortAxis::Month),
    }
}

#[cfg(test)]
mod tests;
