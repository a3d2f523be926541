use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::comments::PoliticalComments;
use super::PolarizationError;
use crate::month::YearMonth;
use crate::stats;

pub const DEFAULT_MIN_COMMENTS: u64 = 10;
pub const DEFAULT_DELTA: f64 = 1.0;

/// Mean signed z per (month, user) for user-months meeting the comment threshold.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UserMonthScores {
    pub min_comments: u64,
    pub scores: BTreeMap<YearMonth, BTreeMap<u32, f64>>,
}

impl UserMonthScores {
    pub fn months(&self) -> Vec<YearMonth> {
        self.scores.keys().copied().collect()
    }

    /// Users present in both months with their `(t1, t2)` scores.
    fn paired(&self, t1: YearMonth, t2: YearMonth) -> Vec<(f64, f64)> {
        let (Some(a), Some(b)) = (self.scores.get(&t1), self.scores.get(&t2)) else {
            return Vec::new();
        };
        a.iter()
            .filter_map(|(u, &x)| b.get(u).map(|&y| (x, y)))
            .collect()
    }
}

pub fn user_month_scores(
    comments: &PoliticalComments,
    min_comments: u64,
) -> Result<UserMonthScores, PolarizationError> {
    if min_comments == 0 {
        return Err(PolarizationError::BadThreshold(
            "min_comments must be at least 1".into(),
        ));
    }
    let mut acc: BTreeMap<YearMonth, BTreeMap<u32, (f64, u64)>> = BTreeMap::new();
    for (u, r) in comments.authored() {
        let e = acc.entry(r.month).or_default().entry(u).or_default();
        e.0 += r.count as f64 * r.z;
        e.1 += r.count;
    }
    let scores = acc
        .into_iter()
        .map(|(m, users)| {
            let kept: BTreeMap<u32, f64> = users
                .into_iter()
                .filter(|(_, (_, n))| *n >= min_comments)
                .map(|(u, (s, n))| (u, s / n as f64))
                .collect();
            (m, kept)
        })
        .filter(|(_, users)| !users.is_empty())
        .collect();
    Ok(UserMonthScores {
        min_comments,
        scores,
    })
}

/// Fraction of users active in both months whose `|mean z|` grew by at least `delta`.
/// `None` when no user is active in both.
pub fn polarization_fraction(
    scores: &UserMonthScores,
    t1: YearMonth,
    t2: YearMonth,
    delta: f64,
) -> Option<f64> {
    let pairs = scores.paired(t1, t2);
    if pairs.is_empty() {
        return None;
    }
    let up = pairs
        .iter()
        .filter(|(a, b)| b.abs() - a.abs() >= delta)
        .count();
    Some(up as f64 / pairs.len() as f64)
}

/// Pearson correlation of users' mean z between two months; `None` if undefined.
pub fn user_correlation(scores: &UserMonthScores, t1: YearMonth, t2: YearMonth) -> Option<f64> {
    let (a, b): (Vec<f64>, Vec<f64>) = scores.paired(t1, t2).into_iter().unzip();
    stats::pearson(&a, &b)
}

/// Month × month matrices over every month in `scores`, rows `t1`, columns `t2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonthMatrix {
    pub months: Vec<YearMonth>,
    pub values: Vec<Vec<Option<f64>>>,
}

pub fn polarization_matrix(scores: &UserMonthScores, delta: f64) -> MonthMatrix {
    month_matrix(scores, |a, b| polarization_fraction(scores, a, b, delta))
}

pub fn correlation_matrix(scores: &UserMonthScores) -> MonthMatrix {
    month_matrix(scores, |a, b| user_correlation(scores, a, b))
}

fn month_matrix(
    scores: &UserMonthScores,
    cell: impl Fn(YearMonth, YearMonth) -> Option<f64>,
) -> MonthMatrix {
    let months = scores.months();
    let values = months
        .iter()
        .map(|&a| months.iter().map(|&b| cell(a, b)).collect())
        .collect();
    MonthMatrix { months, values }
}
