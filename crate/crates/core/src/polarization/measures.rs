use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::comments::{bin_index, PoliticalComments};
use super::PolarizationError;
use crate::month::YearMonth;

fn normalize(counts: [u64; 5]) -> Option<[f64; 5]> {
    let total: u64 = counts.iter().sum();
    (total > 0).then(|| counts.map(|c| c as f64 / total as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinDistribution {
    pub overall: [f64; 5],
    pub counts: [u64; 5],
    /// Months with no authored comments are omitted.
    pub monthly: Vec<(YearMonth, [f64; 5])>,
}

/// Share of authored political comments per bin, overall and per month.
pub fn bin_activity(comments: &PoliticalComments) -> Result<BinDistribution, PolarizationError> {
    let mut counts = [0u64; 5];
    let mut monthly: BTreeMap<YearMonth, [u64; 5]> = BTreeMap::new();
    for (_, r) in comments.authored() {
        counts[bin_index(r.bin)] += r.count;
        monthly.entry(r.month).or_default()[bin_index(r.bin)] += r.count;
    }
    let overall = normalize(counts).ok_or(PolarizationError::NoComments)?;
    Ok(BinDistribution {
        overall,
        counts,
        monthly: monthly
            .into_iter()
            .filter_map(|(m, c)| normalize(c).map(|d| (m, d)))
            .collect(),
    })
}

/// Per-author comment counts by bin, ordered by author.
fn author_bins(comments: &PoliticalComments) -> BTreeMap<u32, [u64; 5]> {
    let mut per: BTreeMap<u32, [u64; 5]> = BTreeMap::new();
    for (u, r) in comments.authored() {
        per.entry(u).or_default()[bin_index(r.bin)] += r.count;
    }
    per
}

fn weighted_shares(per: &BTreeMap<u32, [u64; 5]>, weight: impl Fn(u32) -> u64) -> Option<[f64; 5]> {
    let mut out = [0.0; 5];
    let mut total = 0u64;
    for (&u, c) in per {
        let w = weight(u);
        if w == 0 {
            continue;
        }
        let n: u64 = c.iter().sum();
        for b in 0..5 {
            out[b] += w as f64 * c[b] as f64 / n as f64;
        }
        total += w;
    }
    (total > 0).then(|| out.map(|v| v / total as f64))
}

/// `f(b1, ·)`: comment-weighted mean, over authors active in `b1`, of each author's
/// share of political activity in every bin.
pub fn selection_distribution(
    comments: &PoliticalComments,
    b1: i8,
) -> Result<[f64; 5], PolarizationError> {
    let per = author_bins(comments);
    weighted_shares(&per, |u| per[&u][bin_index(b1)]).ok_or(PolarizationError::NoAuthorsInBin(b1))
}

/// `f(b1, ·)` for every bin; `None` where no author is active in `b1`.
pub fn selection_matrix(comments: &PoliticalComments) -> [Option<[f64; 5]>; 5] {
    let per = author_bins(comments);
    [-2i8, -1, 0, 1, 2].map(|b1| weighted_shares(&per, |u| per[&u][bin_index(b1)]))
}

/// Same as [`selection_distribution`] with authors weighted by their comments in one community.
pub fn community_selection(
    comments: &PoliticalComments,
    community: u32,
) -> Result<[f64; 5], PolarizationError> {
    let per = author_bins(comments);
    let mut w: HashMap<u32, u64> = HashMap::new();
    for (u, r) in comments.authored() {
        if r.community == community {
            *w.entry(u).or_default() += r.count;
        }
    }
    weighted_shares(&per, |u| w.get(&u).copied().unwrap_or(0))
        .ok_or(PolarizationError::NoAuthorsInCommunity(community))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonthlyValue {
    pub month: YearMonth,
    pub value: f64,
    pub comments: u64,
}

/// Mean absolute z of authored political comments per month.
pub fn monthly_polarization(comments: &PoliticalComments) -> Vec<MonthlyValue> {
    let mut acc: BTreeMap<YearMonth, (f64, u64)> = BTreeMap::new();
    for (_, r) in comments.authored() {
        let e = acc.entry(r.month).or_default();
        e.0 += r.count as f64 * r.z.abs();
        e.1 += r.count;
    }
    acc.into_iter()
        .map(|(month, (s, n))| MonthlyValue {
            month,
            value: s / n as f64,
            comments: n,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeShare {
    pub month: YearMonth,
    pub left: f64,
    pub right: f64,
    pub total: f64,
    pub comments: u64,
}

/// Fraction of each month's authored political comments with `|z| > threshold`, by sign.
pub fn extreme_share(comments: &PoliticalComments, threshold: f64) -> Vec<ExtremeShare> {
    let mut acc: BTreeMap<YearMonth, (u64, u64, u64)> = BTreeMap::new();
    for (_, r) in comments.authored() {
        let e = acc.entry(r.month).or_default();
        if r.z.abs() > threshold {
            if r.z < 0.0 {
                e.0 += r.count;
            } else {
                e.1 += r.count;
            }
        }
        e.2 += r.count;
    }
    acc.into_iter()
        .map(|(month, (l, rt, n))| {
            let (left, right) = (l as f64 / n as f64, rt as f64 / n as f64);
            ExtremeShare {
                month,
                left,
                right,
                total: left + right,
                comments: n,
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CohortAxis {
    /// Calendar month ordinal.
    #[default]
    Month,
    /// Months since the author's first political comment (0 in that month).
    AccountAge,
    /// Distinct political months up to and including this one (1 in the first).
    ActiveMonths,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohortPoint {
    pub cohort: i32,
    /// Month ordinal, account age, or active-month count depending on the axis.
    pub x: i64,
    pub mean_abs_z: f64,
    pub comments: u64,
}

/// Mean |z| per (cohort, axis value).
pub fn cohort_series(comments: &PoliticalComments, axis: CohortAxis) -> Vec<CohortPoint> {
    let mut active: HashMap<u32, Vec<YearMonth>> = HashMap::new();
    if axis == CohortAxis::ActiveMonths {
        for (u, r) in comments.authored() {
            let v = active.entry(u).or_default();
            if v.last() != Some(&r.month) {
                v.push(r.month);
            }
        }
        for v in active.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
    }
    let mut acc: BTreeMap<(i32, i64), (f64, u64)> = BTreeMap::new();
    for (u, r) in comments.authored() {
        let first = comments
            .first_political(u)
            .expect("authored row implies first political month");
        let x = match axis {
            CohortAxis::Month => r.month.ordinal(),
            CohortAxis::AccountAge => r.month.months_since(first),
            CohortAxis::ActiveMonths => {
                active[&u].binary_search(&r.month).expect("month recorded") as i64 + 1
            }
        };
        let e = acc.entry((first.year(), x)).or_default();
        e.0 += r.count as f64 * r.z.abs();
        e.1 += r.count;
    }
    acc.into_iter()
        .map(|((cohort, x), (s, n))| CohortPoint {
            cohort,
            x,
            mean_abs_z: s / n as f64,
            comments: n,
        })
        .collect()
}
