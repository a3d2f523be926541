use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::comments::PoliticalComments;
use super::PolarizationError;
use crate::month::YearMonth;

/// Months before a comment that an author's first political comment must precede
/// for the comment to count as made by an existing user.
pub const DEFAULT_LAG_MONTHS: i64 = 12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Period {
    #[default]
    Year,
    Month,
}

impl Period {
    fn key(self, m: YearMonth) -> i64 {
        match self {
            Period::Year => m.year() as i64,
            Period::Month => m.ordinal(),
        }
    }

    pub fn label(self, key: i64) -> String {
        match self {
            Period::Year => key.to_string(),
            Period::Month => YearMonth::from_ordinal(key).to_string(),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Period::Year => "year",
            Period::Month => "month",
        })
    }
}

impl FromStr for Period {
    type Err = PolarizationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "year" => Ok(Period::Year),
            "month" => Ok(Period::Month),
            _ => Err(PolarizationError::UnknownPeriod(s.to_string())),
        }
    }
}

/// One period of the new/existing decomposition of the change in mean |z|.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub period: String,
    pub n_new: u64,
    pub n_existing: u64,
    pub mean_new: Option<f64>,
    pub mean_existing: Option<f64>,
    pub mean_current: f64,
    pub mean_previous: f64,
    pub delta_new: f64,
    pub delta_existing: f64,
}

impl DecompositionRow {
    pub fn observed_change(&self) -> f64 {
        self.mean_current - self.mean_previous
    }
}

#[derive(Clone, Copy, Default)]
struct Acc {
    new: (f64, u64),
    existing: (f64, u64),
}

impl Acc {
    fn all(&self) -> (f64, u64) {
        (self.new.0 + self.existing.0, self.new.1 + self.existing.1)
    }
}

fn accumulate(comments: &PoliticalComments, period: Period, lag: i64) -> BTreeMap<i64, Acc> {
    let mut acc: BTreeMap<i64, Acc> = BTreeMap::new();
    for (u, r) in comments.authored() {
        let first = comments
            .first_political(u)
            .expect("authored row implies first political month");
        let e = acc.entry(period.key(r.month)).or_default();
        let slot = if r.month.months_since(first) >= lag {
            &mut e.existing
        } else {
            &mut e.new
        };
        slot.0 += r.count as f64 * r.z.abs();
        slot.1 += r.count;
    }
    acc
}

fn row(period: Period, key: i64, cur: &Acc, prev: &Acc) -> DecompositionRow {
    let mean = |(s, n): (f64, u64)| (n > 0).then(|| s / n as f64);
    let (all, before) = (cur.all(), prev.all());
    let c = all.1 as f64;
    let mean_previous = mean(before).expect("previous period non-empty");
    let share = |(s, n): (f64, u64)| {
        if n == 0 {
            0.0
        } else {
            n as f64 / c * (s / n as f64 - mean_previous)
        }
    };
    DecompositionRow {
        period: period.label(key),
        n_new: cur.new.1,
        n_existing: cur.existing.1,
        mean_new: mean(cur.new),
        mean_existing: mean(cur.existing),
        mean_current: mean(all).expect("current period non-empty"),
        mean_previous,
        delta_new: share(cur.new),
        delta_existing: share(cur.existing),
    }
}

/// `Δn_t = |N_t|/|C_t| (z̄(N_t) − z̄(C_{t−1}))` and `Δe_t = |E_t|/|C_t| (z̄(E_t) − z̄(C_{t−1}))`
/// for every period whose predecessor has activity.
pub fn decompose_change(
    comments: &PoliticalComments,
    period: Period,
    lag: i64,
) -> Vec<DecompositionRow> {
    let acc = accumulate(comments, period, lag);
    acc.iter()
        .filter_map(|(&k, cur)| acc.get(&(k - 1)).map(|prev| row(period, k, cur, prev)))
        .collect()
}

/// The decomposition for a single period `key` (a year, or a month ordinal).
pub fn decompose_period(
    comments: &PoliticalComments,
    period: Period,
    key: i64,
    lag: i64,
) -> Result<DecompositionRow, PolarizationError> {
    let acc = accumulate(comments, period, lag);
    let cur = acc
        .get(&key)
        .ok_or_else(|| PolarizationError::EmptyPeriod(period.label(key)))?;
    let prev = acc
        .get(&(key - 1))
        .ok_or_else(|| PolarizationError::EmptyPeriod(period.label(key - 1)))?;
    Ok(row(period, key, cur, prev))
}
