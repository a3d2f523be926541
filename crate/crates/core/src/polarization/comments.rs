use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::subset::PoliticalSubset;
use super::PolarizationError;
use crate::dimensions::ScoreTable;
use crate::ingest::MonthlyActivityTable;
use crate::month::YearMonth;

/// Bin values in order; index with [`bin_index`].
pub const BINS: [i8; 5] = [-2, -1, 0, 1, 2];

/// Partisan bin of a z-score under the default edges.
pub fn bin_of(z: f64) -> i8 {
    BinEdges::default().bin(z)
}

/// Bin and wing boundaries on the partisan z axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinEdges {
    /// Ascending boundaries between the five bins.
    pub bins: [f64; 4],
    /// Wings are `z ≤ −wing` and `z ≥ wing`.
    pub wing: f64,
}

impl Default for BinEdges {
    fn default() -> Self {
        BinEdges {
            bins: [-2.0, -1.0, 1.0, 2.0],
            wing: 1.0,
        }
    }
}

impl BinEdges {
    /// Boundaries belong to the bin nearer the center.
    pub fn bin(&self, z: f64) -> i8 {
        let [a, b, c, d] = self.bins;
        if z < a {
            -2
        } else if z < b {
            -1
        } else if z <= c {
            0
        } else if z <= d {
            1
        } else {
            2
        }
    }

    pub fn wing(&self, z: f64) -> Wing {
        if z <= -self.wing {
            Wing::Left
        } else if z >= self.wing {
            Wing::Right
        } else {
            Wing::Center
        }
    }

    pub fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.bins.iter().any(|e| !e.is_finite()) || self.bins.windows(2).any(|w| w[0] >= w[1]) {
            out.push(format!(
                "bin edges must be finite and strictly increasing, got {:?}",
                self.bins
            ));
        } else if !(self.bins[1] < 0.0 && self.bins[2] > 0.0) {
            out.push(format!(
                "the center bin must contain 0, got {:?}",
                self.bins
            ));
        }
        if !(self.wing > 0.0 && self.wing.is_finite()) {
            out.push(format!("wing edge must be positive, got {}", self.wing));
        }
        out
    }
}

pub fn bin_index(bin: i8) -> usize {
    (bin + 2) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wing {
    Left,
    Center,
    Right,
}

impl Wing {
    pub const ALL: [Wing; 3] = [Wing::Left, Wing::Center, Wing::Right];

    /// Left is `z ≤ −1`, right is `z ≥ 1`, center is the open interval between.
    pub fn of(z: f64) -> Wing {
        BinEdges::default().wing(z)
    }
}

impl fmt::Display for Wing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Wing::Left => "left",
            Wing::Center => "center",
            Wing::Right => "right",
        })
    }
}

impl FromStr for Wing {
    type Err = PolarizationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Wing::Left),
            "center" => Ok(Wing::Center),
            "right" => Ok(Wing::Right),
            _ => Err(PolarizationError::UnknownWing(s.to_string())),
        }
    }
}

/// Comments in one (month, community, author) cell; `user` is `None` for deleted comments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommentRow {
    pub month: YearMonth,
    pub community: u32,
    pub user: Option<u32>,
    pub count: u64,
    pub z: f64,
    pub bin: i8,
}

/// Per-community political status: partisan z and bin, or `None` if not political.
#[derive(Clone, Debug, PartialEq)]
pub struct PoliticalAssignment {
    pub z: Vec<f64>,
    pub bin: Vec<Option<i8>>,
}

impl PoliticalAssignment {
    /// Political communities are the subset members, binned by their partisan z.
    pub fn from_scores(
        subset: &PoliticalSubset,
        partisan: &ScoreTable,
    ) -> Result<Self, PolarizationError> {
        Self::with_edges(subset, partisan, &BinEdges::default())
    }

    pub fn with_edges(
        subset: &PoliticalSubset,
        partisan: &ScoreTable,
        edges: &BinEdges,
    ) -> Result<Self, PolarizationError> {
        if partisan.len() != subset.vocab_size {
            return Err(PolarizationError::ScoreMismatch {
                scores: partisan.len(),
                communities: subset.vocab_size,
            });
        }
        let mask = subset.mask();
        Ok(PoliticalAssignment {
            z: partisan.z.clone(),
            bin: partisan
                .z
                .iter()
                .zip(mask)
                .map(|(&z, m)| m.then(|| edges.bin(z)))
                .collect(),
        })
    }

    /// Number of political communities in each bin.
    pub fn bin_sizes(&self) -> [usize; 5] {
        let mut s = [0; 5];
        for b in self.bin.iter().flatten() {
            s[bin_index(*b)] += 1;
        }
        s
    }
}

/// Political activity with each author's first political month fixed from the full history.
#[derive(Clone, Debug, PartialEq)]
pub struct PoliticalComments {
    users: Vec<String>,
    rows: Vec<CommentRow>,
    first_political: Vec<Option<YearMonth>>,
}

impl PoliticalComments {
    pub fn from_monthly(monthly: &MonthlyActivityTable, political: &PoliticalAssignment) -> Self {
        let rows = monthly
            .rows()
            .iter()
            .filter_map(|r| {
                let bin = (*political.bin.get(r.community as usize)?)?;
                Some(CommentRow {
                    month: r.month,
                    community: r.community,
                    user: r.user,
                    count: r.count,
                    z: political.z[r.community as usize],
                    bin,
                })
            })
            .collect();
        Self::from_rows(monthly.users().to_vec(), rows)
    }

    pub fn from_rows(users: Vec<String>, mut rows: Vec<CommentRow>) -> Self {
        rows.retain(|r| r.count > 0);
        rows.sort_by_key(|r| (r.month, r.community, r.user));
        let mut first_political = vec![None; users.len()];
        for r in &rows {
            if let Some(u) = r.user {
                let slot: &mut Option<YearMonth> = &mut first_political[u as usize];
                if slot.is_none_or(|m| r.month < m) {
                    *slot = Some(r.month);
                }
            }
        }
        PoliticalComments {
            users,
            rows,
            first_political,
        }
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn rows(&self) -> &[CommentRow] {
        &self.rows
    }

    /// Rows with a known author.
    pub fn authored(&self) -> impl Iterator<Item = (u32, &CommentRow)> {
        self.rows.iter().filter_map(|r| r.user.map(|u| (u, r)))
    }

    pub fn first_political(&self, user: u32) -> Option<YearMonth> {
        self.first_political[user as usize]
    }

    /// Calendar year of the author's first political comment.
    pub fn cohort(&self, user: u32) -> Option<i32> {
        self.first_political(user).map(|m| m.year())
    }

    /// Keeps the rows accepted by `keep`; first-political months still reflect the full history.
    pub fn filter(&self, keep: impl Fn(&CommentRow) -> bool) -> Self {
        PoliticalComments {
            users: self.users.clone(),
            rows: self.rows.iter().filter(|r| keep(r)).copied().collect(),
            first_political: self.first_political.clone(),
        }
    }

    pub fn wing(&self, wing: Wing) -> Self {
        self.wing_with(wing, &BinEdges::default())
    }

    pub fn wing_with(&self, wing: Wing, edges: &BinEdges) -> Self {
        self.filter(|r| edges.wing(r.z) == wing)
    }

    pub fn months(&self) -> Vec<YearMonth> {
        let mut m: Vec<YearMonth> = self.rows.iter().map(|r| r.month).collect();
        m.dedup();
        m
    }

    pub fn total(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn authored_total(&self) -> u64 {
        self.authored().map(|(_, r)| r.count).sum()
    }
}
