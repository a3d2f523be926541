use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::comments::{BinEdges, Wing};
use super::subset::PoliticalSubset;
use super::PolarizationError;
use crate::dimensions::ScoreTable;
use crate::ingest::MonthlyActivityTable;
use crate::month::YearMonth;

pub const DEFAULT_IMPLICIT_Z: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorShare {
    pub explicit_month: YearMonth,
    pub users: u64,
    pub prior: u64,
    pub fraction: f64,
}

/// First explicit vs first implicit partisan month for one wing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicitExplicit {
    pub wing: Wing,
    /// Users per `(m_E, m_I)`; `m_I = None` for users never active implicitly.
    pub cells: BTreeMap<(YearMonth, Option<YearMonth>), u64>,
    /// Per `m_E`: share of users whose implicit activity began strictly earlier.
    pub prior: Vec<PriorShare>,
}

/// Implicit communities sit below the `-ness` cutoff with `|z| ≥ z_threshold` on the
/// wing's side; explicit ones are political subset members of that wing.
pub fn implicit_explicit(
    monthly: &MonthlyActivityTable,
    subset: &PoliticalSubset,
    partisan: &ScoreTable,
    ness: &ScoreTable,
    edges: &BinEdges,
    z_threshold: f64,
) -> Result<[ImplicitExplicit; 2], PolarizationError> {
    for t in [partisan, ness] {
        if t.len() != subset.vocab_size {
            return Err(PolarizationError::ScoreMismatch {
                scores: t.len(),
                communities: subset.vocab_size,
            });
        }
    }
    let political = subset.mask();
    let classify = |c: usize, wing: Wing| -> (bool, bool) {
        let z = partisan.z[c];
        if political[c] {
            (edges.wing(z) == wing, false)
        } else {
            let extreme = match wing {
                Wing::Left => z <= -z_threshold,
                Wing::Right => z >= z_threshold,
                Wing::Center => false,
            };
            (false, ness.raw[c] < subset.ness_cutoff && extreme)
        }
    };
    let out = [Wing::Left, Wing::Right].map(|wing| {
        let mut first_e: HashMap<u32, YearMonth> = HashMap::new();
        let mut first_i: HashMap<u32, YearMonth> = HashMap::new();
        for r in monthly.rows() {
            let Some(u) = r.user else { continue };
            let (explicit, implicit) = classify(r.community as usize, wing);
            // rows are month-ordered, so the first insert is the earliest month
            if explicit {
                first_e.entry(u).or_insert(r.month);
            }
            if implicit {
                first_i.entry(u).or_insert(r.month);
            }
        }
        let mut cells = BTreeMap::new();
        for (u, &me) in &first_e {
            *cells.entry((me, first_i.get(u).copied())).or_insert(0u64) += 1;
        }
        let mut per_e: BTreeMap<YearMonth, (u64, u64)> = BTreeMap::new();
        for (&(me, mi), &n) in &cells {
            let e = per_e.entry(me).or_default();
            e.0 += n;
            if mi.is_some_and(|mi| mi < me) {
                e.1 += n;
            }
        }
        ImplicitExplicit {
            wing,
            cells,
            prior: per_e
                .into_iter()
                .map(|(m, (users, prior))| PriorShare {
                    explicit_month: m,
                    users,
                    prior,
                    fraction: prior as f64 / users as f64,
                })
                .collect(),
        }
    });
    Ok(out)
}
