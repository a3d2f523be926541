use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use socdim::dimensions::ScoreTable;
use socdim::geometry::Clustering;
use socdim::ingest::{io, Vocabulary};
use socdim::month::YearMonth;
use socdim::polarization::{
    self as pol, CohortAxis, CohortPoint, DecompositionRow, MonthlyValue, PoliticalAssignment,
    PoliticalComments, PoliticalSubset, Wing, BINS,
};

use super::{resolved, Axis, PolarizeArgs};
use crate::error::CliError;
use crate::run::{opt, Run};

pub const ASSIGNMENT_HEADER: [&str; 4] = ["community_id", "ness", "z", "bin"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    /// Political subset and partisan bins.
    Subset,
    /// Share of political comments per bin, overall and by month.
    Bins,
    /// Self-selection f(b1, b2).
    Selection,
    /// Mean |z| per month.
    Monthly,
    /// Share of comments beyond ±threshold per month.
    Extreme,
    /// Mean |z| by first-activity cohort.
    Cohorts,
    /// Per-user month-to-month polarization fraction and correlation.
    Users,
    /// New vs existing user contributions to polarization change.
    Decompose,
    /// Monthly, decomposition and cohort tables restricted to one wing.
    Wing,
    /// Implicit vs explicit partisan activity timing.
    Implicit,
    /// Authored vs deleted comment distributions.
    Deleted,
}

impl Analysis {
    pub fn name(self) -> String {
        self.to_possible_value()
            .expect("no skipped variants")
            .get_name()
            .to_string()
    }
}

/// Everything the analyses share once the inputs are read.
struct Loaded {
    vocab: Vocabulary,
    comments: PoliticalComments,
    full: Option<Full>,
}

struct Full {
    monthly: socdim::ingest::MonthlyActivityTable,
    partisan: ScoreTable,
    ness: ScoreTable,
    subset: PoliticalSubset,
    assignment: PoliticalAssignment,
}

fn scores(
    run: &mut Run,
    path: &Path,
    vocab: &Vocabulary,
    name: &str,
) -> Result<ScoreTable, CliError> {
    let t = ScoreTable::read_tsv(run.input(path)?, name)?;
    if !t.communities.iter().map(String::as_str).eq(vocab.names()) {
        return Err(CliError::Input(format!(
            "{}: communities differ from the vocabulary",
            path.display()
        )));
    }
    Ok(t)
}

fn load(args: &PolarizeArgs, run: &mut Run) -> Result<Loaded, CliError> {
    let vocab = io::read_vocab(run.input(resolved(&args.vocab))?)?;
    let monthly = io::read_monthly(run.input(resolved(&args.monthly))?, &vocab)?;
    if let Some(path) = &args.assignment {
        let assignment = read_assignment(run.input(path)?, &vocab)?;
        let comments = PoliticalComments::from_monthly(&monthly, &assignment);
        return Ok(Loaded {
            vocab,
            comments,
            full: None,
        });
    }
    let partisan = scores(run, resolved(&args.partisan), &vocab, "partisan")?;
    let ness = scores(run, resolved(&args.ness), &vocab, "partisan-ness")?;
    let clustering = Clustering::read_tsv(
        run.input(resolved(&args.clusters))?,
        &vocab,
        run.config.linkage()?,
    )?;
    let p = &run.config.polarization;
    let cluster = match p.politics_cluster.parse::<u32>() {
        Ok(id) => id,
        Err(_) => clustering.labelled(&p.politics_cluster).ok_or_else(|| {
            CliError::Input(format!("no cluster labelled `{}`", p.politics_cluster))
        })?,
    };
    let subset = pol::select_political(&ness, &clustering, cluster, p.coverage)?;
    let assignment = PoliticalAssignment::with_edges(&subset, &partisan, &p.edges)?;
    let comments = PoliticalComments::from_monthly(&monthly, &assignment);
    Ok(Loaded {
        vocab,
        comments,
        full: Some(Full {
            monthly,
            partisan,
            ness,
            subset,
            assignment,
        }),
    })
}

/// Reads a political assignment table; communities not listed are not political.
pub fn read_assignment(path: &Path, vocab: &Vocabulary) -> Result<PoliticalAssignment, CliError> {
    let bad = |line: usize, reason: String| {
        CliError::Input(format!("{}:{line}: {reason}", path.display()))
    };
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut z = vec![0.0; vocab.len()];
    let mut bin = vec![None; vocab.len()];
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if i == 0 {
            if line != ASSIGNMENT_HEADER.join("\t") {
                return Err(bad(
                    1,
                    format!("expected header `{}`", ASSIGNMENT_HEADER.join("\t")),
                ));
            }
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let [c, _, zs, b] = f[..] else {
            return Err(bad(i + 1, format!("expected 4 fields, got {}", f.len())));
        };
        let id = vocab
            .id(c)
            .ok_or_else(|| bad(i + 1, format!("community `{c}` not in vocabulary")))?;
        z[id as usize] = zs
            .parse()
            .map_err(|_| bad(i + 1, format!("bad z `{zs}`")))?;
        let b: i8 = b
            .parse()
            .map_err(|_| bad(i + 1, format!("bad bin `{b}`")))?;
        if !BINS.contains(&b) {
            return Err(bad(i + 1, format!("bin {b} outside -2..=2")));
        }
        if bin[id as usize].replace(b).is_some() {
            return Err(bad(i + 1, format!("community `{c}` listed twice")));
        }
    }
    Ok(PoliticalAssignment { z, bin })
}

/// Writes members of a political assignment in community-id order.
pub fn write_assignment(
    run: &mut Run,
    rel: &str,
    vocab_names: &[String],
    ness: &[f64],
    assignment: &PoliticalAssignment,
) -> Result<(), CliError> {
    let mut t = run.tsv(rel, &ASSIGNMENT_HEADER)?;
    for (c, b) in assignment.bin.iter().enumerate() {
        if let Some(b) = b {
            t.row(&[
                vocab_names[c].clone(),
                ness[c].to_string(),
                assignment.z[c].to_string(),
                b.to_string(),
            ])?;
        }
    }
    t.close()
}

#[derive(Serialize)]
struct SubsetSummary<'a> {
    politics_cluster: u32,
    cluster_size: usize,
    coverage: f64,
    ness_cutoff: f64,
    members: usize,
    vocab_size: usize,
    fraction: f64,
    bin_sizes: [usize; 5],
    edges: &'a pol::BinEdges,
}

pub fn run(args: &PolarizeArgs, run: &mut Run) -> Result<(), CliError> {
    let data = load(args, run)?;
    let c = &data.comments;
    let p = run.config.polarization.clone();
    let period = run.config.period()?;
    let ym = |m: YearMonth| m.to_string();
    match args.analysis {
        Analysis::Subset => {
            let f = data.full.as_ref().expect("subset needs the full inputs");
            let names: Vec<String> = data.vocab.names().map(String::from).collect();
            write_assignment(
                run,
                "polarize/subset.tsv",
                &names,
                &f.ness.raw,
                &f.assignment,
            )?;
            let s = &f.subset;
            let summary = SubsetSummary {
                politics_cluster: s.cluster,
                cluster_size: s.cluster_size,
                coverage: s.coverage,
                ness_cutoff: s.ness_cutoff,
                members: s.members.len(),
                vocab_size: s.vocab_size,
                fraction: s.fraction(),
                bin_sizes: f.assignment.bin_sizes(),
                edges: &p.edges,
            };
            run.json("polarize/subset.json", &summary)?;
            eprintln!(
                "{} political communities, bins {:?}",
                summary.members, summary.bin_sizes
            );
        }
        Analysis::Bins => {
            let d = pol::bin_activity(c)?;
            let mut t = run.tsv("polarize/bins.tsv", &["month", "bin", "share"])?;
            for (i, b) in BINS.iter().enumerate() {
                t.row(&["all".into(), b.to_string(), d.overall[i].to_string()])?;
            }
            for (m, shares) in &d.monthly {
                for (i, b) in BINS.iter().enumerate() {
                    t.row(&[ym(*m), b.to_string(), shares[i].to_string()])?;
                }
            }
            t.close()?;
        }
        Analysis::Selection => {
            let mut t = run.tsv(
                "polarize/selection.tsv",
                &["author_bin", "community_bin", "f"],
            )?;
            for (i, row) in pol::selection_matrix(c).iter().enumerate() {
                let Some(row) = row else { continue };
                for (j, f) in row.iter().enumerate() {
                    t.row(&[BINS[i].to_string(), BINS[j].to_string(), f.to_string()])?;
                }
            }
            t.close()?;
            if !args.community.is_empty() {
                let mut t = run.tsv(
                    "polarize/community_selection.tsv",
                    &["community_id", "community_bin", "share"],
                )?;
                for name in &args.community {
                    let id = data.vocab.id(name).ok_or_else(|| {
                        CliError::Input(format!("community `{name}` not in vocabulary"))
                    })?;
                    let shares = pol::community_selection(c, id)?;
                    for (j, s) in shares.iter().enumerate() {
                        t.row(&[name.clone(), BINS[j].to_string(), s.to_string()])?;
                    }
                }
                t.close()?;
            }
        }
        Analysis::Monthly => {
            monthly_table(run, "polarize/monthly.tsv", &pol::monthly_polarization(c))?
        }
        Analysis::Extreme => {
            let mut t = run.tsv(
                "polarize/extreme.tsv",
                &["month", "left", "right", "total", "comments"],
            )?;
            for e in pol::extreme_share(c, p.extreme_z) {
                t.row(&[
                    ym(e.month),
                    e.left.to_string(),
                    e.right.to_string(),
                    e.total.to_string(),
                    e.comments.to_string(),
                ])?;
            }
            t.close()?;
        }
        Analysis::Cohorts => {
            let axis = match args.axis {
                Axis::Month => CohortAxis::Month,
                Axis::AccountAge => CohortAxis::AccountAge,
                Axis::ActiveMonths => CohortAxis::ActiveMonths,
            };
            cohort_table(
                run,
                "polarize/cohorts.tsv",
                axis,
                &pol::cohort_series(c, axis),
            )?;
        }
        Analysis::Users => {
            let scores = pol::user_month_scores(c, p.min_comments)?;
            for (rel, col, m) in [
                (
                    "polarize/user_fraction.tsv",
                    "fraction",
                    pol::polarization_matrix(&scores, p.delta),
                ),
                (
                    "polarize/user_correlation.tsv",
                    "pearson_r",
                    pol::correlation_matrix(&scores),
                ),
            ] {
                let mut t = run.tsv(rel, &["t1", "t2", col])?;
                for (i, t1) in m.months.iter().enumerate() {
                    for (j, t2) in m.months.iter().enumerate() {
                        t.row(&[ym(*t1), ym(*t2), opt(m.values[i][j])])?;
                    }
                }
                t.close()?;
            }
        }
        Analysis::Decompose => decompose_table(
            run,
            "polarize/decompose.tsv",
            &pol::decompose_change(c, period, p.lag),
        )?,
        Analysis::Wing => {
            let wing: Wing = args.wing.parse()?;
            let r = pol::wing_analyses(c, wing, &p.edges, period, p.lag);
            monthly_table(
                run,
                &format!("polarize/wing-{wing}/monthly.tsv"),
                &r.monthly,
            )?;
            decompose_table(
                run,
                &format!("polarize/wing-{wing}/decompose.tsv"),
                &r.decomposition,
            )?;
            cohort_table(
                run,
                &format!("polarize/wing-{wing}/cohorts.tsv"),
                CohortAxis::Month,
                &r.cohorts,
            )?;
        }
        Analysis::Implicit => {
            let f = data.full.as_ref().expect("implicit needs the full inputs");
            let res = pol::implicit_explicit(
                &f.monthly,
                &f.subset,
                &f.partisan,
                &f.ness,
                &p.edges,
                p.implicit_z,
            )?;
            let mut t = run.tsv(
                "polarize/implicit.tsv",
                &["wing", "explicit_month", "implicit_month", "users"],
            )?;
            for w in &res {
                for ((me, mi), n) in &w.cells {
                    t.row(&[w.wing.to_string(), ym(*me), opt(*mi), n.to_string()])?;
                }
            }
            t.close()?;
            let mut t = run.tsv(
                "polarize/implicit_prior.tsv",
                &["wing", "explicit_month", "users", "prior", "fraction"],
            )?;
            for w in &res {
                for s in &w.prior {
                    t.row(&[
                        w.wing.to_string(),
                        ym(s.explicit_month),
                        s.users.to_string(),
                        s.prior.to_string(),
                        s.fraction.to_string(),
                    ])?;
                }
            }
            t.close()?;
        }
        Analysis::Deleted => {
            let d = pol::compare_deleted(c, p.bin_width, p.epsilon)?;
            let mut t = run.tsv(
                "polarize/deleted.tsv",
                &[
                    "kept",
                    "deleted",
                    "kept_fraction",
                    "mean_kept",
                    "mean_deleted",
                    "delta_mean",
                    "kl_bits",
                    "bin_width",
                    "epsilon",
                    "smoothed",
                ],
            )?;
            t.row(&[
                d.kept.to_string(),
                d.deleted.to_string(),
                d.kept_fraction.to_string(),
                d.mean_kept.to_string(),
                d.mean_deleted.to_string(),
                d.delta_mean.to_string(),
                d.kl_bits.to_string(),
                d.bin_width.to_string(),
                d.epsilon.to_string(),
                d.smoothed.to_string(),
            ])?;
            t.close()?;
        }
    }
    Ok(())
}

fn monthly_table(run: &mut Run, rel: &str, rows: &[MonthlyValue]) -> Result<(), CliError> {
    let mut t = run.tsv(rel, &["month", "polarization", "comments"])?;
    for r in rows {
        t.row(&[
            r.month.to_string(),
            r.value.to_string(),
            r.comments.to_string(),
        ])?;
    }
    t.close()
}

fn decompose_table(run: &mut Run, rel: &str, rows: &[DecompositionRow]) -> Result<(), CliError> {
    let mut t = run.tsv(
        rel,
        &[
            "period",
            "n_new",
            "n_existing",
            "mean_new",
            "mean_existing",
            "mean_previous",
            "mean_current",
            "delta_new",
            "delta_existing",
            "observed_change",
        ],
    )?;
    for r in rows {
        t.row(&[
            r.period.clone(),
            r.n_new.to_string(),
            r.n_existing.to_string(),
            opt(r.mean_new),
            opt(r.mean_existing),
            r.mean_previous.to_string(),
            r.mean_current.to_string(),
            r.delta_new.to_string(),
            r.delta_existing.to_string(),
            r.observed_change().to_string(),
        ])?;
    }
    t.close()
}

fn cohort_table(
    run: &mut Run,
    rel: &str,
    axis: CohortAxis,
    rows: &[CohortPoint],
) -> Result<(), CliError> {
    let x_name = match axis {
        CohortAxis::Month => "month",
        CohortAxis::AccountAge => "account_age",
        CohortAxis::ActiveMonths => "active_months",
    };
    let mut t = run.tsv(rel, &["cohort", x_name, "mean_abs_z", "comments"])?;
    for r in rows {
        let x = match axis {
            CohortAxis::Month => YearMonth::from_ordinal(r.x).to_string(),
            _ => r.x.to_string(),
        };
        t.row(&[
            r.cohort.to_string(),
            x,
            r.mean_abs_z.to_string(),
            r.comments.to_string(),
        ])?;
    }
    t.close()
}
