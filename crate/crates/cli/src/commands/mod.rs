//! Subcommand arguments and dispatch. Each command first folds its flags into the
//! config, then resolves default paths, then runs against a [`Run`].

mod dimension;
mod geometry;
mod ingest;
mod null;
mod polarize;
mod train;
mod validate;

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::run::Run;

pub use polarize::Analysis;

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineCommand {
    /// Parse interaction logs into vocabulary, pair-count and monthly tables.
    Ingest(IngestArgs),
    /// Train community vectors from a pair-count table.
    Train(TrainArgs),
    /// Score analogy sets against an embedding.
    EvalAnalogies(EvalArgs),
    /// Agglomerative clustering of all communities.
    Cluster(ClusterArgs),
    #[command(subcommand)]
    Dimension(DimensionCommand),
    /// Usage-weighted word scores along a dimension.
    WordScores(WordArgs),
    /// Political-activity analyses over binned comments.
    Polarize(PolarizeArgs),
    #[command(subcommand)]
    Null(NullCommand),
    /// Correlate community scores with an external measure.
    Validate(ValidateArgs),
    /// Plot-ready community tables and text embeddings.
    Export(ExportArgs),
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct IngestArgs {
    /// Interaction log (repeatable); falls back to `paths.logs`.
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub top_n: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub negative: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the word2vec text format.
    #[arg(long)]
    pub text: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Analogy TSV (repeatable).
    #[arg(long = "set", required = true)]
    pub sets: Vec<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct ClusterArgs {
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub linkage: Option<String>,
    /// `LABEL=COMMUNITY`: names the cluster containing COMMUNITY (repeatable).
    #[arg(long = "label")]
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionCommand {
    /// Augment seed pairs and write dimension files.
    Build(BuildArgs),
    /// Score every community along saved dimensions.
    Score(ScoreArgs),
    /// Pearson correlation between two score tables.
    Compare(CompareArgs),
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct BuildArgs {
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Named seed preset (repeatable).
    #[arg(long)]
    pub preset: Vec<String>,
    /// Every preset whose communities are in the vocabulary.
    #[arg(long)]
    pub all_presets: bool,
    /// Explicit seed as `LEFT:RIGHT`; needs `--name`.
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub name: Option<String>,
    /// Number of pairs, seed included.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub neighbors: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct ScoreArgs {
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Dimension JSON (repeatable).
    #[arg(long = "dimension", required = true)]
    pub dimensions: Vec<PathBuf>,
    /// Also score the matching `-ness` dimension.
    #[arg(long)]
    pub ness: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct WordArgs {
    /// `word, community, commenter, count` TSV.
    #[arg(long)]
    pub usage: PathBuf,
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub cap: Option<u64>,
    /// `z` or `raw`.
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct PolarizeArgs {
    pub analysis: Analysis,
    #[arg(long)]
    pub monthly: Option<PathBuf>,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Partisan score table.
    #[arg(long)]
    pub partisan: Option<PathBuf>,
    /// Partisan `-ness` score table.
    #[arg(long)]
    pub ness: Option<PathBuf>,
    #[arg(long)]
    pub clusters: Option<PathBuf>,
    /// Precomputed political assignment (`polarize subset` or `null bins` output);
    /// replaces the partisan/ness/cluster inputs.
    #[arg(long)]
    pub assignment: Option<PathBuf>,
    /// Label or numeric id of the politics cluster.
    #[arg(long)]
    pub politics: Option<String>,
    #[arg(long)]
    pub coverage: Option<f64>,
    #[arg(long)]
    pub period: Option<String>,
    #[arg(long, default_value = "left")]
    pub wing: String,
    /// |z| threshold for `extreme` and `implicit`.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub min_comments: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub lag: Option<i64>,
    #[arg(long, value_enum, default_value_t = Axis::Month)]
    pub axis: Axis,
    #[arg(long)]
    pub bin_width: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Community for per-community selection rows (repeatable).
    #[arg(long)]
    pub community: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Month,
    AccountAge,
    ActiveMonths,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullCommand {
    /// Permute the author column of interaction logs.
    Shuffle(ShuffleArgs),
    /// Size-matched political bins in a null embedding.
    Bins(NullBinsArgs),
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct ShuffleArgs {
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct NullBinsArgs {
    /// Null `-ness` score table.
    #[arg(long)]
    pub ness: PathBuf,
    /// Null partisan score table.
    #[arg(long)]
    pub partisan: PathBuf,
    /// Real political assignment whose sizes are matched.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub scores: PathBuf,
    /// `community_id,value[,label]` CSV.
    #[arg(long)]
    pub measure: PathBuf,
    /// Labels of the two groups for Cohen's d and the point-biserial r.
    #[arg(long, requires = "label_b")]
    pub label_a: Option<String>,
    #[arg(long, requires = "label_a")]
    pub label_b: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct ExportArgs {
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Write the word2vec text format.
    #[arg(long)]
    pub text: bool,
    /// Write the K nearest neighbors of every community.
    #[arg(long)]
    pub neighbors: Option<usize>,
    /// Score tables joined as `<dimension>_z` columns (repeatable).
    #[arg(long = "scores")]
    pub scores: Vec<PathBuf>,
    #[arg(long)]
    pub clusters: Option<PathBuf>,
}

fn absolute(p: &Path) -> PathBuf {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf())
}

fn fill(slot: &mut Option<PathBuf>, out: &Path, default: &str) {
    let p = slot.take().unwrap_or_else(|| out.join(default));
    *slot = Some(absolute(&p));
}

fn fix(p: &mut PathBuf) {
    *p = absolute(p);
}

/// Parses `LEFT:RIGHT`.
pub fn parse_pair(s: &str) -> Option<(String, String)> {
    let (l, r) = s.split_once(':')?;
    (!l.is_empty() && !r.is_empty()).then(|| (l.to_string(), r.to_string()))
}

/// Seed choices made on the command line, for `--strict` checks.
#[derive(Default)]
pub struct SeedFlags {
    pub train: bool,
    pub shuffle: bool,
}

impl PipelineCommand {
    /// Folds flag overrides into `config`, returning problems with the flags themselves.
    pub fn apply(&self, config: &mut PipelineConfig, seeds: &mut SeedFlags) -> Vec<String> {
        let mut issues = Vec::new();
        match self {
            PipelineCommand::Ingest(a) => {
                if let Some(f) = &a.format {
                    config.ingest.format = f.clone();
                }
                if let Some(n) = a.top_n {
                    config.ingest.top_n = n;
                }
            }
            PipelineCommand::Train(a) => {
                let t = &mut config.train;
                t.dim = a.dim.unwrap_or(t.dim);
                t.negative = a.negative.unwrap_or(t.negative);
                t.epochs = a.epochs.unwrap_or(t.epochs);
                if let Some(s) = a.seed {
                    t.seed = s;
                    seeds.train = true;
                }
            }
            PipelineCommand::EvalAnalogies(_) => {}
            PipelineCommand::Cluster(a) => {
                config.cluster.k = a.k.unwrap_or(config.cluster.k);
                if let Some(l) = &a.linkage {
                    config.cluster.linkage = l.clone();
                }
                for l in &a.labels {
                    match l.split_once('=') {
                        Some((name, c)) if !name.is_empty() && !c.is_empty() => {
                            config.cluster.labels.insert(name.into(), c.into());
                        }
                        _ => issues.push(format!("--label expects LABEL=COMMUNITY, got `{l}`")),
                    }
                }
            }
            PipelineCommand::Dimension(DimensionCommand::Build(a)) => {
                let d = &mut config.dimensions;
                d.pairs = a.k.unwrap_or(d.pairs);
                d.neighbors = a.neighbors.unwrap_or(d.neighbors);
                let chosen = usize::from(!a.preset.is_empty())
                    + usize::from(a.all_presets)
                    + usize::from(a.seed.is_some());
                if chosen != 1 {
                    issues.push(
                        "dimension build needs exactly one of --preset, --all-presets, --seed"
                            .into(),
                    );
                }
                if let Some(s) = &a.seed {
                    if parse_pair(s).is_none() {
                        issues.push(format!("--seed expects LEFT:RIGHT, got `{s}`"));
                    }
                    if a.name.is_none() {
                        issues.push("--seed needs --name".into());
                    }
                }
            }
            PipelineCommand::Dimension(_) => {}
            PipelineCommand::WordScores(a) => {
                config.words.cap = a.cap.unwrap_or(config.words.cap);
                if let Some(k) = &a.kind {
                    config.words.score = k.clone();
                }
            }
            PipelineCommand::Polarize(a) => {
                let p = &mut config.polarization;
                p.coverage = a.coverage.unwrap_or(p.coverage);
                if let Some(c) = &a.politics {
                    p.politics_cluster = c.clone();
                }
                if let Some(per) = &a.period {
                    p.period = per.clone();
                }
                p.min_comments = a.min_comments.unwrap_or(p.min_comments);
                p.delta = a.delta.unwrap_or(p.delta);
                p.lag = a.lag.unwrap_or(p.lag);
                p.bin_width = a.bin_width.unwrap_or(p.bin_width);
                p.epsilon = a.epsilon.unwrap_or(p.epsilon);
                if let Some(t) = a.threshold {
                    match a.analysis {
                        Analysis::Implicit => p.implicit_z = t,
                        _ => p.extreme_z = t,
                    }
                }
                if a.wing.parse::<socdim::polarization::Wing>().is_err() {
                    issues.push(format!(
                        "--wing must be left, center or right, got `{}`",
                        a.wing
                    ));
                }
                if a.assignment.is_some() && a.analysis == Analysis::Implicit {
                    issues.push(
                        "`implicit` needs the partisan, ness and cluster inputs, not --assignment"
                            .into(),
                    );
                }
                if a.assignment.is_some() && a.analysis == Analysis::Subset {
                    issues.push("`subset` computes the assignment; drop --assignment".into());
                }
            }
            PipelineCommand::Null(NullCommand::Shuffle(a)) => {
                if let Some(f) = &a.format {
                    config.ingest.format = f.clone();
                }
                if let Some(s) = a.seed {
                    config.null.seed = Some(s);
                    seeds.shuffle = true;
                }
            }
            PipelineCommand::Null(_) | PipelineCommand::Validate(_) => {}
            PipelineCommand::Export(a) => {
                if !a.text && a.neighbors.is_none() && a.scores.is_empty() && a.clusters.is_none() {
                    issues.push(
                        "export needs at least one of --text, --neighbors, --scores, --clusters"
                            .into(),
                    );
                }
            }
        }
        issues
    }

    /// Fills default paths from the output directory and makes every path absolute.
    pub fn resolve(&mut self, out: &Path, config: &PipelineConfig) {
        match self {
            PipelineCommand::Ingest(a) => {
                if a.inputs.is_empty() {
                    a.inputs = config.paths.logs.clone();
                }
                a.inputs.iter_mut().for_each(fix);
            }
            PipelineCommand::Train(a) => {
                fill(&mut a.pairs, out, "pairs.tsv");
                fill(&mut a.vocab, out, "vocab.tsv");
            }
            PipelineCommand::EvalAnalogies(a) => {
                fill(&mut a.embedding, out, "embedding.bin");
                a.sets.iter_mut().for_each(fix);
            }
            PipelineCommand::Cluster(a) => fill(&mut a.embedding, out, "embedding.bin"),
            PipelineCommand::Dimension(DimensionCommand::Build(a)) => {
                fill(&mut a.embedding, out, "embedding.bin")
            }
            PipelineCommand::Dimension(DimensionCommand::Score(a)) => {
                fill(&mut a.embedding, out, "embedding.bin");
                a.dimensions.iter_mut().for_each(fix);
            }
            PipelineCommand::Dimension(DimensionCommand::Compare(a)) => {
                fix(&mut a.a);
                fix(&mut a.b);
            }
            PipelineCommand::WordScores(a) => {
                fix(&mut a.usage);
                fix(&mut a.scores);
            }
            PipelineCommand::Polarize(a) => {
                fill(&mut a.monthly, out, "monthly.tsv");
                fill(&mut a.vocab, out, "vocab.tsv");
                if let Some(p) = a.assignment.as_mut() {
                    fix(p);
                } else {
                    fill(&mut a.partisan, out, "scores/partisan.tsv");
                    fill(&mut a.ness, out, "scores/partisan-ness.tsv");
                    fill(&mut a.clusters, out, "clusters.tsv");
                }
            }
            PipelineCommand::Null(NullCommand::Shuffle(a)) => {
                if a.inputs.is_empty() {
                    a.inputs = config.paths.logs.clone();
                }
                a.inputs.iter_mut().for_each(fix);
            }
            PipelineCommand::Null(NullCommand::Bins(a)) => {
                fix(&mut a.ness);
                fix(&mut a.partisan);
                fill(&mut a.reference, out, "polarize/subset.tsv");
            }
            PipelineCommand::Validate(a) => {
                fix(&mut a.scores);
                fix(&mut a.measure);
            }
            PipelineCommand::Export(a) => {
                fill(&mut a.embedding, out, "embedding.bin");
                a.scores.iter_mut().for_each(fix);
                if let Some(c) = a.clusters.as_mut() {
                    fix(c);
                }
            }
        }
    }

    /// Manifest file stem; distinct for commands that write distinct artifacts.
    pub fn slug(&self) -> String {
        let stem = |p: &Path| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        };
        match self {
            PipelineCommand::Ingest(_) => "ingest".into(),
            PipelineCommand::Train(_) => "train".into(),
            PipelineCommand::EvalAnalogies(_) => "eval-analogies".into(),
            PipelineCommand::Cluster(_) => "cluster".into(),
            PipelineCommand::Dimension(DimensionCommand::Build(a)) => {
                match (&a.name, a.preset.as_slice()) {
                    (Some(n), _) => format!("dimension-build-{n}"),
                    (None, [p]) => format!("dimension-build-{p}"),
                    _ if a.all_presets => "dimension-build-all".into(),
                    _ => format!("dimension-build-{}", a.preset.join("+")),
                }
            }
            PipelineCommand::Dimension(DimensionCommand::Score(a)) => {
                let names: Vec<String> = a.dimensions.iter().map(|p| stem(p)).collect();
                format!("dimension-score-{}", names.join("+"))
            }
            PipelineCommand::Dimension(DimensionCommand::Compare(a)) => {
                format!("dimension-compare-{}-{}", stem(&a.a), stem(&a.b))
            }
            PipelineCommand::WordScores(a) => format!("word-scores-{}", stem(&a.scores)),
            PipelineCommand::Polarize(a) => match a.analysis {
                Analysis::Wing => format!("polarize-wing-{}", a.wing),
                an => format!("polarize-{}", an.name()),
            },
            PipelineCommand::Null(NullCommand::Shuffle(_)) => "null-shuffle".into(),
            PipelineCommand::Null(NullCommand::Bins(_)) => "null-bins".into(),
            PipelineCommand::Validate(a) => {
                format!("validate-{}-{}", stem(&a.scores), stem(&a.measure))
            }
            PipelineCommand::Export(_) => "export".into(),
        }
    }

    pub fn execute(&self, run: &mut Run) -> Result<(), CliError> {
        match self {
            PipelineCommand::Ingest(a) => ingest::run(a, run),
            PipelineCommand::Train(a) => train::run(a, run),
            PipelineCommand::EvalAnalogies(a) => geometry::eval_analogies(a, run),
            PipelineCommand::Cluster(a) => geometry::cluster(a, run),
            PipelineCommand::Dimension(DimensionCommand::Build(a)) => dimension::build(a, run),
            PipelineCommand::Dimension(DimensionCommand::Score(a)) => dimension::score(a, run),
            PipelineCommand::Dimension(DimensionCommand::Compare(a)) => dimension::compare(a, run),
            PipelineCommand::WordScores(a) => dimension::words(a, run),
            PipelineCommand::Polarize(a) => polarize::run(a, run),
            PipelineCommand::Null(NullCommand::Shuffle(a)) => null::shuffle(a, run),
            PipelineCommand::Null(NullCommand::Bins(a)) => null::bins(a, run),
            PipelineCommand::Validate(a) => validate::run(a, run),
            PipelineCommand::Export(a) => geometry::export(a, run),
        }
    }
}

/// Unwraps a path filled in by [`PipelineCommand::resolve`].
fn resolved(p: &Option<PathBuf>) -> &Path {
    p.as_deref().expect("path resolved before execution")
}
