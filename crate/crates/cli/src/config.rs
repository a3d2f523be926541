use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use socdim::dimensions::{ScoreKind, DEFAULT_NEIGHBORS, DEFAULT_PAIRS, DEFAULT_USAGE_CAP};
use socdim::embed::TrainConfig;
use socdim::geometry::Linkage;
use socdim::ingest::LogFormat;
use socdim::polarization::{
    BinEdges, Period, DEFAULT_BIN_WIDTH, DEFAULT_COVERAGE, DEFAULT_DELTA, DEFAULT_EPSILON,
    DEFAULT_EXTREME_Z, DEFAULT_IMPLICIT_Z, DEFAULT_LAG_MONTHS, DEFAULT_MIN_COMMENTS,
};

use crate::error::CliError;

pub const DEFAULT_TOP_N: usize = 10_006;
pub const DEFAULT_CLUSTERS: usize = 30;

/// Everything a run depends on besides its input files.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Worker threads for sharded ingest, training and neighbor search.
    pub workers: Option<usize>,
    pub paths: PathsSection,
    pub ingest: IngestSection,
    pub train: TrainConfig,
    pub cluster: ClusterSection,
    pub dimensions: DimensionSection,
    pub words: WordSection,
    pub polarization: PolarizationSection,
    pub null: NullSection,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub logs: Vec<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSection {
    pub format: String,
    pub top_n: usize,
}

impl Default for IngestSection {
    fn default() -> Self {
        IngestSection {
            format: "jsonl".into(),
            top_n: DEFAULT_TOP_N,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSection {
    pub k: usize,
    pub linkage: String,
    pub normalize: bool,
    /// Cluster label → a community inside that cluster.
    pub labels: BTreeMap<String, String>,
}

impl Default for ClusterSection {
    fn default() -> Self {
        ClusterSection {
            k: DEFAULT_CLUSTERS,
            linkage: Linkage::default().to_string(),
            normalize: true,
            labels: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimensionSection {
    pub pairs: usize,
    pub neighbors: usize,
    /// Extra or overriding seed presets, name → `[left, right]`.
    pub presets: BTreeMap<String, [String; 2]>,
}

impl Default for DimensionSection {
    fn default() -> Self {
        DimensionSection {
            pairs: DEFAULT_PAIRS,
            neighbors: DEFAULT_NEIGHBORS,
            presets: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WordSection {
    pub cap: u64,
    pub score: String,
}

impl Default for WordSection {
    fn default() -> Self {
        WordSection {
            cap: DEFAULT_USAGE_CAP,
            score: "z".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolarizationSection {
    pub coverage: f64,
    /// Label (or numeric id) of the politics cluster.
    pub politics_cluster: String,
    pub edges: BinEdges,
    pub min_comments: u64,
    pub delta: f64,
    pub lag: i64,
    pub period: String,
    pub extreme_z: f64,
    pub implicit_z: f64,
    pub bin_width: f64,
    pub epsilon: f64,
}

impl Default for PolarizationSection {
    fn default() -> Self {
        PolarizationSection {
            coverage: DEFAULT_COVERAGE,
            politics_cluster: "politics".into(),
            edges: BinEdges::default(),
            min_comments: DEFAULT_MIN_COMMENTS,
            delta: DEFAULT_DELTA,
            lag: DEFAULT_LAG_MONTHS,
            period: Period::default().to_string(),
            extreme_z: DEFAULT_EXTREME_Z,
            implicit_z: DEFAULT_IMPLICIT_Z,
            bin_width: DEFAULT_BIN_WIDTH,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NullSection {
    pub seed: Option<u64>,
}

impl PipelineConfig {
    /// Reads a TOML file; a missing `[train] seed` is remembered so `--strict` can reject it.
    pub fn load(path: &Path) -> Result<(Self, bool), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let value: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            CliError::Config(vec![format!("{}: {}", path.display(), e.message())])
        })?;
        let train_seed = value
            .get("train")
            .and_then(|t| t.as_table())
            .is_some_and(|t| t.contains_key("seed"));
        let config = PipelineConfig::deserialize(toml::Value::Table(value))
            .map_err(|e| CliError::Config(vec![format!("{}: {}", path.display(), e.message())]))?;
        Ok((config, train_seed))
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(self.train.workers)
    }

    pub fn format(&self) -> Result<LogFormat, CliError> {
        self.ingest
            .format
            .parse()
            .map_err(|e| CliError::Config(vec![format!("{e}")]))
    }

    pub fn linkage(&self) -> Result<Linkage, CliError> {
        self.cluster
            .linkage
            .parse()
            .map_err(|e| CliError::Config(vec![format!("{e}")]))
    }

    pub fn period(&self) -> Result<Period, CliError> {
        self.polarization
            .period
            .parse()
            .map_err(|e| CliError::Config(vec![format!("{e}")]))
    }

    pub fn score_kind(&self) -> Result<ScoreKind, CliError> {
        match self.words.score.as_str() {
            "z" => Ok(ScoreKind::Z),
            "raw" => Ok(ScoreKind::Raw),
            other => Err(CliError::Config(vec![format!(
                "words.score must be `z` or `raw`, got `{other}`"
            )])),
        }
    }

    /// Every violated constraint across all sections.
    pub fn issues(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .train
            .issues()
            .into_iter()
            .map(|s| format!("train.{s}"))
            .collect();
        if self.workers == Some(0) {
            out.push("workers must be at least 1".into());
        }
        for r in [
            self.format().err(),
            self.linkage().err(),
            self.period().err(),
            self.score_kind().err(),
        ]
        .into_iter()
        .flatten()
        {
            if let CliError::Config(v) = r {
                out.extend(v);
            }
        }
        if self.ingest.top_n == 0 {
            out.push("ingest.top_n must be at least 1".into());
        }
        if self.cluster.k == 0 {
            out.push("cluster.k must be at least 1".into());
        }
        if self.dimensions.pairs == 0 {
            out.push("dimensions.pairs must be at least 1".into());
        }
        if self.dimensions.neighbors == 0 {
            out.push("dimensions.neighbors must be at least 1".into());
        }
        for (name, [l, r]) in &self.dimensions.presets {
            if l == r || l.is_empty() {
                out.push(format!(
                    "dimensions.presets.{name} needs two distinct communities"
                ));
            }
        }
        if self.words.cap == 0 {
            out.push("words.cap must be at least 1".into());
        }
        let p = &self.polarization;
        if !(p.coverage > 0.0 && p.coverage <= 1.0) {
            out.push(format!(
                "polarization.coverage must lie in (0, 1], got {}",
                p.coverage
            ));
        }
        out.extend(
            p.edges
                .issues()
                .into_iter()
                .map(|s| format!("polarization.edges: {s}")),
        );
        if p.min_comments == 0 {
            out.push("polarization.min_comments must be at least 1".into());
        }
        for (name, v) in [
            ("delta", p.delta),
            ("extreme_z", p.extreme_z),
            ("implicit_z", p.implicit_z),
            ("bin_width", p.bin_width),
            ("epsilon", p.epsilon),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("polarization.{name} must be positive, got {v}"));
            }
        }
        if p.lag < 1 {
            out.push(format!(
                "polarization.lag must be at least 1 month, got {}",
                p.lag
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(issues))
        }
    }
}
