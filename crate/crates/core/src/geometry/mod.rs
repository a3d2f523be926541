//! Similarity queries, analogies, and agglomerative clustering over an embedding.

mod analogy;
mod cluster;
mod similarity;

pub use analogy::{
    evaluate_analogies, solve_analogy, solve_analogy_named, AnalogyScore, AnalogySet,
};
pub use cluster::{
    cluster, cluster_from, dendrogram, linkage, ClusterConfig, Clustering, Dendrogram, Linkage,
    Merge, CLUSTERING_HEADER,
};
pub use similarity::{cosine, nearest_neighbors, Neighbor, NeighborIndex};

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("similarity is undefined for a zero vector")]
    ZeroVector,
    #[error("unknown community `{0}`")]
    UnknownCommunity(String),
    #[error("asked for {k} neighbors but only {n} communities exist")]
    TooManyNeighbors { k: usize, n: usize },
    #[error("cannot form {k} clusters from {n} communities")]
    BadClusterCount { k: usize, n: usize },
    #[error("unknown linkage `{0}` (expected ward, average or complete)")]
    UnknownLinkage(String),
    #[error("analogy line {line}: {reason}")]
    BadAnalogy { line: usize, reason: String },
    #[error("no analogy could be evaluated ({skipped} skipped for out-of-vocabulary members)")]
    NothingToEvaluate { skipped: usize },
    #[error("invalid clustering: {0}")]
    BadClustering(String),
    #[error("{path}:{line}: {reason}")]
    BadTable {
        path: String,
        line: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
