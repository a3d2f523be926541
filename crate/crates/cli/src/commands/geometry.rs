use std::path::Path;

use socdim::dimensions::ScoreTable;
use socdim::embed;
use socdim::geometry::{self, AnalogySet, ClusterConfig, Clustering, NeighborIndex};

use super::{resolved, ClusterArgs, EvalArgs, ExportArgs};
use crate::error::CliError;
use crate::run::{opt, Run};

pub(super) fn load_embedding(run: &mut Run, path: &Path) -> Result<socdim::Embedding32, CliError> {
    Ok(embed::load_embedding(run.input(path)?)?)
}

pub(super) fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn eval_analogies(args: &EvalArgs, run: &mut Run) -> Result<(), CliError> {
    let emb = load_embedding(run, resolved(&args.embedding))?;
    let index = NeighborIndex::new(&emb);
    let mut out = run.tsv(
        "analogies.tsv",
        &["set", "evaluated", "skipped", "top1", "top5"],
    )?;
    for path in &args.sets {
        let set = AnalogySet::load(run.input(path)?)?;
        let s = geometry::evaluate_analogies(&index, &set)?;
        eprintln!(
            "{}: top1 {:.3}, top5 {:.3} over {} ({} skipped)",
            set.name, s.top1, s.top5, s.evaluated, s.skipped
        );
        out.row(&[
            set.name.clone(),
            s.evaluated.to_string(),
            s.skipped.to_string(),
            s.top1.to_string(),
            s.top5.to_string(),
        ])?;
    }
    out.close()
}

pub fn cluster(args: &ClusterArgs, run: &mut Run) -> Result<(), CliError> {
    let emb = load_embedding(run, resolved(&args.embedding))?;
    let config = ClusterConfig {
        k: run.config.cluster.k,
        linkage: run.config.linkage()?,
        normalize: run.config.cluster.normalize,
    };
    let mut clustering = geometry::cluster(&emb, &config)?;
    for (label, community) in &run.config.cluster.labels {
        let id = emb.vocab().id(community).ok_or_else(|| {
            CliError::Input(format!(
                "label `{label}`: community `{community}` not in vocabulary"
            ))
        })?;
        let c = clustering.cluster_of(id);
        if let Some(prev) = &clustering.labels[c as usize] {
            return Err(CliError::Config(vec![format!(
                "labels `{prev}` and `{label}` both name cluster {c}"
            )]));
        }
        clustering.set_label(c, label.as_str())?;
    }
    clustering.write_tsv(emb.vocab(), &run.output("clusters.tsv")?)?;
    let sizes = clustering.sizes();
    eprintln!(
        "{} clusters, largest {}, smallest {}",
        clustering.k,
        sizes.iter().max().unwrap_or(&0),
        sizes.iter().min().unwrap_or(&0)
    );
    Ok(())
}

pub fn export(args: &ExportArgs, run: &mut Run) -> Result<(), CliError> {
    let emb = load_embedding(run, resolved(&args.embedding))?;
    if args.text {
        embed::write_text(&emb, &run.output("export/embedding.txt")?)?;
    }
    if let Some(k) = args.neighbors {
        let index = NeighborIndex::new(&emb);
        let mut out = run.tsv(
            "export/neighbors.tsv",
            &["community_id", "rank", "neighbor", "similarity"],
        )?;
        for c in 0..emb.len() as u32 {
            for (rank, n) in index.nearest(c, k)?.into_iter().enumerate() {
                out.row(&[
                    emb.vocab().name(c).to_string(),
                    (rank + 1).to_string(),
                    emb.vocab().name(n.id).to_string(),
                    n.similarity.to_string(),
                ])?;
            }
        }
        out.close()?;
    }
    if args.scores.is_empty() && args.clusters.is_none() {
        return Ok(());
    }
    let clustering = match &args.clusters {
        Some(p) => Some(Clustering::read_tsv(
            run.input(p)?,
            emb.vocab(),
            run.config.linkage()?,
        )?),
        None => None,
    };
    let mut tables = Vec::new();
    for p in &args.scores {
        tables.push(ScoreTable::read_tsv(run.input(p)?, &stem(p))?);
    }
    let mut header = vec!["community_id".to_string(), "count".to_string()];
    if clustering.is_some() {
        header.extend(["cluster_id".to_string(), "label".to_string()]);
    }
    header.extend(tables.iter().map(|t| format!("{}_z", t.dimension)));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut out = run.tsv("export/communities.tsv", &header)?;
    let indexes: Vec<_> = tables.iter().map(|t| t.index()).collect();
    for c in 0..emb.len() as u32 {
        let name = emb.vocab().name(c);
        let mut row = vec![name.to_string(), emb.vocab().count(c).to_string()];
        if let Some(cl) = &clustering {
            let a = cl.cluster_of(c);
            row.push(a.to_string());
            row.push(cl.labels[a as usize].clone().unwrap_or_default());
        }
        for (t, idx) in tables.iter().zip(&indexes) {
            row.push(opt(idx.get(name).map(|&i| t.z[i])));
        }
        out.row(&row)?;
    }
    out.close()
}
