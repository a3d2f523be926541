use std::collections::BTreeMap;

use socdim::dimensions::{self, ScoreTable, SeedPair, SocialDimension, WordUsageTable, PRESETS};
use socdim::geometry::NeighborIndex;

use super::geometry::{load_embedding, stem};
use super::{parse_pair, resolved, BuildArgs, CompareArgs, ScoreArgs, WordArgs};
use crate::error::CliError;
use crate::run::{opt, Run};

/// Built-in presets overlaid with the config's own.
fn presets(run: &Run) -> BTreeMap<String, SeedPair> {
    let mut all: BTreeMap<String, SeedPair> = PRESETS
        .iter()
        .map(|&(n, l, r)| {
            (
                n.to_string(),
                SeedPair {
                    left: l.into(),
                    right: r.into(),
                },
            )
        })
        .collect();
    for (n, [l, r]) in &run.config.dimensions.presets {
        all.insert(
            n.clone(),
            SeedPair {
                left: l.clone(),
                right: r.clone(),
            },
        );
    }
    all
}

pub fn build(args: &BuildArgs, run: &mut Run) -> Result<(), CliError> {
    let emb = load_embedding(run, resolved(&args.embedding))?;
    let known = presets(run);
    let mut seeds: Vec<(String, SeedPair)> = Vec::new();
    if let Some(s) = &args.seed {
        let (l, r) = parse_pair(s).expect("checked when flags were applied");
        let name = args.name.clone().expect("checked when flags were applied");
        seeds.push((name, SeedPair::new(l, r)?));
    }
    for p in &args.preset {
        let (name, seed) = known
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(p))
            .ok_or_else(|| {
                CliError::Config(vec![format!(
                    "unknown preset `{p}`; known: {}",
                    names(&known)
                )])
            })?;
        seeds.push((
            args.name.clone().unwrap_or_else(|| name.clone()),
            seed.clone(),
        ));
    }
    if args.all_presets {
        for (name, seed) in &known {
            if seed.resolve(emb.vocab()).is_ok() {
                seeds.push((name.clone(), seed.clone()));
            } else {
                eprintln!(
                    "skipping preset `{name}`: {} or {} not in vocabulary",
                    seed.left, seed.right
                );
            }
        }
        if seeds.is_empty() {
            return Err(CliError::Input(
                "no preset has both communities in the vocabulary".into(),
            ));
        }
    }

    let index = NeighborIndex::new(&emb);
    let d = &run.config.dimensions;
    let (k, nn_k) = (d.pairs, d.neighbors);
    let candidates = dimensions::candidate_pairs(&index, nn_k, run.config.workers())?;
    for (name, seed) in &seeds {
        let dim = dimensions::derive_dimension(&index, name, seed, &candidates, k)?;
        dim.save(&run.output(&format!("dimensions/{name}.json"))?)?;
        let mut t = run.tsv(
            &format!("dimensions/{name}.pairs.tsv"),
            &["rank", "left", "right", "alignment"],
        )?;
        for (i, (p, a)) in dim.pairs.iter().zip(&dim.pair_alignment).enumerate() {
            t.row(&[
                (i + 1).to_string(),
                p.left.clone(),
                p.right.clone(),
                opt(*a),
            ])?;
        }
        t.close()?;
        eprintln!(
            "{name}: {} pairs from {} -> {}",
            dim.k, seed.left, seed.right
        );
    }
    Ok(())
}

fn names(known: &BTreeMap<String, SeedPair>) -> String {
    known.keys().cloned().collect::<Vec<_>>().join(", ")
}

pub fn score(args: &ScoreArgs, run: &mut Run) -> Result<(), CliError> {
    let emb = load_embedding(run, resolved(&args.embedding))?;
    let index = NeighborIndex::new(&emb);
    let fingerprint = emb.fingerprint();
    for path in &args.dimensions {
        let dim = SocialDimension::load(run.input(path)?)?;
        if dim.embedding_hash != fingerprint {
            return Err(CliError::Input(format!(
                "{} was built from a different embedding",
                path.display()
            )));
        }
        let mut dims = vec![dim.clone()];
        if args.ness {
            dims.push(dim.ness_dimension());
        }
        for d in &dims {
            let table = dimensions::score_communities(&index, d)?;
            table.write_tsv(&run.output(&format!("scores/{}.tsv", d.name))?)?;
        }
    }
    Ok(())
}

pub fn compare(args: &CompareArgs, run: &mut Run) -> Result<(), CliError> {
    let a = ScoreTable::read_tsv(run.input(&args.a)?, &stem(&args.a))?;
    let b = ScoreTable::read_tsv(run.input(&args.b)?, &stem(&args.b))?;
    let r = dimensions::compare_dimensions(&a, &b)?;
    let mut t = run.tsv(
        &format!("compare/{}-{}.tsv", a.dimension, b.dimension),
        &["a", "b", "communities", "pearson_r"],
    )?;
    t.row(&[
        a.dimension.clone(),
        b.dimension.clone(),
        a.len().to_string(),
        r.to_string(),
    ])?;
    t.close()?;
    eprintln!("r({}, {}) = {r:.4}", a.dimension, b.dimension);
    Ok(())
}

pub fn words(args: &WordArgs, run: &mut Run) -> Result<(), CliError> {
    let kind = run.config.score_kind()?;
    let usage = WordUsageTable::load(run.input(&args.usage)?, run.config.words.cap)?;
    let scores = ScoreTable::read_tsv(run.input(&args.scores)?, &stem(&args.scores))?;
    let words = dimensions::word_scores(&usage, &scores, kind)?;
    dimensions::write_word_scores(
        &words,
        &run.output(&format!("words/{}.tsv", scores.dimension))?,
    )?;
    eprintln!("scored {} words along {}", words.len(), scores.dimension);
    Ok(())
}
