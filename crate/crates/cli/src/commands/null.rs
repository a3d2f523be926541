use std::io::{BufWriter, Write};

use serde::Serialize;
use socdim::dimensions::ScoreTable;
use socdim::ingest::{open_log, parse_interactions, Vocabulary};
use socdim::nullmodels::{self, ShuffleConfig};

use super::geometry::stem;
use super::polarize::{read_assignment, write_assignment};
use super::{resolved, NullBinsArgs, ShuffleArgs};
use crate::error::CliError;
use crate::run::Run;

pub fn shuffle(args: &ShuffleArgs, run: &mut Run) -> Result<(), CliError> {
    if args.inputs.is_empty() {
        return Err(CliError::Config(vec![
            "no input logs: pass --input or set paths.logs".into(),
        ]));
    }
    let format = run.config.format()?;
    let seed = run
        .config
        .null
        .seed
        .expect("seed resolved before execution");
    let mut records = Vec::new();
    for p in &args.inputs {
        for r in parse_interactions(open_log(run.input(p)?)?, format) {
            records.push(r?);
        }
    }
    let shuffled = nullmodels::shuffle_authors(&records, &ShuffleConfig { seed });
    let path = run.output("null/shuffled.tsv")?;
    let file = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    for r in &shuffled {
        writeln!(w, "{}", r.to_tsv()).map_err(|e| CliError::io(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    eprintln!(
        "shuffled authors of {} records (seed {seed})",
        shuffled.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct NullBinsSummary {
    n_political: usize,
    bin_sizes: [usize; 5],
    ness_cutoff: f64,
    ties_split: usize,
}

pub fn bins(args: &NullBinsArgs, run: &mut Run) -> Result<(), CliError> {
    let ness = ScoreTable::read_tsv(run.input(&args.ness)?, &stem(&args.ness))?;
    let partisan = ScoreTable::read_tsv(run.input(&args.partisan)?, &stem(&args.partisan))?;
    // the reference only needs its own communities to be resolvable
    let reference_path = resolved(&args.reference);
    let reference_vocab = reference_communities(run, reference_path)?;
    let reference = read_assignment(reference_path, &reference_vocab)?;
    let sizes = reference.bin_sizes();
    let n: usize = sizes.iter().sum();
    let nb = nullmodels::null_political_bins(&ness, &partisan, n, sizes)?;
    write_assignment(
        run,
        "null/subset.tsv",
        &ness.communities,
        &ness.raw,
        &nb.assignment,
    )?;
    run.json(
        "null/bins.json",
        &NullBinsSummary {
            n_political: n,
            bin_sizes: nb.bin_sizes,
            ness_cutoff: nb.subset.ness_cutoff,
            ties_split: nb.ties_split,
        },
    )?;
    if nb.ties_split > 0 {
        eprintln!(
            "note: {} bin boundaries split tied scores by community id",
            nb.ties_split
        );
    }
    Ok(())
}

fn reference_communities(run: &mut Run, path: &std::path::Path) -> Result<Vocabulary, CliError> {
    let text = std::fs::read_to_string(run.input(path)?).map_err(|e| CliError::io(path, e))?;
    let entries = text
        .lines()
        .skip(1)
        .filter_map(|l| l.split('\t').next())
        .filter(|c| !c.is_empty())
        .map(|c| (c.to_string(), 1))
        .collect();
    Vocabulary::from_entries(entries)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
