use serde::Serialize;
use socdim::ingest::{self, io};

use super::IngestArgs;
use crate::error::CliError;
use crate::run::Run;

#[derive(Serialize)]
struct IngestSummary {
    format: String,
    top_n: usize,
    lines: u64,
    malformed: u64,
    records: u64,
    deleted: u64,
    vocab_size: usize,
    users: usize,
    comment_coverage: f64,
    user_coverage: f64,
}

pub fn run(args: &IngestArgs, run: &mut Run) -> Result<(), CliError> {
    if args.inputs.is_empty() {
        return Err(CliError::Config(vec![
            "no input logs: pass --input or set paths.logs".into(),
        ]));
    }
    for p in &args.inputs {
        run.input(p)?;
    }
    let format = run.config.format()?;
    let counts = ingest::ingest_paths(&args.inputs, format, run.config.workers())?;
    let (vocab, coverage) = counts.vocabulary(run.config.ingest.top_n)?;
    let pairs = counts.pair_table(&vocab);
    let monthly = counts.monthly_table(&vocab);

    io::write_vocab(&vocab, &run.output("vocab.tsv")?)?;
    io::write_pair_table(&pairs, &vocab, &run.output("pairs.tsv")?)?;
    io::write_pair_meta(
        &io::PairTableMeta::new(&pairs, &vocab, coverage),
        &run.output("pairs.meta.json")?,
    )?;
    io::write_monthly(&monthly, &vocab, &run.output("monthly.tsv")?)?;
    let stats = counts.line_stats();
    let summary = IngestSummary {
        format: format.to_string(),
        top_n: run.config.ingest.top_n,
        lines: stats.lines,
        malformed: stats.malformed,
        records: counts.record_count(),
        deleted: counts.deleted_count(),
        vocab_size: vocab.len(),
        users: pairs.n_users(),
        comment_coverage: coverage.comment_fraction(),
        user_coverage: coverage.user_fraction(),
    };
    run.json("ingest.json", &summary)?;
    eprintln!(
        "ingested {} records into {} communities ({:.1}% of comments, {:.1}% of users)",
        summary.records,
        summary.vocab_size,
        100.0 * summary.comment_coverage,
        100.0 * summary.user_coverage
    );
    Ok(())
}
