use socdim::embed;
use socdim::ingest::io;

use super::{resolved, TrainArgs};
use crate::error::CliError;
use crate::run::Run;

pub fn run(args: &TrainArgs, run: &mut Run) -> Result<(), CliError> {
    let vocab = io::read_vocab(run.input(resolved(&args.vocab))?)?;
    let table = io::read_pair_table(run.input(resolved(&args.pairs))?, &vocab)?;
    let mut config = run.config.train.clone();
    config.workers = run.config.workers();
    if config.workers > 1 {
        eprintln!(
            "note: training with {} workers is not bit-reproducible",
            config.workers
        );
    }
    let emb = embed::train::<f32>(&table, &vocab, &config)?;
    embed::save_embedding(&emb, &run.output("embedding.bin")?)?;
    if args.text {
        embed::write_text(&emb, &run.output("embedding.txt")?)?;
    }
    eprintln!("trained {} x {} embedding", emb.len(), emb.dim());
    Ok(())
}
