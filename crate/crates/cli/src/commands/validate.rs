use socdim::dimensions::ScoreTable;
use socdim::validation::{self, ExternalMeasure};

use super::geometry::stem;
use super::ValidateArgs;
use crate::error::CliError;
use crate::run::{opt, Run};

pub fn run(args: &ValidateArgs, run: &mut Run) -> Result<(), CliError> {
    let scores = ScoreTable::read_tsv(run.input(&args.scores)?, &stem(&args.scores))?;
    let measure = ExternalMeasure::load(run.input(&args.measure)?)?;
    let (hits, misses) = measure.matched(&scores);
    let name = format!("{}-{}", scores.dimension, stem(&args.measure));

    let mut t = run.tsv(
        &format!("validate/{name}.matches.tsv"),
        &["community_id", "z", "value", "rows", "label"],
    )?;
    let index = scores.index();
    for (c, v) in &measure.values {
        let z = index.get(c.as_str()).map(|&i| scores.z[i]);
        t.row(&[
            c.clone(),
            opt(z),
            v.to_string(),
            measure.rows[c].to_string(),
            measure.labels.get(c).cloned().unwrap_or_default(),
        ])?;
    }
    t.close()?;

    let corr = validation::correlate(&scores, &measure)?;
    let mut header = vec![
        "dimension",
        "measure",
        "matched",
        "unmatched",
        "pearson_r",
        "p_value",
    ];
    let mut row = vec![
        scores.dimension.clone(),
        stem(&args.measure),
        hits.len().to_string(),
        misses.len().to_string(),
        corr.r.to_string(),
        corr.p.to_string(),
    ];
    if let (Some(a), Some(b)) = (&args.label_a, &args.label_b) {
        let group = |label: &str| -> Vec<(f64, bool)> {
            hits.iter()
                .filter(|(c, _, _)| measure.labels.get(c).map(String::as_str) == Some(label))
                .map(|(_, z, _)| (*z, label == a.as_str()))
                .collect()
        };
        let (ga, gb) = (group(a), group(b));
        let za: Vec<f64> = ga.iter().map(|g| g.0).collect();
        let zb: Vec<f64> = gb.iter().map(|g| g.0).collect();
        let d = validation::cohens_d(&za, &zb)?;
        let both: Vec<(f64, bool)> = ga.into_iter().chain(gb).collect();
        let (vals, labels): (Vec<f64>, Vec<bool>) = both.into_iter().unzip();
        let rpb = validation::point_biserial(&vals, &labels)?;
        header.extend(["label_a", "label_b", "cohens_d", "point_biserial_r"]);
        row.extend([a.clone(), b.clone(), d.to_string(), rpb.to_string()]);
    }
    let mut t = run.tsv(&format!("validate/{name}.tsv"), &header)?;
    t.row(&row)?;
    t.close()?;
    eprintln!(
        "r = {:.4} (p = {:.3e}, n = {}; {} unmatched)",
        corr.r,
        corr.p,
        corr.n,
        misses.len()
    );
    Ok(())
}
