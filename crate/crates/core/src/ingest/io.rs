//! TSV persistence for the ingest tables.
//!
//! Every table carries a header row. Users are stored by id, so reloading a
//! pair table reproduces the dense numbering (users sorted by id).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::record::DELETED_AUTHOR;
use super::tables::{DropStats, MonthlyActivityTable, MonthlyRow, PairCount, PairCountTable};
use super::vocab::{Coverage, Vocabulary};
use super::IngestError;
use crate::month::YearMonth;

pub const PAIR_HEADER: &str = "user_id\tcommunity_id\tcount";
pub const VOCAB_HEADER: &str = "community_id\tcount";
pub const MONTHLY_HEADER: &str = "month\tcommunity_id\tuser_id\tcount";

/// Sidecar metadata written next to a persisted pair table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairTableMeta {
    pub vocab_size: usize,
    pub vocab_hash: String,
    pub users: usize,
    pub total: u64,
    pub coverage: Coverage,
    pub comment_coverage: f64,
    pub user_coverage: f64,
    pub dropped: DropStats,
}

impl PairTableMeta {
    pub fn new(table: &PairCountTable, vocab: &Vocabulary, coverage: Coverage) -> Self {
        PairTableMeta {
            vocab_size: vocab.len(),
            vocab_hash: vocab.hash(),
            users: table.n_users(),
            total: table.total(),
            comment_coverage: coverage.comment_fraction(),
            user_coverage: coverage.user_fraction(),
            coverage,
            dropped: table.dropped(),
        }
    }
}

fn lines(
    path: &Path,
    header: &str,
) -> Result<impl Iterator<Item = (usize, std::io::Result<String>)>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::Open {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut it = BufReader::new(file).lines().enumerate();
    match it.next() {
        Some((_, Ok(h))) if h.trim_end() == header => Ok(it),
        _ => Err(IngestError::BadTable {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header `{header}`"),
        }),
    }
}

fn bad(path: &Path, line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::BadTable {
        path: path.to_path_buf(),
        line: line + 1,
        reason: reason.into(),
    }
}

pub fn write_vocab(vocab: &Vocabulary, path: &Path) -> Result<(), IngestError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{VOCAB_HEADER}")?;
    for (id, n) in vocab.entries() {
        writeln!(w, "{id}\t{n}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_vocab(path: &Path) -> Result<Vocabulary, IngestError> {
    let mut entries = Vec::new();
    for (i, line) in lines(path, VOCAB_HEADER)? {
        let line = line?;
        let (id, n) = line
            .split_once('\t')
            .ok_or_else(|| bad(path, i, "expected 2 columns"))?;
        let n = n
            .trim()
            .parse()
            .map_err(|_| bad(path, i, "count is not an integer"))?;
        entries.push((id.to_string(), n));
    }
    Vocabulary::from_entries(entries)
}

pub fn write_pair_table(
    table: &PairCountTable,
    vocab: &Vocabulary,
    path: &Path,
) -> Result<(), IngestError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{PAIR_HEADER}")?;
    for t in table.triples() {
        writeln!(
            w,
            "{}\t{}\t{}",
            table.users()[t.user as usize],
            vocab.name(t.community),
            t.count
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pair_meta(meta: &PairTableMeta, path: &Path) -> Result<(), IngestError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, meta)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Loads a pair table against `vocab`; rows naming unknown communities are an error.
pub fn read_pair_table(path: &Path, vocab: &Vocabulary) -> Result<PairCountTable, IngestError> {
    let mut raw: Vec<(String, u32, u64)> = Vec::new();
    for (i, line) in lines(path, PAIR_HEADER)? {
        let line = line?;
        let mut f = line.split('\t');
        let (Some(u), Some(c), Some(n), None) = (f.next(), f.next(), f.next(), f.next()) else {
            return Err(bad(path, i, "expected 3 columns"));
        };
        let c = vocab
            .id(c)
            .ok_or_else(|| bad(path, i, format!("community `{c}` not in vocabulary")))?;
        let n = n
            .trim()
            .parse()
            .map_err(|_| bad(path, i, "count is not an integer"))?;
        raw.push((u.to_string(), c, n));
    }
    let mut users: Vec<String> = raw.iter().map(|(u, _, _)| u.clone()).collect();
    users.sort_unstable();
    users.dedup();
    let index: HashMap<&str, u32> = users
        .iter()
        .enumerate()
        .map(|(i, u)| (u.as_str(), i as u32))
        .collect();
    let triples = raw
        .iter()
        .map(|(u, c, n)| PairCount {
            user: index[u.as_str()],
            community: *c,
            count: *n,
        })
        .collect();
    PairCountTable::from_parts(users.clone(), vocab.len(), triples, DropStats::default())
}

pub fn write_monthly(
    table: &MonthlyActivityTable,
    vocab: &Vocabulary,
    path: &Path,
) -> Result<(), IngestError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{MONTHLY_HEADER}")?;
    for r in table.rows() {
        let user = r
            .user
            .map_or(DELETED_AUTHOR, |u| table.users()[u as usize].as_str());
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            r.month,
            vocab.name(r.community),
            user,
            r.count
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_monthly(path: &Path, vocab: &Vocabulary) -> Result<MonthlyActivityTable, IngestError> {
    let mut raw = Vec::new();
    for (i, line) in lines(path, MONTHLY_HEADER)? {
        let line = line?;
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            return Err(bad(path, i, "expected 4 columns"));
        }
        let month: YearMonth = f[0].parse().map_err(|_| bad(path, i, "bad month"))?;
        let c = vocab
            .id(f[1])
            .ok_or_else(|| bad(path, i, format!("community `{}` not in vocabulary", f[1])))?;
        let n: u64 = f[3]
            .trim()
            .parse()
            .map_err(|_| bad(path, i, "count is not an integer"))?;
        let user = (f[2] != DELETED_AUTHOR).then(|| f[2].to_string());
        raw.push((month, c, user, n));
    }
    let mut users: Vec<String> = raw.iter().filter_map(|r| r.2.clone()).collect();
    users.sort_unstable();
    users.dedup();
    let index: HashMap<&str, u32> = users
        .iter()
        .enumerate()
        .map(|(i, u)| (u.as_str(), i as u32))
        .collect();
    let rows = raw
        .iter()
        .map(|(m, c, u, n)| MonthlyRow {
            month: *m,
            community: *c,
            user: u.as_deref().map(|u| index[u]),
            count: *n,
        })
        .collect();
    Ok(MonthlyActivityTable::from_parts(users.clone(), rows, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_vocab, count_pairs, monthly_activity, InteractionRecord};

    #[test]
    fn tables_reload_identically() {
        let recs = vec![
            InteractionRecord::new("zed", "a", 1_500_000_000),
            InteractionRecord::new("amy", "b", 1_500_000_000),
            InteractionRecord::new("amy", "a", 1_510_000_000),
            InteractionRecord::deleted("a", 1_510_000_000),
        ];
        let (vocab, cov) = build_vocab(&recs, 10).unwrap();
        let pairs = count_pairs(&recs, &vocab);
        let monthly = monthly_activity(&recs, &vocab);
        let dir = tempfile::tempdir().unwrap();
        let (vp, pp, mp) = (
            dir.path().join("v.tsv"),
            dir.path().join("p.tsv"),
            dir.path().join("m.tsv"),
        );
        write_vocab(&vocab, &vp).unwrap();
        write_pair_table(&pairs, &vocab, &pp).unwrap();
        write_monthly(&monthly, &vocab, &mp).unwrap();
        let v2 = read_vocab(&vp).unwrap();
        assert_eq!(v2, vocab);
        let p2 = read_pair_table(&pp, &v2).unwrap();
        assert_eq!(p2.triples(), pairs.triples());
        assert_eq!(p2.users(), pairs.users());
        let m2 = read_monthly(&mp, &v2).unwrap();
        assert_eq!(m2.rows(), monthly.rows());
        let meta = PairTableMeta::new(&pairs, &vocab, cov);
        assert_eq!(meta.total, 3);
    }

    #[test]
    fn missing_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.tsv");
        std::fs::write(&p, "a\t1\n").unwrap();
        assert!(matches!(
            read_vocab(&p),
            Err(IngestError::BadTable { line: 1, .. })
        ));
    }
}
