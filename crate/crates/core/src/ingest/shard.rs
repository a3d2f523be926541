use std::fs::File;
use std::io::{BufRead, BufReader, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::thread;

use super::counts::IngestCounts;
use super::parse::{compression_of, open_log, parse_line, Compression, LineStats};
use super::record::LogFormat;
use super::IngestError;

/// Reads every log into one set of tallies.
///
/// Uncompressed files are split into `workers` byte ranges aligned to line
/// starts and parsed concurrently; compressed files are streamed by a single
/// worker each. The result is independent of `workers`.
pub fn ingest_paths(
    paths: &[PathBuf],
    format: LogFormat,
    workers: usize,
) -> Result<IngestCounts, IngestError> {
    let workers = workers.max(1);
    let mut total = IngestCounts::new();
    for path in paths {
        let counts = if workers > 1 && compression_of(path) == Compression::None {
            ingest_sharded(path, format, workers)?
        } else {
            let mut counts = IngestCounts::new();
            let stats = parse_stream(open_log(path)?, format, &mut counts, u64::MAX)?;
            counts.add_line_stats(stats);
            counts
        };
        total.merge(counts);
    }
    total.line_stats().check(format)?;
    Ok(total)
}

fn parse_stream<R: BufRead>(
    mut reader: R,
    format: LogFormat,
    counts: &mut IngestCounts,
    byte_budget: u64,
) -> Result<LineStats, IngestError> {
    let mut stats = LineStats::default();
    let mut buf = String::new();
    let mut consumed = 0u64;
    while consumed < byte_budget {
        buf.clear();
        let n = reader.read_line(&mut buf)?;
        if n == 0 {
            break;
        }
        consumed += n as u64;
        let line = buf.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            continue;
        }
        stats.lines += 1;
        match parse_line(line, format) {
            Some(rec) => counts.add(&rec),
            None => stats.malformed += 1,
        }
    }
    Ok(stats)
}

/// Offsets of the first line start at or after each nominal split point.
fn line_aligned_splits(path: &Path, len: u64, parts: usize) -> Result<Vec<u64>, IngestError> {
    let mut file = BufReader::new(File::open(path)?);
    let mut bounds = vec![0u64];
    let mut scratch = Vec::new();
    for i in 1..parts {
        let nominal = len * i as u64 / parts as u64;
        let prev = *bounds.last().expect("non-empty");
        if nominal <= prev {
            continue;
        }
        // A split at `nominal` belongs to the line containing byte nominal-1.
        file.seek(SeekFrom::Start(nominal - 1))?;
        scratch.clear();
        let skipped = file.read_until(b'\n', &mut scratch)? as u64;
        let start = (nominal - 1 + skipped).min(len);
        if start > prev {
            bounds.push(start);
        }
    }
    bounds.push(len);
    bounds.dedup();
    Ok(bounds)
}

fn ingest_sharded(
    path: &Path,
    format: LogFormat,
    workers: usize,
) -> Result<IngestCounts, IngestError> {
    let len = std::fs::metadata(path)?.len();
    let bounds = line_aligned_splits(path, len, workers)?;
    let results: Vec<Result<IngestCounts, IngestError>> = thread::scope(|s| {
        let handles: Vec<_> = bounds
            .windows(2)
            .map(|w| {
                let (start, end) = (w[0], w[1]);
                s.spawn(move || {
                    let mut file = File::open(path)?;
                    file.seek(SeekFrom::Start(start))?;
                    let mut counts = IngestCounts::new();
                    let stats = parse_stream(
                        BufReader::with_capacity(1 << 20, file),
                        format,
                        &mut counts,
                        end - start,
                    )?;
                    counts.add_line_stats(stats);
                    Ok(counts)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("ingest worker panicked"))
            .collect()
    });
    let mut total = IngestCounts::new();
    for r in results {
        total.merge(r?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn shard_count_does_not_change_tables() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.tsv");
        let mut f = File::create(&path).unwrap();
        for i in 0..997u64 {
            writeln!(
                f,
                "user{}\tcomm{}\t{}\t{}",
                i % 31,
                (i * 7) % 13,
                1_400_000_000 + i * 40_000,
                u8::from(i % 17 == 0)
            )
            .unwrap();
            if i % 101 == 0 {
                writeln!(f, "garbage").unwrap();
            }
        }
        drop(f);
        let one = ingest_paths(std::slice::from_ref(&path), LogFormat::Tsv, 1).unwrap();
        let (v1, _) = one.vocabulary(8).unwrap();
        for workers in [2, 3, 7, 64] {
            let many = ingest_paths(std::slice::from_ref(&path), LogFormat::Tsv, workers).unwrap();
            let (v, _) = many.vocabulary(8).unwrap();
            assert_eq!(v, v1);
            assert_eq!(many.pair_table(&v), one.pair_table(&v1));
            assert_eq!(many.monthly_table(&v), one.monthly_table(&v1));
            assert_eq!(many.line_stats(), one.line_stats());
        }
    }

    #[test]
    fn gzip_logs_decompress_transparently() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl.gz");
        let mut enc = flate2::write::GzEncoder::new(
            File::create(&path).unwrap(),
            flate2::Compression::default(),
        );
        writeln!(
            enc,
            r#"{{"author":"a","subreddit":"s","created_utc":1500000000}}"#
        )
        .unwrap();
        writeln!(
            enc,
            r#"{{"author":"[deleted]","subreddit":"s","created_utc":1500000000}}"#
        )
        .unwrap();
        enc.finish().unwrap();
        let counts = ingest_paths(&[path], LogFormat::Jsonl, 4).unwrap();
        assert_eq!(counts.record_count(), 2);
        assert_eq!(counts.deleted_count(), 1);
    }

    #[test]
    fn zstd_logs_decompress_transparently() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.tsv.zst");
        let data = b"a\ts\t1500000000\t0\nb\ts\t1500000000\t0\n";
        std::fs::write(&path, zstd::encode_all(&data[..], 3).unwrap()).unwrap();
        let counts = ingest_paths(&[path], LogFormat::Tsv, 1).unwrap();
        assert_eq!(counts.record_count(), 2);
    }

    #[test]
    fn missing_file_is_io_error() {
        let res = ingest_paths(&[PathBuf::from("/nonexistent/x.tsv")], LogFormat::Tsv, 1);
        assert!(matches!(res, Err(IngestError::Open { .. })));
    }
}
