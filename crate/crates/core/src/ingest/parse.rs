use std::borrow::Cow;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use super::record::{InteractionRecord, LogFormat, DELETED_AUTHOR};
use super::IngestError;

/// Lines inspected before the malformed-ratio check starts firing early.
const EARLY_CHECK_LINES: u64 = 1000;

#[derive(Deserialize)]
struct JsonLine<'a> {
    #[serde(borrow)]
    author: Cow<'a, str>,
    #[serde(borrow)]
    subreddit: Cow<'a, str>,
    created_utc: Timestamp,
}

// Some archive dumps serialize the timestamp as a string.
#[derive(Deserialize)]
#[serde(untagged)]
enum Timestamp {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Timestamp {
    fn seconds(&self) -> Option<i64> {
        match self {
            Timestamp::Int(v) => Some(*v),
            Timestamp::Float(v) if v.is_finite() => Some(*v as i64),
            Timestamp::Float(_) => None,
            Timestamp::Text(s) => s.trim().parse().ok(),
        }
    }
}

/// Parses one non-empty line. `None` means malformed.
pub fn parse_line(line: &str, format: LogFormat) -> Option<InteractionRecord> {
    let rec = match format {
        LogFormat::Jsonl => {
            let raw: JsonLine<'_> = serde_json::from_str(line).ok()?;
            let ts = raw.created_utc.seconds()?;
            if raw.author == DELETED_AUTHOR {
                InteractionRecord::deleted(raw.subreddit.into_owned(), ts)
            } else {
                InteractionRecord::new(raw.author.into_owned(), raw.subreddit.into_owned(), ts)
            }
        }
        LogFormat::Tsv => {
            let mut fields = line.split('\t');
            let user = fields.next()?;
            let community = fields.next()?;
            let ts: i64 = fields.next()?.trim().parse().ok()?;
            let flag = fields.next()?.trim();
            if fields.next().is_some() {
                return None;
            }
            match flag {
                "0" if user != DELETED_AUTHOR => InteractionRecord::new(user, community, ts),
                "0" | "1" => InteractionRecord::deleted(community, ts),
                _ => return None,
            }
        }
    };
    rec.check().ok()?;
    Some(rec)
}

/// Line bookkeeping shared by sequential and sharded parsing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LineStats {
    /// Non-empty lines seen.
    pub lines: u64,
    pub malformed: u64,
}

impl LineStats {
    pub fn merge(&mut self, other: LineStats) {
        self.lines += other.lines;
        self.malformed += other.malformed;
    }

    /// Fails when more than half the lines are malformed.
    pub fn check(&self, format: LogFormat) -> Result<(), IngestError> {
        if self.lines > 0 && self.malformed * 2 > self.lines {
            Err(IngestError::WrongFormat {
                format,
                malformed: self.malformed,
                lines: self.lines,
            })
        } else {
            Ok(())
        }
    }
}

/// Streaming parser over a newline-delimited log.
///
/// Malformed lines are skipped and counted. The iterator yields a fatal
/// [`IngestError::WrongFormat`] once the malformed share exceeds one half,
/// either after the first thousand lines or at end of stream.
pub struct InteractionReader<R> {
    reader: R,
    format: LogFormat,
    buf: String,
    stats: LineStats,
    done: bool,
}

impl<R: BufRead> InteractionReader<R> {
    pub fn new(reader: R, format: LogFormat) -> Self {
        InteractionReader {
            reader,
            format,
            buf: String::new(),
            stats: LineStats::default(),
            done: false,
        }
    }

    pub fn stats(&self) -> LineStats {
        self.stats
    }
}

impl<R: BufRead> Iterator for InteractionReader<R> {
    type Item = Result<InteractionRecord, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Err(e) => {
                    self.done = true;
                    return Some(Err(IngestError::Io(e)));
                }
                Ok(0) => {
                    self.done = true;
                    return self.stats.check(self.format).err().map(Err);
                }
                Ok(_) => {}
            }
            let line = self.buf.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                continue;
            }
            self.stats.lines += 1;
            match parse_line(line, self.format) {
                Some(rec) => return Some(Ok(rec)),
                None => {
                    self.stats.malformed += 1;
                    if self.stats.lines == EARLY_CHECK_LINES {
                        if let Err(e) = self.stats.check(self.format) {
                            self.done = true;
                            return Some(Err(e));
                        }
                    }
                }
            }
        }
    }
}

/// Parses an in-memory or streamed log.
pub fn parse_interactions<R: BufRead>(stream: R, format: LogFormat) -> InteractionReader<R> {
    InteractionReader::new(stream, format)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Compression {
    None,
    Gzip,
    Zstd,
}

pub(crate) fn compression_of(path: &Path) -> Compression {
    match path.extension().and_then(|e| e.to_str()) {
        Some("gz") | Some("gzip") => Compression::Gzip,
        Some("zst") | Some("zstd") => Compression::Zstd,
        _ => Compression::None,
    }
}

/// Opens a log file, decompressing transparently by extension (`.gz`, `.zst`).
pub fn open_log(path: &Path) -> Result<Box<dyn BufRead + Send>, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::Open {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(match compression_of(path) {
        Compression::Gzip => Box::new(BufReader::new(flate2::read::MultiGzDecoder::new(file))),
        Compression::Zstd => Box::new(BufReader::new(zstd::stream::read::Decoder::new(file)?)),
        Compression::None => Box::new(BufReader::with_capacity(1 << 20, file)),
    })
}
