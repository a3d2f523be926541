//! Embedding persistence.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! magic     8 bytes  "SOCDIMEB"
//! version   u32      currently 1
//! dim       u32
//! n_vocab   u64
//! flags     u32      bit 0: user vectors present
//! meta_len  u64, then meta_len bytes of JSON training metadata
//! n_vocab × (u32 id_len, id bytes (UTF-8), u64 count)
//! n_vocab × dim f32 community vectors, row-major
//! if flag 0: u64 n_users, n_users × (u32 len, bytes), n_users × dim f32
//! ```
//!
//! The text export is the word2vec text format: a `<n> <dim>` header line,
//! then one `<id> <v1> ... <vdim>` line per community.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::model::{ContextVectors, Embedding, TrainingMeta};
use super::EmbedError;
use crate::ingest::Vocabulary;
use crate::scalar::Real;

pub const MAGIC: &[u8; 8] = b"SOCDIMEB";
pub const FORMAT_VERSION: u32 = 1;
const FLAG_CONTEXT: u32 = 1;

fn put_str(buf: &mut Vec<u8>, s: &str) {
    buf.extend((s.len() as u32).to_le_bytes());
    buf.extend(s.as_bytes());
}

fn put_f32s<F: Real>(buf: &mut Vec<u8>, values: &[F]) {
    for v in values {
        buf.extend(v.to_f32().expect("finite").to_le_bytes());
    }
}

/// Serializes to the binary format; values are stored as `f32`.
pub fn encode<F: Real>(emb: &Embedding<F>) -> Vec<u8> {
    let mut buf = Vec::with_capacity(64 + emb.vectors().len() * 4);
    buf.extend(MAGIC);
    buf.extend(FORMAT_VERSION.to_le_bytes());
    buf.extend((emb.dim() as u32).to_le_bytes());
    buf.extend((emb.len() as u64).to_le_bytes());
    let flags = if emb.context().is_some() {
        FLAG_CONTEXT
    } else {
        0
    };
    buf.extend(flags.to_le_bytes());
    let meta = serde_json::to_vec(emb.meta()).expect("metadata serializes");
    buf.extend((meta.len() as u64).to_le_bytes());
    buf.extend(&meta);
    for (id, n) in emb.vocab().entries() {
        put_str(&mut buf, id);
        buf.extend(n.to_le_bytes());
    }
    put_f32s(&mut buf, emb.vectors());
    if let Some(ctx) = emb.context() {
        buf.extend((ctx.users.len() as u64).to_le_bytes());
        for u in &ctx.users {
            put_str(&mut buf, u);
        }
        put_f32s(&mut buf, &ctx.vectors);
    }
    buf
}

pub fn save_embedding<F: Real>(emb: &Embedding<F>, path: &Path) -> Result<(), EmbedError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode(emb))?;
    w.flush()?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], EmbedError> {
        let end = self.pos.checked_add(n).ok_or(EmbedError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(EmbedError::Truncated)?;
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32, EmbedError> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
    fn u64(&mut self) -> Result<u64, EmbedError> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
    fn len(&mut self) -> Result<usize, EmbedError> {
        let n = self.u64()?;
        let n = usize::try_from(n).map_err(|_| EmbedError::Truncated)?;
        // every counted item takes at least one byte
        if n > self.buf.len() - self.pos {
            return Err(EmbedError::Truncated);
        }
        Ok(n)
    }
    fn string(&mut self) -> Result<String, EmbedError> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| EmbedError::Corrupt("id is not UTF-8".into()))
    }
    fn f32s(&mut self, n: usize) -> Result<Vec<f32>, EmbedError> {
        let bytes = self.take(n.checked_mul(4).ok_or(EmbedError::Truncated)?)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }
}

pub fn decode(bytes: &[u8]) -> Result<Embedding<f32>, EmbedError> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(8).map_err(|_| EmbedError::BadMagic)? != MAGIC {
        return Err(EmbedError::BadMagic);
    }
    let version = c.u32()?;
    if version != FORMAT_VERSION {
        return Err(EmbedError::UnsupportedVersion(version));
    }
    let dim = c.u32()? as usize;
    if dim == 0 {
        return Err(EmbedError::Corrupt("zero dimension".into()));
    }
    let n = c.len()?;
    let flags = c.u32()?;
    let meta_len = c.len()?;
    let meta: TrainingMeta = serde_json::from_slice(c.take(meta_len)?)
        .map_err(|e| EmbedError::Corrupt(format!("metadata: {e}")))?;
    let mut entries = Vec::with_capacity(n);
    for _ in 0..n {
        let id = c.string()?;
        entries.push((id, c.u64()?));
    }
    let vocab = Vocabulary::from_entries(entries)
        .map_err(|_| EmbedError::Corrupt("duplicate community id".into()))?;
    let vectors = c.f32s(n * dim)?;
    let mut emb = Embedding::new(vocab, dim, vectors)?;
    if flags & FLAG_CONTEXT != 0 {
        let nu = c.len()?;
        let users = (0..nu).map(|_| c.string()).collect::<Result<Vec<_>, _>>()?;
        let vectors = c.f32s(nu * dim)?;
        emb = emb.with_context(ContextVectors { users, vectors })?;
    }
    if c.pos != bytes.len() {
        return Err(EmbedError::Corrupt(format!(
            "{} trailing bytes",
            bytes.len() - c.pos
        )));
    }
    Ok(emb.with_meta(meta))
}

pub fn load_embedding(path: &Path) -> Result<Embedding<f32>, EmbedError> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn write_text<F: Real>(emb: &Embedding<F>, path: &Path) -> Result<(), EmbedError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{} {}", emb.len(), emb.dim())?;
    for (i, id) in emb.vocab().names().enumerate() {
        write!(w, "{id}")?;
        for v in emb.vector(i as u32) {
            write!(w, " {}", v.to_f32().expect("finite"))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the word2vec text format. Vocabulary counts are not stored there and load as zero.
pub fn read_text(path: &Path) -> Result<Embedding<f32>, EmbedError> {
    let mut lines = BufReader::new(File::open(path)?).lines();
    let header = lines.next().ok_or(EmbedError::Truncated)??;
    let mut h = header.split_whitespace().map(str::parse::<usize>);
    let (Some(Ok(n)), Some(Ok(dim)), None) = (h.next(), h.next(), h.next()) else {
        return Err(EmbedError::Corrupt("bad text header".into()));
    };
    let mut entries = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * dim);
    for _ in 0..n {
        let line = lines.next().ok_or(EmbedError::Truncated)??;
        let mut f = line.split(' ');
        let id = f.next().unwrap_or_default().to_string();
        let row: Vec<f32> = f
            .map(|x| x.parse::<f32>())
            .collect::<Result<_, _>>()
            .map_err(|_| EmbedError::Corrupt(format!("bad value in row `{id}`")))?;
        if row.len() != dim {
            return Err(EmbedError::Shape {
                rows: n,
                dim,
                len: row.len(),
            });
        }
        entries.push((id, 0));
        vectors.extend(row);
    }
    let vocab = Vocabulary::from_entries(entries)
        .map_err(|_| EmbedError::Corrupt("duplicate community id".into()))?;
    Embedding::new(vocab, dim, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(n: usize, dim: usize, seed: u64) -> Embedding<f32> {
        let entries = (0..n).map(|i| (format!("c{i}é"), (n - i) as u64)).collect();
        let vocab = Vocabulary::from_entries(entries).unwrap();
        let vectors = (0..n * dim)
            .map(|i| (((i as u64 * 2654435761 + seed) % 1000) as f32 - 500.0) / 333.0)
            .collect();
        Embedding::new(vocab, dim, vectors).unwrap()
    }

    proptest! {
        #[test]
        fn binary_round_trip_is_bit_exact(n in 1usize..20, dim in 1usize..9, seed in any::<u64>()) {
            let emb = sample(n, dim, seed);
            let back = decode(&encode(&emb)).unwrap();
            prop_assert_eq!(&back, &emb);
            let bits = |e: &Embedding<f32>| e.vectors().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&back), bits(&emb));
        }
    }

    #[test]
    fn truncation_is_an_error_not_a_panic() {
        let bytes = encode(&sample(5, 3, 1));
        for cut in 0..bytes.len() {
            assert!(decode(&bytes[..cut]).is_err(), "cut at {cut}");
        }
        assert!(matches!(decode(b"NOTMAGIC...."), Err(EmbedError::BadMagic)));
    }

    #[test]
    fn version_mismatch_is_typed() {
        let mut bytes = encode(&sample(2, 2, 1));
        bytes[8] = 9;
        assert!(matches!(
            decode(&bytes),
            Err(EmbedError::UnsupportedVersion(9))
        ));
    }

    #[test]
    fn context_vectors_persist() {
        let emb = sample(3, 2, 5)
            .with_context(ContextVectors {
                users: vec!["x".into()],
                vectors: vec![1.5, -2.0],
            })
            .unwrap();
        assert_eq!(decode(&encode(&emb)).unwrap(), emb);
    }

    #[test]
    fn text_export_matches_binary_values() {
        let emb = sample(7, 4, 11);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.txt");
        write_text(&emb, &p).unwrap();
        let back = read_text(&p).unwrap();
        assert_eq!(
            back.vocab().names().collect::<Vec<_>>(),
            emb.vocab().names().collect::<Vec<_>>()
        );
        for (a, b) in back.vectors().iter().zip(emb.vectors()) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-30));
        }
    }
}
