//! Append-only stream file.
//!
//! ```text
//! header: "SSTR" | version u8 | n u32 | curve id (u16 len | bytes)
//! record: len u32 | source id (u16 len | bytes) | encrypted row
//! ```
//!
//! Appends hold an exclusive lock on the file. A trailing record cut short by
//! a crash is ignored by readers and overwritten by the next append.

use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use crate::bilinear::CURVE_ID;
use crate::codec::{Reader, Writer};
use crate::error::{Error, Result};
use crate::sss::EncryptedRow;

pub const MAGIC: &[u8; 4] = b"SSTR";
pub const VERSION: u8 = 1;

/// A record as stored: optional source id and the serialized row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub source: String,
    pub row: Vec<u8>,
}

impl Record {
    pub fn decode(&self) -> Result<EncryptedRow> {
        EncryptedRow::from_bytes(&self.row)
    }
}

/// Result of reading a stream file.
#[derive(Clone, Debug, Default)]
pub struct Contents {
    pub n: usize,
    pub records: Vec<Record>,
    /// Bytes after the last complete record.
    pub trailing: usize,
}

fn header(n: usize) -> Vec<u8> {
    let mut w = Writer::new();
    w.raw(MAGIC)
        .u8(VERSION)
        .u32(n as u32)
        .short_bytes(CURVE_ID.as_bytes());
    w.finish()
}

fn encode_record(source: &str, row: &[u8]) -> Vec<u8> {
    let mut body = Writer::new();
    body.short_bytes(source.as_bytes()).raw(row);
    let mut w = Writer::new();
    w.long_bytes(&body.finish());
    w.finish()
}

/// Returns `(n, header length)`.
fn parse_header(bytes: &[u8]) -> Result<(usize, usize)> {
    let mut r = Reader::new(bytes);
    r.expect(MAGIC, "stream file")?;
    let version = r.u8()?;
    if version != VERSION {
        return Err(Error::malformed(format!("unsupported stream version {version}")));
    }
    let n = r.u32()? as usize;
    let curve = r.short_bytes()?;
    if curve != CURVE_ID.as_bytes() {
        return Err(Error::malformed(format!(
            "stream uses curve {}, expected {CURVE_ID}",
            String::from_utf8_lossy(curve)
        )));
    }
    Ok((n, bytes.len() - r.remaining()))
}

/// Parses the records after the header. Stops at the first incomplete one.
fn parse_records(mut bytes: &[u8]) -> Result<(Vec<Record>, usize)> {
    let mut records = Vec::new();
    while bytes.len() >= 4 {
        let len = u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes")) as usize;
        let Some(body) = bytes.get(4..4 + len) else { break };
        let mut r = Reader::new(body);
        let source = String::from_utf8(r.short_bytes()?.to_vec())
            .map_err(|_| Error::malformed("source id is not UTF-8"))?;
        let row = r.take(r.remaining())?.to_vec();
        records.push(Record { source, row });
        bytes = &bytes[4 + len..];
    }
    Ok((records, bytes.len()))
}

pub fn read_bytes(bytes: &[u8]) -> Result<Contents> {
    let (n, hlen) = parse_header(bytes)?;
    let (records, trailing) = parse_records(&bytes[hlen..])?;
    Ok(Contents { n, records, trailing })
}

/// Handle on a stream file.
#[derive(Clone, Debug)]
pub struct Stream {
    path: PathBuf,
}

impl Stream {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Reads all complete records. A missing file is an error.
    pub fn read(&self) -> Result<Contents> {
        read_bytes(&std::fs::read(&self.path)?)
    }

    /// Appends a row for a stream of width `n`, creating the file if needed.
    pub fn append(&self, n: usize, source: &str, row: &EncryptedRow) -> Result<()> {
        if row.n() != n {
            return Err(Error::LengthMismatch { what: "row", expected: n, found: row.n() });
        }
        if source.len() > u16::MAX as usize {
            return Err(Error::InvalidParams("source id too long".into()));
        }
        let mut f = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(&self.path)?;
        f.lock()?;
        let res = append_locked(&mut f, n, source, row);
        let _ = f.unlock();
        res
    }
}

fn append_locked(f: &mut File, n: usize, source: &str, row: &EncryptedRow) -> Result<()> {
    let mut existing = Vec::new();
    f.read_to_end(&mut existing)?;
    let end = if existing.is_empty() {
        f.write_all(&header(n))?;
        header(n).len() as u64
    } else {
        let contents = read_bytes(&existing)?;
        if contents.n != n {
            return Err(Error::LengthMismatch { what: "stream width", expected: contents.n, found: n });
        }
        (existing.len() - contents.trailing) as u64
    };
    // Drop a torn trailing record before appending after it.
    f.set_len(end)?;
    f.seek(SeekFrom::Start(end))?;
    f.write_all(&encode_record(source, &row.to_bytes()))?;
    f.sync_data()?;
    Ok(())
}

/// Writes records to a fresh stream file (used for scan output).
pub fn write_all(path: &Path, n: usize, records: &[Record]) -> Result<()> {
    let mut out = header(n);
    for r in records {
        out.extend(encode_record(&r.source, &r.row));
    }
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, out)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let h = header(3);
        assert_eq!(&h[..4], b"SSTR");
        assert_eq!(h[4], VERSION);
        assert_eq!(&h[5..9], &[0, 0, 0, 3]);
        assert_eq!(parse_header(&h).unwrap(), (3, h.len()));
        assert!(parse_header(&h[..h.len() - 1]).is_err());
    }

    #[test]
    fn torn_records_are_ignored() {
        let mut bytes = header(2);
        bytes.extend(encode_record("a", b"one"));
        bytes.extend(encode_record("", b"two"));
        let full = bytes.len();
        let c = read_bytes(&bytes).unwrap();
        assert_eq!(c.records.len(), 2);
        assert_eq!(c.records[0], Record { source: "a".into(), row: b"one".to_vec() });
        assert_eq!(c.trailing, 0);
        for cut in 1..(4 + 2 + 3) {
            let c = read_bytes(&bytes[..full - cut]).unwrap();
            assert_eq!(c.records.len(), 1);
            assert_eq!(c.trailing, 4 + 2 + 3 - cut);
        }
    }
}
