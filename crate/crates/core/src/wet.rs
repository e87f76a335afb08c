//! Streaming reader for WARC/WET crawl files.
//!
//! Records are length-delimited: a version line, `Name: value` header lines,
//! a blank line, exactly `Content-Length` payload bytes, then two line
//! terminators. The payload is never inspected for framing, so text that
//! happens to contain `WARC/1.0` is read as ordinary content. Bare `\n`
//! terminators are accepted in place of `\r\n` and counted per record.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use thiserror::Error;

/// Longest header line accepted before the record is declared malformed.
const MAX_HEADER_LINE: u64 = 64 * 1024;

#[derive(Debug, Error)]
pub enum WetError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("gzip decompression failed: {0}")]
    DecompressError(io::Error),
    #[error("file truncated inside record {record} (byte offset {offset})")]
    TruncatedFile { record: usize, offset: u64 },
    #[error("expected WARC/1.0 or WARC/1.1 at byte offset {offset}, found {found:?}")]
    MissingVersionLine { offset: u64, found: String },
    #[error("record {record} has no Content-Length header")]
    MissingContentLength { record: usize },
    #[error("malformed header in record {record}: {line:?}")]
    MalformedHeader { record: usize, line: String },
    #[error("record {record} is not followed by a blank-line separator")]
    MissingSeparator { record: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WetRecord {
    /// `WARC/1.0` or `WARC/1.1`.
    pub version: String,
    /// Header lines in file order, names as written.
    pub headers: Vec<(String, String)>,
    pub warc_type: String,
    pub target_uri: Option<String>,
    pub content_length: usize,
    pub payload: Vec<u8>,
    /// Bytes of version line, header lines and the terminating blank line.
    pub header_bytes: usize,
    /// Bytes of the two terminators after the payload.
    pub trailer_bytes: usize,
    /// Lines terminated by a bare `\n` instead of `\r\n`.
    pub bare_lf_lines: u32,
}

impl WetRecord {
    /// Case-insensitive header lookup.
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    /// Text records; anything else (`warcinfo`, ...) is yielded but should
    /// normally be skipped by counting code.
    pub fn is_conversion(&self) -> bool {
        self.warc_type.eq_ignore_ascii_case("conversion")
    }

    pub fn consumed_bytes(&self) -> usize {
        self.header_bytes + self.content_length + self.trailer_bytes
    }
}

enum Line {
    Eof,
    Partial,
    Crlf(usize),
    BareLf(usize),
}

/// Reads one `\n`-terminated line into `buf` (cleared first), returning the
/// content length without its terminator.
fn read_line<R: BufRead>(r: &mut R, buf: &mut Vec<u8>, limit: u64) -> io::Result<Line> {
    buf.clear();
    let n = r.by_ref().take(limit).read_until(b'\n', buf)?;
    if n == 0 {
        return Ok(Line::Eof);
    }
    if buf.last() != Some(&b'\n') {
        return Ok(Line::Partial);
    }
    if buf.len() >= 2 && buf[buf.len() - 2] == b'\r' {
        Ok(Line::Crlf(buf.len() - 2))
    } else {
        Ok(Line::BareLf(buf.len() - 1))
    }
}

/// Reads one record from `r`. `Ok(None)` means a clean end of input at a
/// record boundary.
fn read_record<R: BufRead>(
    r: &mut R,
    record: usize,
    offset: u64,
) -> Result<Option<WetRecord>, WetError> {
    let truncated = || WetError::TruncatedFile { record, offset };
    let mut line = Vec::with_capacity(256);
    let mut bare_lf_lines = 0u32;
    let mut header_bytes = 0usize;

    let version = match read_line(r, &mut line, MAX_HEADER_LINE)? {
        Line::Eof => return Ok(None),
        Line::Partial => {
            // a cut inside the version line itself is still truncation
            if line.starts_with(b"WARC/") || b"WARC/".starts_with(&line) {
                return Err(truncated());
            }
            return Err(WetError::MissingVersionLine {
                offset,
                found: String::from_utf8_lossy(&line).into_owned(),
            });
        }
        Line::Crlf(n) | Line::BareLf(n) => {
            if line.len() == n + 1 {
                bare_lf_lines += 1;
            }
            header_bytes += line.len();
            let v = &line[..n];
            if v != b"WARC/1.0" && v != b"WARC/1.1" {
                return Err(WetError::MissingVersionLine {
                    offset,
                    found: String::from_utf8_lossy(v).into_owned(),
                });
            }
            String::from_utf8_lossy(v).into_owned()
        }
    };

    let mut headers = Vec::new();
    loop {
        let n = match read_line(r, &mut line, MAX_HEADER_LINE)? {
            Line::Eof => return Err(truncated()),
            Line::Partial if line.len() as u64 >= MAX_HEADER_LINE => {
                return Err(WetError::MalformedHeader {
                    record,
                    line: String::from_utf8_lossy(&line[..80]).into_owned(),
                })
            }
            Line::Partial => return Err(truncated()),
            Line::Crlf(n) => n,
            Line::BareLf(n) => {
                bare_lf_lines += 1;
                n
            }
        };
        header_bytes += line.len();
        if n == 0 {
            break;
        }
        let text = std::str::from_utf8(&line[..n]).map_err(|_| WetError::MalformedHeader {
            record,
            line: String::from_utf8_lossy(&line[..n]).into_owned(),
        })?;
        let Some((name, value)) = text.split_once(':') else {
            return Err(WetError::MalformedHeader {
                record,
                line: text.to_string(),
            });
        };
        let name = name.trim();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(WetError::MalformedHeader {
                record,
                line: text.to_string(),
            });
        }
        headers.push((name.to_string(), value.trim().to_string()));
    }

    let find = |key: &str| {
        headers
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(key))
            .map(|(_, v)| v.clone())
    };
    let content_length = match find("Content-Length") {
        None => return Err(WetError::MissingContentLength { record }),
        Some(v) => v.parse::<usize>().map_err(|_| WetError::MalformedHeader {
            record,
            line: format!("Content-Length: {v}"),
        })?,
    };

    // Grow with the data actually read rather than trusting the header up front.
    let mut payload = Vec::with_capacity(content_length.min(1 << 20));
    r.by_ref()
        .take(content_length as u64)
        .read_to_end(&mut payload)?;
    if payload.len() < content_length {
        return Err(truncated());
    }

    let mut trailer_bytes = 0;
    for _ in 0..2 {
        match read_line(r, &mut line, 2)? {
            Line::Eof => return Err(truncated()),
            Line::Crlf(0) => trailer_bytes += 2,
            Line::BareLf(0) => {
                bare_lf_lines += 1;
                trailer_bytes += 1;
            }
            Line::Partial if line == b"\r" => return Err(truncated()),
            _ => return Err(WetError::MissingSeparator { record }),
        }
    }

    Ok(Some(WetRecord {
        version,
        warc_type: find("WARC-Type").unwrap_or_default(),
        target_uri: find("WARC-Target-URI"),
        headers,
        content_length,
        payload,
        header_bytes,
        trailer_bytes,
        bare_lf_lines,
    }))
}

/// Parses the record at the start of `bytes`, returning it with the number
/// of bytes consumed so the caller can resume at the next record.
pub fn parse_record(bytes: &[u8]) -> Result<(WetRecord, usize), WetError> {
    let mut cursor = bytes;
    match read_record(&mut cursor, 0, 0)? {
        Some(rec) => Ok((rec, bytes.len() - cursor.len())),
        None => Err(WetError::MissingVersionLine {
            offset: 0,
            found: String::new(),
        }),
    }
}

/// Iterator over the records of one WET stream.
///
/// Memory use is bounded by the largest single record plus the reader's
/// buffer. After the first error the iterator is exhausted.
pub struct WetStream<R> {
    reader: R,
    gzipped: bool,
    offset: u64,
    index: usize,
    finished: bool,
    largest_record: usize,
}

impl<R: BufRead> WetStream<R> {
    pub fn new(reader: R, gzipped: bool) -> Self {
        WetStream {
            reader,
            gzipped,
            offset: 0,
            index: 0,
            finished: false,
            largest_record: 0,
        }
    }

    /// Bytes consumed from the (decompressed) stream so far.
    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// Size in bytes of the largest record yielded so far.
    pub fn largest_record(&self) -> usize {
        self.largest_record
    }
}

impl<R: BufRead> Iterator for WetStream<R> {
    type Item = Result<WetRecord, WetError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        match read_record(&mut self.reader, self.index, self.offset) {
            Ok(Some(rec)) => {
                self.offset += rec.consumed_bytes() as u64;
                self.index += 1;
                self.largest_record = self.largest_record.max(rec.consumed_bytes());
                Some(Ok(rec))
            }
            Ok(None) => {
                self.finished = true;
                None
            }
            Err(e) => {
                self.finished = true;
                Some(Err(match e {
                    WetError::Io(io) if self.gzipped => WetError::DecompressError(io),
                    other => other,
                }))
            }
        }
    }
}

pub type BoxedWetStream<'a> = WetStream<Box<dyn BufRead + Send + 'a>>;

/// Wraps a byte source, decompressing (multi-member) gzip when `gzipped`.
pub fn open_wet_stream<'a, S: Read + Send + 'a>(source: S, gzipped: bool) -> BoxedWetStream<'a> {
    let reader: Box<dyn BufRead + Send + 'a> = if gzipped {
        Box::new(BufReader::new(MultiGzDecoder::new(source)))
    } else {
        Box::new(BufReader::new(source))
    };
    WetStream::new(reader, gzipped)
}

/// Opens a `.wet` or `.wet.gz` file; compression is chosen by extension.
pub fn open_wet_file(path: &Path) -> io::Result<BoxedWetStream<'static>> {
    let gz = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    Ok(open_wet_stream(File::open(path)?, gz))
}

/// Payload as text: invalid UTF-8 replaced, whitespace runs collapsed to a
/// single space, ends trimmed.
pub fn extract_text(record: &WetRecord) -> String {
    clean_text(&String::from_utf8_lossy(&record.payload))
}

pub(crate) fn clean_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Serializes a conversion record with CRLF framing. Used to build fixtures.
pub fn encode_record(target_uri: &str, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(payload.len() + 160);
    out.extend_from_slice(b"WARC/1.0\r\nWARC-Type: conversion\r\n");
    out.extend_from_slice(format!("WARC-Target-URI: {target_uri}\r\n").as_bytes());
    out.extend_from_slice(format!("Content-Length: {}\r\n\r\n", payload.len()).as_bytes());
    out.extend_from_slice(payload);
    out.extend_from_slice(b"\r\n\r\n");
    out
}
