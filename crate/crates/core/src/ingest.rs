//! Streaming ingestion of (optionally compressed) N-Triples files.
//!
//! Memory use is independent of input size: lines are parsed one at a time
//! into a reused buffer and handed to the sink. Only the intern table grows
//! with the number of distinct IRIs.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Read};
use std::path::Path;

use bzip2::read::MultiBzDecoder;
use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};
use crate::intern::InternTable;
use crate::ntriples::{parse_line, Triple};

/// How parse failures on individual lines are handled.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Abort on the first malformed line instead of recording and skipping it.
    pub strict: bool,
}

/// A recorded per-line parse failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: u64,
    pub message: String,
}

/// Counters produced by one [`parse_stream`] run.
#[derive(Debug, Clone, Default)]
pub struct ParseStats {
    /// Triples emitted to the sink.
    pub triples: u64,
    /// Blank and comment lines.
    pub skipped_lines: u64,
    /// Malformed lines recovered from (always 0 in strict mode).
    pub malformed: u64,
    /// First few malformed lines, for diagnostics.
    pub errors: Vec<LineError>,
    /// Triples containing an IRI with a raw space (2014 dump quirk).
    pub quirky_iris: u64,
}

const MAX_RECORDED_ERRORS: usize = 20;

/// Opens `path`, transparently decompressing gzip or bzip2 containers.
/// The container is detected by magic bytes, never by file name.
pub fn open_reader(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 3];
    let n = read_up_to(&mut file, &mut magic).map_err(|e| Error::io(path, e))?;
    let head = io::Cursor::new(magic[..n].to_vec());
    let rewound = head.chain(file);
    Ok(match &magic[..n] {
        [0x1f, 0x8b, ..] => Box::new(BufReader::new(MultiGzDecoder::new(rewound))),
        [b'B', b'Z', b'h'] => Box::new(BufReader::new(MultiBzDecoder::new(rewound))),
        _ => Box::new(BufReader::new(rewound)),
    })
}

fn read_up_to(reader: &mut impl Read, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match reader.read(&mut buf[filled..])? {
            0 => break,
            n => filled += n,
        }
    }
    Ok(filled)
}

/// Parses an N-Triples stream, interning IRIs into `table` and feeding every
/// well-formed triple to `sink`. Returns the counters; the number of emitted
/// triples is `stats.triples`.
///
/// Malformed lines are recorded and skipped unless `opts.strict` is set, in
/// which case the first one aborts the parse. I/O errors (including truncated
/// compression streams) are always fatal.
pub fn parse_stream<R, F>(
    reader: R,
    table: &mut InternTable,
    opts: ParseOptions,
    mut sink: F,
) -> Result<ParseStats>
where
    R: BufRead,
    F: FnMut(Triple),
{
    let mut stats = ParseStats::default();
    let mut line_no: u64 = 0;
    let mut buf = String::new();
    let mut reader = reader;
    loop {
        buf.clear();
        let read = reader
            .read_line(&mut buf)
            .map_err(|e| Error::io("<stream>", e))?;
        if read == 0 {
            break;
        }
        line_no += 1;
        match parse_line(buf.trim_end_matches(['\n', '\r'])) {
            Ok(Some(raw)) => {
                if raw.has_quirky_iri() {
                    stats.quirky_iris += 1;
                }
                sink(Triple::from_raw(&raw, table));
                stats.triples += 1;
            }
            Ok(None) => stats.skipped_lines += 1,
            Err(message) => {
                if opts.strict {
                    return Err(Error::Parse {
                        line: line_no,
                        message,
                    });
                }
                stats.malformed += 1;
                if stats.errors.len() < MAX_RECORDED_ERRORS {
                    stats.errors.push(LineError {
                        line: line_no,
                        message,
                    });
                }
            }
        }
    }
    Ok(stats)
}

/// Convenience wrapper: open + sniff + parse.
pub fn parse_file<F>(
    path: &Path,
    table: &mut InternTable,
    opts: ParseOptions,
    sink: F,
) -> Result<ParseStats>
where
    F: FnMut(Triple),
{
    let reader = open_reader(path)?;
    parse_stream(reader, table, opts, sink).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    const FIXTURE: &str = "\
# writers, hand-written
<http://a> <http://p> <http://b> .
<http://a> <http://p> \"1820\"^^<http://www.w3.org/2001/XMLSchema#integer> .

<http://b> <http://q> \"zwei\"@de .
this line is broken
<http://c> <http://p> <http://a> .
";

    #[test]
    fn counts_and_recovery() {
        let mut table = InternTable::new();
        let mut triples = Vec::new();
        let stats = parse_stream(
            FIXTURE.as_bytes(),
            &mut table,
            ParseOptions::default(),
            |t| triples.push(t),
        )
        .unwrap();
        assert_eq!(stats.triples, 4);
        assert_eq!(stats.skipped_lines, 2); // comment + blank
        assert_eq!(stats.malformed, 1);
        assert_eq!(stats.errors[0].line, 6);
        assert_eq!(triples.len(), 4);
    }

    #[test]
    fn strict_mode_aborts() {
        let mut table = InternTable::new();
        let err = parse_stream(
            FIXTURE.as_bytes(),
            &mut table,
            ParseOptions { strict: true },
            |_| {},
        )
        .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn comment_only_input_yields_zero() {
        let mut table = InternTable::new();
        let stats = parse_stream(
            "# comment\n".as_bytes(),
            &mut table,
            ParseOptions::default(),
            |_| {},
        )
        .unwrap();
        assert_eq!(stats.triples, 0);
    }

    #[test]
    fn gzip_is_detected_by_magic_bytes() {
        let dir = tempfile::tempdir().unwrap();
        // Deliberately misleading extension: detection must use magic bytes.
        let path = dir.path().join("data.nt");
        let mut enc =
            flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(b"<http://a> <http://p> <http://b> .\n").unwrap();
        std::fs::write(&path, enc.finish().unwrap()).unwrap();

        let mut table = InternTable::new();
        let mut count = 0;
        let stats = parse_file(&path, &mut table, ParseOptions::default(), |_| count += 1)
            .unwrap();
        assert_eq!(stats.triples, 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn bzip2_is_detected_by_magic_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.bin");
        let mut enc =
            bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::default());
        enc.write_all(b"<http://a> <http://p> <http://b> .\n<http://b> <http://p> <http://a> .\n")
            .unwrap();
        std::fs::write(&path, enc.finish().unwrap()).unwrap();

        let mut table = InternTable::new();
        let stats = parse_file(&path, &mut table, ParseOptions::default(), |_| {}).unwrap();
        assert_eq!(stats.triples, 2);
    }

    #[test]
    fn truncated_bzip2_stream_is_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trunc.bin");
        let mut enc =
            bzip2::write::BzEncoder::new(Vec::new(), bzip2::Compression::default());
        for i in 0..1000 {
            enc.write_all(format!("<http://s/{i}> <http://p> <http://o/{i}> .\n").as_bytes())
                .unwrap();
        }
        let full = enc.finish().unwrap();
        std::fs::write(&path, &full[..full.len() / 2]).unwrap();

        let mut table = InternTable::new();
        let res = parse_file(&path, &mut table, ParseOptions::default(), |_| {});
        assert!(matches!(res, Err(Error::Io { .. })));
    }

    /// Synthetic generator that yields the same subject over and over without
    /// ever materializing the whole input, to exercise the streaming path.
    struct RepeatingSource {
        remaining: u64,
        pending: Vec<u8>,
    }

    impl Read for RepeatingSource {
        fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
            if self.pending.is_empty() {
                if self.remaining == 0 {
                    return Ok(0);
                }
                self.remaining -= 1;
                self.pending = format!(
                    "<http://s/repeat> <http://p/{}> <http://o/same> .\n",
                    self.remaining % 7
                )
                .into_bytes();
            }
            let n = self.pending.len().min(buf.len());
            buf[..n].copy_from_slice(&self.pending[..n]);
            self.pending.drain(..n);
            Ok(n)
        }
    }

    #[test]
    fn streaming_keeps_intern_table_small() {
        let source = RepeatingSource {
            remaining: 2_000_000,
            pending: Vec::new(),
        };
        let mut table = InternTable::new();
        let mut count = 0u64;
        let stats = parse_stream(
            BufReader::new(source),
            &mut table,
            ParseOptions::default(),
            |_| count += 1,
        )
        .unwrap();
        assert_eq!(stats.triples, 2_000_000);
        assert_eq!(count, 2_000_000);
        // 1 subject + 7 predicates + 1 object: table growth tracks distinct
        // IRIs, not input length.
        assert_eq!(table.len(), 9);
    }
}
