//! N-Triples line grammar: parsing and canonical serialization.
//!
//! This is the zero-interning layer: [`parse_line`] turns one line of text
//! into borrowed [`RawTriple`] parts (copying only when escape sequences
//! force it), and the [`ingest`](crate::ingest) module layers interning and
//! stream handling on top.
//!
//! Deliberate deviations from the full W3C grammar, driven by the DBpedia
//! 2014 dumps this pipeline consumes:
//!
//! * blank-node subjects/objects are rejected (the dumps never contain them),
//! * raw spaces inside IRIs are accepted (the dumps contain a handful of
//!   such IRIs; callers can count them via [`RawTriple::has_quirky_iri`]).

use std::borrow::Cow;

use crate::intern::{EntityId, InternTable};

/// Object position of a parsed triple, before interning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawTerm<'a> {
    Iri(Cow<'a, str>),
    Literal {
        lexical: Cow<'a, str>,
        lang: Option<&'a str>,
        datatype: Option<Cow<'a, str>>,
    },
}

/// One parsed N-Triples statement with borrowed text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTriple<'a> {
    pub subject: Cow<'a, str>,
    pub predicate: Cow<'a, str>,
    pub object: RawTerm<'a>,
}

impl RawTriple<'_> {
    /// True if any IRI in the triple contains a raw space — a known quirk of
    /// the 2014 dumps that we accept and record rather than reject.
    pub fn has_quirky_iri(&self) -> bool {
        let obj_quirky = match &self.object {
            RawTerm::Iri(iri) => iri.contains(' '),
            RawTerm::Literal { datatype, .. } => {
                datatype.as_ref().is_some_and(|d| d.contains(' '))
            }
        };
        self.subject.contains(' ') || self.predicate.contains(' ') || obj_quirky
    }
}

/// Object term with interned IRIs. A literal carries at most one of
/// `lang`/`datatype`, enforced by the parser.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Iri(EntityId),
    Literal {
        lexical: String,
        lang: Option<String>,
        datatype: Option<EntityId>,
    },
}

/// One RDF statement. Subject and predicate are always IRIs.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub subject: EntityId,
    pub predicate: EntityId,
    pub object: Term,
}

impl Triple {
    pub fn from_raw(raw: &RawTriple<'_>, table: &mut InternTable) -> Triple {
        let object = match &raw.object {
            RawTerm::Iri(iri) => Term::Iri(table.intern(iri)),
            RawTerm::Literal {
                lexical,
                lang,
                datatype,
            } => Term::Literal {
                lexical: lexical.to_string(),
                lang: lang.map(str::to_string),
                datatype: datatype.as_ref().map(|d| table.intern(d)),
            },
        };
        Triple {
            subject: table.intern(&raw.subject),
            predicate: table.intern(&raw.predicate),
            object,
        }
    }
}

/// Parses one line. Returns `Ok(None)` for blank and comment lines.
pub fn parse_line(line: &str) -> Result<Option<RawTriple<'_>>, String> {
    let mut p = Scanner::new(line);
    p.skip_ws();
    if p.at_end() || p.peek() == Some(b'#') {
        return Ok(None);
    }

    let subject = p.parse_subject()?;
    p.expect_ws("after subject")?;
    let predicate = p.parse_iriref("predicate")?;
    p.expect_ws("after predicate")?;
    let object = p.parse_object()?;
    p.skip_ws();
    if p.peek() != Some(b'.') {
        return Err("expected `.` terminator".into());
    }
    p.advance(1);
    p.skip_ws();
    if !p.at_end() && p.peek() != Some(b'#') {
        return Err("trailing garbage after `.`".into());
    }
    Ok(Some(RawTriple {
        subject,
        predicate,
        object,
    }))
}

struct Scanner<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(input: &'a str) -> Self {
        Scanner { input, pos: 0 }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.input.len()
    }

    fn peek(&self) -> Option<u8> {
        self.input.as_bytes().get(self.pos).copied()
    }

    fn advance(&mut self, n: usize) {
        self.pos += n;
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\r')) {
            self.pos += 1;
        }
    }

    fn expect_ws(&mut self, what: &str) -> Result<(), String> {
        if !matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            return Err(format!("expected whitespace {what}"));
        }
        self.skip_ws();
        Ok(())
    }

    fn parse_subject(&mut self) -> Result<Cow<'a, str>, String> {
        if self.input[self.pos..].starts_with("_:") {
            return Err("blank-node subjects are not supported".into());
        }
        self.parse_iriref("subject")
    }

    fn parse_iriref(&mut self, role: &str) -> Result<Cow<'a, str>, String> {
        if self.peek() != Some(b'<') {
            return Err(format!("expected `<` to open {role} IRI"));
        }
        self.advance(1);
        let start = self.pos;
        let rest = &self.input[start..];
        let Some(close) = rest.find('>') else {
            return Err(format!("unterminated {role} IRI"));
        };
        let body = &rest[..close];
        self.advance(close + 1);
        let iri = decode_escapes(body, true)?;
        if !iri.contains(':') {
            return Err(format!("{role} IRI `{iri}` is not absolute"));
        }
        Ok(iri)
    }

    fn parse_object(&mut self) -> Result<RawTerm<'a>, String> {
        match self.peek() {
            Some(b'<') => Ok(RawTerm::Iri(self.parse_iriref("object")?)),
            Some(b'"') => self.parse_literal(),
            Some(b'_') => Err("blank-node objects are not supported".into()),
            _ => Err("expected IRI or literal object".into()),
        }
    }

    fn parse_literal(&mut self) -> Result<RawTerm<'a>, String> {
        self.advance(1); // opening quote
        let start = self.pos;
        let bytes = self.input.as_bytes();
        // Find the closing quote, skipping backslash escapes.
        let mut i = self.pos;
        loop {
            match bytes.get(i) {
                None => return Err("unterminated literal".into()),
                Some(b'\\') => i += 2,
                Some(b'"') => break,
                Some(_) => i += 1,
            }
        }
        if i > self.input.len() {
            return Err("unterminated escape in literal".into());
        }
        let lexical = decode_escapes(&self.input[start..i], false)?;
        self.pos = i + 1;

        let mut lang = None;
        let mut datatype = None;
        match self.peek() {
            Some(b'@') => {
                self.advance(1);
                let tag_start = self.pos;
                while self
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'-')
                {
                    self.advance(1);
                }
                if self.pos == tag_start {
                    return Err("empty language tag".into());
                }
                lang = Some(&self.input[tag_start..self.pos]);
            }
            Some(b'^') => {
                if !self.input[self.pos..].starts_with("^^") {
                    return Err("expected `^^` before datatype IRI".into());
                }
                self.advance(2);
                datatype = Some(self.parse_iriref("datatype")?);
            }
            _ => {}
        }
        Ok(RawTerm::Literal {
            lexical,
            lang,
            datatype,
        })
    }
}

/// Decodes `\uXXXX`/`\UXXXXXXXX` (and, outside IRIs, the string ECHARs).
/// Borrows the input when no escape is present.
fn decode_escapes(s: &str, in_iri: bool) -> Result<Cow<'_, str>, String> {
    if !s.contains('\\') {
        return Ok(Cow::Borrowed(s));
    }
    let mut out = String::with_capacity(s.len());
    let mut chars = s.char_indices();
    while let Some((_, c)) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        let Some((_, esc)) = chars.next() else {
            return Err("dangling backslash".into());
        };
        match esc {
            'u' => out.push(decode_codepoint(&mut chars, 4)?),
            'U' => out.push(decode_codepoint(&mut chars, 8)?),
            't' if !in_iri => out.push('\t'),
            'b' if !in_iri => out.push('\u{0008}'),
            'n' if !in_iri => out.push('\n'),
            'r' if !in_iri => out.push('\r'),
            'f' if !in_iri => out.push('\u{000C}'),
            '"' if !in_iri => out.push('"'),
            '\'' if !in_iri => out.push('\''),
            '\\' if !in_iri => out.push('\\'),
            other => return Err(format!("invalid escape `\\{other}`")),
        }
    }
    Ok(Cow::Owned(out))
}

fn decode_codepoint(
    chars: &mut std::str::CharIndices<'_>,
    digits: usize,
) -> Result<char, String> {
    let mut value: u32 = 0;
    for _ in 0..digits {
        let Some((_, d)) = chars.next() else {
            return Err("truncated unicode escape".into());
        };
        let Some(v) = d.to_digit(16) else {
            return Err(format!("invalid hex digit `{d}` in unicode escape"));
        };
        value = value * 16 + v;
    }
    char::from_u32(value).ok_or_else(|| format!("U+{value:X} is not a valid code point"))
}

/// Serializes a triple back to canonical N-Triples (no trailing newline).
pub fn serialize_triple(triple: &Triple, table: &InternTable, out: &mut String) {
    out.push('<');
    out.push_str(table.resolve(triple.subject));
    out.push_str("> <");
    out.push_str(table.resolve(triple.predicate));
    out.push_str("> ");
    match &triple.object {
        Term::Iri(id) => {
            out.push('<');
            out.push_str(table.resolve(*id));
            out.push('>');
        }
        Term::Literal {
            lexical,
            lang,
            datatype,
        } => {
            out.push('"');
            escape_literal(lexical, out);
            out.push('"');
            if let Some(tag) = lang {
                out.push('@');
                out.push_str(tag);
            } else if let Some(dt) = datatype {
                out.push_str("^^<");
                out.push_str(table.resolve(*dt));
                out.push('>');
            }
        }
    }
    out.push_str(" .");
}

fn escape_literal(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> RawTerm<'_> {
        RawTerm::Iri(Cow::Borrowed(s))
    }

    #[test]
    fn minimal_triple() {
        let t = parse_line("<http://a> <http://p> <http://b> .")
            .unwrap()
            .unwrap();
        assert_eq!(t.subject, "http://a");
        assert_eq!(t.predicate, "http://p");
        assert_eq!(t.object, iri("http://b"));
    }

    #[test]
    fn comment_and_blank_lines_are_skipped() {
        assert_eq!(parse_line("# comment"), Ok(None));
        assert_eq!(parse_line("   "), Ok(None));
        assert_eq!(parse_line(""), Ok(None));
    }

    #[test]
    fn typed_literal() {
        let t = parse_line(
            "<http://a> <http://p> \"1820\"^^<http://www.w3.org/2001/XMLSchema#integer> .",
        )
        .unwrap()
        .unwrap();
        match t.object {
            RawTerm::Literal {
                lexical,
                lang,
                datatype,
            } => {
                assert_eq!(lexical, "1820");
                assert_eq!(lang, None);
                assert_eq!(
                    datatype.as_deref(),
                    Some("http://www.w3.org/2001/XMLSchema#integer")
                );
            }
            other => panic!("expected literal, got {other:?}"),
        }
    }

    #[test]
    fn lang_tagged_literal() {
        let t = parse_line("<http://a> <http://p> \"Writers\"@en .")
            .unwrap()
            .unwrap();
        match t.object {
            RawTerm::Literal { lexical, lang, .. } => {
                assert_eq!(lexical, "Writers");
                assert_eq!(lang, Some("en"));
            }
            other => panic!("expected literal, got {other:?}"),
        }
    }

    #[test]
    fn unicode_escapes_are_decoded() {
        let t = parse_line("<http://a> <http://p> \"Caf\\u00E9 \\U0001F4D6\" .")
            .unwrap()
            .unwrap();
        match t.object {
            RawTerm::Literal { lexical, .. } => assert_eq!(lexical, "Café 📖"),
            other => panic!("expected literal, got {other:?}"),
        }
    }

    #[test]
    fn string_escapes_are_decoded() {
        let t = parse_line(r#"<http://a> <http://p> "line\nbreak \"quoted\" tab\t" ."#)
            .unwrap()
            .unwrap();
        match t.object {
            RawTerm::Literal { lexical, .. } => {
                assert_eq!(lexical, "line\nbreak \"quoted\" tab\t")
            }
            other => panic!("expected literal, got {other:?}"),
        }
    }

    #[test]
    fn blank_nodes_are_rejected() {
        assert!(parse_line("_:b0 <http://p> <http://b> .").is_err());
        assert!(parse_line("<http://a> <http://p> _:b0 .").is_err());
    }

    #[test]
    fn relative_iri_is_rejected() {
        assert!(parse_line("<noscheme> <http://p> <http://b> .").is_err());
    }

    #[test]
    fn missing_terminator_is_rejected() {
        assert!(parse_line("<http://a> <http://p> <http://b>").is_err());
    }

    #[test]
    fn iri_with_raw_space_is_accepted_and_flagged() {
        let t = parse_line("<http://a/has space> <http://p> <http://b> .")
            .unwrap()
            .unwrap();
        assert_eq!(t.subject, "http://a/has space");
        assert!(t.has_quirky_iri());
    }

    #[test]
    fn trailing_comment_after_dot() {
        let t = parse_line("<http://a> <http://p> <http://b> . # note");
        assert!(t.unwrap().is_some());
    }

    #[test]
    fn serialization_round_trips() {
        let mut table = InternTable::new();
        let line = "<http://a> <http://p> \"x\\ny \\\"z\\\"\"@en .";
        let raw = parse_line(line).unwrap().unwrap();
        let triple = Triple::from_raw(&raw, &mut table);
        let mut out = String::new();
        serialize_triple(&triple, &table, &mut out);
        let reparsed = parse_line(&out).unwrap().unwrap();
        let triple2 = Triple::from_raw(&reparsed, &mut table);
        assert_eq!(triple, triple2);
    }
}
