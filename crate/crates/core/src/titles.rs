//! Article title ↔ DBpedia resource IRI conversion.
//!
//! Titles are handled in their underscored wiki form (`Johann_Wolfgang_von_Goethe`);
//! DBpedia local names are the same text percent-encoded. Input files may
//! also use spaces, which are normalized to underscores first.

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};

/// Characters DBpedia percent-encodes in resource local names.
const LOCAL_NAME_ESCAPES: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'<')
    .add(b'>')
    .add(b'?')
    .add(b'[')
    .add(b'\\')
    .add(b']')
    .add(b'^')
    .add(b'`')
    .add(b'{')
    .add(b'|')
    .add(b'}');

/// Builds a resource IRI from a title (or passes through strings that are
/// already IRIs).
pub fn title_to_iri(resource_prefix: &str, title: &str) -> String {
    if title.contains("://") {
        return title.to_string();
    }
    let underscored = title.trim().replace(' ', "_");
    format!(
        "{resource_prefix}{}",
        utf8_percent_encode(&underscored, LOCAL_NAME_ESCAPES)
    )
}

/// Extracts the decoded, underscored title from a resource IRI with the
/// given prefix.
pub fn iri_to_title(resource_prefix: &str, iri: &str) -> Option<String> {
    let local = iri.strip_prefix(resource_prefix)?;
    Some(decode_title(local))
}

/// Percent-decodes a title as found in pagecounts lines or IRI local names.
pub fn decode_title(raw: &str) -> String {
    percent_decode_str(raw).decode_utf8_lossy().into_owned()
}

/// Human-readable label: decoded local name with underscores as spaces.
pub fn display_title(resource_prefix: &str, iri: &str) -> String {
    iri_to_title(resource_prefix, iri)
        .map(|t| t.replace('_', " "))
        .unwrap_or_else(|| iri.to_string())
}

/// Wikipedia titles are case-sensitive except for the first character; fold
/// it to uppercase for lookups.
pub fn fold_first_upper(title: &str) -> String {
    let mut chars = title.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
