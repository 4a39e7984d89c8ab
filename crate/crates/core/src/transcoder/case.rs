//! Capital-letter decomposition: every cased codepoint with a one-to-one
//! lowercase counterpart is rewritten as the marker byte followed by its
//! lowercase form. This frees the ASCII capital range for morpheme leads.

use unicode_normalization::UnicodeNormalization;

use crate::codepage::CAP_MARKER;

use super::TranscodeError;

/// Lowercase counterpart of `c` when the pair round-trips exactly
/// (`upper(lower(c)) == c`, both one-to-one).
pub fn simple_lowercase(c: char) -> Option<char> {
    let lower = single(c.to_lowercase())?;
    if lower == c || single(lower.to_uppercase()) != Some(c) {
        return None;
    }
    Some(lower)
}

/// Inverse of [`simple_lowercase`].
pub fn simple_uppercase(c: char) -> Option<char> {
    let upper = single(c.to_uppercase())?;
    (upper != c && simple_lowercase(upper) == Some(c)).then_some(upper)
}

fn single(mut it: impl Iterator<Item = char>) -> Option<char> {
    let first = it.next()?;
    it.next().is_none().then_some(first)
}

/// True when `c` would be rewritten with a marker.
pub fn is_capital(c: char) -> bool {
    simple_lowercase(c).is_some()
}

pub(crate) fn push_decomposed_char(out: &mut Vec<u8>, c: char) {
    let mut buf = [0u8; 4];
    match simple_lowercase(c) {
        Some(lower) => {
            out.push(CAP_MARKER);
            out.extend_from_slice(lower.encode_utf8(&mut buf).as_bytes());
        }
        None => out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes()),
    }
}

/// NFKD-normalizes `text` (when `nfkd` is set) and replaces capitals by
/// marker + lowercase. The result contains no bytes in `0x42..=0x5A`.
pub fn decompose_str(text: &str, nfkd: bool) -> Vec<u8> {
    let mut out = Vec::with_capacity(text.len() + text.len() / 8);
    if nfkd {
        text.nfkd().for_each(|c| push_decomposed_char(&mut out, c));
    } else {
        text.chars().for_each(|c| push_decomposed_char(&mut out, c));
    }
    out
}

/// Byte-level entry point: validates UTF-8, then [`decompose_str`] with NFKD.
pub fn decompose_bytes(text: &[u8]) -> Result<Vec<u8>, TranscodeError> {
    decompose_bytes_with(text, true)
}

pub fn decompose_bytes_with(text: &[u8], nfkd: bool) -> Result<Vec<u8>, TranscodeError> {
    let text = std::str::from_utf8(text)
        .map_err(|e| TranscodeError::InvalidUtf8 { offset: e.valid_up_to() })?;
    Ok(decompose_str(text, nfkd))
}

/// Restores capitals: each marker plus the following codepoint becomes the
/// uppercase codepoint. Every other byte is copied verbatim.
pub fn recompose_bytes(stream: &[u8]) -> Result<Vec<u8>, TranscodeError> {
    let mut out = Vec::with_capacity(stream.len());
    let mut i = 0;
    while i < stream.len() {
        if stream[i] != CAP_MARKER {
            out.push(stream[i]);
            i += 1;
            continue;
        }
        let (c, width) =
            next_char(&stream[i + 1..]).ok_or(TranscodeError::DanglingMarker { offset: i })?;
        let upper = simple_uppercase(c).ok_or(TranscodeError::DanglingMarker { offset: i })?;
        let mut buf = [0u8; 4];
        out.extend_from_slice(upper.encode_utf8(&mut buf).as_bytes());
        i += 1 + width;
    }
    Ok(out)
}

/// Decodes the first UTF-8 scalar of `bytes`.
fn next_char(bytes: &[u8]) -> Option<(char, usize)> {
    let width = match *bytes.first()? {
        0x00..=0x7F => 1,
        0xC2..=0xDF => 2,
        0xE0..=0xEF => 3,
        0xF0..=0xF4 => 4,
        _ => return None,
    };
    let s = std::str::from_utf8(bytes.get(..width)?).ok()?;
    s.chars().next().map(|c| (c, width))
}

/// What a decode of an encode yields: NFKD of the input with capitals intact.
pub fn nfkd_with_capitals(text: &str) -> String {
    text.nfkd().collect()
}
