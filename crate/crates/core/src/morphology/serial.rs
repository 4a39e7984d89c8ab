//! Line-oriented text formats for trained models and morpheme scores.
//!
//! ```text
//! MORFESSOR-MODEL v1 alpha=0.5
//! MORPH 636174 20
//! SEG 63617473 636174,73 10
//! ```
//!
//! `MORPH` lines come first, then `SEG` lines carrying the word frequency as
//! a trailing field; both are sorted by bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{MorphemeScore, MorphologyError, SegmentationModel, WordAnalysis};

pub const MODEL_HEADER: &str = "MORFESSOR-MODEL v1";
pub const SCORES_HEADER: &str = "MORPHEME-SCORES v1";

pub(crate) fn write_model(model: &SegmentationModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_HEADER} alpha={}", model.alpha());
    for (m, c) in model.morphemes() {
        let _ = writeln!(out, "MORPH {} {c}", hex::encode(m));
    }
    for (w, a) in model.words() {
        let segs: Vec<String> = a.segments.iter().map(hex::encode).collect();
        let _ = writeln!(out, "SEG {} {} {}", hex::encode(w), segs.join(","), a.freq);
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> MorphologyError {
    MorphologyError::Parse { line, message: message.into() }
}

fn parse_hex(line: usize, field: &str) -> Result<Vec<u8>, MorphologyError> {
    let bytes =
        hex::decode(field).map_err(|e| parse_err(line, format!("bad hex `{field}`: {e}")))?;
    if bytes.is_empty() {
        return Err(parse_err(line, "empty byte string"));
    }
    Ok(bytes)
}

pub(crate) fn parse_model(text: &str) -> Result<SegmentationModel, MorphologyError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let alpha = match lines.next() {
        Some((_, h)) => h
            .strip_prefix(MODEL_HEADER)
            .and_then(|rest| rest.trim().strip_prefix("alpha="))
            .and_then(|a| a.parse::<f64>().ok())
            .ok_or_else(|| parse_err(1, format!("expected `{MODEL_HEADER} alpha=<decimal>`")))?,
        None => return Err(parse_err(1, "empty model file")),
    };
    let mut declared: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    let mut words: BTreeMap<Vec<u8>, WordAnalysis> = BTreeMap::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            ["MORPH", m, c] => {
                let m = parse_hex(lineno, m)?;
                let c = c.parse().map_err(|_| parse_err(lineno, format!("bad count `{c}`")))?;
                if declared.insert(m, c).is_some() {
                    return Err(parse_err(lineno, "duplicate MORPH"));
                }
            }
            ["SEG", w, segs, f] => {
                let w = parse_hex(lineno, w)?;
                let segments =
                    segs.split(',').map(|s| parse_hex(lineno, s)).collect::<Result<Vec<_>, _>>()?;
                let freq =
                    f.parse().map_err(|_| parse_err(lineno, format!("bad frequency `{f}`")))?;
                if segments.concat() != w {
                    return Err(parse_err(lineno, "segments do not concatenate to the word"));
                }
                if words.insert(w, WordAnalysis { freq, segments }).is_some() {
                    return Err(parse_err(lineno, "duplicate SEG"));
                }
            }
            _ => return Err(parse_err(lineno, format!("unrecognized record `{line}`"))),
        }
    }
    let mut derived: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for a in words.values() {
        for s in &a.segments {
            *derived.entry(s.clone()).or_insert(0) += a.freq;
        }
    }
    if derived != declared {
        return Err(parse_err(0, "MORPH counts disagree with SEG records"));
    }
    Ok(SegmentationModel::from_parts(alpha, declared, words))
}

pub fn write_scores(language: &str, scores: &[MorphemeScore]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SCORES_HEADER} lang={language}");
    for s in scores {
        let _ = writeln!(out, "{} {}", hex::encode(&s.morpheme), s.score);
    }
    out
}

/// Returns the language tag and the scores.
pub fn parse_scores(text: &str) -> Result<(String, Vec<MorphemeScore>), MorphologyError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let language = lines
        .next()
        .and_then(|(_, h)| h.strip_prefix(SCORES_HEADER))
        .and_then(|rest| rest.trim().strip_prefix("lang="))
        .filter(|l| !l.is_empty())
        .ok_or_else(|| parse_err(1, format!("expected `{SCORES_HEADER} lang=<tag>`")))?
        .to_string();
    let mut scores = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            [m, s] => {
                let morpheme = parse_hex(lineno, m)?;
                let score = s
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(lineno, format!("bad score `{s}`")))?;
                scores.push(MorphemeScore { morpheme, score });
            }
            _ => return Err(parse_err(lineno, format!("unrecognized record `{line}`"))),
        }
    }
    Ok((language, scores))
}
