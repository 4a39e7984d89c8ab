//! Cross-lingual equity measurements over parallel text: encoded lengths,
//! parity against a pivot language, compression and BPEB.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::transcoder::MyteCodec;

pub const DEFAULT_PIVOT: &str = "en";

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("MissingPivot: no sentences for pivot language `{0}`")]
    MissingPivot(String),
    #[error("LengthMismatch: `{language}` has {found} sentences, expected {expected}")]
    LengthMismatch { language: String, expected: usize, found: usize },
    #[error("PositiveLogProb: `{language}` sentence {sentence} has log-probability {value}")]
    PositiveLogProb { language: String, sentence: usize, value: f64 },
    #[error("UnlabeledLanguage: `{0}` has no group label")]
    UnlabeledLanguage(String),
    #[error("groups line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy)]
pub enum Segmenter<'a> {
    Utf8Bytes,
    Characters,
    Myte(&'a MyteCodec),
}

impl Segmenter<'_> {
    pub fn length(&self, sentence: &str) -> usize {
        match self {
            Segmenter::Utf8Bytes => sentence.len(),
            Segmenter::Characters => sentence.chars().count(),
            Segmenter::Myte(codec) => codec.encode_str(sentence).len(),
        }
    }
}

/// Sentence-aligned text in several languages.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelCorpus {
    sentences: BTreeMap<String, Vec<String>>,
    pivot: String,
}

impl ParallelCorpus {
    pub fn new(
        sentences: BTreeMap<String, Vec<String>>,
        pivot: impl Into<String>,
    ) -> Result<Self, MetricsError> {
        let pivot = pivot.into();
        let expected =
            sentences.get(&pivot).ok_or_else(|| MetricsError::MissingPivot(pivot.clone()))?.len();
        for (language, s) in &sentences {
            if s.len() != expected {
                return Err(MetricsError::LengthMismatch {
                    language: language.clone(),
                    expected,
                    found: s.len(),
                });
            }
        }
        Ok(ParallelCorpus { sentences, pivot })
    }

    /// Reads one file per language from `dir`, one sentence per line. The
    /// language tag is the file name up to its first dot.
    pub fn load_dir(dir: &Path, pivot: &str) -> Result<Self, MetricsError> {
        Self::new(
            read_language_files(dir, |text| Ok(text.lines().map(str::to_string).collect()))?,
            pivot,
        )
    }

    pub fn pivot(&self) -> &str {
        &self.pivot
    }

    pub fn pivot_sentences(&self) -> &[String] {
        &self.sentences[&self.pivot]
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.sentences.keys().map(String::as_str)
    }

    pub fn sentences(&self, language: &str) -> Option<&[String]> {
        self.sentences.get(language).map(Vec::as_slice)
    }

    /// Sentences per language.
    pub fn len(&self) -> usize {
        self.pivot_sentences().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn read_language_files<T>(
    dir: &Path,
    parse: impl Fn(&str) -> Result<T, MetricsError>,
) -> Result<BTreeMap<String, T>, MetricsError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| MetricsError::Io { path, source }
    };
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if !path.is_file() {
            continue;
        }
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let language = name.split('.').next().unwrap_or(name).to_string();
        if language.is_empty() {
            continue;
        }
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        out.insert(language, parse(&text)?);
    }
    Ok(out)
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageParity {
    pub lengths: Vec<usize>,
    /// `None` where the pivot sentence has zero length.
    pub parities: Vec<Option<f64>>,
    pub mean_length: f64,
    pub mean_parity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityTable {
    pub pivot: String,
    pub skipped_sentences: usize,
    pub languages: BTreeMap<String, LanguageParity>,
}

/// Per-sentence length ratios against the pivot under one segmenter.
pub fn parity(segmenter: Segmenter<'_>, corpus: &ParallelCorpus) -> ParityTable {
    let lengths: BTreeMap<&str, Vec<usize>> = corpus
        .sentences
        .par_iter()
        .map(|(l, s)| (l.as_str(), s.iter().map(|x| segmenter.length(x)).collect()))
        .collect();
    let pivot_lengths = &lengths[corpus.pivot.as_str()];
    let skipped_sentences = pivot_lengths.iter().filter(|&&n| n == 0).count();
    if skipped_sentences > 0 {
        log::warn!("skipped {skipped_sentences} zero-length pivot sentences");
    }
    let languages = lengths
        .iter()
        .map(|(&l, lens)| {
            let parities: Vec<Option<f64>> = lens
                .iter()
                .zip(pivot_lengths)
                .map(|(&n, &p)| (p > 0).then(|| n as f64 / p as f64))
                .collect();
            let entry = LanguageParity {
                mean_length: mean(lens.iter().map(|&n| n as f64)),
                mean_parity: mean(parities.iter().flatten().copied()),
                lengths: lens.clone(),
                parities,
            };
            (l.to_string(), entry)
        })
        .collect();
    ParityTable { pivot: corpus.pivot.clone(), skipped_sentences, languages }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compression {
    /// `100 * (1 - myte / utf8)` per sentence; zero for empty sentences.
    pub per_sentence: Vec<f64>,
    pub mean: f64,
}

fn compression_pct(utf8: usize, myte: usize) -> f64 {
    if utf8 == 0 {
        0.0
    } else {
        100.0 * (1.0 - myte as f64 / utf8 as f64)
    }
}

pub fn compression(sentences: &[String], codec: &MyteCodec) -> Compression {
    let per_sentence: Vec<f64> =
        sentences.par_iter().map(|s| compression_pct(s.len(), codec.encode_str(s).len())).collect();
    Compression { mean: mean(per_sentence.iter().copied()), per_sentence }
}

/// Bits per pivot byte for each sentence: total surprisal over the
/// sentence's prediction events divided by the pivot UTF-8 length plus one.
pub fn bpeb_sentences(
    language: &str,
    logprobs: &[Vec<f64>],
    pivot_utf8_lengths: &[usize],
) -> Result<Vec<f64>, MetricsError> {
    if logprobs.len() != pivot_utf8_lengths.len() {
        return Err(MetricsError::LengthMismatch {
            language: language.to_string(),
            expected: pivot_utf8_lengths.len(),
            found: logprobs.len(),
        });
    }
    logprobs
        .iter()
        .zip(pivot_utf8_lengths)
        .enumerate()
        .map(|(i, (lp, &n))| {
            if let Some(&value) = lp.iter().find(|v| v.is_nan() || **v > 0.0) {
                return Err(MetricsError::PositiveLogProb {
                    language: language.to_string(),
                    sentence: i,
                    value,
                });
            }
            let sum: f64 = lp.iter().sum();
            Ok(-sum / (n as f64 + 1.0))
        })
        .collect()
}

/// Mean BPEB per language.
pub fn bpeb(
    logprobs: &BTreeMap<String, Vec<Vec<f64>>>,
    pivot_utf8_lengths: &[usize],
) -> Result<BTreeMap<String, f64>, MetricsError> {
    logprobs
        .iter()
        .map(|(l, lp)| Ok((l.clone(), mean(bpeb_sentences(l, lp, pivot_utf8_lengths)?))))
        .collect()
}

/// Reads one log-probability file per language from `dir`: one line per
/// sentence, whitespace-separated base-2 values.
pub fn load_logprob_dir(dir: &Path) -> Result<BTreeMap<String, Vec<Vec<f64>>>, MetricsError> {
    read_language_files(dir, |text| {
        text.lines()
            .enumerate()
            .map(|(i, line)| {
                line.split_whitespace()
                    .map(|v| {
                        v.parse::<f64>().map_err(|_| MetricsError::Parse {
                            line: i + 1,
                            message: format!("bad log-probability `{v}`"),
                        })
                    })
                    .collect()
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageReport {
    pub language: String,
    pub utf8_lengths: Vec<usize>,
    pub myte_lengths: Vec<usize>,
    pub utf8_parities: Vec<Option<f64>>,
    pub myte_parities: Vec<Option<f64>>,
    pub compression: Vec<f64>,
    pub bpeb: Option<Vec<f64>>,
    pub mean_utf8_len: f64,
    pub mean_myte_len: f64,
    pub mean_parity_utf8: f64,
    pub mean_parity_myte: f64,
    pub mean_compression_pct: f64,
    pub mean_bpeb: Option<f64>,
}

impl LanguageReport {
    pub fn n_sentences(&self) -> usize {
        self.utf8_lengths.len()
    }
}

/// UTF-8 and MYTE lengths, parities, compression and optional BPEB for
/// every language of a parallel corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityReport {
    pub pivot: String,
    pub skipped_sentences: usize,
    pub languages: Vec<LanguageReport>,
}

pub const REPORT_CSV_HEADER: &str = "language,n_sentences,mean_utf8_len,mean_myte_len,\
mean_parity_utf8,mean_parity_myte,mean_compression_pct,mean_bpeb_if_present";

fn csv_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        String::new()
    }
}

impl ParityReport {
    pub fn build(
        corpus: &ParallelCorpus,
        codec: &MyteCodec,
        logprobs: Option<&BTreeMap<String, Vec<Vec<f64>>>>,
    ) -> Result<Self, MetricsError> {
        let utf8 = parity(Segmenter::Utf8Bytes, corpus);
        let myte = parity(Segmenter::Myte(codec), corpus);
        let pivot_lengths = utf8.languages[&corpus.pivot].lengths.clone();
        let pivot_lengths = &pivot_lengths;
        let mut languages = Vec::new();
        for (language, u) in utf8.languages {
            let m = &myte.languages[&language];
            let compression: Vec<f64> =
                u.lengths.iter().zip(&m.lengths).map(|(&a, &b)| compression_pct(a, b)).collect();
            let bpeb = logprobs
                .and_then(|lp| lp.get(&language))
                .map(|lp| bpeb_sentences(&language, lp, pivot_lengths))
                .transpose()?;
            languages.push(LanguageReport {
                mean_utf8_len: u.mean_length,
                mean_myte_len: m.mean_length,
                mean_parity_utf8: u.mean_parity,
                mean_parity_myte: m.mean_parity,
                mean_compression_pct: mean(compression.iter().copied()),
                mean_bpeb: bpeb.as_ref().map(|b| mean(b.iter().copied())),
                language,
                utf8_lengths: u.lengths,
                myte_lengths: m.lengths.clone(),
                utf8_parities: u.parities,
                myte_parities: m.parities.clone(),
                compression,
                bpeb,
            });
        }
        Ok(ParityReport {
            pivot: corpus.pivot.clone(),
            skipped_sentences: utf8.skipped_sentences,
            languages,
        })
    }

    pub fn language(&self, language: &str) -> Option<&LanguageReport> {
        self.languages.iter().find(|l| l.language == language)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{REPORT_CSV_HEADER}\n");
        for l in &self.languages {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                l.language,
                l.n_sentences(),
                csv_float(l.mean_utf8_len),
                csv_float(l.mean_myte_len),
                csv_float(l.mean_parity_utf8),
                csv_float(l.mean_parity_myte),
                csv_float(l.mean_compression_pct),
                l.mean_bpeb.map(csv_float).unwrap_or_default(),
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptClass {
    Latin,
    NonLatin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResourceClass {
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    Seen,
    UnseenLanguage,
    UnseenScript,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LanguageLabel {
    pub script: ScriptClass,
    pub resource: ResourceClass,
    pub coverage: Coverage,
}

impl FromStr for LanguageLabel {
    type Err = String;

    /// `<latin|non-latin> <hr|lr> <seen|unseen-lang|unseen-script>`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let f: Vec<&str> = s.split_whitespace().collect();
        let [script, resource, coverage] = f.as_slice() else {
            return Err(format!("expected three labels, got `{s}`"));
        };
        let script = match script.to_ascii_lowercase().as_str() {
            "latin" => ScriptClass::Latin,
            "non-latin" => ScriptClass::NonLatin,
            other => return Err(format!("unknown script class `{other}`")),
        };
        let resource = match resource.to_ascii_lowercase().as_str() {
            "hr" => ResourceClass::High,
            "lr" => ResourceClass::Low,
            other => return Err(format!("unknown resource class `{other}`")),
        };
        let coverage = match coverage.to_ascii_lowercase().as_str() {
            "seen" => Coverage::Seen,
            "unseen-lang" => Coverage::UnseenLanguage,
            "unseen-script" => Coverage::UnseenScript,
            other => return Err(format!("unknown coverage `{other}`")),
        };
        Ok(LanguageLabel { script, resource, coverage })
    }
}

/// Groups file: `<lang> <latin|non-latin> <hr|lr> <seen|unseen-lang|unseen-script>`
/// per line; `#` starts a comment.
pub fn parse_groups(text: &str) -> Result<BTreeMap<String, LanguageLabel>, MetricsError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        let Some((language, rest)) = line.split_once(char::is_whitespace) else {
            if line.is_empty() {
                continue;
            }
            return Err(MetricsError::Parse { line: i + 1, message: "missing labels".into() });
        };
        let label = rest.parse().map_err(|message| MetricsError::Parse { line: i + 1, message })?;
        out.insert(language.to_string(), label);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    LatinHigh,
    LatinLow,
    NonLatinHigh,
    NonLatinLow,
    Seen,
    UnseenLanguage,
    UnseenScript,
    Unseen,
}

impl Group {
    pub const ALL: [Group; 8] = [
        Group::LatinHigh,
        Group::LatinLow,
        Group::NonLatinHigh,
        Group::NonLatinLow,
        Group::Seen,
        Group::UnseenLanguage,
        Group::UnseenScript,
        Group::Unseen,
    ];

    pub fn contains(self, label: &LanguageLabel) -> bool {
        use {Coverage as C, ResourceClass as R, ScriptClass as S};
        match self {
            Group::LatinHigh => label.script == S::Latin && label.resource == R::High,
            Group::LatinLow => label.script == S::Latin && label.resource == R::Low,
            Group::NonLatinHigh => label.script == S::NonLatin && label.resource == R::High,
            Group::NonLatinLow => label.script == S::NonLatin && label.resource == R::Low,
            Group::Seen => label.coverage == C::Seen,
            Group::UnseenLanguage => label.coverage == C::UnseenLanguage,
            Group::UnseenScript => label.coverage == C::UnseenScript,
            Group::Unseen => label.coverage != C::Seen,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::LatinHigh => "Latin HR",
            Group::LatinLow => "Latin LR",
            Group::NonLatinHigh => "Non-Latin HR",
            Group::NonLatinLow => "Non-Latin LR",
            Group::Seen => "Seen",
            Group::UnseenLanguage => "Unseen Lang",
            Group::UnseenScript => "Unseen Script",
            Group::Unseen => "Unseen",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub group: Group,
    pub languages: usize,
    pub mean_utf8_len: f64,
    pub mean_myte_len: f64,
    pub mean_parity_utf8: f64,
    pub mean_parity_myte: f64,
    pub mean_compression_pct: f64,
    pub mean_bpeb: Option<f64>,
}

pub const GROUP_CSV_HEADER: &str = "group,n_languages,mean_utf8_len,mean_myte_len,\
mean_parity_utf8,mean_parity_myte,mean_compression_pct,mean_bpeb_if_present";

/// Unweighted means of per-language means within each group. The pivot
/// needs no label; unlabeled it stays out of every group. Empty groups are
/// omitted.
pub fn aggregate(
    report: &ParityReport,
    labels: &BTreeMap<String, LanguageLabel>,
) -> Result<Vec<GroupSummary>, MetricsError> {
    let mut labeled = Vec::new();
    for l in &report.languages {
        match labels.get(&l.language) {
            Some(label) => labeled.push((l, label)),
            None if l.language == report.pivot => {}
            None => return Err(MetricsError::UnlabeledLanguage(l.language.clone())),
        }
    }
    Ok(Group::ALL
        .into_iter()
        .filter_map(|group| {
            let members: Vec<&LanguageReport> = labeled
                .iter()
                .filter(|(_, label)| group.contains(label))
                .map(|(l, _)| *l)
                .collect();
            if members.is_empty() {
                return None;
            }
            let avg = |f: fn(&LanguageReport) -> f64| mean(members.iter().map(|l| f(l)));
            let bpebs: Vec<f64> = members.iter().filter_map(|l| l.mean_bpeb).collect();
            Some(GroupSummary {
                group,
                languages: members.len(),
                mean_utf8_len: avg(|l| l.mean_utf8_len),
                mean_myte_len: avg(|l| l.mean_myte_len),
                mean_parity_utf8: avg(|l| l.mean_parity_utf8),
                mean_parity_myte: avg(|l| l.mean_parity_myte),
                mean_compression_pct: avg(|l| l.mean_compression_pct),
                mean_bpeb: (!bpebs.is_empty()).then(|| mean(bpebs)),
            })
        })
        .collect())
}

pub fn groups_to_csv(groups: &[GroupSummary]) -> String {
    let mut out = format!("{GROUP_CSV_HEADER}\n");
    for g in groups {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            g.group,
            g.languages,
            csv_float(g.mean_utf8_len),
            csv_float(g.mean_myte_len),
            csv_float(g.mean_parity_utf8),
            csv_float(g.mean_parity_myte),
            csv_float(g.mean_compression_pct),
            g.mean_bpeb.map(csv_float).unwrap_or_default(),
        );
    }
    out
}
