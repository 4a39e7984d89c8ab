//! Lexicon preparation from plain-text corpora and word lists.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use unicode_general_category::{get_general_category, GeneralCategory};

use crate::morphology::{Lexicon, LexiconEntry};
use crate::transcoder::decompose_str;

pub const DEFAULT_LEXICON_CAP: usize = 30_000;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("EmptyCorpus: no tokens found")]
    EmptyCorpus,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("lexicon line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexiconOptions {
    pub cap: usize,
    pub nfkd: bool,
}

impl Default for LexiconOptions {
    fn default() -> Self {
        LexiconOptions { cap: DEFAULT_LEXICON_CAP, nfkd: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub lines: u64,
    pub tokens: u64,
    /// Maximal invalid UTF-8 sequences dropped from the input.
    pub invalid_sequences: u64,
}

fn is_edge_punct(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
            | MathSymbol
            | CurrencySymbol
            | ModifierSymbol
            | OtherSymbol
    )
}

/// Whitespace tokens with leading and trailing punctuation and symbols
/// removed; tokens that are pure punctuation vanish.
pub fn tokenize(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace().map(|t| t.trim_matches(is_edge_punct)).filter(|t| !t.is_empty())
}

/// Token counts over a byte stream, one document per line.
pub fn count_tokens(reader: impl BufRead) -> io::Result<(HashMap<String, u64>, CorpusStats)> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut stats = CorpusStats::default();
    let mut valid = String::new();
    for line in reader.split(b'\n') {
        let line = line?;
        stats.lines += 1;
        valid.clear();
        for chunk in line.utf8_chunks() {
            valid.push_str(chunk.valid());
            if !chunk.invalid().is_empty() {
                stats.invalid_sequences += 1;
            }
        }
        for tok in tokenize(&valid) {
            stats.tokens += 1;
            match counts.get_mut(tok) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(tok.to_string(), 1);
                }
            }
        }
    }
    if stats.invalid_sequences > 0 {
        log::warn!("dropped {} invalid UTF-8 sequences", stats.invalid_sequences);
    }
    Ok((counts, stats))
}

/// Builds a lexicon from corpus token counts.
///
/// With an external word list, its (deduplicated) words are the keys and
/// corpus counts their frequencies, floored at 1. Words also present in the
/// English list are dropped. Entries are ranked by frequency, clipped to
/// `options.cap` and decomposed to bytes.
pub fn lexicon_from_counts(
    counts: &HashMap<String, u64>,
    external_wordlist: Option<&[String]>,
    english_wordlist: Option<&[String]>,
    options: &LexiconOptions,
) -> Lexicon {
    let english: BTreeSet<&str> =
        english_wordlist.unwrap_or_default().iter().map(String::as_str).collect();
    let mut ranked: Vec<(&str, u64)> = match external_wordlist {
        Some(list) => list
            .iter()
            .map(String::as_str)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(|w| (w, counts.get(w).copied().unwrap_or(0).max(1)))
            .collect(),
        None => counts.iter().map(|(w, &c)| (w.as_str(), c)).collect(),
    };
    ranked.retain(|(w, _)| !w.is_empty() && !english.contains(w));
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(options.cap);
    Lexicon::from_entries(ranked.into_iter().map(|(w, freq)| LexiconEntry {
        bytes: decompose_str(w, options.nfkd),
        freq,
        word: w.to_string(),
    }))
}

pub fn build_lexicon(
    corpus: impl BufRead,
    external_wordlist: Option<&[String]>,
    english_wordlist: Option<&[String]>,
    options: &LexiconOptions,
) -> Result<(Lexicon, CorpusStats), CorpusError> {
    let (counts, stats) = count_tokens(corpus)
        .map_err(|source| CorpusError::Io { path: PathBuf::from("<corpus>"), source })?;
    if stats.tokens == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    let lexicon = lexicon_from_counts(&counts, external_wordlist, english_wordlist, options);
    if lexicon.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok((lexicon, stats))
}

/// Opens a corpus: a single file, or every `.txt` file of a directory in
/// name order.
pub fn open_corpus(path: &Path) -> Result<Box<dyn BufRead>, CorpusError> {
    let io_err = |source| CorpusError::Io { path: path.to_path_buf(), source };
    let meta = fs::metadata(path).map_err(io_err)?;
    if !meta.is_dir() {
        return Ok(Box::new(BufReader::new(File::open(path).map_err(io_err)?)));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(io_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "txt") && p.is_file())
        .collect();
    files.sort();
    let mut chained: Box<dyn Read> = Box::new(io::empty());
    for f in files {
        let file = File::open(&f).map_err(|source| CorpusError::Io { path: f.clone(), source })?;
        // Keep documents from different files on separate lines.
        chained = Box::new(chained.chain(file).chain(&b"\n"[..]));
    }
    Ok(Box::new(BufReader::new(chained)))
}

/// One word per line; for two-column bilingual dictionaries only the first
/// column is used.
pub fn parse_wordlist(text: &str) -> Vec<String> {
    text.lines().filter_map(|l| l.split_whitespace().next()).map(str::to_string).collect()
}

/// `<hex bytes>\t<frequency>\t<word>` per entry, in lexicon order.
pub fn write_lexicon(lexicon: &Lexicon) -> String {
    let mut out = String::new();
    for e in lexicon.entries() {
        let _ = writeln!(out, "{}\t{}\t{}", hex::encode(&e.bytes), e.freq, e.word);
    }
    out
}

pub fn parse_lexicon(text: &str) -> Result<Lexicon, CorpusError> {
    let mut entries = Vec::new();
    let mut seen = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CorpusError::Parse { line: i + 1, message };
        let mut parts = line.splitn(3, '\t');
        let (Some(h), Some(f), Some(w)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected three tab-separated fields".into()));
        };
        let bytes = hex::decode(h).map_err(|e| err(format!("bad hex: {e}")))?;
        let freq = f.parse().map_err(|_| err(format!("bad frequency `{f}`")))?;
        if seen.insert(bytes.clone(), ()).is_some() {
            return Err(err("duplicate entry".into()));
        }
        entries.push(LexiconEntry { bytes, freq, word: w.to_string() });
    }
    Ok(Lexicon::from_entries(entries))
}
