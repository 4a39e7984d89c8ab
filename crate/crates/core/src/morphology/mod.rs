//! Unsupervised MDL morpheme segmentation over byte atoms.
//!
//! The model assigns each lexicon word a segmentation into morphemes. Its
//! cost is `alpha * corpus_loss + lexicon_loss`; training searches recursive
//! binary splits word by word, and [`fit_alpha`] tunes `alpha` until the
//! number of distinct morphemes lands near a target.

mod alpha;
mod loss;
mod score;
mod serial;
mod train;
mod viterbi;

use std::collections::BTreeMap;

pub use alpha::{fit_alpha, AlphaFit, FitConfig, FitWarning};
pub use loss::{corpus_loss, lexicon_loss, total_loss};
pub use score::{score_morpheme, score_morphemes, MorphemeScore};
pub use serial::{parse_scores, write_scores, MODEL_HEADER, SCORES_HEADER};
pub use train::{
    train, train_with_history, TrainConfig, EXACT_SEARCH_BITS, EXHAUSTIVE_MAX_LEN, MAX_EPOCHS,
    RELATIVE_TOLERANCE,
};
pub use viterbi::viterbi_segment;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MorphologyError {
    #[error("EmptyModel: the model has no morphemes")]
    EmptyModel,
    #[error("EmptyLexicon: nothing to train on")]
    EmptyLexicon,
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("segmentation of {word} does not reproduce the word")]
    BadSegmentation { word: String },
    #[error("model line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// Decomposed bytes; the unit the trainer segments.
    pub bytes: Vec<u8>,
    pub freq: u64,
    /// Surface form the entry was built from.
    pub word: String,
}

/// Word list with corpus frequencies, ordered by frequency (descending)
/// then bytes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
}

impl Lexicon {
    /// Builds a lexicon from entries, merging identical byte sequences and
    /// dropping empty words and zero frequencies.
    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry>) -> Self {
        let mut merged: BTreeMap<Vec<u8>, LexiconEntry> = BTreeMap::new();
        for e in entries {
            if e.bytes.is_empty() || e.freq == 0 {
                continue;
            }
            merged.entry(e.bytes.clone()).and_modify(|m| m.freq += e.freq).or_insert(e);
        }
        let mut entries: Vec<_> = merged.into_values().collect();
        entries.sort_by(|a, b| b.freq.cmp(&a.freq).then_with(|| a.bytes.cmp(&b.bytes)));
        Lexicon { entries }
    }

    pub fn from_pairs<B: AsRef<[u8]>>(pairs: impl IntoIterator<Item = (B, u64)>) -> Self {
        Self::from_entries(pairs.into_iter().map(|(b, freq)| {
            let bytes = b.as_ref().to_vec();
            LexiconEntry { word: String::from_utf8_lossy(&bytes).into_owned(), bytes, freq }
        }))
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn truncate(&mut self, cap: usize) {
        self.entries.truncate(cap);
    }

    /// Total word tokens, the `C` of the corpus cost.
    pub fn word_tokens(&self) -> u64 {
        self.entries.iter().map(|e| e.freq).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordAnalysis {
    pub freq: u64,
    pub segments: Vec<Vec<u8>>,
}

/// Trained (or hand-built) segmentation of a lexicon.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationModel {
    alpha: f64,
    morphemes: BTreeMap<Vec<u8>, u64>,
    words: BTreeMap<Vec<u8>, WordAnalysis>,
}

impl SegmentationModel {
    /// Builds a model from explicit segmentations; morpheme counts are
    /// derived from word frequencies.
    pub fn from_segmentations<W, S>(
        alpha: f64,
        words: impl IntoIterator<Item = (W, u64, Vec<S>)>,
    ) -> Result<Self, MorphologyError>
    where
        W: AsRef<[u8]>,
        S: AsRef<[u8]>,
    {
        let mut model =
            SegmentationModel { alpha, morphemes: BTreeMap::new(), words: BTreeMap::new() };
        for (word, freq, segments) in words {
            let word = word.as_ref().to_vec();
            let segments: Vec<Vec<u8>> = segments.iter().map(|s| s.as_ref().to_vec()).collect();
            if word.is_empty() || segments.iter().any(|s| s.is_empty()) || segments.concat() != word
            {
                return Err(MorphologyError::BadSegmentation {
                    word: String::from_utf8_lossy(&word).into_owned(),
                });
            }
            if freq == 0 {
                continue;
            }
            let slot = model
                .words
                .entry(word)
                .or_insert(WordAnalysis { freq: 0, segments: segments.clone() });
            if slot.segments != segments {
                return Err(MorphologyError::BadSegmentation {
                    word: String::from_utf8_lossy(&segments.concat()).into_owned(),
                });
            }
            slot.freq += freq;
            for s in segments {
                *model.morphemes.entry(s).or_insert(0) += freq;
            }
        }
        Ok(model)
    }

    pub(crate) fn from_parts(
        alpha: f64,
        morphemes: BTreeMap<Vec<u8>, u64>,
        words: BTreeMap<Vec<u8>, WordAnalysis>,
    ) -> Self {
        SegmentationModel { alpha, morphemes, words }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Morphemes with their corpus counts, in byte order.
    pub fn morphemes(&self) -> impl Iterator<Item = (&[u8], u64)> + '_ {
        self.morphemes.iter().map(|(m, &c)| (m.as_slice(), c))
    }

    pub fn morpheme_count(&self, morpheme: &[u8]) -> u64 {
        self.morphemes.get(morpheme).copied().unwrap_or(0)
    }

    /// Number of distinct morphemes.
    pub fn num_morphemes(&self) -> usize {
        self.morphemes.len()
    }

    pub fn words(&self) -> impl Iterator<Item = (&[u8], &WordAnalysis)> + '_ {
        self.words.iter().map(|(w, a)| (w.as_slice(), a))
    }

    pub fn segmentation(&self, word: &[u8]) -> Option<&[Vec<u8>]> {
        self.words.get(word).map(|a| a.segments.as_slice())
    }

    pub fn num_words(&self) -> usize {
        self.words.len()
    }

    /// Morpheme tokens in the corpus (M).
    pub fn tokens(&self) -> u64 {
        self.morphemes.values().sum()
    }

    /// Word tokens in the corpus (C).
    pub fn word_tokens(&self) -> u64 {
        self.words.values().map(|a| a.freq).sum()
    }

    /// Occurrences of each byte across the distinct morphemes.
    pub fn atom_counts(&self) -> [u64; 256] {
        let mut counts = [0u64; 256];
        for m in self.morphemes.keys() {
            for &b in m {
                counts[usize::from(b)] += 1;
            }
        }
        counts
    }

    /// Atoms over all distinct morphemes (A).
    pub fn atom_total(&self) -> u64 {
        self.morphemes.keys().map(|m| m.len() as u64).sum()
    }

    pub fn to_text(&self) -> String {
        serial::write_model(self)
    }

    pub fn parse_text(text: &str) -> Result<Self, MorphologyError> {
        serial::parse_model(text)
    }
}
