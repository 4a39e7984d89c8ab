use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::loss::LossStats;
use super::viterbi::viterbi_ranges;
use super::SegmentationModel;

#[derive(Debug, Clone, PartialEq)]
pub struct MorphemeScore {
    pub morpheme: Vec<u8>,
    /// Loss increase if the morpheme were dropped and the words using it
    /// re-segmented.
    pub score: f64,
}

/// Word bytes, frequency and segmentation.
type WordRef<'m> = (&'m [u8], u64, &'m [Vec<u8>]);

struct ScoreContext<'m> {
    model: &'m SegmentationModel,
    words: Vec<WordRef<'m>>,
    users: FxHashMap<&'m [u8], Vec<usize>>,
    base: LossStats,
    base_loss: f64,
    max_len: usize,
}

impl<'m> ScoreContext<'m> {
    fn new(model: &'m SegmentationModel) -> Self {
        let words: Vec<_> =
            model.words().map(|(w, a)| (w, a.freq, a.segments.as_slice())).collect();
        let mut users: FxHashMap<&[u8], Vec<usize>> = FxHashMap::default();
        for (i, (_, _, segs)) in words.iter().enumerate() {
            for s in segs.iter() {
                let list = users.entry(s.as_slice()).or_default();
                if list.last() != Some(&i) {
                    list.push(i);
                }
            }
        }
        let base = LossStats::from_counts(model.word_tokens(), model.morphemes());
        let base_loss = base.total(model.alpha());
        let max_len = model.morphemes().map(|(m, _)| m.len()).max().unwrap_or(1);
        ScoreContext { model, words, users, base, base_loss, max_len }
    }

    fn score(&self, morpheme: &[u8]) -> f64 {
        let Some(users) = self.users.get(morpheme) else {
            return 0.0;
        };
        let mut stats = self.base.clone();
        let mut counts: FxHashMap<&[u8], u64> = FxHashMap::default();
        let mut current = |stats: &mut LossStats, m: &'m [u8], delta: i64| {
            let old = *counts.entry(m).or_insert_with(|| self.model.morpheme_count(m));
            let new = (old as i64 + delta) as u64;
            stats.set_count(m, old, new);
            counts.insert(m, new);
        };
        for &i in users {
            let (_, freq, segs) = self.words[i];
            for s in segs {
                current(&mut stats, s.as_slice(), -(freq as i64));
            }
        }
        let tokens = self.model.tokens();
        for &i in users {
            let (word, freq, _) = self.words[i];
            let ranges = viterbi_ranges(word, tokens, self.max_len, |s| {
                if s == morpheme {
                    return None;
                }
                Some(self.model.morpheme_count(s)).filter(|&c| c > 0)
            });
            for r in ranges {
                current(&mut stats, &word[r], freq as i64);
            }
        }
        stats.total(self.model.alpha()) - self.base_loss
    }
}

/// Scores every morpheme of at least two bytes, sorted by score descending
/// with ties in byte order. The model is left untouched.
pub fn score_morphemes(model: &SegmentationModel) -> Vec<MorphemeScore> {
    let ctx = ScoreContext::new(model);
    let candidates: Vec<&[u8]> =
        model.morphemes().filter(|(m, _)| m.len() >= 2).map(|(m, _)| m).collect();
    let mut scores: Vec<MorphemeScore> = candidates
        .par_iter()
        .map(|&m| MorphemeScore { morpheme: m.to_vec(), score: ctx.score(m) })
        .collect();
    scores.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.morpheme.cmp(&b.morpheme)));
    scores
}

/// Score of a single byte sequence; zero if no word uses it.
pub fn score_morpheme(model: &SegmentationModel, morpheme: &[u8]) -> f64 {
    ScoreContext::new(model).score(morpheme)
}
