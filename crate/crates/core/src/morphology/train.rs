use std::collections::BTreeMap;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use super::loss::LossStats;
use super::{Lexicon, LexiconEntry, MorphologyError, SegmentationModel, WordAnalysis};

/// Epoch cap for one training run.
pub const MAX_EPOCHS: usize = 25;
/// Training stops once an epoch improves the loss by less than this
/// fraction.
pub const RELATIVE_TOLERANCE: f64 = 1e-6;
/// Words and morphemes up to this many bytes are re-segmented by trying
/// every segmentation; longer ones by recursive binary splitting.
pub const EXHAUSTIVE_MAX_LEN: usize = 8;
/// Lexicons with at most `2^EXACT_SEARCH_BITS` joint segmentations are
/// solved exactly by enumeration.
pub const EXACT_SEARCH_BITS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub alpha: f64,
    pub seed: u64,
    pub max_epochs: usize,
    pub tolerance: f64,
    pub exhaustive_max_len: usize,
    /// Set to zero to always use local search.
    pub exact_search_bits: usize,
}

impl TrainConfig {
    pub fn new(alpha: f64, seed: u64) -> Self {
        TrainConfig {
            alpha,
            seed,
            max_epochs: MAX_EPOCHS,
            tolerance: RELATIVE_TOLERANCE,
            exhaustive_max_len: EXHAUSTIVE_MAX_LEN,
            exact_search_bits: EXACT_SEARCH_BITS,
        }
    }
}

pub fn train(
    lexicon: &Lexicon,
    alpha: f64,
    seed: u64,
) -> Result<SegmentationModel, MorphologyError> {
    train_with_history(lexicon, &TrainConfig::new(alpha, seed)).map(|(model, _)| model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Init {
    WholeWords,
    Bytes,
}

/// Trains and also returns the loss history: the loss after
/// initialization followed by the loss after every epoch.
///
/// Small lexicons are solved exactly and the history holds just the final
/// loss. Otherwise local search runs from two starting points, unsegmented
/// words and single bytes, and the run with the lower final loss is kept.
/// Each epoch re-segments every word, then every morpheme in place, then
/// joins adjacent morpheme pairs, accepting only moves that do not raise
/// the loss.
pub fn train_with_history(
    lexicon: &Lexicon,
    config: &TrainConfig,
) -> Result<(SegmentationModel, Vec<f64>), MorphologyError> {
    if lexicon.is_empty() {
        return Err(MorphologyError::EmptyLexicon);
    }
    if !(config.alpha > 0.0 && config.alpha.is_finite()) {
        return Err(MorphologyError::InvalidAlpha(config.alpha));
    }
    let joint_bits: usize = lexicon.entries().iter().map(|e| e.bytes.len() - 1).sum();
    if config.exact_search_bits > 0 && joint_bits <= config.exact_search_bits {
        let (trainer, loss) = exact_search(lexicon.entries(), config);
        return Ok((trainer.into_model(), vec![loss]));
    }
    let (a, history_a) = run(lexicon, config, Init::WholeWords);
    let (b, history_b) = run(lexicon, config, Init::Bytes);
    if history_b.last() < history_a.last() {
        Ok((b.into_model(), history_b))
    } else {
        Ok((a.into_model(), history_a))
    }
}

/// Enumerates every joint segmentation depth first and keeps the first one
/// with the lowest loss.
fn exact_search<'a>(words: &'a [LexiconEntry], config: &TrainConfig) -> (Trainer<'a>, f64) {
    struct Search<'a, 'b> {
        trainer: &'b mut Trainer<'a>,
        current: Vec<Vec<Range<usize>>>,
        best: Vec<Vec<Range<usize>>>,
        best_loss: f64,
    }

    fn visit(s: &mut Search<'_, '_>, w: usize) {
        let words = s.trainer.words;
        if w == words.len() {
            let loss = s.trainer.loss();
            if loss < s.best_loss {
                s.best_loss = loss;
                s.best.clone_from(&s.current);
            }
            return;
        }
        let bytes = &words[w].bytes[..];
        let f = words[w].freq as i64;
        let n = bytes.len();
        let mut ranges = Vec::with_capacity(n);
        for mask in 0..1u32 << (n - 1) {
            cut(n, mask, &mut ranges);
            let sums = (s.trainer.stats.sum_count_log, s.trainer.stats.sum_atom_log);
            for r in &ranges {
                s.trainer.commit(&bytes[r.clone()], f);
            }
            s.current[w].clone_from(&ranges);
            visit(s, w + 1);
            for r in ranges.iter().rev() {
                s.trainer.commit(&bytes[r.clone()], -f);
            }
            (s.trainer.stats.sum_count_log, s.trainer.stats.sum_atom_log) = sums;
        }
    }

    let mut trainer = Trainer::new(words, config, None);
    let mut search = Search {
        trainer: &mut trainer,
        current: vec![Vec::new(); words.len()],
        best: Vec::new(),
        best_loss: f64::INFINITY,
    };
    visit(&mut search, 0);
    let best = std::mem::take(&mut search.best);
    for (e, segs) in words.iter().zip(&best) {
        for r in segs {
            trainer.commit(&e.bytes[r.clone()], e.freq as i64);
        }
    }
    trainer.segs = best;
    trainer.resync();
    let loss = trainer.loss();
    (trainer, loss)
}

fn run<'a>(lexicon: &'a Lexicon, config: &TrainConfig, init: Init) -> (Trainer<'a>, Vec<f64>) {
    let mut trainer = Trainer::new(lexicon.entries(), config, Some(init));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..lexicon.len()).collect();
    let mut history = vec![trainer.loss()];
    for epoch in 0..config.max_epochs {
        let prev = *history.last().expect("non-empty");
        order.shuffle(&mut rng);
        for &w in &order {
            trainer.optimize_word(w);
        }
        trainer.optimize_morphemes(&mut rng);
        trainer.optimize_merges(&mut rng);
        trainer.resync();
        let loss = trainer.loss();
        assert!(
            loss <= prev + 1e-9 * prev.abs().max(1.0),
            "training loss increased from {prev} to {loss}"
        );
        log::debug!(
            "{init:?} epoch {} alpha {} loss {loss:.6} morphemes {}",
            epoch + 1,
            config.alpha,
            trainer.counts.len()
        );
        history.push(loss);
        if prev - loss < config.tolerance * prev.abs() {
            break;
        }
    }
    (trainer, history)
}

/// Segment boundaries of an `n`-byte string; bit `k - 1` of `mask` cuts
/// before byte `k`.
fn cut(n: usize, mask: u32, out: &mut Vec<Range<usize>>) {
    out.clear();
    let mut start = 0;
    for k in 1..n {
        if mask & (1 << (k - 1)) != 0 {
            out.push(start..k);
            start = k;
        }
    }
    out.push(start..n);
}

/// Slot of `range` in an `n * n` table of substrings of an `n`-byte string.
fn sub_index(n: usize, range: Range<usize>) -> usize {
    range.start * n + range.end - 1
}

struct Trainer<'a> {
    alpha: f64,
    exhaustive_max_len: usize,
    words: &'a [LexiconEntry],
    segs: Vec<Vec<Range<usize>>>,
    counts: FxHashMap<Box<[u8]>, u64>,
    stats: LossStats,
}

impl<'a> Trainer<'a> {
    /// Counts the initial analysis; with no `init` nothing is counted.
    fn new(words: &'a [LexiconEntry], config: &TrainConfig, init: Option<Init>) -> Self {
        let word_tokens = words.iter().map(|e| e.freq).sum();
        let segs = words
            .iter()
            .map(|e| match init {
                Some(Init::WholeWords) => std::iter::once(0..e.bytes.len()).collect(),
                Some(Init::Bytes) => (0..e.bytes.len()).map(|i| i..i + 1).collect(),
                None => Vec::new(),
            })
            .collect();
        let mut trainer = Trainer {
            alpha: config.alpha,
            exhaustive_max_len: config.exhaustive_max_len.min(31),
            words,
            segs,
            counts: FxHashMap::default(),
            stats: LossStats::new(word_tokens),
        };
        for (e, segs) in words.iter().zip(&trainer.segs.clone()) {
            for r in segs {
                trainer.commit(&e.bytes[r.clone()], e.freq as i64);
            }
        }
        trainer
    }

    fn loss(&self) -> f64 {
        self.stats.total(self.alpha)
    }

    /// Rebuilds the running sums from the counts to shed rounding drift.
    fn resync(&mut self) {
        self.stats = LossStats::from_counts(
            self.stats.word_tokens,
            self.counts.iter().map(|(m, &c)| (&m[..], c)),
        );
    }

    fn count(&self, m: &[u8]) -> u64 {
        self.counts.get(m).copied().unwrap_or(0)
    }

    fn commit(&mut self, m: &[u8], delta: i64) {
        let old = self.count(m);
        let new = (old as i64 + delta) as u64;
        self.stats.set_count(m, old, new);
        if new == 0 {
            self.counts.remove(m);
        } else if old == 0 {
            self.counts.insert(m.into(), new);
        } else if let Some(c) = self.counts.get_mut(m) {
            *c = new;
        }
    }

    /// Loss after shifting the count of each listed morpheme by its delta;
    /// morphemes must be distinct. The statistics are restored exactly.
    fn tentative(&mut self, deltas: &[(&[u8], i64)]) -> f64 {
        let sums = (self.stats.sum_count_log, self.stats.sum_atom_log);
        for &(p, d) in deltas {
            let c = self.count(p);
            self.stats.set_count(p, c, (c as i64 + d) as u64);
        }
        let loss = self.loss();
        for &(p, d) in deltas.iter().rev() {
            let c = self.count(p);
            self.stats.set_count(p, (c as i64 + d) as u64, c);
        }
        (self.stats.sum_count_log, self.stats.sum_atom_log) = sums;
        loss
    }

    /// Like [`Self::tentative`] with each morpheme's current count supplied.
    fn tentative_known(&mut self, deltas: &[(&[u8], u64, i64)]) -> f64 {
        let sums = (self.stats.sum_count_log, self.stats.sum_atom_log);
        for &(p, c, d) in deltas {
            self.stats.set_count(p, c, (c as i64 + d) as u64);
        }
        let loss = self.loss();
        for &(p, c, d) in deltas.iter().rev() {
            self.stats.set_count(p, (c as i64 + d) as u64, c);
        }
        (self.stats.sum_count_log, self.stats.sum_atom_log) = sums;
        loss
    }

    /// Current counts of every substring of `s`, indexed by [`sub_index`].
    fn substring_counts(&self, s: &[u8], out: &mut Vec<u64>) {
        let n = s.len();
        out.clear();
        out.resize(n * n, 0);
        for i in 0..n {
            for j in i + 1..=n {
                out[sub_index(n, i..j)] = self.count(&s[i..j]);
            }
        }
    }

    /// Distinct pieces of `s` cut at `ranges` with their current counts,
    /// each shifted by `f` times its multiplicity.
    fn pieces<'s>(
        s: &'s [u8],
        ranges: &[Range<usize>],
        counts: &[u64],
        f: u64,
        out: &mut Vec<(&'s [u8], u64, i64)>,
    ) {
        out.clear();
        for r in ranges {
            let p = &s[r.clone()];
            match out.iter_mut().find(|(q, _, _)| *q == p) {
                Some((_, _, k)) => *k += f as i64,
                None => out.push((p, counts[sub_index(s.len(), r.clone())], f as i64)),
            }
        }
    }

    /// Re-analyses one word, keeping the previous analysis unless the new
    /// one is at least as good.
    fn optimize_word(&mut self, w: usize) {
        let words = self.words;
        let bytes = &words[w].bytes[..];
        let n = bytes.len();
        if n < 2 {
            return;
        }
        let f = words[w].freq;
        let before = self.loss();
        let old = std::mem::take(&mut self.segs[w]);
        for r in &old {
            self.commit(&bytes[r.clone()], -(f as i64));
        }
        let mut new = Vec::with_capacity(old.len() + 1);
        if n <= self.exhaustive_max_len {
            let mut ranges = Vec::with_capacity(n);
            let mut pieces = Vec::with_capacity(n);
            let mut counts = Vec::new();
            self.substring_counts(bytes, &mut counts);
            let mut best = f64::INFINITY;
            for mask in 0..1u32 << (n - 1) {
                cut(n, mask, &mut ranges);
                Self::pieces(bytes, &ranges, &counts, f, &mut pieces);
                let cost = self.tentative_known(&pieces);
                if cost < best {
                    best = cost;
                    new.clone_from(&ranges);
                }
            }
            for r in &new {
                self.commit(&bytes[r.clone()], f as i64);
            }
        } else {
            self.split(bytes, 0..n, f, &mut new);
        }
        if self.loss() > before {
            for r in &new {
                self.commit(&bytes[r.clone()], -(f as i64));
            }
            for r in &old {
                self.commit(&bytes[r.clone()], f as i64);
            }
            self.segs[w] = old;
        } else {
            self.segs[w] = new;
        }
    }

    /// Recursive binary splitting of `word[range]`, which must not be
    /// counted on entry; its final analysis is counted on exit.
    fn split(&mut self, word: &[u8], range: Range<usize>, f: u64, out: &mut Vec<Range<usize>>) {
        let s = &word[range.clone()];
        let f_ = f as i64;
        let mut best = self.tentative(&[(s, f_)]);
        let mut best_at = None;
        for k in 1..s.len() {
            let (l, r) = s.split_at(k);
            let cost = if l == r {
                self.tentative(&[(l, 2 * f_)])
            } else {
                self.tentative(&[(l, f_), (r, f_)])
            };
            if cost < best {
                best = cost;
                best_at = Some(k);
            }
        }
        match best_at {
            None => {
                self.commit(s, f as i64);
                out.push(range);
            }
            Some(k) => {
                let mid = range.start + k;
                let right = &word[mid..range.end];
                self.commit(right, f as i64);
                self.split(word, range.start..mid, f, out);
                self.commit(right, -(f as i64));
                self.split(word, mid..range.end, f, out);
            }
        }
    }

    /// One pass over the morpheme types, replacing every occurrence of a
    /// morpheme by its best segmentation when that lowers the loss.
    fn optimize_morphemes(&mut self, rng: &mut ChaCha8Rng) {
        let mut users: FxHashMap<Box<[u8]>, Vec<usize>> = FxHashMap::default();
        for (w, segs) in self.segs.iter().enumerate() {
            let bytes = &self.words[w].bytes;
            for r in segs {
                if r.len() < 2 {
                    continue;
                }
                let list = users.entry(bytes[r.clone()].into()).or_default();
                if list.last() != Some(&w) {
                    list.push(w);
                }
            }
        }
        let mut types: Vec<Box<[u8]>> = users.keys().cloned().collect();
        types.sort_unstable();
        types.shuffle(rng);

        let mut ranges = Vec::new();
        let mut best_ranges = Vec::new();
        let mut counts = Vec::new();
        for m in types {
            let mut pieces = Vec::new();
            let c = self.count(&m);
            if c == 0 {
                continue;
            }
            let n = m.len();
            let mut best = self.loss();
            let mut found = false;
            let masks: Box<dyn Iterator<Item = u32>> = if n <= self.exhaustive_max_len {
                Box::new(1..1u32 << (n - 1))
            } else {
                Box::new((0..n - 1).map(|k| 1u32 << k))
            };
            self.substring_counts(&m, &mut counts);
            for mask in masks {
                cut(n, mask, &mut ranges);
                Self::pieces(&m, &ranges, &counts, c, &mut pieces);
                pieces.push((&m, c, -(c as i64)));
                let cost = self.tentative_known(&pieces);
                if cost < best {
                    best = cost;
                    found = true;
                    best_ranges.clone_from(&ranges);
                }
            }
            if found {
                self.replace_morpheme(&m, &best_ranges, &mut users);
            }
        }
    }

    fn replace_morpheme(
        &mut self,
        m: &[u8],
        parts: &[Range<usize>],
        users: &mut FxHashMap<Box<[u8]>, Vec<usize>>,
    ) {
        let words = self.words;
        let list = users.get(m).cloned().unwrap_or_default();
        let mut moved = 0;
        for w in list {
            let bytes = &words[w].bytes;
            let f = words[w].freq as i64;
            let old = std::mem::take(&mut self.segs[w]);
            let mut new = Vec::with_capacity(old.len() + parts.len());
            for r in old {
                if &bytes[r.clone()] != m {
                    new.push(r);
                    continue;
                }
                self.commit(m, -f);
                moved += f;
                for p in parts {
                    let piece = r.start + p.start..r.start + p.end;
                    self.commit(&bytes[piece.clone()], f);
                    if piece.len() >= 2 {
                        let list = users.entry(bytes[piece.clone()].into()).or_default();
                        if list.last() != Some(&w) {
                            list.push(w);
                        }
                    }
                    new.push(piece);
                }
            }
            self.segs[w] = new;
        }
        debug_assert!(moved > 0 && self.count(m) == 0);
    }

    /// One pass over adjacent morpheme pairs, joining every occurrence of
    /// a pair into one morpheme when that lowers the loss. Overlapping
    /// occurrences are joined left to right.
    fn optimize_merges(&mut self, rng: &mut ChaCha8Rng) {
        let mut users: FxHashMap<(Box<[u8]>, usize), Vec<usize>> = FxHashMap::default();
        for w in 0..self.segs.len() {
            self.register_pairs(w, &mut users);
        }
        let mut pairs: Vec<(Box<[u8]>, usize)> = users.keys().cloned().collect();
        pairs.sort_unstable();
        pairs.shuffle(rng);
        for (joined, k) in pairs {
            let (x, y) = joined.split_at(k);
            let mut list = users.get(&(joined.clone(), k)).cloned().unwrap_or_default();
            list.sort_unstable();
            list.dedup();
            let n: u64 = list
                .iter()
                .map(|&w| self.pair_occurrences(w, x, y) as u64 * self.words[w].freq)
                .sum();
            if n == 0 {
                continue;
            }
            let n = n as i64;
            let cost = if x == y {
                self.tentative(&[(&joined, n), (x, -2 * n)])
            } else {
                self.tentative(&[(&joined, n), (x, -n), (y, -n)])
            };
            if cost < self.loss() {
                for w in list {
                    if self.merge_in_word(w, x, y) {
                        self.register_pairs(w, &mut users);
                    }
                }
            }
        }
    }

    fn register_pairs(&self, w: usize, users: &mut FxHashMap<(Box<[u8]>, usize), Vec<usize>>) {
        let bytes = &self.words[w].bytes;
        for p in self.segs[w].windows(2) {
            let key = (bytes[p[0].start..p[1].end].into(), p[0].len());
            let list = users.entry(key).or_default();
            if list.last() != Some(&w) {
                list.push(w);
            }
        }
    }

    fn pair_occurrences(&self, w: usize, x: &[u8], y: &[u8]) -> usize {
        let bytes = &self.words[w].bytes;
        let segs = &self.segs[w];
        let (mut i, mut n) = (0, 0);
        while i + 1 < segs.len() {
            if bytes[segs[i].clone()] == *x && bytes[segs[i + 1].clone()] == *y {
                n += 1;
                i += 2;
            } else {
                i += 1;
            }
        }
        n
    }

    /// Joins occurrences of `x` followed by `y` in word `w`, committing the
    /// count changes. Returns whether anything changed.
    fn merge_in_word(&mut self, w: usize, x: &[u8], y: &[u8]) -> bool {
        let words = self.words;
        let bytes = &words[w].bytes;
        let f = words[w].freq as i64;
        let old = std::mem::take(&mut self.segs[w]);
        let mut new = Vec::with_capacity(old.len());
        let mut i = 0;
        while i < old.len() {
            if i + 1 < old.len() && bytes[old[i].clone()] == *x && bytes[old[i + 1].clone()] == *y {
                let joined = old[i].start..old[i + 1].end;
                self.commit(x, -f);
                self.commit(y, -f);
                self.commit(&bytes[joined.clone()], f);
                new.push(joined);
                i += 2;
            } else {
                new.push(old[i].clone());
                i += 1;
            }
        }
        let changed = new.len() != old.len();
        self.segs[w] = new;
        changed
    }

    fn into_model(self) -> SegmentationModel {
        let morphemes: BTreeMap<Vec<u8>, u64> =
            self.counts.into_iter().map(|(m, c)| (m.into_vec(), c)).collect();
        let words = self
            .words
            .iter()
            .zip(self.segs)
            .map(|(e, segs)| {
                let segments = segs.into_iter().map(|r| e.bytes[r].to_vec()).collect();
                (e.bytes.clone(), WordAnalysis { freq: e.freq, segments })
            })
            .collect();
        SegmentationModel::from_parts(self.alpha, morphemes, words)
    }
}
