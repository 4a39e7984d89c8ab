//! MDL cost of a segmentation model.
//!
//! Both costs depend only on aggregate statistics (token totals, per-morpheme
//! counts, per-atom counts over the morpheme types), so the trainer keeps a
//! [`LossStats`] in sync with its counts and evaluates candidates in O(1).

use std::sync::OnceLock;

use super::{MorphologyError, SegmentationModel};

/// Arguments below this are served from precomputed tables.
const TABLE_SIZE: usize = 1 << 20;

fn xlogx_direct(x: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        let x = x as f64;
        x * x.ln()
    }
}

fn ln_factorial_direct(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

fn table(f: fn(u64) -> f64) -> Box<[f64]> {
    (0..TABLE_SIZE as u64).map(f).collect()
}

/// `x ln x` with `0 ln 0 = 0`.
pub(crate) fn xlogx(x: u64) -> f64 {
    static TABLE: OnceLock<Box<[f64]>> = OnceLock::new();
    match usize::try_from(x) {
        Ok(i) if i < TABLE_SIZE => TABLE.get_or_init(|| table(xlogx_direct))[i],
        _ => xlogx_direct(x),
    }
}

pub(crate) fn ln_factorial(n: u64) -> f64 {
    static TABLE: OnceLock<Box<[f64]>> = OnceLock::new();
    match usize::try_from(n) {
        Ok(i) if i < TABLE_SIZE => TABLE.get_or_init(|| table(ln_factorial_direct))[i],
        _ => ln_factorial_direct(n),
    }
}

/// `ln C(n, k)`; zero outside `0 <= k <= n`.
pub(crate) fn ln_binomial(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return 0.0;
    }
    ln_factorial(n as u64) - ln_factorial(k as u64) - ln_factorial((n - k) as u64)
}

#[derive(Debug, Clone)]
pub(crate) struct LossStats {
    /// Morpheme tokens in the corpus (M).
    pub tokens: u64,
    /// Word tokens in the corpus (C).
    pub word_tokens: u64,
    /// Distinct morphemes.
    pub types: u64,
    /// Sum of `c ln c` over morpheme counts.
    pub sum_count_log: f64,
    /// Atoms over all distinct morphemes (A).
    pub atom_total: u64,
    pub atom_counts: [u64; 256],
    pub atom_types: u64,
    pub sum_atom_log: f64,
}

impl LossStats {
    pub fn new(word_tokens: u64) -> Self {
        LossStats {
            tokens: 0,
            word_tokens,
            types: 0,
            sum_count_log: 0.0,
            atom_total: 0,
            atom_counts: [0; 256],
            atom_types: 0,
            sum_atom_log: 0.0,
        }
    }

    pub fn from_counts<'a>(
        word_tokens: u64,
        counts: impl IntoIterator<Item = (&'a [u8], u64)>,
    ) -> Self {
        let mut stats = LossStats::new(word_tokens);
        let mut sum_count_log = 0.0;
        for (morph, count) in counts {
            if count == 0 {
                continue;
            }
            stats.tokens += count;
            stats.types += 1;
            sum_count_log += xlogx(count);
            stats.atom_total += morph.len() as u64;
            for &b in morph {
                stats.atom_counts[usize::from(b)] += 1;
            }
        }
        stats.sum_count_log = sum_count_log;
        stats.atom_types = stats.atom_counts.iter().filter(|&&c| c > 0).count() as u64;
        stats.sum_atom_log = stats.atom_counts.iter().map(|&c| xlogx(c)).sum();
        stats
    }

    /// Moves the count of `morph` from `old` to `new`.
    pub fn set_count(&mut self, morph: &[u8], old: u64, new: u64) {
        if old == new {
            return;
        }
        self.tokens = self.tokens + new - old;
        self.sum_count_log += xlogx(new) - xlogx(old);
        if old == 0 {
            self.types += 1;
            self.atom_total += morph.len() as u64;
            for &b in morph {
                let c = &mut self.atom_counts[usize::from(b)];
                if *c == 0 {
                    self.atom_types += 1;
                }
                self.sum_atom_log += xlogx(*c + 1) - xlogx(*c);
                *c += 1;
            }
        } else if new == 0 {
            self.types -= 1;
            self.atom_total -= morph.len() as u64;
            for &b in morph {
                let c = &mut self.atom_counts[usize::from(b)];
                self.sum_atom_log += xlogx(*c - 1) - xlogx(*c);
                *c -= 1;
                if *c == 0 {
                    self.atom_types -= 1;
                }
            }
        }
    }

    pub fn corpus_loss(&self) -> f64 {
        let mc = self.tokens + self.word_tokens;
        xlogx(mc) - self.sum_count_log + ln_binomial(self.tokens as i64 - 1, self.types as i64 - 1)
    }

    pub fn lexicon_loss(&self) -> f64 {
        let n = self.types;
        xlogx(self.atom_total + n) - xlogx(n) - self.sum_atom_log - ln_factorial(n)
            + ln_binomial(self.atom_total as i64 - 1, self.atom_types as i64 - 1)
    }

    pub fn total(&self, alpha: f64) -> f64 {
        alpha * self.corpus_loss() + self.lexicon_loss()
    }
}

fn stats_of(model: &SegmentationModel) -> Result<LossStats, MorphologyError> {
    let stats = LossStats::from_counts(model.word_tokens(), model.morphemes());
    if stats.types == 0 {
        return Err(MorphologyError::EmptyModel);
    }
    Ok(stats)
}

/// Corpus cost: `(M+C) ln(M+C) - sum_m c(m) ln c(m) + ln C(M-1, |M|-1)`.
pub fn corpus_loss(model: &SegmentationModel) -> Result<f64, MorphologyError> {
    Ok(stats_of(model)?.corpus_loss())
}

/// Lexicon cost: `(A+|M|) ln(A+|M|) - |M| ln|M| - sum_a c(a) ln c(a)
/// - ln |M|! + ln C(A-1, |atoms|-1)`.
pub fn lexicon_loss(model: &SegmentationModel) -> Result<f64, MorphologyError> {
    Ok(stats_of(model)?.lexicon_loss())
}

/// `alpha * corpus_loss + lexicon_loss`.
pub fn total_loss(model: &SegmentationModel) -> Result<f64, MorphologyError> {
    Ok(stats_of(model)?.total(model.alpha()))
}
