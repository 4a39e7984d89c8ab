use std::ops::Range;

use super::SegmentationModel;

/// Minimum-cost segmentation of `word` under the model's unigram counts.
///
/// A known morpheme `m` costs `-ln(c(m) / M)`; a byte that is not a known
/// morpheme costs `-ln(1 / (M + 1))`. Among equal-cost segmentations the
/// one with the longest first segment wins, recursively.
pub fn viterbi_segment(model: &SegmentationModel, word: &[u8]) -> Vec<Vec<u8>> {
    let max_len = model.morphemes().map(|(m, _)| m.len()).max().unwrap_or(1);
    viterbi_ranges(word, model.tokens(), max_len, |s| {
        Some(model.morpheme_count(s)).filter(|&c| c > 0)
    })
    .into_iter()
    .map(|r| word[r].to_vec())
    .collect()
}

pub(crate) fn viterbi_ranges(
    word: &[u8],
    tokens: u64,
    max_len: usize,
    count: impl Fn(&[u8]) -> Option<u64>,
) -> Vec<Range<usize>> {
    let n = word.len();
    if n == 0 {
        return Vec::new();
    }
    let ln_total = (tokens.max(1) as f64).ln();
    let atom_cost = ((tokens + 1) as f64).ln();
    // best[i]: cost of the chosen segmentation of word[i..]; next[i]: end of
    // its first segment.
    let mut best = vec![f64::INFINITY; n + 1];
    let mut next = vec![0usize; n + 1];
    best[n] = 0.0;
    for i in (0..n).rev() {
        let longest = n.min(i + max_len.max(1));
        for j in (i + 1..=longest).rev() {
            let seg = match count(&word[i..j]) {
                Some(c) => ln_total - (c as f64).ln(),
                None if j == i + 1 => atom_cost,
                None => continue,
            };
            let cost = seg + best[j];
            // Longer first segments were tried first; replace only on a
            // clear improvement so near-ties keep the longer one.
            if best[i].is_infinite() || cost < best[i] - 1e-12 * best[i].abs().max(1.0) {
                best[i] = cost;
                next[i] = j;
            }
        }
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        out.push(i..next[i]);
        i = next[i];
    }
    out
}
