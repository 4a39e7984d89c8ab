//! Reference implementations used as test oracles. Written from the loss
//! definitions directly, sharing no code with the library.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

pub fn ln_fact(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

pub fn ln_choose(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return 0.0;
    }
    ln_fact(n as u64) - ln_fact(k as u64) - ln_fact((n - k) as u64)
}

fn x_ln_x(x: u64) -> f64 {
    if x == 0 {
        0.0
    } else {
        x as f64 * (x as f64).ln()
    }
}

/// Corpus and lexicon losses of morpheme token counts.
pub fn direct_losses(word_tokens: u64, counts: &BTreeMap<Vec<u8>, u64>) -> (f64, f64) {
    let counts: Vec<(&Vec<u8>, u64)> =
        counts.iter().filter(|(_, &c)| c > 0).map(|(m, &c)| (m, c)).collect();
    let m_tokens: u64 = counts.iter().map(|(_, c)| c).sum();
    let n_types = counts.len() as u64;
    let mut corpus = x_ln_x(m_tokens + word_tokens);
    for (_, c) in &counts {
        corpus -= x_ln_x(*c);
    }
    corpus += ln_choose(m_tokens as i64 - 1, n_types as i64 - 1);

    let mut atoms: BTreeMap<u8, u64> = BTreeMap::new();
    for (m, _) in &counts {
        for &b in m.iter() {
            *atoms.entry(b).or_default() += 1;
        }
    }
    let a_total: u64 = atoms.values().sum();
    let mut lexicon = x_ln_x(a_total + n_types) - x_ln_x(n_types);
    for c in atoms.values() {
        lexicon -= x_ln_x(*c);
    }
    lexicon -= ln_fact(n_types);
    lexicon += ln_choose(a_total as i64 - 1, atoms.len() as i64 - 1);
    (corpus, lexicon)
}

/// Every way of cutting `word` into non-empty pieces.
pub fn segmentations(word: &[u8]) -> Vec<Vec<Vec<u8>>> {
    let n = word.len();
    if n == 0 {
        return vec![vec![]];
    }
    (0u32..1 << (n - 1))
        .map(|mask| {
            let mut parts = Vec::new();
            let mut start = 0;
            for k in 1..n {
                if mask & (1 << (k - 1)) != 0 {
                    parts.push(word[start..k].to_vec());
                    start = k;
                }
            }
            parts.push(word[start..].to_vec());
            parts
        })
        .collect()
}

/// Minimum total loss over all joint segmentations of the words.
pub fn brute_force_min(words: &[(Vec<u8>, u64)], alpha: f64) -> f64 {
    brute_force_argmin(words, alpha).0
}

/// Minimum total loss and one segmentation attaining it.
pub fn brute_force_argmin(words: &[(Vec<u8>, u64)], alpha: f64) -> (f64, Vec<Vec<Vec<u8>>>) {
    let options: Vec<Vec<Vec<Vec<u8>>>> = words.iter().map(|(w, _)| segmentations(w)).collect();
    let word_tokens: u64 = words.iter().map(|(_, f)| f).sum();
    let mut choice = vec![0usize; words.len()];
    let mut best = f64::INFINITY;
    let mut arg = Vec::new();
    loop {
        let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
        for (i, (_, f)) in words.iter().enumerate() {
            for m in &options[i][choice[i]] {
                *counts.entry(m.clone()).or_default() += f;
            }
        }
        let (c, l) = direct_losses(word_tokens, &counts);
        let total = alpha * c + l;
        if total < best {
            best = total;
            arg = choice.iter().enumerate().map(|(i, &k)| options[i][k].clone()).collect();
        }
        let mut i = 0;
        loop {
            if i == words.len() {
                return (best, arg);
            }
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Distinct random words over a small alphabet with positive frequencies.
pub fn random_lexicon(
    rng: &mut impl rand::Rng,
    max_words: usize,
    max_len: usize,
    alphabet: &[u8],
) -> Vec<(Vec<u8>, u64)> {
    let n = rng.gen_range(1..=max_words);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        let len = rng.gen_range(1..=max_len);
        let w: Vec<u8> = (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        if seen.insert(w.clone()) {
            out.push((w, rng.gen_range(1..=6)));
        }
    }
    out
}
