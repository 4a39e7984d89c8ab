//! Multilingual morpheme inventory: union of per-language scored morphemes,
//! script-group assignment, rank allocation and the `MYTE-TABLE v1` format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use unicode_script::UnicodeScript;

use crate::codepage::{
    codepoint_for_rank, fold_groups, group_of_script, MyteCodepoint, ScriptGroupId, CAP_MARKER,
    GROUP_CAPACITY, GROUP_COUNT,
};
use crate::morphology::MorphemeScore;

pub const TABLE_HEADER: &str = "MYTE-TABLE v1 groups=8";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum InventoryError {
    #[error("GroupOverflow: group {group} holds {count} morphemes, capacity is {GROUP_CAPACITY}")]
    GroupOverflow { group: ScriptGroupId, count: usize },
    #[error("table line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub rank: u32,
    pub codepoint: MyteCodepoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InventoryEntry {
    pub morpheme: Vec<u8>,
    pub score: f64,
    pub languages: BTreeSet<String>,
    pub group: ScriptGroupId,
    pub slot: Option<Slot>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MultilingualInventory {
    entries: Vec<InventoryEntry>,
}

impl MultilingualInventory {
    pub fn entries(&self) -> &[InventoryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_allocated(&self) -> bool {
        self.entries.iter().all(|e| e.slot.is_some())
    }

    /// Number of entries per script group.
    pub fn group_counts(&self) -> [usize; GROUP_COUNT] {
        let mut counts = [0; GROUP_COUNT];
        for e in &self.entries {
            counts[e.group.index()] += 1;
        }
        counts
    }

    /// `(morpheme, codepoint)` pairs of allocated entries.
    pub fn codepoints(&self) -> impl Iterator<Item = (&[u8], MyteCodepoint)> {
        self.entries.iter().filter_map(|e| e.slot.map(|s| (e.morpheme.as_slice(), s.codepoint)))
    }

    /// Serializes an allocated inventory in the canonical text format.
    /// Unallocated entries are skipped.
    pub fn to_table_string(&self) -> String {
        let mut out = String::with_capacity(64 * self.entries.len() + 32);
        out.push_str(TABLE_HEADER);
        out.push('\n');
        for e in &self.entries {
            let Some(slot) = e.slot else { continue };
            let langs = if e.languages.is_empty() {
                "-".to_string()
            } else {
                e.languages.iter().cloned().collect::<Vec<_>>().join(",")
            };
            let _ = writeln!(
                out,
                "{} {} {} {} {} {}",
                e.group,
                slot.rank,
                hex::encode(slot.codepoint.as_bytes()),
                hex::encode(&e.morpheme),
                e.score,
                langs
            );
        }
        out
    }

    pub fn parse_table(text: &str) -> Result<Self, InventoryError> {
        let err = |line: usize, message: String| InventoryError::Parse { line, message };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end() == TABLE_HEADER => {}
            _ => return Err(err(1, format!("expected header `{TABLE_HEADER}`"))),
        }
        let mut entries = Vec::new();
        let mut seen_morphemes = BTreeSet::new();
        let mut seen_codepoints = BTreeSet::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(' ').collect();
            if fields.len() != 6 {
                return Err(err(lineno, format!("expected 6 fields, found {}", fields.len())));
            }
            let group = fields[0]
                .parse::<u8>()
                .ok()
                .and_then(ScriptGroupId::new)
                .ok_or_else(|| err(lineno, format!("bad group `{}`", fields[0])))?;
            let rank: u32 =
                fields[1].parse().map_err(|_| err(lineno, format!("bad rank `{}`", fields[1])))?;
            let cp_bytes =
                hex::decode(fields[2]).map_err(|e| err(lineno, format!("bad codepoint: {e}")))?;
            let morpheme =
                hex::decode(fields[3]).map_err(|e| err(lineno, format!("bad morpheme: {e}")))?;
            let score: f64 =
                fields[4].parse().map_err(|_| err(lineno, format!("bad score `{}`", fields[4])))?;
            let languages = match fields[5] {
                "-" => BTreeSet::new(),
                l => l.split(',').map(str::to_string).collect(),
            };
            let expected =
                codepoint_for_rank(group, rank).map_err(|e| err(lineno, e.to_string()))?;
            if expected.as_bytes() != cp_bytes.as_slice() {
                return Err(err(
                    lineno,
                    format!("codepoint {} does not match group {group} rank {rank}", fields[2]),
                ));
            }
            if morpheme.is_empty() {
                return Err(err(lineno, "empty morpheme".into()));
            }
            if !seen_morphemes.insert(morpheme.clone()) {
                return Err(err(lineno, format!("duplicate morpheme {}", fields[3])));
            }
            if !seen_codepoints.insert(expected) {
                return Err(err(lineno, format!("duplicate codepoint {}", fields[2])));
            }
            entries.push(InventoryEntry {
                morpheme,
                score,
                languages,
                group,
                slot: Some(Slot { rank, codepoint: expected }),
            });
        }
        entries.sort_by_key(|e| (e.group, e.slot.map(|s| s.rank)));
        Ok(MultilingualInventory { entries })
    }
}

/// Union of per-language morpheme sets. A morpheme scored in several
/// languages keeps its maximum score and records every source language.
pub fn merge_inventories(
    per_language: &BTreeMap<String, Vec<MorphemeScore>>,
) -> MultilingualInventory {
    let mut merged: BTreeMap<&[u8], (f64, BTreeSet<String>)> = BTreeMap::new();
    for (lang, scores) in per_language {
        for s in scores {
            let slot =
                merged.entry(s.morpheme.as_slice()).or_insert((f64::NEG_INFINITY, BTreeSet::new()));
            slot.0 = slot.0.max(s.score);
            slot.1.insert(lang.clone());
        }
    }
    let mut classifier = GroupClassifier::default();
    let entries = merged
        .into_iter()
        .map(|(morpheme, (score, languages))| InventoryEntry {
            group: classifier.classify(morpheme),
            morpheme: morpheme.to_vec(),
            score,
            languages,
            slot: None,
        })
        .collect();
    MultilingualInventory { entries }
}

/// Ranks each group by score (descending, ties by bytes) and assigns
/// codepoints. Fails without partial output if any group is over capacity.
pub fn allocate(inv: MultilingualInventory) -> Result<MultilingualInventory, InventoryError> {
    let mut groups: Vec<Vec<InventoryEntry>> = vec![Vec::new(); GROUP_COUNT];
    for e in inv.entries {
        groups[e.group.index()].push(e);
    }
    for (g, members) in groups.iter().enumerate() {
        if members.len() > GROUP_CAPACITY as usize {
            return Err(InventoryError::GroupOverflow {
                group: ScriptGroupId::new(g as u8).expect("group index"),
                count: members.len(),
            });
        }
    }
    let mut entries = Vec::new();
    for mut members in groups {
        members
            .sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.morpheme.cmp(&b.morpheme)));
        for (rank, mut e) in members.into_iter().enumerate() {
            let rank = rank as u32;
            let codepoint = codepoint_for_rank(e.group, rank).expect("capacity checked");
            e.slot = Some(Slot { rank, codepoint });
            entries.push(e);
        }
    }
    Ok(MultilingualInventory { entries })
}

/// Script group of a morpheme given as decomposed bytes.
pub fn script_group_of_morpheme(bytes: &[u8]) -> ScriptGroupId {
    GroupClassifier::default().classify(bytes)
}

/// Group assignment with memoized fragment ranges.
///
/// Marker bytes are dropped and the rest is read as UTF-8. Stray
/// continuation bytes carry no script information. A truncated multibyte
/// character contributes the single group covering every assigned
/// codepoint its known prefix could complete to; if that range spans
/// several groups the morpheme is treated as mixed.
#[derive(Default)]
struct GroupClassifier {
    fragments: FxHashMap<(u32, u32), FragmentGroup>,
}

#[derive(Clone, Copy)]
enum FragmentGroup {
    Transparent,
    Single(ScriptGroupId),
    Ambiguous,
}

impl GroupClassifier {
    fn classify(&mut self, bytes: &[u8]) -> ScriptGroupId {
        let stripped: Vec<u8> = bytes.iter().copied().filter(|&b| b != CAP_MARKER).collect();
        let mut groups = Vec::new();
        let mut i = 0;
        while i < stripped.len() {
            let b = stripped[i];
            let width = match b {
                0x00..=0x7F => 1,
                0xC2..=0xDF => 2,
                0xE0..=0xEF => 3,
                0xF0..=0xF4 => 4,
                _ => {
                    i += 1;
                    continue;
                }
            };
            let avail = stripped[i + 1..]
                .iter()
                .take(width - 1)
                .take_while(|&&c| (0x80..=0xBF).contains(&c))
                .count();
            if avail == width - 1 {
                if let Some(c) =
                    std::str::from_utf8(&stripped[i..i + width]).ok().and_then(|s| s.chars().next())
                {
                    groups.extend(group_of_script(c.script()));
                    i += width;
                    continue;
                }
            }
            match self.fragment(&stripped[i..i + 1 + avail], width) {
                FragmentGroup::Transparent => {}
                FragmentGroup::Single(g) => groups.push(g),
                FragmentGroup::Ambiguous => return ScriptGroupId::COMMON,
            }
            i += 1 + avail;
        }
        fold_groups(groups)
    }

    fn fragment(&mut self, prefix: &[u8], width: usize) -> FragmentGroup {
        let lead_bits = match width {
            2 => 5,
            3 => 4,
            _ => 3,
        };
        let mut value = u32::from(prefix[0]) & ((1 << lead_bits) - 1);
        for &c in &prefix[1..] {
            value = (value << 6) | u32::from(c & 0x3F);
        }
        let missing = 6 * (width - prefix.len()) as u32;
        let min = match width {
            2 => 0x80,
            3 => 0x800,
            _ => 0x1_0000,
        };
        let lo = (value << missing).max(min);
        let hi = (((value + 1) << missing) - 1).min(char::MAX as u32);
        *self.fragments.entry((lo, hi)).or_insert_with(|| {
            let mut found = None;
            for cp in lo..=hi {
                let Some(c) = char::from_u32(cp) else { continue };
                let script = c.script();
                if script == unicode_script::Script::Unknown {
                    continue;
                }
                if let Some(g) = group_of_script(script) {
                    match found {
                        None => found = Some(g),
                        Some(prev) if prev != g => return FragmentGroup::Ambiguous,
                        _ => {}
                    }
                }
            }
            found.map_or(FragmentGroup::Transparent, FragmentGroup::Single)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scores(items: &[(&str, f64)]) -> Vec<MorphemeScore> {
        items
            .iter()
            .map(|(m, s)| MorphemeScore { morpheme: m.as_bytes().to_vec(), score: *s })
            .collect()
    }

    #[test]
    fn merge_keeps_max_score() {
        let mut per = BTreeMap::new();
        per.insert("en".to_string(), scores(&[("ing", 5.0)]));
        per.insert("de".to_string(), scores(&[("ing", 3.0)]));
        let inv = merge_inventories(&per);
        assert_eq!(inv.len(), 1);
        let e = &inv.entries()[0];
        assert_eq!(e.morpheme, b"ing");
        assert_eq!(e.score, 5.0);
        assert_eq!(e.languages.iter().collect::<Vec<_>>(), ["de", "en"]);
        assert_eq!(e.group, ScriptGroupId::LATIN);
    }

    #[test]
    fn merge_groups() {
        assert_eq!(script_group_of_morpheme("ов".as_bytes()), ScriptGroupId::NON_LATIN_ALPHABETIC);
        assert_eq!(script_group_of_morpheme("aб".as_bytes()), ScriptGroupId::COMMON);
        // Marker bytes are ignored.
        assert_eq!(script_group_of_morpheme(&[0x41, b't', b'h']), ScriptGroupId::LATIN);
        assert_eq!(script_group_of_morpheme(&[0x41]), ScriptGroupId::COMMON);
    }

    #[test]
    fn fragments() {
        // "о" is D0 BE; a morpheme ending in the bare lead D0 can only
        // complete to U+0400..=U+043F, all Cyrillic.
        assert_eq!(
            script_group_of_morpheme(&[0xD0, 0xBE, 0xD0]),
            ScriptGroupId::NON_LATIN_ALPHABETIC
        );
        // A stray continuation byte carries nothing.
        assert_eq!(
            script_group_of_morpheme(&[0xB2, 0xD0, 0xBE]),
            ScriptGroupId::NON_LATIN_ALPHABETIC
        );
        // Bare 3-byte lead E0 covers U+0800..=U+0FFF: many scripts.
        assert_eq!(script_group_of_morpheme(&[0xE0]), ScriptGroupId::COMMON);
        // Devanagari prefix E0 A4 covers U+0900..=U+093F.
        assert_eq!(script_group_of_morpheme(&[0xE0, 0xA4]), ScriptGroupId::ABUGIDAS_NORTH);
        // Latin letter followed by a Cyrillic fragment is mixed.
        assert_eq!(script_group_of_morpheme(&[b'a', 0xD0]), ScriptGroupId::COMMON);
    }

    #[test]
    fn allocation_order() {
        let mut per = BTreeMap::new();
        per.insert("en".to_string(), scores(&[("aa", 1.0), ("bb", 9.0), ("cc", 5.0)]));
        let inv = allocate(merge_inventories(&per)).unwrap();
        let got: Vec<_> = inv
            .entries()
            .iter()
            .map(|e| (e.morpheme.clone(), e.slot.unwrap().codepoint.as_bytes().to_vec()))
            .collect();
        assert_eq!(
            got,
            vec![
                (b"bb".to_vec(), vec![0x42, 0x80]),
                (b"cc".to_vec(), vec![0x42, 0x81]),
                (b"aa".to_vec(), vec![0x42, 0x82]),
            ]
        );
    }

    #[test]
    fn sixty_fifth_morpheme_gets_three_bytes() {
        let items: Vec<(String, f64)> =
            (0..65).map(|i| (format!("क{i:02}"), 100.0 - i as f64)).collect();
        let mut per = BTreeMap::new();
        per.insert(
            "hi".to_string(),
            items
                .iter()
                .map(|(m, s)| MorphemeScore { morpheme: m.as_bytes().to_vec(), score: *s })
                .collect(),
        );
        let inv = allocate(merge_inventories(&per)).unwrap();
        let last = inv.entries().last().unwrap();
        assert_eq!(last.group, ScriptGroupId::ABUGIDAS_NORTH);
        assert_eq!(last.slot.unwrap().rank, 64);
        assert_eq!(last.slot.unwrap().codepoint.as_bytes(), &[0x4E, 0x80, 0x80]);
    }

    #[test]
    fn overflow() {
        let entries = (0..GROUP_CAPACITY as usize + 1)
            .map(|i| InventoryEntry {
                morpheme: format!("m{i}").into_bytes(),
                score: 0.0,
                languages: BTreeSet::new(),
                group: ScriptGroupId::LATIN,
                slot: None,
            })
            .collect();
        let err = allocate(MultilingualInventory { entries }).unwrap_err();
        assert_eq!(
            err,
            InventoryError::GroupOverflow { group: ScriptGroupId::LATIN, count: 266_305 }
        );
    }

    #[test]
    fn table_roundtrip() {
        let mut per = BTreeMap::new();
        per.insert("en".to_string(), scores(&[("ing", 5.25), ("the", 0.1)]));
        per.insert("ru".to_string(), scores(&[("ов", 4.0)]));
        let inv = allocate(merge_inventories(&per)).unwrap();
        let text = inv.to_table_string();
        assert_eq!(
            text,
            "MYTE-TABLE v1 groups=8\n\
             0 0 4280 696e67 5.25 en\n\
             0 1 4281 746865 0.1 en\n\
             2 0 4480 d0bed0b2 4 ru\n"
        );
        let parsed = MultilingualInventory::parse_table(&text).unwrap();
        assert_eq!(parsed, inv);
    }

    #[test]
    fn table_rejects_inconsistent_codepoint() {
        let text = "MYTE-TABLE v1 groups=8\n0 0 4281 696e67 5 en\n";
        assert!(matches!(
            MultilingualInventory::parse_table(text),
            Err(InventoryError::Parse { line: 2, .. })
        ));
        assert!(MultilingualInventory::parse_table("MYTE-TABLE v2\n").is_err());
    }
}
