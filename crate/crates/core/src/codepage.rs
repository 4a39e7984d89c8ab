//! Static byte layout of UTF-8 and of the MYTE rearrangement.
//!
//! MYTE frees the 26 capital-letter bytes `0x41..=0x5A`. `0x41` becomes the
//! capitalization marker, `0x42..=0x59` become lead bytes of morpheme
//! codepoints (one lead per script group and codepoint width) and `0x5A` is
//! kept in reserve. Continuation bytes are shared with UTF-8 (`0x80..=0xBF`),
//! so every MYTE codepoint is a lead byte followed by one to three base-64
//! digits.

use std::fmt;

use unicode_script::{Script, UnicodeScript};

/// Capitalization marker byte in MYTE mode.
pub const CAP_MARKER: u8 = 0x41;
/// First and last byte of the range MYTE assigns to morpheme lead bytes.
pub const FIRST_MYTE_LEAD: u8 = 0x42;
pub const LAST_MYTE_LEAD: u8 = 0x59;
/// Freed byte that no table entry uses.
pub const RESERVED_BYTE: u8 = 0x5A;

pub const CONTINUATION_BASE: u8 = 0x80;
pub const CONTINUATION_LAST: u8 = 0xBF;

/// Number of two-, three- and four-byte codepoints available to each group.
pub const TWO_BYTE_SLOTS: u32 = 64;
pub const THREE_BYTE_SLOTS: u32 = 64 * 64;
pub const FOUR_BYTE_SLOTS: u32 = 64 * 64 * 64;
/// Codepoints per script group over all three tiers.
pub const GROUP_CAPACITY: u32 = TWO_BYTE_SLOTS + THREE_BYTE_SLOTS + FOUR_BYTE_SLOTS;
pub const GROUP_COUNT: usize = 8;
/// Codepoints over all groups.
pub const TOTAL_CAPACITY: u64 = GROUP_CAPACITY as u64 * GROUP_COUNT as u64;

/// Interpretation applied when classifying a byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Utf8,
    Myte,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ByteClass {
    Ascii,
    Utf8Lead(u8),
    Utf8Continuation,
    CapitalLatin,
    Unused,
    MyteLead { group: ScriptGroupId, width: u8 },
    CapMarker,
}

/// Index of a script group, `0..8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScriptGroupId(u8);

impl ScriptGroupId {
    pub const LATIN: ScriptGroupId = ScriptGroupId(0);
    pub const COMMON: ScriptGroupId = ScriptGroupId(1);
    pub const NON_LATIN_ALPHABETIC: ScriptGroupId = ScriptGroupId(2);
    pub const ABJADS: ScriptGroupId = ScriptGroupId(3);
    pub const ABUGIDAS_NORTH: ScriptGroupId = ScriptGroupId(4);
    pub const ABUGIDAS_SOUTH: ScriptGroupId = ScriptGroupId(5);
    pub const CJK: ScriptGroupId = ScriptGroupId(6);
    pub const OTHER: ScriptGroupId = ScriptGroupId(7);

    pub fn new(id: u8) -> Option<Self> {
        (usize::from(id) < GROUP_COUNT).then_some(ScriptGroupId(id))
    }

    pub fn all() -> impl Iterator<Item = ScriptGroupId> {
        (0..GROUP_COUNT as u8).map(ScriptGroupId)
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn info(self) -> &'static ScriptGroup {
        &SCRIPT_GROUPS[self.index()]
    }
}

impl fmt::Display for ScriptGroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
pub struct ScriptGroup {
    pub id: ScriptGroupId,
    pub name: &'static str,
    /// Member scripts. Group 1 additionally absorbs mixed-script input and
    /// group 7 every script not listed elsewhere.
    pub unicode_scripts: &'static [Script],
    pub lead_byte_2: u8,
    pub lead_byte_3: u8,
    pub lead_byte_4: u8,
}

impl ScriptGroup {
    pub fn lead_byte(&self, width: u8) -> Option<u8> {
        match width {
            2 => Some(self.lead_byte_2),
            3 => Some(self.lead_byte_3),
            4 => Some(self.lead_byte_4),
            _ => None,
        }
    }
}

const fn group(id: u8, name: &'static str, unicode_scripts: &'static [Script]) -> ScriptGroup {
    ScriptGroup {
        id: ScriptGroupId(id),
        name,
        unicode_scripts,
        lead_byte_2: 0x42 + id,
        lead_byte_3: 0x4A + id,
        lead_byte_4: 0x52 + id,
    }
}

pub static SCRIPT_GROUPS: [ScriptGroup; GROUP_COUNT] = [
    group(0, "Latin", &[Script::Latin]),
    group(1, "Common", &[Script::Common, Script::Inherited, Script::Unknown]),
    group(
        2,
        "Non-Latin Alphabetic",
        &[Script::Greek, Script::Cyrillic, Script::Armenian, Script::Georgian],
    ),
    group(
        3,
        "Abjads",
        &[Script::Hebrew, Script::Arabic, Script::Syriac, Script::Thaana, Script::Tifinagh],
    ),
    group(
        4,
        "Abugidas North",
        &[
            Script::Devanagari,
            Script::Gurmukhi,
            Script::Gujarati,
            Script::Oriya,
            Script::Bengali,
            Script::Sinhala,
            Script::Tibetan,
        ],
    ),
    group(
        5,
        "Abugidas South",
        &[
            Script::Telugu,
            Script::Kannada,
            Script::Tamil,
            Script::Malayalam,
            Script::Thai,
            Script::Lao,
            Script::Myanmar,
            Script::Tai_Le,
            Script::New_Tai_Lue,
            Script::Tai_Tham,
            Script::Tai_Viet,
            Script::Tagalog,
            Script::Khmer,
        ],
    ),
    group(
        6,
        "CJK",
        &[
            Script::Hangul,
            Script::Han,
            Script::Yi,
            Script::Katakana,
            Script::Hiragana,
            Script::Bopomofo,
        ],
    ),
    group(7, "Other", &[]),
];

pub fn classify_byte(b: u8, mode: Mode) -> ByteClass {
    if mode == Mode::Myte {
        match b {
            CAP_MARKER => return ByteClass::CapMarker,
            FIRST_MYTE_LEAD..=LAST_MYTE_LEAD => {
                let offset = b - FIRST_MYTE_LEAD;
                return ByteClass::MyteLead {
                    group: ScriptGroupId(offset % 8),
                    width: 2 + offset / 8,
                };
            }
            RESERVED_BYTE => return ByteClass::Unused,
            _ => {}
        }
    }
    match b {
        0x41..=0x5A => ByteClass::CapitalLatin,
        0x00..=0x7F => ByteClass::Ascii,
        0x80..=0xBF => ByteClass::Utf8Continuation,
        0xC2..=0xDF => ByteClass::Utf8Lead(2),
        0xE0..=0xEF => ByteClass::Utf8Lead(3),
        0xF0..=0xF4 => ByteClass::Utf8Lead(4),
        // 0xC0, 0xC1 and 0xF5..=0xFF never occur in well-formed UTF-8.
        _ => ByteClass::Unused,
    }
}

/// Width of the MYTE codepoint introduced by `b`, if `b` is a MYTE lead.
pub fn myte_lead_width(b: u8) -> Option<u8> {
    match classify_byte(b, Mode::Myte) {
        ByteClass::MyteLead { width, .. } => Some(width),
        _ => None,
    }
}

/// Script group a single script belongs to; `None` for scripts that do not
/// constrain the group (Common, Inherited).
pub fn group_of_script(script: Script) -> Option<ScriptGroupId> {
    match script {
        Script::Common | Script::Inherited => None,
        Script::Unknown => Some(ScriptGroupId::COMMON),
        s => Some(
            SCRIPT_GROUPS
                .iter()
                .find(|g| g.unicode_scripts.contains(&s))
                .map_or(ScriptGroupId::OTHER, |g| g.id),
        ),
    }
}

/// Script group of a morpheme given its codepoints.
///
/// Common and Inherited characters are transparent. If nothing but them
/// remains, or the remaining scripts fall into more than one group, the
/// result is the Common (mixed) group.
pub fn script_group_of_codepoints(cps: &[char]) -> ScriptGroupId {
    fold_groups(cps.iter().filter_map(|c| group_of_script(c.script())))
}

pub(crate) fn fold_groups(groups: impl IntoIterator<Item = ScriptGroupId>) -> ScriptGroupId {
    let mut found = None;
    for g in groups {
        match found {
            None => found = Some(g),
            Some(prev) if prev != g => return ScriptGroupId::COMMON,
            _ => {}
        }
    }
    found.unwrap_or(ScriptGroupId::COMMON)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodepageError {
    #[error("RankOverflow: rank {rank} exceeds group capacity {GROUP_CAPACITY}")]
    RankOverflow { rank: u32 },
}

/// A MYTE codepoint: a lead byte followed by one to three continuation bytes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MyteCodepoint {
    bytes: [u8; 4],
    len: u8,
}

impl MyteCodepoint {
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes[..usize::from(self.len)]
    }

    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Parses a complete codepoint; `None` if `bytes` is not exactly one
    /// well-formed MYTE codepoint.
    pub fn from_bytes(bytes: &[u8]) -> Option<Self> {
        let (&lead, rest) = bytes.split_first()?;
        let width = myte_lead_width(lead)?;
        if bytes.len() != usize::from(width) || !rest.iter().all(|&b| is_continuation(b)) {
            return None;
        }
        let mut buf = [0u8; 4];
        buf[..bytes.len()].copy_from_slice(bytes);
        Some(MyteCodepoint { bytes: buf, len: width })
    }

    pub fn group(&self) -> ScriptGroupId {
        ScriptGroupId((self.bytes[0] - FIRST_MYTE_LEAD) % 8)
    }

    /// Position of this codepoint in its group's rank order.
    pub fn rank(&self) -> u32 {
        let digits = self.as_bytes()[1..]
            .iter()
            .fold(0u32, |acc, &b| acc * 64 + u32::from(b - CONTINUATION_BASE));
        match self.len {
            2 => digits,
            3 => TWO_BYTE_SLOTS + digits,
            _ => TWO_BYTE_SLOTS + THREE_BYTE_SLOTS + digits,
        }
    }
}

impl fmt::Debug for MyteCodepoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MyteCodepoint({})", hex::encode_upper(self.as_bytes()))
    }
}

pub fn is_continuation(b: u8) -> bool {
    (CONTINUATION_BASE..=CONTINUATION_LAST).contains(&b)
}

/// Codepoint for the `rank`-th morpheme of `group`.
///
/// Ranks `0..64` get two bytes, the next 4096 three bytes and the next
/// 262,144 four bytes. Digits after the lead are base 64, most significant
/// first, so byte order matches rank order within a tier.
pub fn codepoint_for_rank(group: ScriptGroupId, rank: u32) -> Result<MyteCodepoint, CodepageError> {
    let info = group.info();
    let (lead, digits, value) = if rank < TWO_BYTE_SLOTS {
        (info.lead_byte_2, 1, rank)
    } else if rank < TWO_BYTE_SLOTS + THREE_BYTE_SLOTS {
        (info.lead_byte_3, 2, rank - TWO_BYTE_SLOTS)
    } else if rank < GROUP_CAPACITY {
        (info.lead_byte_4, 3, rank - TWO_BYTE_SLOTS - THREE_BYTE_SLOTS)
    } else {
        return Err(CodepageError::RankOverflow { rank });
    };
    let mut bytes = [lead, 0, 0, 0];
    let mut rest = value;
    for i in (1..=digits).rev() {
        bytes[i] = CONTINUATION_BASE + (rest % 64) as u8;
        rest /= 64;
    }
    Ok(MyteCodepoint { bytes, len: digits as u8 + 1 })
}
