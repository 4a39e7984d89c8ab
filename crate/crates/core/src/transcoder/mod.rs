//! The MYTE codec: decomposition frontend, leftmost-longest morpheme
//! substitution and its inverse.

mod case;
mod trie;

use rustc_hash::FxHashMap;

use crate::codepage::{is_continuation, myte_lead_width, MyteCodepoint};
use crate::inventory::MultilingualInventory;

pub use case::{
    decompose_bytes, decompose_bytes_with, decompose_str, is_capital, nfkd_with_capitals,
    recompose_bytes, simple_lowercase, simple_uppercase,
};
pub use trie::PrefixTrie;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranscodeError {
    #[error("InvalidUtf8 at offset {offset}")]
    InvalidUtf8 { offset: usize },
    #[error("DanglingMarker at offset {offset}")]
    DanglingMarker { offset: usize },
    #[error("UnknownCodepoint at offset {offset}")]
    UnknownCodepoint { offset: usize },
    #[error("TruncatedCodepoint at offset {offset}")]
    TruncatedCodepoint { offset: usize },
    #[error("MalformedContinuation at offset {offset}")]
    MalformedContinuation { offset: usize },
    #[error("morpheme {0} listed twice")]
    DuplicateMorpheme(String),
    #[error("codepoint {0} listed twice")]
    DuplicateCodepoint(String),
    #[error("empty morpheme")]
    EmptyMorpheme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecOptions {
    /// NFKD-normalize text before decomposition.
    pub nfkd: bool,
    /// Use entries whose codepoint is longer than their morpheme.
    pub allow_lengthening: bool,
}

impl Default for CodecOptions {
    fn default() -> Self {
        CodecOptions { nfkd: true, allow_lengthening: false }
    }
}

#[derive(Debug, Clone)]
pub struct MyteCodec {
    forward: PrefixTrie,
    codepoints: Vec<MyteCodepoint>,
    backward: FxHashMap<MyteCodepoint, Vec<u8>>,
    max_morpheme_len: usize,
    options: CodecOptions,
}

impl MyteCodec {
    pub fn empty(options: CodecOptions) -> Self {
        MyteCodec {
            forward: PrefixTrie::new(),
            codepoints: Vec::new(),
            backward: FxHashMap::default(),
            max_morpheme_len: 0,
            options,
        }
    }

    pub fn from_entries<'a>(
        entries: impl IntoIterator<Item = (&'a [u8], MyteCodepoint)>,
        options: CodecOptions,
    ) -> Result<Self, TranscodeError> {
        let mut codec = MyteCodec::empty(options);
        let mut seen = PrefixTrie::new();
        for (idx, (morpheme, cp)) in entries.into_iter().enumerate() {
            if morpheme.is_empty() {
                return Err(TranscodeError::EmptyMorpheme);
            }
            if seen.insert(morpheme, idx as u32).is_some() {
                return Err(TranscodeError::DuplicateMorpheme(hex::encode(morpheme)));
            }
            if codec.backward.insert(cp, morpheme.to_vec()).is_some() {
                return Err(TranscodeError::DuplicateCodepoint(hex::encode(cp.as_bytes())));
            }
            if options.allow_lengthening || cp.len() <= morpheme.len() {
                codec.forward.insert(morpheme, codec.codepoints.len() as u32);
                codec.codepoints.push(cp);
                codec.max_morpheme_len = codec.max_morpheme_len.max(morpheme.len());
            }
        }
        Ok(codec)
    }

    pub fn from_inventory(
        inv: &MultilingualInventory,
        options: CodecOptions,
    ) -> Result<Self, TranscodeError> {
        Self::from_entries(inv.codepoints(), options)
    }

    pub fn options(&self) -> CodecOptions {
        self.options
    }

    /// Entries used when encoding.
    pub fn active_len(&self) -> usize {
        self.codepoints.len()
    }

    /// Entries known to the decoder.
    pub fn len(&self) -> usize {
        self.backward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backward.is_empty()
    }

    pub fn max_morpheme_len(&self) -> usize {
        self.max_morpheme_len
    }

    pub fn encode(&self, text: &[u8]) -> Result<Vec<u8>, TranscodeError> {
        let stream = decompose_bytes_with(text, self.options.nfkd)?;
        Ok(self.substitute(&stream))
    }

    pub fn encode_str(&self, text: &str) -> Vec<u8> {
        self.substitute(&decompose_str(text, self.options.nfkd))
    }

    /// Replaces, left to right, the longest active morpheme at each position
    /// by its codepoint; unmatched bytes are copied.
    pub fn substitute(&self, stream: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(stream.len());
        let mut i = 0;
        while i < stream.len() {
            match self.forward.longest_prefix(&stream[i..]) {
                Some((len, idx)) => {
                    out.extend_from_slice(self.codepoints[idx as usize].as_bytes());
                    i += len;
                }
                None => {
                    out.push(stream[i]);
                    i += 1;
                }
            }
        }
        out
    }

    /// Replaces every codepoint by its morpheme, yielding the decomposed
    /// stream (markers still in place).
    pub fn expand(&self, myte: &[u8]) -> Result<Vec<u8>, TranscodeError> {
        let mut out = Vec::with_capacity(myte.len() * 2);
        self.walk(myte, |_, chunk| out.extend_from_slice(chunk))?;
        Ok(out)
    }

    pub fn decode(&self, myte: &[u8]) -> Result<Vec<u8>, TranscodeError> {
        let stream = self.expand(myte)?;
        recompose_bytes(&stream).map_err(|e| match e {
            TranscodeError::DanglingMarker { offset } => {
                TranscodeError::DanglingMarker { offset: self.source_offset(myte, offset) }
            }
            other => other,
        })
    }

    fn walk<'s>(
        &'s self,
        myte: &'s [u8],
        mut emit: impl FnMut(usize, &'s [u8]),
    ) -> Result<(), TranscodeError> {
        let mut i = 0;
        while i < myte.len() {
            let Some(width) = myte_lead_width(myte[i]) else {
                emit(i, &myte[i..i + 1]);
                i += 1;
                continue;
            };
            let end = i + usize::from(width);
            for j in i + 1..end {
                match myte.get(j) {
                    None => return Err(TranscodeError::TruncatedCodepoint { offset: i }),
                    Some(&b) if !is_continuation(b) => {
                        return Err(TranscodeError::MalformedContinuation { offset: j })
                    }
                    Some(_) => {}
                }
            }
            let cp = MyteCodepoint::from_bytes(&myte[i..end]).expect("validated above");
            let morpheme =
                self.backward.get(&cp).ok_or(TranscodeError::UnknownCodepoint { offset: i })?;
            emit(i, morpheme);
            i = end;
        }
        Ok(())
    }

    /// Offset in `myte` of the unit whose expansion covers `expanded`.
    fn source_offset(&self, myte: &[u8], expanded: usize) -> usize {
        let mut pos = 0;
        let mut found = myte.len();
        let _ = self.walk(myte, |src, chunk| {
            if found == myte.len() && expanded < pos + chunk.len() {
                found = src;
            }
            pos += chunk.len();
        });
        found
    }
}
