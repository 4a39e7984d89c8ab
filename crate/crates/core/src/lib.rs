//! Morphology-driven byte encoding.
//!
//! Per-language morpheme inventories are learned with an MDL segmenter,
//! merged into a byte codepage that reuses the UTF-8 bytes 0x41–0x5A, and
//! used to transcode text losslessly. [`metrics`] measures how evenly the
//! resulting encoding treats parallel text in different languages.

pub mod codepage;
pub mod corpus;
pub mod inventory;
pub mod metrics;
pub mod morphology;
pub mod transcoder;
