//! Greedy left-to-right alignment of a phoneme stream against the expected
//! pronunciations of a sentence's words.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Lexicon, LexiconError, ProsodicContext, Role, Source, SyllablePosition, WordPosition};
use crate::pho::{PhoDocument, PAUSE};

#[derive(Debug, Error)]
pub enum AlignError {
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("phoneme {index}: expected {expected:?} for word {word:?}, found {found:?}")]
    AlignmentMismatch { index: usize, word: String, expected: String, found: String },
    #[error("phoneme stream ended while expecting {expected:?} for word {word:?}")]
    StreamExhausted { word: String, expected: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedSyllable {
    /// Phoneme indices into the stream, in order.
    pub phonemes: Vec<usize>,
    /// Offset of the nucleus within `phonemes`.
    pub nucleus: usize,
}

impl AlignedSyllable {
    pub fn roles(&self) -> impl Iterator<Item = (usize, Role)> + '_ {
        self.phonemes
            .iter()
            .enumerate()
            .map(|(offset, &index)| (index, Role::relative_to_nucleus(offset, self.nucleus)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedWord {
    pub word: String,
    pub syllables: Vec<AlignedSyllable>,
    pub source: Source,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignedUtterance {
    pub words: Vec<AlignedWord>,
    /// Pauses and any phonemes not claimed by a word.
    pub unaligned: Vec<usize>,
}

impl AlignedUtterance {
    /// Every syllable with its word and syllable positions, in stream order.
    pub fn syllables(&self) -> impl Iterator<Item = (WordPosition, SyllablePosition, &AlignedSyllable)> {
        let word_count = self.words.len();
        self.words.iter().enumerate().flat_map(move |(w, word)| {
            let syllable_count = word.syllables.len();
            word.syllables
                .iter()
                .enumerate()
                .map(move |(s, syl)| (WordPosition::of(w, word_count), SyllablePosition::of(s, syllable_count), syl))
        })
    }

    pub fn aligned_count(&self) -> usize {
        self.words.iter().flat_map(|w| &w.syllables).map(|s| s.phonemes.len()).sum()
    }
}

/// Aligns `doc` against `sentence` using `lexicon`, optionally falling back to
/// rule-based pronunciations for unknown words.
pub fn align<S: AsRef<str>>(
    doc: &PhoDocument,
    sentence: &[S],
    lexicon: &Lexicon,
    allow_fallback: bool,
) -> Result<AlignedUtterance, AlignError> {
    align_symbols(&doc.symbols(), sentence, lexicon, allow_fallback)
}

/// Same as [`align`] over a bare symbol sequence.
pub fn align_symbols<S: AsRef<str>>(
    symbols: &[&str],
    sentence: &[S],
    lexicon: &Lexicon,
    allow_fallback: bool,
) -> Result<AlignedUtterance, AlignError> {
    let mut cursor = 0;
    let mut out = AlignedUtterance::default();

    for word in sentence {
        let word = word.as_ref();
        let (entry, source) = lexicon.resolve(word, allow_fallback)?;
        while symbols.get(cursor) == Some(&PAUSE) {
            out.unaligned.push(cursor);
            cursor += 1;
        }
        let mut syllables = Vec::with_capacity(entry.syllables.len());
        for syl in &entry.syllables {
            let mut indices = Vec::with_capacity(syl.phonemes.len());
            for expected in &syl.phonemes {
                match symbols.get(cursor) {
                    None => {
                        return Err(AlignError::StreamExhausted { word: word.to_string(), expected: expected.clone() })
                    }
                    Some(found) if found != expected => {
                        return Err(AlignError::AlignmentMismatch {
                            index: cursor,
                            word: word.to_string(),
                            expected: expected.clone(),
                            found: found.to_string(),
                        })
                    }
                    Some(_) => indices.push(cursor),
                }
                cursor += 1;
            }
            syllables.push(AlignedSyllable { phonemes: indices, nucleus: syl.nucleus });
        }
        out.words.push(AlignedWord { word: entry.word.clone(), syllables, source });
    }

    for (index, symbol) in symbols.iter().enumerate().skip(cursor) {
        if *symbol != PAUSE {
            log::warn!("phoneme {index} ({symbol:?}) follows the last word and is left unaligned");
        }
        out.unaligned.push(index);
    }
    Ok(out)
}

/// Assigns each aligned phoneme its prosodic cell.
pub fn classify_context(aligned: &AlignedUtterance) -> BTreeMap<usize, ProsodicContext> {
    let mut contexts = BTreeMap::new();
    for (word, syllable, syl) in aligned.syllables() {
        for (index, role) in syl.roles() {
            contexts.insert(index, ProsodicContext { word, syllable, role });
        }
    }
    contexts
}
