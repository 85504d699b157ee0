//! Word to SAMPA lexicon, orthographic syllabification, and alignment of a
//! phoneme stream to the words of a sentence.
//!
//! Lexicon files hold one entry per line:
//!
//! ```text
//! # comment
//! pergi<TAB>p *@ r|g *i
//! ```
//!
//! The word and its syllables are separated by a tab; syllables by `|`;
//! phonemes by spaces. The nucleus of each syllable carries a leading `*`.

mod align;
mod context;
mod syllabify;

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

pub use align::{align, align_symbols, classify_context, AlignError, AlignedSyllable, AlignedUtterance, AlignedWord};
pub use context::{PitchEdge, ProsodicContext, Role, SyllablePosition, WordPosition};
pub use syllabify::{grapheme_to_sampa, syllabify_orthographic, SyllabifyError};

/// Sample lexicon covering the recording-corpus sentences and a few common words.
pub const SAMPLE_LEXICON: &str = include_str!("../../data/lexicon_id.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    pub phonemes: Vec<String>,
    /// Index of the vowel within `phonemes`.
    pub nucleus: usize,
}

impl Syllable {
    pub fn new<S: Into<String>>(phonemes: impl IntoIterator<Item = S>, nucleus: usize) -> Self {
        Self { phonemes: phonemes.into_iter().map(Into::into).collect(), nucleus }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub word: String,
    pub syllables: Vec<Syllable>,
}

impl LexiconEntry {
    pub fn phonemes(&self) -> impl Iterator<Item = &str> {
        self.syllables.iter().flat_map(|s| s.phonemes.iter().map(String::as_str))
    }

    /// Builds an entry from orthography alone.
    pub fn from_orthography(word: &str) -> Result<Self, SyllabifyError> {
        let syllables = grapheme_to_sampa(&syllabify_orthographic(word)?)?;
        Ok(Self { word: word.to_lowercase(), syllables })
    }

    /// Renders the entry in lexicon file syntax.
    pub fn to_line(&self) -> String {
        let syllables: Vec<String> = self
            .syllables
            .iter()
            .map(|syl| {
                syl.phonemes
                    .iter()
                    .enumerate()
                    .map(|(i, p)| if i == syl.nucleus { format!("*{p}") } else { p.clone() })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        format!("{}\t{}", self.word, syllables.join("|"))
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("lexicon line {line}: duplicate entry for {word:?}")]
    Duplicate { line: usize, word: String },
    #[error("word {0:?} is not in the lexicon (enable the G2P fallback to synthesize it)")]
    UnknownWord(String),
    #[error("G2P fallback failed for {word:?}: {source}")]
    Fallback { word: String, source: SyllabifyError },
    #[error("cannot read lexicon {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Where a resolved pronunciation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Lexicon,
    Fallback,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sample() -> Self {
        Self::parse(SAMPLE_LEXICON).expect("bundled lexicon is well formed")
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| LexiconError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lexicon = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let entry = parse_entry(content).map_err(|message| LexiconError::Syntax { line, message })?;
            if lexicon.entries.contains_key(&entry.word) {
                return Err(LexiconError::Duplicate { line, word: entry.word });
            }
            lexicon.entries.insert(entry.word.clone(), entry);
        }
        Ok(lexicon)
    }

    pub fn insert(&mut self, entry: LexiconEntry) {
        self.entries.insert(entry.word.clone(), entry);
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    /// Looks a word up, falling back to rule-based G2P when allowed.
    pub fn resolve(&self, word: &str, allow_fallback: bool) -> Result<(Cow<'_, LexiconEntry>, Source), LexiconError> {
        if let Some(entry) = self.get(word) {
            return Ok((Cow::Borrowed(entry), Source::Lexicon));
        }
        if !allow_fallback {
            return Err(LexiconError::UnknownWord(word.to_string()));
        }
        let entry = LexiconEntry::from_orthography(word)
            .map_err(|source| LexiconError::Fallback { word: word.to_string(), source })?;
        log::warn!("{word:?} not in lexicon; using rule-based pronunciation {}", entry.to_line());
        Ok((Cow::Owned(entry), Source::Fallback))
    }
}

fn parse_entry(content: &str) -> Result<LexiconEntry, String> {
    let (word, pron) = content.split_once('\t').ok_or_else(|| "expected `word<TAB>syllables`".to_string())?;
    let word = word.trim();
    if word.is_empty() || word.chars().any(char::is_whitespace) {
        return Err(format!("invalid word {word:?}"));
    }
    let mut syllables = Vec::new();
    for syl in pron.split('|') {
        let mut phonemes = Vec::new();
        let mut nucleus = None;
        for token in syl.split_whitespace() {
            let symbol = match token.strip_prefix('*') {
                Some(rest) => {
                    if nucleus.replace(phonemes.len()).is_some() {
                        return Err(format!("syllable {syl:?} marks more than one nucleus"));
                    }
                    rest
                }
                None => token,
            };
            if symbol.is_empty() {
                return Err(format!("empty phoneme in syllable {syl:?}"));
            }
            phonemes.push(symbol.to_string());
        }
        if phonemes.is_empty() {
            return Err(format!("empty syllable in entry for {word:?}"));
        }
        let nucleus = nucleus.ok_or_else(|| format!("syllable {:?} has no `*` nucleus", syl.trim()))?;
        syllables.push(Syllable { phonemes, nucleus });
    }
    Ok(LexiconEntry { word: word.to_lowercase(), syllables })
}

/// Splits sentence text into lowercase words, dropping punctuation.
pub fn tokenize_sentence(text: &str) -> Vec<String> {
    text.split(|c: char| c.is_whitespace() || c == '-')
        .map(|w| w.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}
