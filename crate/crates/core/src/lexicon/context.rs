//! Prosodic cells: the keys rate factors are indexed by.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WordPosition {
    First,
    Last,
    Other,
}

impl WordPosition {
    /// Position of word `index` in an utterance of `count` words.
    ///
    /// A lone word counts as `Last`: utterance-final lengthening dominates.
    pub fn of(index: usize, count: usize) -> Self {
        if index + 1 == count {
            Self::Last
        } else if index == 0 {
            Self::First
        } else {
            Self::Other
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SyllablePosition {
    First,
    Middle,
    Last,
}

impl SyllablePosition {
    pub const ALL: [Self; 3] = [Self::First, Self::Middle, Self::Last];

    /// Position of syllable `index` in a word of `count` syllables.
    ///
    /// Monosyllables are `Last`; every interior syllable is `Middle`.
    pub fn of(index: usize, count: usize) -> Self {
        if index + 1 == count {
            Self::Last
        } else if index == 0 {
            Self::First
        } else {
            Self::Middle
        }
    }

    pub(crate) fn ordinal(self) -> usize {
        self as usize
    }
}

/// Role of a phoneme relative to its syllable nucleus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    /// Any consonant before the nucleus.
    Consonant1,
    Vowel,
    /// Any consonant after the nucleus.
    Consonant2,
}

impl Role {
    pub const ALL: [Self; 3] = [Self::Consonant1, Self::Vowel, Self::Consonant2];

    pub fn relative_to_nucleus(offset: usize, nucleus: usize) -> Self {
        use std::cmp::Ordering::*;
        match offset.cmp(&nucleus) {
            Less => Self::Consonant1,
            Equal => Self::Vowel,
            Greater => Self::Consonant2,
        }
    }

    pub(crate) fn ordinal(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PitchEdge {
    Start,
    End,
}

impl PitchEdge {
    pub const ALL: [Self; 2] = [Self::Start, Self::End];

    pub(crate) fn ordinal(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProsodicContext {
    pub word: WordPosition,
    pub syllable: SyllablePosition,
    pub role: Role,
}

impl ProsodicContext {
    pub fn new(word: WordPosition, syllable: SyllablePosition, role: Role) -> Self {
        Self { word, syllable, role }
    }
}

impl fmt::Display for WordPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::First => "first-word",
            Self::Last => "last-word",
            Self::Other => "other-word",
        })
    }
}

impl fmt::Display for SyllablePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::First => "first",
            Self::Middle => "middle",
            Self::Last => "last",
        })
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Consonant1 => "cons1",
            Self::Vowel => "vowel",
            Self::Consonant2 => "cons2",
        })
    }
}

impl fmt::Display for PitchEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Start => "start",
            Self::End => "end",
        })
    }
}

impl fmt::Display for ProsodicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.word, self.syllable, self.role)
    }
}
