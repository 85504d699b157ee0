//! Emotion profiles: signed-percent rate factors per prosodic cell.
//!
//! A profile holds 33 factors. Duration factors are keyed by word position
//! (first or last word), syllable position and phoneme role, plus a single
//! factor for every phoneme of any other word. Pitch factors are keyed by
//! word and syllable position and the syllable edge (start or end), plus a
//! start/end pair for other words.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::lexicon::{PitchEdge, ProsodicContext, Role, SyllablePosition, WordPosition};

/// A relative difference in percent; `+65` scales by 1.65.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct RateFactor(f64);

impl RateFactor {
    pub const ZERO: Self = Self(0.0);

    /// Factors must stay above -100% so the multiplier remains positive.
    pub fn new(percent: f64) -> Result<Self, ProfileError> {
        if !percent.is_finite() {
            return Err(ProfileError::InvalidNumber(percent.to_string()));
        }
        if percent <= -100.0 {
            return Err(ProfileError::OutOfRange(percent));
        }
        Ok(Self(percent))
    }

    pub fn percent(self) -> f64 {
        self.0
    }

    pub fn multiplier(self) -> f64 {
        1.0 + self.0 / 100.0
    }
}

impl fmt::Display for RateFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0.0 {
            f.write_str("0")
        } else if self.0 > 0.0 {
            write!(f, "+{}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for RateFactor {
    type Err = ProfileError;

    /// Accepts `+65`, `-38`, `0`, optionally with a trailing `%`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.trim();
        let body = body.strip_suffix('%').unwrap_or(body);
        let unsigned = body.strip_prefix(['+', '-']);
        let is_zero = body.parse::<f64>().is_ok_and(|v| v == 0.0);
        if unsigned.is_none() && !is_zero {
            return Err(ProfileError::SignSyntax(s.to_string()));
        }
        if unsigned.is_some_and(|u| u.starts_with(['+', '-'])) {
            return Err(ProfileError::SignSyntax(s.to_string()));
        }
        let value: f64 = body.parse().map_err(|_| ProfileError::InvalidNumber(s.to_string()))?;
        Self::new(value)
    }
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("profile is missing cell {0}")]
    MissingCell(String),
    #[error("factor {0:?} must carry an explicit sign, e.g. \"+65\" or \"-38\"")]
    SignSyntax(String),
    #[error("factor {0} is not above -100%")]
    OutOfRange(f64),
    #[error("invalid factor {0:?}")]
    InvalidNumber(String),
    #[error("malformed profile: {0}")]
    Schema(String),
    #[error("unknown emotion {0:?} (expected neutral, happy, angry or sad)")]
    UnknownEmotion(String),
    #[error("profile JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("profile file {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// The three emotions with published rate factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Happy,
    Angry,
    Sad,
}

impl Emotion {
    pub const ALL: [Self; 3] = [Self::Happy, Self::Angry, Self::Sad];

    pub fn name(self) -> &'static str {
        match self {
            Self::Happy => "happy",
            Self::Angry => "angry",
            Self::Sad => "sad",
        }
    }

    pub fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = ProfileError;

    /// English or Indonesian names, case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "happy" | "senang" => Ok(Self::Happy),
            "angry" | "marah" => Ok(Self::Angry),
            "sad" | "sedih" => Ok(Self::Sad),
            _ => Err(ProfileError::UnknownEmotion(s.to_string())),
        }
    }
}

type DurationGrid = [[RateFactor; 3]; 3];
type PitchGrid = [[RateFactor; 2]; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct EmotionProfile {
    pub name: String,
    /// `[first word, last word][syllable position][role]`
    duration: [DurationGrid; 2],
    duration_other_word: RateFactor,
    /// `[first word, last word][syllable position][edge]`
    pitch: [PitchGrid; 2],
    pitch_other_word: [RateFactor; 2],
}

fn edge_word_index(word: WordPosition) -> Option<usize> {
    match word {
        WordPosition::First => Some(0),
        WordPosition::Last => Some(1),
        WordPosition::Other => None,
    }
}

impl EmotionProfile {
    /// All-zero profile; applying it changes nothing.
    pub fn neutral() -> Self {
        Self {
            name: "neutral".into(),
            duration: [[[RateFactor::ZERO; 3]; 3]; 2],
            duration_other_word: RateFactor::ZERO,
            pitch: [[[RateFactor::ZERO; 2]; 3]; 2],
            pitch_other_word: [RateFactor::ZERO; 2],
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn builtin(emotion: Emotion) -> Self {
        builtin_profile(emotion)
    }

    /// Resolves `neutral`, `happy`, `angry`, `sad` or their Indonesian names.
    pub fn by_name(name: &str) -> Result<Self, ProfileError> {
        if name.trim().eq_ignore_ascii_case("neutral") {
            return Ok(Self::neutral());
        }
        name.parse().map(builtin_profile)
    }

    pub fn duration(&self, ctx: ProsodicContext) -> RateFactor {
        match edge_word_index(ctx.word) {
            Some(w) => self.duration[w][ctx.syllable.ordinal()][ctx.role.ordinal()],
            None => self.duration_other_word,
        }
    }

    pub fn pitch(&self, word: WordPosition, syllable: SyllablePosition, edge: PitchEdge) -> RateFactor {
        match edge_word_index(word) {
            Some(w) => self.pitch[w][syllable.ordinal()][edge.ordinal()],
            None => self.pitch_other_word[edge.ordinal()],
        }
    }

    /// Sets a duration factor. For `Other` words the syllable and role are
    /// ignored, since one factor covers all their phonemes.
    pub fn set_duration(&mut self, ctx: ProsodicContext, factor: RateFactor) {
        match edge_word_index(ctx.word) {
            Some(w) => self.duration[w][ctx.syllable.ordinal()][ctx.role.ordinal()] = factor,
            None => self.duration_other_word = factor,
        }
    }

    pub fn set_pitch(&mut self, word: WordPosition, syllable: SyllablePosition, edge: PitchEdge, factor: RateFactor) {
        match edge_word_index(word) {
            Some(w) => self.pitch[w][syllable.ordinal()][edge.ordinal()] = factor,
            None => self.pitch_other_word[edge.ordinal()] = factor,
        }
    }

    /// Every duration cell: 18 first/last-word cells then the other-word cell.
    pub fn duration_cells() -> Vec<ProsodicContext> {
        let mut cells = Vec::with_capacity(19);
        for word in [WordPosition::First, WordPosition::Last] {
            for syllable in SyllablePosition::ALL {
                for role in Role::ALL {
                    cells.push(ProsodicContext::new(word, syllable, role));
                }
            }
        }
        cells.push(ProsodicContext::new(WordPosition::Other, SyllablePosition::First, Role::Vowel));
        cells
    }

    /// Every pitch cell: 12 first/last-word cells then the two other-word edges.
    pub fn pitch_cells() -> Vec<(WordPosition, SyllablePosition, PitchEdge)> {
        let mut cells = Vec::with_capacity(14);
        for word in [WordPosition::First, WordPosition::Last] {
            for syllable in SyllablePosition::ALL {
                for edge in PitchEdge::ALL {
                    cells.push((word, syllable, edge));
                }
            }
        }
        for edge in PitchEdge::ALL {
            cells.push((WordPosition::Other, SyllablePosition::First, edge));
        }
        cells
    }

    pub fn to_json(&self) -> Value {
        let syllable_key = |s: SyllablePosition| match s {
            SyllablePosition::First => "first",
            SyllablePosition::Middle => "middle",
            SyllablePosition::Last => "last",
        };
        let factor = |f: RateFactor| Value::String(f.to_string());

        let mut duration = Map::new();
        let mut pitch = Map::new();
        for (w, word_key) in ["first_word", "last_word"].into_iter().enumerate() {
            let mut dur_word = Map::new();
            let mut pitch_word = Map::new();
            for syllable in SyllablePosition::ALL {
                let roles = &self.duration[w][syllable.ordinal()];
                let mut cell = Map::new();
                cell.insert("cons1".into(), factor(roles[Role::Consonant1.ordinal()]));
                cell.insert("cons2".into(), factor(roles[Role::Consonant2.ordinal()]));
                cell.insert("vowel".into(), factor(roles[Role::Vowel.ordinal()]));
                dur_word.insert(syllable_key(syllable).into(), Value::Object(cell));

                let edges = &self.pitch[w][syllable.ordinal()];
                let mut cell = Map::new();
                cell.insert("start".into(), factor(edges[0]));
                cell.insert("end".into(), factor(edges[1]));
                pitch_word.insert(syllable_key(syllable).into(), Value::Object(cell));
            }
            duration.insert(word_key.into(), Value::Object(dur_word));
            pitch.insert(word_key.into(), Value::Object(pitch_word));
        }
        duration.insert("other_word".into(), factor(self.duration_other_word));
        let mut other = Map::new();
        other.insert("start".into(), factor(self.pitch_other_word[0]));
        other.insert("end".into(), factor(self.pitch_other_word[1]));
        pitch.insert("other_word".into(), Value::Object(other));

        let mut root = Map::new();
        root.insert("name".into(), Value::String(self.name.clone()));
        root.insert("duration".into(), Value::Object(duration));
        root.insert("pitch".into(), Value::Object(pitch));
        Value::Object(root)
    }

    pub fn from_json(value: &Value) -> Result<Self, ProfileError> {
        let name = match value.get("name") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(ProfileError::Schema("`name` must be a string".into())),
            None => return Err(ProfileError::MissingCell("name".into())),
        };
        let mut profile = Self { name, ..Self::neutral() };

        for (word, word_key) in [(WordPosition::First, "first_word"), (WordPosition::Last, "last_word")] {
            for (syllable, syl_key) in [
                (SyllablePosition::First, "first"),
                (SyllablePosition::Middle, "middle"),
                (SyllablePosition::Last, "last"),
            ] {
                for (role, role_key) in
                    [(Role::Consonant1, "cons1"), (Role::Consonant2, "cons2"), (Role::Vowel, "vowel")]
                {
                    let f = read_factor(value, &["duration", word_key, syl_key, role_key])?;
                    profile.set_duration(ProsodicContext::new(word, syllable, role), f);
                }
                for (edge, edge_key) in [(PitchEdge::Start, "start"), (PitchEdge::End, "end")] {
                    let f = read_factor(value, &["pitch", word_key, syl_key, edge_key])?;
                    profile.set_pitch(word, syllable, edge, f);
                }
            }
        }
        profile.duration_other_word = read_factor(value, &["duration", "other_word"])?;
        profile.pitch_other_word = [
            read_factor(value, &["pitch", "other_word", "start"])?,
            read_factor(value, &["pitch", "other_word", "end"])?,
        ];
        Ok(profile)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("profile JSON is always serializable") + "\n"
    }

    pub fn from_json_str(text: &str) -> Result<Self, ProfileError> {
        Self::from_json(&serde_json::from_str(text)?)
    }
}

fn read_factor(root: &Value, path: &[&str]) -> Result<RateFactor, ProfileError> {
    let mut node = root;
    for (depth, key) in path.iter().enumerate() {
        node = match node {
            Value::Object(map) => map.get(*key),
            _ => return Err(ProfileError::Schema(format!("{} must be an object", path[..depth].join(".")))),
        }
        .ok_or_else(|| ProfileError::MissingCell(path[..=depth].join(".")))?;
    }
    match node {
        Value::String(s) => s.parse(),
        // JSON numbers cannot carry a leading '+', so unsigned positives are
        // indistinguishable from sign omissions; require strings throughout.
        Value::Number(n) => Err(ProfileError::SignSyntax(n.to_string())),
        _ => Err(ProfileError::Schema(format!("{} must be a signed factor string", path.join(".")))),
    }
}

pub fn load_profile(path: &Path) -> Result<EmotionProfile, ProfileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ProfileError::Io { path: path.display().to_string(), source })?;
    EmotionProfile::from_json_str(&text)
}

pub fn save_profile(profile: &EmotionProfile, path: &Path) -> Result<(), ProfileError> {
    std::fs::write(path, profile.to_json_string())
        .map_err(|source| ProfileError::Io { path: path.display().to_string(), source })
}

struct Table {
    /// `[first, last][first, middle, last syllable][cons1, cons2, vowel]`
    duration: [[[f64; 3]; 3]; 2],
    duration_other: f64,
    /// `[first, last][first, middle, last syllable][start, end]`
    pitch: [[[f64; 2]; 3]; 2],
    pitch_other: [f64; 2],
}

// Columns follow the published layout: first consonant, second consonant, vowel.
const TABLES: [Table; 3] = [
    Table {
        duration: [
            [[-38.0, -32.0, 65.0], [4.0, -36.0, 61.0], [-11.0, 30.0, 89.0]],
            [[-16.0, 53.0, 174.0], [-5.0, 21.0, 252.0], [14.0, 60.0, 256.0]],
        ],
        duration_other: 21.0,
        pitch: [[[132.0, 152.0], [133.0, 162.0], [173.0, 201.0]], [[205.0, 282.0], [243.0, 363.0], [288.0, 333.0]]],
        pitch_other: [226.0, 242.0],
    },
    Table {
        duration: [
            [[-36.0, 1.0, 12.0], [5.0, -3.0, 72.0], [-15.0, 5.0, 136.0]],
            [[-18.0, -10.0, 77.0], [-41.0, 5.0, 26.0], [9.0, -16.0, 58.0]],
        ],
        duration_other: 5.0,
        pitch: [[[172.0, 183.0], [195.0, 260.0], [244.0, 237.0]], [[192.0, 232.0], [154.0, 207.0], [209.0, 202.0]]],
        pitch_other: [192.0, 205.0],
    },
    Table {
        duration: [
            [[-25.0, -40.0, 113.0], [-11.0, 40.0, 135.0], [8.0, -26.0, -40.0]],
            [[10.0, -7.0, 117.0], [8.0, 33.0, 169.0], [10.0, 10.0, 229.0]],
        ],
        duration_other: 33.0,
        pitch: [[[123.0, 122.0], [96.0, 108.0], [107.0, 112.0]], [[88.0, 133.0], [89.0, 137.0], [116.0, 136.0]]],
        pitch_other: [113.0, 116.0],
    },
];

/// Profiles measured from the happy, angry and sad recordings.
pub fn builtin_profile(emotion: Emotion) -> EmotionProfile {
    let table = &TABLES[emotion.ordinal()];
    let f = |v: f64| RateFactor::new(v).expect("published factors exceed -100%");
    let mut profile = EmotionProfile { name: emotion.name().into(), ..EmotionProfile::neutral() };
    for (w, word) in [WordPosition::First, WordPosition::Last].into_iter().enumerate() {
        for syllable in SyllablePosition::ALL {
            let row = table.duration[w][syllable.ordinal()];
            for (col, role) in [Role::Consonant1, Role::Consonant2, Role::Vowel].into_iter().enumerate() {
                profile.set_duration(ProsodicContext::new(word, syllable, role), f(row[col]));
            }
            let edges = table.pitch[w][syllable.ordinal()];
            profile.set_pitch(word, syllable, PitchEdge::Start, f(edges[0]));
            profile.set_pitch(word, syllable, PitchEdge::End, f(edges[1]));
        }
    }
    profile.duration_other_word = f(table.duration_other);
    profile.pitch_other_word = [f(table.pitch_other[0]), f(table.pitch_other[1])];
    profile
}
