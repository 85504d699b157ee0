//! Rule-based syllabification of Indonesian orthography and the letter to
//! SAMPA fallback used for words missing from the lexicon.

use thiserror::Error;

use super::Syllable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyllabifyError {
    #[error("empty word")]
    EmptyWord,
    #[error("word {0:?} contains no vowel")]
    NoVowel(String),
    #[error("word {word:?} contains {ch:?}, which is not an Indonesian letter")]
    InvalidCharacter { word: String, ch: char },
    #[error("cannot map {grapheme:?} in syllable {syllable:?} to SAMPA")]
    UnmappableGrapheme { syllable: String, grapheme: String },
    #[error("syllable {0:?} must contain exactly one vowel group")]
    BadSyllable(String),
}

const DIGRAPHS: [&str; 4] = ["ng", "ny", "kh", "sy"];
const DIPHTHONGS: [&str; 3] = ["ai", "au", "oi"];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Grapheme {
    text: String,
    vowel: bool,
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Splits lowercase letters into graphemes: consonant digraphs become one
/// unit, and so does a diphthong wherever `diphthong` accepts its offset.
fn graphemes(letters: &str, diphthong: impl Fn(usize, usize) -> bool) -> Vec<Grapheme> {
    let chars: Vec<char> = letters.chars().collect();
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        if i + 1 < chars.len() {
            let pair: String = chars[i..i + 2].iter().collect();
            if DIGRAPHS.contains(&pair.as_str()) {
                out.push(Grapheme { text: pair, vowel: false });
                i += 2;
                continue;
            }
            if DIPHTHONGS.contains(&pair.as_str()) && diphthong(i, chars.len()) {
                out.push(Grapheme { text: pair, vowel: true });
                i += 2;
                continue;
            }
        }
        out.push(Grapheme { text: chars[i].to_string(), vowel: is_vowel(chars[i]) });
        i += 1;
    }
    out
}

fn is_onset_cluster(first: &str, second: &str) -> bool {
    matches!((first, second), ("p" | "b" | "t" | "d" | "k" | "g" | "f", "r") | ("p" | "b" | "k" | "g" | "f", "l"))
}

/// Splits an Indonesian word into orthographic syllables.
///
/// Adjacent vowels form separate syllables (`di-am`, `se-ni-or`) except a
/// word-final `ai`, `au` or `oi`, which is one diphthong (`pan-tai`). A
/// single intervocalic consonant opens the next syllable; in longer clusters
/// only the last consonant (or a final obstruent+liquid onset) does.
pub fn syllabify_orthographic(word: &str) -> Result<Vec<String>, SyllabifyError> {
    if word.is_empty() {
        return Err(SyllabifyError::EmptyWord);
    }
    let lower = word.to_lowercase();
    if let Some(ch) = lower.chars().find(|c| !c.is_ascii_lowercase()) {
        return Err(SyllabifyError::InvalidCharacter { word: word.to_string(), ch });
    }

    let units = graphemes(&lower, |at, len| at + 2 == len);
    let nuclei: Vec<usize> = units.iter().enumerate().filter(|(_, g)| g.vowel).map(|(i, _)| i).collect();
    if nuclei.is_empty() {
        return Err(SyllabifyError::NoVowel(word.to_string()));
    }

    let mut cuts = Vec::with_capacity(nuclei.len() - 1);
    for pair in nuclei.windows(2) {
        let (left, right) = (pair[0], pair[1]);
        let cut = match right - left - 1 {
            0 => right,
            1 => left + 1,
            _ if is_onset_cluster(&units[right - 2].text, &units[right - 1].text) => right - 2,
            _ => right - 1,
        };
        cuts.push(cut);
    }

    let mut syllables = Vec::with_capacity(nuclei.len());
    let mut start = 0;
    for end in cuts.into_iter().chain(std::iter::once(units.len())) {
        syllables.push(units[start..end].iter().map(|g| g.text.as_str()).collect());
        start = end;
    }
    Ok(syllables)
}

fn sampa_for(grapheme: &str) -> Option<&'static [&'static str]> {
    Some(match grapheme {
        "a" => &["a"],
        "e" => &["e"],
        "i" => &["i"],
        "o" => &["o"],
        "u" => &["u"],
        "ai" => &["ai"],
        "au" => &["au"],
        "oi" => &["oi"],
        "b" => &["b"],
        "c" => &["tS"],
        "d" => &["d"],
        "f" | "v" => &["f"],
        "g" => &["g"],
        "h" => &["h"],
        "j" => &["dZ"],
        "k" | "q" => &["k"],
        "l" => &["l"],
        "m" => &["m"],
        "n" => &["n"],
        "p" => &["p"],
        "r" => &["r"],
        "s" => &["s"],
        "t" => &["t"],
        "w" => &["w"],
        "x" => &["k", "s"],
        "y" => &["j"],
        "z" => &["z"],
        "ng" => &["N"],
        "ny" => &["J"],
        "kh" => &["x"],
        "sy" => &["S"],
        _ => return None,
    })
}

/// Maps orthographic syllables to SAMPA syllables.
///
/// Within one syllable two adjacent vowels can only be a diphthong, so
/// they map to a single nucleus token.
pub fn grapheme_to_sampa<S: AsRef<str>>(syllables: &[S]) -> Result<Vec<Syllable>, SyllabifyError> {
    syllables
        .iter()
        .map(|syl| {
            let syl = syl.as_ref();
            let lower = syl.to_lowercase();
            let units = graphemes(&lower, |_, _| true);
            let mut phonemes = Vec::new();
            let mut nucleus = None;
            for unit in &units {
                let tokens = sampa_for(&unit.text).ok_or_else(|| SyllabifyError::UnmappableGrapheme {
                    syllable: syl.to_string(),
                    grapheme: unit.text.clone(),
                })?;
                if unit.vowel {
                    if nucleus.is_some() {
                        return Err(SyllabifyError::BadSyllable(syl.to_string()));
                    }
                    nucleus = Some(phonemes.len());
                }
                phonemes.extend(tokens.iter().map(|t| t.to_string()));
            }
            let nucleus = nucleus.ok_or_else(|| SyllabifyError::BadSyllable(syl.to_string()))?;
            Ok(Syllable { phonemes, nucleus })
        })
        .collect()
}
