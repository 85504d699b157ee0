//! Listening-test scoring.
//!
//! Perception and naturalness tests ask listeners to pick one emotion per
//! stimulus; results are summarized as a confusion matrix whose diagonal is
//! the recognition rate. Intelligibility tests ask listeners to transcribe a
//! sentence and rate its clarity on a 1 to 5 scale.
//!
//! Input files are CSV with a header row:
//!
//! - responses: `listener_id,stimulus_id,true_emotion,chosen_emotion`
//! - intelligibility: `stimulus_id,rating,reference,transcript`

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::Emotion;

/// Minimum recognition rate a recorded corpus must reach, in percent.
pub const DEFAULT_RECOGNITION_THRESHOLD: f64 = 60.0;

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("no records to score")]
    EmptyInput,
    #[error("record {row}: rating {rating} is outside the 1..5 scale")]
    OutOfScale { row: usize, rating: i64 },
    #[error("record {row}: {message}")]
    Schema { row: usize, message: String },
    #[error("listener {listener:?} answered stimulus {stimulus:?} more than once")]
    DuplicateResponse { listener: String, stimulus: String },
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerceptionResponse {
    pub listener_id: String,
    pub stimulus_id: String,
    pub true_emotion: Emotion,
    pub chosen_emotion: Emotion,
}

#[derive(Debug, Deserialize)]
struct RawResponse {
    listener_id: String,
    stimulus_id: String,
    true_emotion: String,
    chosen_emotion: String,
}

/// Reads a response CSV; each listener may answer each stimulus once.
pub fn read_responses(input: impl Read) -> Result<Vec<PerceptionResponse>, EvaluationError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in reader.deserialize::<RawResponse>().enumerate() {
        let row_no = i + 1;
        let raw = row?;
        let emotion =
            |s: &str| s.parse::<Emotion>().map_err(|e| EvaluationError::Schema { row: row_no, message: e.to_string() });
        let response = PerceptionResponse {
            true_emotion: emotion(&raw.true_emotion)?,
            chosen_emotion: emotion(&raw.chosen_emotion)?,
            listener_id: raw.listener_id,
            stimulus_id: raw.stimulus_id,
        };
        if !seen.insert((response.listener_id.clone(), response.stimulus_id.clone())) {
            return Err(EvaluationError::DuplicateResponse {
                listener: response.listener_id,
                stimulus: response.stimulus_id,
            });
        }
        out.push(response);
    }
    Ok(out)
}

/// Counts indexed `[true emotion][chosen emotion]` in `Emotion::ALL` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn row_total(&self, truth: Emotion) -> u64 {
        self.counts[truth.ordinal()].iter().sum()
    }

    pub fn count(&self, truth: Emotion, chosen: Emotion) -> u64 {
        self.counts[truth.ordinal()][chosen.ordinal()]
    }

    /// Share of `truth` stimuli heard as `chosen`; `None` for an empty row.
    pub fn percent(&self, truth: Emotion, chosen: Emotion) -> Option<f64> {
        let total = self.row_total(truth);
        (total > 0).then(|| self.count(truth, chosen) as f64 / total as f64 * 100.0)
    }

    pub fn row_percentages(&self, truth: Emotion) -> Option<[f64; 3]> {
        let total = self.row_total(truth);
        (total > 0).then(|| Emotion::ALL.map(|c| self.count(truth, c) as f64 / total as f64 * 100.0))
    }

    pub fn recognition_rate(&self, emotion: Emotion) -> Option<f64> {
        self.percent(emotion, emotion)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..3).map(|i| self.counts[i][i]).sum()
    }

    /// Text table with one row per true emotion.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:<10}", "stimulus");
        for e in Emotion::ALL {
            let _ = write!(out, "{:>10}", e.name());
        }
        let _ = writeln!(out, "{:>8}", "n");
        for truth in Emotion::ALL {
            let _ = write!(out, "{:<10}", truth.name());
            match self.row_percentages(truth) {
                Some(row) => {
                    for pct in row {
                        let _ = write!(out, "{:>9.2}%", pct);
                    }
                }
                None => {
                    for _ in 0..3 {
                        let _ = write!(out, "{:>10}", "-");
                    }
                }
            }
            let _ = writeln!(out, "{:>8}", self.row_total(truth));
        }
        out
    }
}

pub fn confusion_matrix(responses: &[PerceptionResponse]) -> Result<ConfusionMatrix, EvaluationError> {
    if responses.is_empty() {
        return Err(EvaluationError::EmptyInput);
    }
    let mut matrix = ConfusionMatrix::default();
    for r in responses {
        matrix.counts[r.true_emotion.ordinal()][r.chosen_emotion.ordinal()] += 1;
    }
    Ok(matrix)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmotionThreshold {
    pub emotion: Emotion,
    pub recognition_pct: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub threshold_pct: f64,
    pub emotions: Vec<EmotionThreshold>,
    pub passed: bool,
}

/// An emotion passes when its recognition rate reaches `threshold_pct`
/// (inclusive). Emotions with no stimuli fail.
pub fn check_recognition_threshold(matrix: &ConfusionMatrix, threshold_pct: f64) -> ThresholdReport {
    let emotions: Vec<EmotionThreshold> = Emotion::ALL
        .iter()
        .map(|&emotion| {
            let recognition_pct = matrix.recognition_rate(emotion);
            EmotionThreshold { emotion, recognition_pct, passed: recognition_pct.is_some_and(|r| r >= threshold_pct) }
        })
        .collect();
    let passed = emotions.iter().all(|e| e.passed);
    ThresholdReport { threshold_pct, emotions, passed }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NaturalnessReport {
    /// Correct choices over all responses.
    pub overall_pct: f64,
    /// Unweighted mean of the per-emotion recognition rates present.
    pub mean_of_emotions_pct: f64,
    pub per_emotion_pct: BTreeMap<Emotion, f64>,
    pub responses: u64,
    pub correct: u64,
}

pub fn naturalness_report(responses: &[PerceptionResponse]) -> Result<NaturalnessReport, EvaluationError> {
    let matrix = confusion_matrix(responses)?;
    let per_emotion_pct: BTreeMap<Emotion, f64> =
        Emotion::ALL.iter().filter_map(|&e| matrix.recognition_rate(e).map(|r| (e, r))).collect();
    let mean_of_emotions_pct = per_emotion_pct.values().sum::<f64>() / per_emotion_pct.len() as f64;
    Ok(NaturalnessReport {
        overall_pct: matrix.correct() as f64 / matrix.total() as f64 * 100.0,
        mean_of_emotions_pct,
        per_emotion_pct,
        responses: matrix.total(),
        correct: matrix.correct(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntelligibilityRecord {
    pub stimulus_id: String,
    pub reference: Vec<String>,
    pub transcript: Vec<String>,
    pub clarity_rating: u8,
}

impl IntelligibilityRecord {
    pub fn new(stimulus_id: &str, rating: u8, reference: &str, transcript: &str) -> Self {
        Self {
            stimulus_id: stimulus_id.to_string(),
            reference: normalize_words(reference),
            transcript: normalize_words(transcript),
            clarity_rating: rating,
        }
    }

    /// Position-aligned exact word matches over reference length, in percent.
    pub fn word_accuracy(&self) -> f64 {
        if self.reference.is_empty() {
            return if self.transcript.is_empty() { 100.0 } else { 0.0 };
        }
        let hits = self.reference.iter().zip(&self.transcript).filter(|(r, t)| r == t).count();
        hits as f64 / self.reference.len() as f64 * 100.0
    }
}

/// Lowercases and strips punctuation, then splits on whitespace.
pub fn normalize_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect::<String>())
        .filter(|w| !w.is_empty())
        .collect()
}

#[derive(Debug, Deserialize)]
struct RawIntelligibility {
    stimulus_id: String,
    rating: String,
    reference: String,
    transcript: String,
}

pub fn read_intelligibility(input: impl Read) -> Result<Vec<IntelligibilityRecord>, EvaluationError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<RawIntelligibility>().enumerate() {
        let row_no = i + 1;
        let raw = row?;
        let rating: i64 = raw.rating.parse().map_err(|_| EvaluationError::Schema {
            row: row_no,
            message: format!("rating {:?} is not an integer", raw.rating),
        })?;
        if !(1..=5).contains(&rating) {
            return Err(EvaluationError::OutOfScale { row: row_no, rating });
        }
        let record = IntelligibilityRecord::new(&raw.stimulus_id, rating as u8, &raw.reference, &raw.transcript);
        if record.reference.is_empty() {
            return Err(EvaluationError::Schema { row: row_no, message: "empty reference sentence".into() });
        }
        out.push(record);
    }
    Ok(out)
}

/// Mean per-record word accuracy, in percent.
pub fn intelligibility_accuracy(records: &[IntelligibilityRecord]) -> Result<f64, EvaluationError> {
    if records.is_empty() {
        return Err(EvaluationError::EmptyInput);
    }
    Ok(records.iter().map(IntelligibilityRecord::word_accuracy).sum::<f64>() / records.len() as f64)
}

/// Mean rating over the scale maximum, in percent (all 1s give 20).
pub fn clarity_rate(records: &[IntelligibilityRecord]) -> Result<f64, EvaluationError> {
    if records.is_empty() {
        return Err(EvaluationError::EmptyInput);
    }
    for (i, r) in records.iter().enumerate() {
        if !(1..=5).contains(&r.clarity_rating) {
            return Err(EvaluationError::OutOfScale { row: i + 1, rating: i64::from(r.clarity_rating) });
        }
    }
    let mean = records.iter().map(|r| f64::from(r.clarity_rating)).sum::<f64>() / records.len() as f64;
    Ok(mean / 5.0 * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntelligibilityReport {
    pub records: usize,
    pub word_accuracy_pct: f64,
    pub clarity_pct: f64,
}

pub fn intelligibility_report(records: &[IntelligibilityRecord]) -> Result<IntelligibilityReport, EvaluationError> {
    Ok(IntelligibilityReport {
        records: records.len(),
        word_accuracy_pct: intelligibility_accuracy(records)?,
        clarity_pct: clarity_rate(records)?,
    })
}
