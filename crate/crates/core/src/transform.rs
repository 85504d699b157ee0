//! Applies an emotion profile to a phoneme stream.
//!
//! Durations are scaled per phoneme by the factor of its prosodic cell.
//! Pitch is scaled per syllable: the syllable's start and end factors are
//! interpolated linearly in time across the syllable, and every pitch point
//! is multiplied by the factor at its position.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lexicon::{
    align, classify_context, tokenize_sentence, AlignError, AlignedUtterance, Lexicon, PitchEdge, ProsodicContext,
};
use crate::pho::{round_centi, PhoDocument, PhonemeRecord};
use crate::profile::{EmotionProfile, RateFactor};

pub const MIN_PITCH_HZ: f64 = 30.0;
pub const MAX_PITCH_HZ: f64 = 600.0;

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("aligned phoneme {0} has no prosodic context")]
    ContextMissing(usize),
    #[error("aligned phoneme {index} is outside the document ({count} phonemes)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error("standard phoneme source failed: {0}")]
    Source(Box<dyn std::error::Error + Send + Sync>),
}

/// Scales a duration, rounding half up once and never going below 1 ms.
pub fn scale_duration(duration_ms: u32, factor: RateFactor) -> u32 {
    // (d * (100 + f)) / 100 keeps whole-percent products exact.
    let scaled = f64::from(duration_ms) * (100.0 + factor.percent()) / 100.0;
    let rounded = (scaled + 0.5).floor();
    rounded.clamp(1.0, f64::from(u32::MAX)) as u32
}

/// Scales a frequency by `percent`, clamped to the synthesizer's range.
pub fn scale_frequency(hz: f64, percent: f64) -> f64 {
    round_centi(hz * (100.0 + percent) / 100.0).clamp(MIN_PITCH_HZ, MAX_PITCH_HZ)
}

/// Scales the pitch points of one syllable's phonemes in place.
///
/// A point's relative time `r` runs from 0 at the syllable onset to 1 at its
/// end; the applied factor is `start + r * (end - start)`.
pub fn scale_pitch_contour(records: &mut [PhonemeRecord], start: RateFactor, end: RateFactor) {
    let total: f64 = records.iter().map(|r| f64::from(r.duration_ms)).sum();
    if total <= 0.0 {
        return;
    }
    let (f_start, f_end) = (start.percent(), end.percent());
    let mut elapsed = 0.0;
    for record in records.iter_mut() {
        let duration = f64::from(record.duration_ms);
        for point in &mut record.pitch_points {
            let r = (elapsed + duration * point.position / 100.0) / total;
            let factor = f_start + r * (f_end - f_start);
            point.frequency_hz = scale_frequency(point.frequency_hz, factor);
        }
        elapsed += duration;
    }
}

/// Returns a new document with `profile` applied to the aligned phonemes.
///
/// Pitch positions are computed on the input durations, before scaling.
/// Unaligned phonemes and comments pass through untouched.
pub fn apply_emotion(
    doc: &PhoDocument,
    aligned: &AlignedUtterance,
    profile: &EmotionProfile,
) -> Result<PhoDocument, TransformError> {
    let contexts = classify_context(aligned);
    apply_with_contexts(doc, aligned, &contexts, profile)
}

/// As [`apply_emotion`], with contexts computed by the caller.
pub fn apply_with_contexts(
    doc: &PhoDocument,
    aligned: &AlignedUtterance,
    contexts: &BTreeMap<usize, ProsodicContext>,
    profile: &EmotionProfile,
) -> Result<PhoDocument, TransformError> {
    let mut records: Vec<PhonemeRecord> = doc.phonemes().cloned().collect();
    let count = records.len();

    for (word, syllable, syl) in aligned.syllables() {
        for &index in &syl.phonemes {
            if index >= count {
                return Err(TransformError::IndexOutOfRange { index, count });
            }
        }
        let mut slice: Vec<PhonemeRecord> = syl.phonemes.iter().map(|&i| records[i].clone()).collect();
        scale_pitch_contour(
            &mut slice,
            profile.pitch(word, syllable, PitchEdge::Start),
            profile.pitch(word, syllable, PitchEdge::End),
        );
        for (&index, mut record) in syl.phonemes.iter().zip(slice) {
            let ctx = contexts.get(&index).ok_or(TransformError::ContextMissing(index))?;
            record.duration_ms = scale_duration(record.duration_ms, profile.duration(*ctx));
            records[index] = record;
        }
    }

    let mut out = doc.clone();
    for (slot, record) in out.phonemes_mut().zip(records) {
        *slot = record;
    }
    Ok(out)
}

/// Something that can produce the standard (neutral) phoneme stream for text.
pub trait PhonemeSource {
    fn standard_pho(&self, text: &str) -> Result<PhoDocument, Box<dyn std::error::Error + Send + Sync>>;
}

/// A fixed, already generated stream.
impl PhonemeSource for PhoDocument {
    fn standard_pho(&self, _text: &str) -> Result<PhoDocument, Box<dyn std::error::Error + Send + Sync>> {
        Ok(self.clone())
    }
}

/// Result of a full text-to-emotional-stream run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub standard: PhoDocument,
    pub aligned: AlignedUtterance,
    pub contexts: BTreeMap<usize, ProsodicContext>,
    pub document: PhoDocument,
}

/// Text to emotional `.pho`: standard stream, alignment, context, scaling.
///
/// Nothing is persisted; intermediates live only in the returned value.
pub fn transform_pipeline(
    text: &str,
    source: &dyn PhonemeSource,
    lexicon: &Lexicon,
    profile: &EmotionProfile,
    allow_fallback: bool,
) -> Result<PipelineOutput, TransformError> {
    let words = tokenize_sentence(text);
    if words.is_empty() {
        return Ok(PipelineOutput {
            standard: PhoDocument::new(),
            aligned: AlignedUtterance::default(),
            contexts: BTreeMap::new(),
            document: PhoDocument::new(),
        });
    }
    let standard = source.standard_pho(text).map_err(TransformError::Source)?;
    let aligned = align(&standard, &words, lexicon, allow_fallback)?;
    let contexts = classify_context(&aligned);
    let document = apply_with_contexts(&standard, &aligned, &contexts, profile)?;
    Ok(PipelineOutput { standard, aligned, contexts, document })
}
