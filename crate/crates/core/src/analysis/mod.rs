//! Deriving rate factors from recordings.
//!
//! The standard side of a comparison comes from a synthesizer `.pho`; the
//! recorded side from a hand-segmented TextGrid plus a pitch sidecar listing
//! start and end F0 per segment. Per-phoneme differences are expressed as
//! signed percentages of the standard value and averaged per prosodic cell.

mod textgrid;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use thiserror::Error;

pub use textgrid::{decode_textgrid_bytes, parse_textgrid, write_textgrid, Interval, IntervalTier, TextGridError};

use crate::lexicon::{
    align_symbols, AlignError, AlignedUtterance, Lexicon, PitchEdge, ProsodicContext, Role, SyllablePosition,
    WordPosition,
};
use crate::pho::{PhoDocument, PAUSE};
use crate::profile::{EmotionProfile, RateFactor};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    TextGrid(#[from] TextGridError),
    #[error("TextGrid has no interval tier{}", .0.as_ref().map(|n| format!(" named {n:?}")).unwrap_or_default())]
    NoIntervalTier(Option<String>),
    #[error("pitch sidecar line {line}: {message}")]
    Sidecar { line: usize, message: String },
    #[error("pitch sidecar has {sidecar} lines but the TextGrid has {segments} labeled segments")]
    SidecarLength { sidecar: usize, segments: usize },
    #[error("segment {index}: standard label {standard:?} does not match recorded label {recorded:?}")]
    LabelMismatch { index: usize, standard: String, recorded: String },
    #[error("standard has {standard} segments, recording has {recorded}")]
    SegmentCountMismatch { standard: usize, recorded: usize },
    #[error("pitch is missing on one side of the comparison")]
    MissingPitch,
    #[error("no utterance pairs to derive from")]
    EmptyCorpus,
    #[error(transparent)]
    Align(#[from] AlignError),
}

/// Labels Praat annotators commonly use for silence.
const PAUSE_LABELS: [&str; 5] = ["_", "sil", "sp", "pau", "#"];

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMeasurement {
    pub label: String,
    pub duration_ms: f64,
    pub start_pitch_hz: Option<f64>,
    pub end_pitch_hz: Option<f64>,
}

/// A syllable's place in its utterance and its span of segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasuredSyllable {
    pub word: WordPosition,
    pub syllable: SyllablePosition,
    pub segments: Range<usize>,
    /// Offset of the nucleus within `segments`.
    pub nucleus: usize,
}

impl MeasuredSyllable {
    pub fn context(&self, segment: usize) -> ProsodicContext {
        let role = Role::relative_to_nucleus(segment - self.segments.start, self.nucleus);
        ProsodicContext::new(self.word, self.syllable, role)
    }
}

/// Aligned segments of one utterance, pauses excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredUtterance {
    pub sentence: Vec<String>,
    pub segments: Vec<SegmentMeasurement>,
    pub syllables: Vec<MeasuredSyllable>,
}

impl MeasuredUtterance {
    fn from_aligned(
        sentence: Vec<String>,
        aligned: &AlignedUtterance,
        measure: impl Fn(usize) -> SegmentMeasurement,
    ) -> Self {
        let mut segments = Vec::new();
        let mut syllables = Vec::new();
        for (word, syllable, syl) in aligned.syllables() {
            let start = segments.len();
            segments.extend(syl.phonemes.iter().map(|&i| measure(i)));
            syllables.push(MeasuredSyllable { word, syllable, segments: start..segments.len(), nucleus: syl.nucleus });
        }
        Self { sentence, segments, syllables }
    }
}

/// Measures the aligned phonemes of a synthesizer stream.
pub fn measure_pho(doc: &PhoDocument, aligned: &AlignedUtterance) -> MeasuredUtterance {
    let records: Vec<_> = doc.phonemes().collect();
    let sentence = aligned.words.iter().map(|w| w.word.clone()).collect();
    MeasuredUtterance::from_aligned(sentence, aligned, |i| {
        let rec = records[i];
        SegmentMeasurement {
            label: rec.symbol.clone(),
            duration_ms: f64::from(rec.duration_ms),
            start_pitch_hz: rec.pitch_points.first().map(|p| p.frequency_hz),
            end_pitch_hz: rec.pitch_points.last().map(|p| p.frequency_hz),
        }
    })
}

/// One line of a pitch sidecar: `label<TAB>start_hz<TAB>end_hz`, `-` when absent.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchSample {
    pub label: String,
    pub start_hz: Option<f64>,
    pub end_hz: Option<f64>,
}

pub fn parse_pitch_sidecar(text: &str) -> Result<Vec<PitchSample>, AnalysisError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            return Err(AnalysisError::Sidecar {
                line,
                message: format!("expected 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let hz = |field: &str| -> Result<Option<f64>, AnalysisError> {
            let field = field.trim();
            if field == "-" {
                return Ok(None);
            }
            match field.parse::<f64>() {
                Ok(v) if v.is_finite() && v > 0.0 => Ok(Some(v)),
                _ => Err(AnalysisError::Sidecar { line, message: format!("invalid frequency {field:?}") }),
            }
        };
        let (start_hz, end_hz) = (hz(fields[1])?, hz(fields[2])?);
        if start_hz.is_some() != end_hz.is_some() {
            return Err(AnalysisError::Sidecar {
                line,
                message: "start and end pitch must be both present or both `-`".into(),
            });
        }
        out.push(PitchSample { label: fields[0].trim().to_string(), start_hz, end_hz });
    }
    Ok(out)
}

pub fn write_pitch_sidecar(samples: &[PitchSample]) -> String {
    let hz = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
    samples.iter().map(|s| format!("{}\t{}\t{}\n", s.label, hz(s.start_hz), hz(s.end_hz))).collect()
}

/// Measures a recording from its segmentation tier and pitch sidecar.
///
/// Unlabeled intervals are ignored. Every labeled interval, silence
/// included, must have a sidecar line with the same label, in order.
pub fn measure_recording<S: AsRef<str>>(
    tier: &IntervalTier,
    pitch: &[PitchSample],
    sentence: &[S],
    lexicon: &Lexicon,
    allow_fallback: bool,
) -> Result<MeasuredUtterance, AnalysisError> {
    let labeled: Vec<&Interval> = tier.intervals.iter().filter(|iv| !iv.label.trim().is_empty()).collect();
    if labeled.len() != pitch.len() {
        return Err(AnalysisError::SidecarLength { sidecar: pitch.len(), segments: labeled.len() });
    }
    for (index, (iv, p)) in labeled.iter().zip(pitch).enumerate() {
        if iv.label.trim() != p.label {
            return Err(AnalysisError::LabelMismatch { index, standard: iv.label.clone(), recorded: p.label.clone() });
        }
    }
    let symbols: Vec<&str> = labeled
        .iter()
        .map(|iv| {
            let label = iv.label.trim();
            if PAUSE_LABELS.contains(&label) {
                PAUSE
            } else {
                label
            }
        })
        .collect();
    let aligned = align_symbols(&symbols, sentence, lexicon, allow_fallback)?;
    let sentence = aligned.words.iter().map(|w| w.word.clone()).collect();
    Ok(MeasuredUtterance::from_aligned(sentence, &aligned, |i| SegmentMeasurement {
        label: symbols[i].to_string(),
        duration_ms: labeled[i].duration_ms(),
        start_pitch_hz: pitch[i].start_hz,
        end_pitch_hz: pitch[i].end_hz,
    }))
}

/// Picks `name` if given, else the first interval tier.
pub fn select_tier(tiers: Vec<IntervalTier>, name: Option<&str>) -> Result<IntervalTier, AnalysisError> {
    let owned = name.map(str::to_string);
    tiers.into_iter().find(|t| name.is_none_or(|n| t.name == n)).ok_or(AnalysisError::NoIntervalTier(owned))
}

/// Lays a stream out as a segmentation tier plus pitch sidecar, as a
/// starting point for hand correction in Praat or as a synthetic recording.
pub fn pho_to_recording(doc: &PhoDocument) -> (IntervalTier, Vec<PitchSample>) {
    let mut intervals = Vec::new();
    let mut samples = Vec::new();
    let mut elapsed_ms: u64 = 0;
    for rec in doc.phonemes() {
        let start = elapsed_ms as f64 / 1000.0;
        elapsed_ms += u64::from(rec.duration_ms);
        intervals.push(Interval { label: rec.symbol.clone(), start, end: elapsed_ms as f64 / 1000.0 });
        samples.push(PitchSample {
            label: rec.symbol.clone(),
            start_hz: rec.pitch_points.first().map(|p| p.frequency_hz),
            end_hz: rec.pitch_points.last().map(|p| p.frequency_hz),
        });
    }
    (IntervalTier { name: "phones".into(), intervals }, samples)
}

/// Signed percent difference of `measured` relative to `standard`.
fn relative_diff(standard: f64, measured: f64) -> f64 {
    let magnitude = (measured - standard).abs() / standard * 100.0;
    if measured > standard {
        magnitude
    } else if measured < standard {
        -magnitude
    } else {
        0.0
    }
}

/// `|measured - standard| / standard * 100`, positive iff the measured
/// duration is longer.
pub fn duration_diff(standard_ms: f64, measured_ms: f64) -> f64 {
    relative_diff(standard_ms, measured_ms)
}

pub fn start_pitch_diff(standard_hz: Option<f64>, measured_hz: Option<f64>) -> Result<f64, AnalysisError> {
    pitch_diff(standard_hz, measured_hz)
}

pub fn end_pitch_diff(standard_hz: Option<f64>, measured_hz: Option<f64>) -> Result<f64, AnalysisError> {
    pitch_diff(standard_hz, measured_hz)
}

fn pitch_diff(standard_hz: Option<f64>, measured_hz: Option<f64>) -> Result<f64, AnalysisError> {
    match (standard_hz, measured_hz) {
        (Some(s), Some(m)) => Ok(relative_diff(s, m)),
        _ => Err(AnalysisError::MissingPitch),
    }
}

/// One comparison sample for a prosodic cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffSample {
    pub context: ProsodicContext,
    pub duration_diff_pct: Option<f64>,
    pub start_pitch_diff_pct: Option<f64>,
    pub end_pitch_diff_pct: Option<f64>,
}

fn edge_pitch(segments: &[SegmentMeasurement], edge: PitchEdge) -> Option<f64> {
    match edge {
        PitchEdge::Start => segments.iter().find_map(|s| s.start_pitch_hz),
        PitchEdge::End => segments.iter().rev().find_map(|s| s.end_pitch_hz),
    }
}

/// Per-segment duration samples and per-syllable pitch samples of one pair.
///
/// Duration samples are reported on each segment; a syllable's pitch
/// samples ride on its nucleus.
pub fn diff_samples(
    standard: &MeasuredUtterance,
    recorded: &MeasuredUtterance,
) -> Result<Vec<DiffSample>, AnalysisError> {
    if standard.segments.len() != recorded.segments.len() {
        return Err(AnalysisError::SegmentCountMismatch {
            standard: standard.segments.len(),
            recorded: recorded.segments.len(),
        });
    }
    for (index, (s, r)) in standard.segments.iter().zip(&recorded.segments).enumerate() {
        if s.label != r.label {
            return Err(AnalysisError::LabelMismatch { index, standard: s.label.clone(), recorded: r.label.clone() });
        }
    }

    let mut samples = Vec::with_capacity(standard.segments.len());
    for syl in &standard.syllables {
        let std_segs = &standard.segments[syl.segments.clone()];
        let rec_segs = &recorded.segments[syl.segments.clone()];
        let start = pitch_diff(edge_pitch(std_segs, PitchEdge::Start), edge_pitch(rec_segs, PitchEdge::Start)).ok();
        let end = pitch_diff(edge_pitch(std_segs, PitchEdge::End), edge_pitch(rec_segs, PitchEdge::End)).ok();
        for i in syl.segments.clone() {
            let is_nucleus = i - syl.segments.start == syl.nucleus;
            samples.push(DiffSample {
                context: syl.context(i),
                duration_diff_pct: Some(duration_diff(
                    standard.segments[i].duration_ms,
                    recorded.segments[i].duration_ms,
                )),
                start_pitch_diff_pct: if is_nucleus { start } else { None },
                end_pitch_diff_pct: if is_nucleus { end } else { None },
            });
        }
    }
    Ok(samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum CellKey {
    Duration(WordPosition, Option<(SyllablePosition, Role)>),
    Pitch(WordPosition, Option<SyllablePosition>, PitchEdge),
}

fn duration_key(ctx: ProsodicContext) -> CellKey {
    match ctx.word {
        WordPosition::Other => CellKey::Duration(WordPosition::Other, None),
        w => CellKey::Duration(w, Some((ctx.syllable, ctx.role))),
    }
}

fn pitch_key(word: WordPosition, syllable: SyllablePosition, edge: PitchEdge) -> CellKey {
    match word {
        WordPosition::Other => CellKey::Pitch(WordPosition::Other, None, edge),
        w => CellKey::Pitch(w, Some(syllable), edge),
    }
}

/// A derived profile with the evidence behind each factor.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationReport {
    pub profile: EmotionProfile,
    /// Sample counts in [`EmotionProfile::duration_cells`] order.
    pub duration_counts: Vec<usize>,
    /// Sample counts in [`EmotionProfile::pitch_cells`] order.
    pub pitch_counts: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Averages per-cell differences over `(standard, recorded)` pairs.
///
/// Cells without samples get factor 0 and a warning. Samples are sorted
/// before summation so the result does not depend on corpus order.
pub fn derive_profile(
    pairs: &[(MeasuredUtterance, MeasuredUtterance)],
    name: &str,
) -> Result<DerivationReport, AnalysisError> {
    if pairs.is_empty() {
        return Err(AnalysisError::EmptyCorpus);
    }
    let mut cells: BTreeMap<CellKey, Vec<f64>> = BTreeMap::new();
    for (standard, recorded) in pairs {
        for sample in diff_samples(standard, recorded)? {
            let ctx = sample.context;
            if let Some(d) = sample.duration_diff_pct {
                cells.entry(duration_key(ctx)).or_default().push(d);
            }
            if let Some(p) = sample.start_pitch_diff_pct {
                cells.entry(pitch_key(ctx.word, ctx.syllable, PitchEdge::Start)).or_default().push(p);
            }
            if let Some(p) = sample.end_pitch_diff_pct {
                cells.entry(pitch_key(ctx.word, ctx.syllable, PitchEdge::End)).or_default().push(p);
            }
        }
    }

    let mut warnings = Vec::new();
    let mut mean_of = |key: CellKey, label: String| -> (RateFactor, usize) {
        match cells.get_mut(&key) {
            Some(values) if !values.is_empty() => {
                values.sort_by(f64::total_cmp);
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                (RateFactor::new(mean).expect("mean of differences exceeds -100%"), values.len())
            }
            _ => {
                warnings.push(format!("no samples for {label}; factor set to 0"));
                (RateFactor::ZERO, 0)
            }
        }
    };

    let mut profile = EmotionProfile::neutral().with_name(name);
    let mut duration_counts = Vec::new();
    for ctx in EmotionProfile::duration_cells() {
        let label = match ctx.word {
            WordPosition::Other => "duration other-word".to_string(),
            _ => format!("duration {ctx}"),
        };
        let (factor, count) = mean_of(duration_key(ctx), label);
        profile.set_duration(ctx, factor);
        duration_counts.push(count);
    }
    let mut pitch_counts = Vec::new();
    for (word, syllable, edge) in EmotionProfile::pitch_cells() {
        let label = match word {
            WordPosition::Other => format!("pitch other-word/{edge}"),
            _ => format!("pitch {word}/{syllable}/{edge}"),
        };
        let (factor, count) = mean_of(pitch_key(word, syllable, edge), label);
        profile.set_pitch(word, syllable, edge, factor);
        pitch_counts.push(count);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(DerivationReport { profile, duration_counts, pitch_counts, warnings })
}

impl DerivationReport {
    /// Plain-text tables: factor and sample count per cell.
    pub fn render(&self) -> String {
        let cell = |f: RateFactor, n: usize| format!("{:>+9.2}% ({n:>3})", f.percent());
        let p = &self.profile;
        let mut out = String::new();
        let _ = writeln!(out, "Profile: {}", p.name);
        let _ = writeln!(out, "\nDuration");
        let _ = writeln!(out, "{:<12}{:<10}{:>17}{:>17}{:>17}", "Word", "Syllable", "Cons1", "Cons2", "Vowel");
        let dur_cells = EmotionProfile::duration_cells();
        for (row, chunk) in dur_cells[..18].chunks(3).enumerate() {
            let ctx = chunk[0];
            let word = if row % 3 == 0 { ctx.word.to_string() } else { String::new() };
            let at = |role: Role| {
                let i = row * 3 + chunk.iter().position(|c| c.role == role).unwrap();
                cell(p.duration(dur_cells[i]), self.duration_counts[i])
            };
            let _ = writeln!(
                out,
                "{word:<12}{:<10}{:>17}{:>17}{:>17}",
                ctx.syllable.to_string(),
                at(Role::Consonant1),
                at(Role::Consonant2),
                at(Role::Vowel)
            );
        }
        let _ = writeln!(out, "{:<22}{:>17}", "other-word", cell(p.duration(dur_cells[18]), self.duration_counts[18]));

        let _ = writeln!(out, "\nPitch");
        let _ = writeln!(out, "{:<12}{:<10}{:>17}{:>17}", "Word", "Syllable", "Start", "End");
        let pitch_cells = EmotionProfile::pitch_cells();
        for (row, chunk) in pitch_cells[..12].chunks(2).enumerate() {
            let (word, syllable, _) = chunk[0];
            let word = if row % 3 == 0 { word.to_string() } else { String::new() };
            let at = |k: usize| {
                let (w, s, e) = pitch_cells[row * 2 + k];
                cell(p.pitch(w, s, e), self.pitch_counts[row * 2 + k])
            };
            let _ = writeln!(out, "{word:<12}{:<10}{:>17}{:>17}", syllable.to_string(), at(0), at(1));
        }
        let other = |k: usize| {
            let (w, s, e) = pitch_cells[12 + k];
            cell(p.pitch(w, s, e), self.pitch_counts[12 + k])
        };
        let _ = writeln!(out, "{:<22}{:>17}{:>17}", "other-word", other(0), other(1));

        if !self.warnings.is_empty() {
            let _ = writeln!(out, "\nWarnings");
            for w in &self.warnings {
                let _ = writeln!(out, "- {w}");
            }
        }
        out
    }
}
