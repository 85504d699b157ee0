//! MBROLA `.pho` phoneme streams.
//!
//! A `.pho` file lists one phoneme per line:
//!
//! ```text
//! ; comment
//! _ 100
//! a 150 10 120 90 200
//! ```
//!
//! Each phoneme line is `SYMBOL DURATION_MS (POSITION_PERCENT HZ)*`. Comment
//! and blank lines are kept verbatim so a transformed file can be diffed
//! against its input. Parsing accepts LF or CRLF; emission always uses LF and
//! terminates every item with a newline.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Symbol MBROLA uses for silence.
pub const PAUSE: &str = "_";

#[derive(Debug, Clone, PartialEq)]
pub enum PhoErrorKind {
    /// A pitch position without its frequency.
    UnpairedPitchValue,
    /// A line with a symbol but no duration.
    MissingDuration,
    NonNumericField(String),
    NonPositiveDuration(i64),
    PositionOutOfRange(f64),
    NonPositiveFrequency(f64),
    /// Pitch positions must be non-decreasing within a phoneme.
    PitchPointsOutOfOrder,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct PhoError {
    /// 1-based line number in the input text.
    pub line: usize,
    pub kind: PhoErrorKind,
}

impl fmt::Display for PhoErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnpairedPitchValue => write!(f, "malformed line: unpaired pitch value"),
            Self::MissingDuration => write!(f, "malformed line: missing duration"),
            Self::NonNumericField(field) => write!(f, "non-numeric field {field:?}"),
            Self::NonPositiveDuration(d) => write!(f, "duration must be at least 1 ms, got {d}"),
            Self::PositionOutOfRange(p) => write!(f, "pitch position {p} outside [0, 100]"),
            Self::NonPositiveFrequency(hz) => write!(f, "pitch frequency {hz} must be positive"),
            Self::PitchPointsOutOfOrder => write!(f, "pitch positions are not non-decreasing"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchPoint {
    /// Position within the phoneme, as a percentage of its duration.
    pub position: f64,
    pub frequency_hz: f64,
}

impl PitchPoint {
    pub fn new(position: f64, frequency_hz: f64) -> Self {
        Self { position, frequency_hz }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhonemeRecord {
    pub symbol: String,
    pub duration_ms: u32,
    /// Empty for unvoiced segments and silence.
    pub pitch_points: Vec<PitchPoint>,
}

impl PhonemeRecord {
    pub fn new(symbol: impl Into<String>, duration_ms: u32) -> Self {
        Self { symbol: symbol.into(), duration_ms, pitch_points: Vec::new() }
    }

    pub fn with_pitch(mut self, position: f64, frequency_hz: f64) -> Self {
        self.pitch_points.push(PitchPoint::new(position, frequency_hz));
        self
    }

    pub fn is_pause(&self) -> bool {
        self.symbol == PAUSE
    }

    pub fn is_voiced(&self) -> bool {
        !self.pitch_points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhoItem {
    Phoneme(PhonemeRecord),
    /// A `;` line, stored verbatim.
    Comment(String),
    Blank,
}

/// An ordered `.pho` document.
///
/// Phonemes are addressed by their ordinal among phoneme items ("phoneme
/// index"), ignoring comments and blanks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhoDocument {
    pub items: Vec<PhoItem>,
}

impl PhoDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: impl IntoIterator<Item = PhonemeRecord>) -> Self {
        Self { items: records.into_iter().map(PhoItem::Phoneme).collect() }
    }

    pub fn push(&mut self, record: PhonemeRecord) {
        self.items.push(PhoItem::Phoneme(record));
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn phonemes(&self) -> impl Iterator<Item = &PhonemeRecord> {
        self.items.iter().filter_map(|item| match item {
            PhoItem::Phoneme(rec) => Some(rec),
            _ => None,
        })
    }

    pub fn phonemes_mut(&mut self) -> impl Iterator<Item = &mut PhonemeRecord> {
        self.items.iter_mut().filter_map(|item| match item {
            PhoItem::Phoneme(rec) => Some(rec),
            _ => None,
        })
    }

    pub fn phoneme_count(&self) -> usize {
        self.phonemes().count()
    }

    pub fn phoneme(&self, index: usize) -> Option<&PhonemeRecord> {
        self.phonemes().nth(index)
    }

    pub fn symbols(&self) -> Vec<&str> {
        self.phonemes().map(|p| p.symbol.as_str()).collect()
    }

    pub fn total_duration_ms(&self) -> u64 {
        self.phonemes().map(|p| u64::from(p.duration_ms)).sum()
    }
}

/// Parses `.pho` text into a document.
pub fn parse_pho(text: &str) -> Result<PhoDocument, PhoError> {
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            items.push(PhoItem::Blank);
        } else if trimmed.starts_with(';') {
            items.push(PhoItem::Comment(line.to_string()));
        } else {
            let record = parse_record(trimmed).map_err(|kind| PhoError { line: idx + 1, kind })?;
            items.push(PhoItem::Phoneme(record));
        }
    }
    Ok(PhoDocument { items })
}

fn parse_record(line: &str) -> Result<PhonemeRecord, PhoErrorKind> {
    let mut fields = line.split_whitespace();
    let symbol = fields.next().expect("caller passes a non-blank line").to_string();
    let duration_field = fields.next().ok_or(PhoErrorKind::MissingDuration)?;
    let duration: i64 =
        duration_field.parse().map_err(|_| PhoErrorKind::NonNumericField(duration_field.to_string()))?;
    if duration < 1 {
        return Err(PhoErrorKind::NonPositiveDuration(duration));
    }
    let duration_ms = u32::try_from(duration).map_err(|_| PhoErrorKind::NonNumericField(duration_field.to_string()))?;

    let rest: Vec<&str> = fields.collect();
    if !rest.len().is_multiple_of(2) {
        return Err(PhoErrorKind::UnpairedPitchValue);
    }
    let mut pitch_points = Vec::with_capacity(rest.len() / 2);
    for pair in rest.chunks(2) {
        let position = parse_real(pair[0])?;
        let frequency_hz = parse_real(pair[1])?;
        if !(0.0..=100.0).contains(&position) {
            return Err(PhoErrorKind::PositionOutOfRange(position));
        }
        if frequency_hz <= 0.0 {
            return Err(PhoErrorKind::NonPositiveFrequency(frequency_hz));
        }
        if pitch_points.last().is_some_and(|p: &PitchPoint| p.position > position) {
            return Err(PhoErrorKind::PitchPointsOutOfOrder);
        }
        pitch_points.push(PitchPoint { position, frequency_hz });
    }
    Ok(PhonemeRecord { symbol, duration_ms, pitch_points })
}

fn parse_real(field: &str) -> Result<f64, PhoErrorKind> {
    field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| PhoErrorKind::NonNumericField(field.to_string()))
}

/// Renders a document in canonical form.
pub fn emit_pho(doc: &PhoDocument) -> String {
    let mut out = String::new();
    for item in &doc.items {
        match item {
            PhoItem::Phoneme(rec) => write_record(&mut out, rec),
            PhoItem::Comment(text) => out.push_str(text),
            PhoItem::Blank => {}
        }
        out.push('\n');
    }
    out
}

fn write_record(out: &mut String, rec: &PhonemeRecord) {
    out.push_str(&rec.symbol);
    out.push(' ');
    out.push_str(&rec.duration_ms.to_string());
    for point in &rec.pitch_points {
        out.push(' ');
        out.push_str(&format_decimal(point.position));
        out.push(' ');
        out.push_str(&format_decimal(point.frequency_hz));
    }
}

/// Formats with at most two decimals, dropping trailing zeros.
pub fn format_decimal(value: f64) -> String {
    let rounded = round_centi(value);
    let text = format!("{rounded:.2}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    if text == "-0" {
        "0".to_string()
    } else {
        text.to_string()
    }
}

/// Rounds to the nearest hundredth, the precision `.pho` output carries.
pub fn round_centi(value: f64) -> f64 {
    (value * 100.0).round() / 100.0
}

impl FromStr for PhoDocument {
    type Err = PhoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pho(s)
    }
}

impl fmt::Display for PhoDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit_pho(self))
    }
}
