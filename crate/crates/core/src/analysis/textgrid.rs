//! Praat TextGrid reader (long and short text formats).
//!
//! Both formats carry the same value sequence; the long one merely labels
//! each value with `key =`. The reader therefore tokenizes the file into
//! strings, numbers and `<exists>` flags, skipping keys and `[n]` indices,
//! and walks one grammar for both.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TextGridError {
    #[error("unsupported TextGrid format: {0}")]
    UnsupportedFormat(String),
    #[error("tier {tier:?}, interval {index}: end {end} is not after start {start}")]
    NonMonotoneTimes { tier: String, index: usize, start: f64, end: f64 },
    #[error("TextGrid ended early: expected {0}")]
    Truncated(&'static str),
    #[error("TextGrid: expected {expected}, found {found:?}")]
    Unexpected { expected: &'static str, found: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub label: String,
    /// Seconds.
    pub start: f64,
    pub end: f64,
}

impl Interval {
    /// Rounded to the nanosecond to drop binary noise from the subtraction.
    pub fn duration_ms(&self) -> f64 {
        ((self.end - self.start) * 1e9).round() / 1e6
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalTier {
    pub name: String,
    pub intervals: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Text(String),
    Number(f64),
    Flag,
}

/// Decodes TextGrid bytes: UTF-8 (with or without BOM) or BOM-marked UTF-16.
pub fn decode_textgrid_bytes(bytes: &[u8]) -> Result<String, TextGridError> {
    let utf16 = |be: bool| {
        let units = bytes[2..].chunks_exact(2).map(|c| {
            if be {
                u16::from_be_bytes([c[0], c[1]])
            } else {
                u16::from_le_bytes([c[0], c[1]])
            }
        });
        char::decode_utf16(units)
            .collect::<Result<String, _>>()
            .map_err(|_| TextGridError::UnsupportedFormat("invalid UTF-16".into()))
    };
    match bytes {
        [0xFE, 0xFF, ..] => utf16(true),
        [0xFF, 0xFE, ..] => utf16(false),
        [0xEF, 0xBB, 0xBF, rest @ ..] => {
            String::from_utf8(rest.to_vec()).map_err(|_| TextGridError::UnsupportedFormat("invalid UTF-8".into()))
        }
        _ => String::from_utf8(bytes.to_vec()).map_err(|_| TextGridError::UnsupportedFormat("invalid UTF-8".into())),
    }
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '"' => {
                chars.next();
                let mut s = String::new();
                while let Some(ch) = chars.next() {
                    if ch == '"' {
                        if chars.peek() == Some(&'"') {
                            chars.next();
                            s.push('"');
                        } else {
                            break;
                        }
                    } else {
                        s.push(ch);
                    }
                }
                tokens.push(Token::Text(s));
            }
            '[' => {
                for ch in chars.by_ref() {
                    if ch == ']' {
                        break;
                    }
                }
            }
            '<' => {
                let mut s = String::new();
                for ch in chars.by_ref() {
                    s.push(ch);
                    if ch == '>' {
                        break;
                    }
                }
                if s == "<exists>" {
                    tokens.push(Token::Flag);
                }
            }
            '!' => {
                // comment to end of line
                for ch in chars.by_ref() {
                    if ch == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut word = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_whitespace() || matches!(ch, '"' | '[' | '<' | '!') {
                        break;
                    }
                    word.push(ch);
                    chars.next();
                }
                if let Ok(v) = word.parse::<f64>() {
                    tokens.push(Token::Number(v));
                }
            }
        }
    }
    tokens
}

struct Cursor {
    tokens: std::vec::IntoIter<Token>,
}

impl Cursor {
    fn next(&mut self, what: &'static str) -> Result<Token, TextGridError> {
        self.tokens.next().ok_or(TextGridError::Truncated(what))
    }

    fn text(&mut self, what: &'static str) -> Result<String, TextGridError> {
        match self.next(what)? {
            Token::Text(s) => Ok(s),
            other => Err(TextGridError::Unexpected { expected: what, found: format!("{other:?}") }),
        }
    }

    fn number(&mut self, what: &'static str) -> Result<f64, TextGridError> {
        match self.next(what)? {
            Token::Number(v) => Ok(v),
            other => Err(TextGridError::Unexpected { expected: what, found: format!("{other:?}") }),
        }
    }

    fn count(&mut self, what: &'static str) -> Result<usize, TextGridError> {
        let v = self.number(what)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(TextGridError::Unexpected { expected: what, found: v.to_string() });
        }
        Ok(v as usize)
    }
}

/// Extracts every interval tier; point tiers are skipped.
pub fn parse_textgrid(text: &str) -> Result<Vec<IntervalTier>, TextGridError> {
    let mut cur = Cursor { tokens: tokenize(text).into_iter() };
    let file_type = cur.text("file type").map_err(|_| TextGridError::UnsupportedFormat("missing header".into()))?;
    if file_type != "ooTextFile" {
        return Err(TextGridError::UnsupportedFormat(format!("file type {file_type:?}")));
    }
    let class = cur.text("object class")?;
    if class != "TextGrid" {
        return Err(TextGridError::UnsupportedFormat(format!("object class {class:?}")));
    }
    cur.number("xmin")?;
    cur.number("xmax")?;
    match cur.tokens.next() {
        Some(Token::Flag) => {}
        None => return Ok(Vec::new()),
        Some(other) => return Err(TextGridError::Unexpected { expected: "<exists>", found: format!("{other:?}") }),
    }
    let tier_count = cur.count("tier count")?;

    let mut tiers = Vec::new();
    for _ in 0..tier_count {
        let class = cur.text("tier class")?;
        let name = cur.text("tier name")?;
        cur.number("tier xmin")?;
        cur.number("tier xmax")?;
        let n = cur.count("interval count")?;
        match class.as_str() {
            "IntervalTier" => {
                let mut intervals = Vec::with_capacity(n);
                for index in 0..n {
                    let start = cur.number("interval xmin")?;
                    let end = cur.number("interval xmax")?;
                    let label = cur.text("interval text")?;
                    if end <= start {
                        return Err(TextGridError::NonMonotoneTimes { tier: name, index: index + 1, start, end });
                    }
                    intervals.push(Interval { label, start, end });
                }
                tiers.push(IntervalTier { name, intervals });
            }
            "TextTier" => {
                for _ in 0..n {
                    cur.number("point time")?;
                    cur.text("point mark")?;
                }
            }
            other => return Err(TextGridError::UnsupportedFormat(format!("tier class {other:?}"))),
        }
    }
    Ok(tiers)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Writes a single interval tier in the long text format.
pub fn write_textgrid(tier: &IntervalTier) -> String {
    let xmin = tier.intervals.first().map_or(0.0, |i| i.start);
    let xmax = tier.intervals.last().map_or(0.0, |i| i.end);
    let mut out = String::new();
    out.push_str("File type = \"ooTextFile\"\nObject class = \"TextGrid\"\n\n");
    out.push_str(&format!("xmin = {xmin} \nxmax = {xmax} \ntiers? <exists> \nsize = 1 \nitem []: \n"));
    out.push_str("    item [1]:\n        class = \"IntervalTier\" \n");
    out.push_str(&format!("        name = {} \n        xmin = {xmin} \n        xmax = {xmax} \n", quote(&tier.name)));
    out.push_str(&format!("        intervals: size = {} \n", tier.intervals.len()));
    for (i, iv) in tier.intervals.iter().enumerate() {
        out.push_str(&format!(
            "        intervals [{}]:\n            xmin = {} \n            xmax = {} \n            text = {} \n",
            i + 1,
            iv.start,
            iv.end,
            quote(&iv.label)
        ));
    }
    out
}
