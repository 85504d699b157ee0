//! The `emotif` command line.
//!
//! Exit status: 0 on success, 1 for malformed input (parse, alignment,
//! schema), 2 for I/O failures, 3 for synthesizer failures and 4 when a
//! `score --check-threshold` check fails.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::{
    self, decode_textgrid_bytes, derive_profile, measure_pho, measure_recording, parse_pitch_sidecar, parse_textgrid,
    select_tier,
};
use crate::evaluation::{self, check_recognition_threshold, confusion_matrix, EvaluationError};
use crate::lexicon::{align, syllabify_orthographic, tokenize_sentence, LexiconError, SyllabifyError};
use crate::pho::{emit_pho, parse_pho, PhoDocument};
use crate::profile::{load_profile, save_profile, EmotionProfile, ProfileError};
use crate::synth::{generate_standard_pho, render_wav, SynthConfig, SynthError};
use crate::transform::{transform_pipeline, PipelineOutput, TransformError};
use crate::Lexicon;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Synth(_) => 3,
            CliError::CheckFailed(_) => 4,
        }
    }

    fn io(context: impl std::fmt::Display, source: std::io::Error) -> Self {
        CliError::Io { context: context.to_string(), source }
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        match e {
            LexiconError::Io { path, source } => CliError::io(format!("lexicon {path}"), source),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::Io { path, source } => CliError::io(format!("profile {path}"), source),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Source(source) => match source.downcast::<SynthError>() {
                Ok(synth) => CliError::Synth(*synth),
                Err(other) => CliError::Input(other.to_string()),
            },
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<EvaluationError> for CliError {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::Csv(csv) if csv.is_io_error() => match csv.into_kind() {
                csv::ErrorKind::Io(source) => CliError::io("reading CSV", source),
                _ => unreachable!("checked is_io_error"),
            },
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "emotif", version, about = "Inject happy, angry or sad prosody into MBROLA .pho streams")]
pub struct Cli {
    /// key=value settings file (espeak, mbrola, voice, voice_db, espeak_args, lexicon, g2p_fallback).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply an emotion profile to a standard .pho stream.
    Transform(TransformArgs),
    /// Derive a profile from (standard .pho, TextGrid, pitch) recordings.
    Derive(DeriveArgs),
    /// Score listening-test responses.
    Score(ScoreArgs),
    /// Split words into syllables and print the structure digits.
    Syllabify(SyllabifyArgs),
    /// Text to emotional speech via espeak and mbrola.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Built-in emotion: neutral, happy, angry, sad (or senang, marah, sedih).
    #[arg(long, conflicts_with = "profile")]
    pub emotion: Option<String>,
    /// Built-in name or profile JSON file.
    #[arg(long)]
    pub profile: Option<String>,
}

#[derive(Debug, Args)]
pub struct LexiconArgs {
    /// Pronunciation lexicon (defaults to the bundled sample).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Syllabify out-of-lexicon words by rule instead of failing.
    #[arg(long)]
    pub g2p_fallback: bool,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Standard .pho input; without it espeak generates one.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// The sentence the stream speaks.
    #[arg(long)]
    pub text: String,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the per-phoneme context table.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    /// TSV lines: standard.pho, TextGrid, pitch sidecar, sentence.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Write the derivation report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value = "derived")]
    pub name: String,
    /// Interval tier to read (default: the first one).
    #[arg(long)]
    pub tier: Option<String>,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreMode {
    Perception,
    Naturalness,
    Intelligibility,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, value_enum)]
    pub mode: ScoreMode,
    /// Response CSV.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Fail (exit 4) when any emotion's recognition rate is below this percentage.
    #[arg(long)]
    pub check_threshold: Option<f64>,
    /// Print a JSON summary instead of tables.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SyllabifyArgs {
    #[arg(required = true)]
    pub words: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub text: String,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[command(flatten)]
    pub lexicon: LexiconArgs,
    /// Output WAV file.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the transformed .pho here.
    #[arg(long)]
    pub keep_pho: Option<PathBuf>,
    #[arg(long)]
    pub espeak: Option<PathBuf>,
    #[arg(long)]
    pub mbrola: Option<PathBuf>,
    /// MBROLA voice name passed to espeak.
    #[arg(long)]
    pub voice: Option<String>,
    #[arg(long)]
    pub voice_db: Option<PathBuf>,
}

/// Settings from a `--config` file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub synth: SynthConfig,
    pub lexicon: Option<PathBuf>,
    pub g2p_fallback: bool,
}

/// Parses `key = value` lines; `#` starts a comment. Relative paths are
/// resolved against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<FileConfig, CliError> {
    let mut config = FileConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("config line {}: expected key = value", i + 1)))?;
        let value = value.trim().trim_matches('"');
        let path = || base.join(value);
        match key.trim() {
            "espeak" | "espeak_path" => config.synth.espeak_path = Some(path()),
            "mbrola" | "mbrola_path" => config.synth.mbrola_path = Some(path()),
            "voice" | "voice_name" => config.synth.voice_name = value.to_string(),
            "voice_db" | "voice_db_path" => config.synth.voice_db_path = Some(path()),
            "espeak_args" => config.synth.espeak_args = value.split_whitespace().map(str::to_string).collect(),
            "lexicon" => config.lexicon = Some(path()),
            "g2p_fallback" => {
                config.g2p_fallback = value.parse().map_err(|_| {
                    CliError::Input(format!("config line {}: g2p_fallback must be true or false", i + 1))
                })?
            }
            other => return Err(CliError::Input(format!("config line {}: unknown key {other:?}", i + 1))),
        }
    }
    Ok(config)
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path.display(), e))
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let base = path.parent().unwrap_or(Path::new("."));
            parse_config(&read_text(path)?, base)
        }
    }
}

fn resolve_profile(args: &ProfileArgs) -> Result<EmotionProfile, CliError> {
    if let Some(emotion) = &args.emotion {
        return Ok(EmotionProfile::by_name(emotion)?);
    }
    let Some(name) = &args.profile else {
        return Err(CliError::Input("one of --emotion or --profile is required".into()));
    };
    let path = Path::new(name);
    if path.is_file() {
        if EmotionProfile::by_name(name).is_ok() {
            log::warn!("--profile {name:?} is both a built-in name and a file; using the file");
        }
        return Ok(load_profile(path)?);
    }
    Ok(EmotionProfile::by_name(name)?)
}

fn resolve_lexicon(args: &LexiconArgs, config: &FileConfig) -> Result<(Lexicon, bool), CliError> {
    let lexicon = match args.lexicon.as_ref().or(config.lexicon.as_ref()) {
        Some(path) => Lexicon::load(path)?,
        None => Lexicon::sample(),
    };
    Ok((lexicon, args.g2p_fallback || config.g2p_fallback))
}

/// Per-phoneme table of word, syllable, context and scaling.
pub fn context_table(output: &PipelineOutput, profile: &EmotionProfile) -> String {
    let mut owner: BTreeMap<usize, (&str, usize)> = BTreeMap::new();
    for word in &output.aligned.words {
        for (s, syl) in word.syllables.iter().enumerate() {
            for &p in &syl.phonemes {
                owner.insert(p, (word.word.as_str(), s + 1));
            }
        }
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4}  {:<6} {:<10} {:>3}  {:<22} {:>7}  {:>9}",
        "#", "phone", "word", "syl", "context", "factor", "ms"
    );
    for (i, (before, after)) in output.standard.phonemes().zip(output.document.phonemes()).enumerate() {
        let (word, syl, context, factor) = match (owner.get(&i), output.contexts.get(&i)) {
            (Some(&(w, s)), Some(&ctx)) => (w, s.to_string(), ctx.to_string(), format!("{}%", profile.duration(ctx))),
            _ => ("-", "-".to_string(), "-".to_string(), "-".to_string()),
        };
        let _ = writeln!(
            out,
            "{:>4}  {:<6} {:<10} {:>3}  {:<22} {:>7}  {:>4}>{:<4}",
            i, before.symbol, word, syl, context, factor, before.duration_ms, after.duration_ms
        );
    }
    out
}

fn cmd_transform(args: &TransformArgs, config: &FileConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let profile = resolve_profile(&args.profile)?;
    let (lexicon, fallback) = resolve_lexicon(&args.lexicon, config)?;
    let output = match &args.input {
        Some(path) => {
            let standard =
                parse_pho(&read_text(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            transform_pipeline(&args.text, &standard, &lexicon, &profile, fallback)?
        }
        None => transform_pipeline(&args.text, &config.synth, &lexicon, &profile, fallback)?,
    };
    let pho = emit_pho(&output.document);
    match &args.out {
        Some(path) => {
            write_file(path, pho.as_bytes())?;
            if args.verbose {
                write_stdout(stdout, &context_table(&output, &profile))?;
            }
        }
        None => {
            if args.verbose {
                // the stream owns standard output
                eprint!("{}", context_table(&output, &profile));
            }
            write_stdout(stdout, &pho)?;
        }
    }
    Ok(())
}

fn write_stdout(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("standard output", e))
}

struct ManifestEntry {
    line: usize,
    standard: PathBuf,
    textgrid: PathBuf,
    pitch: PathBuf,
    sentence: String,
}

fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [standard, textgrid, pitch, sentence] = fields[..] else {
            return Err(CliError::Input(format!(
                "manifest line {}: expected 4 tab-separated fields, found {}",
                i + 1,
                fields.len()
            )));
        };
        entries.push(ManifestEntry {
            line: i + 1,
            standard: base.join(standard.trim()),
            textgrid: base.join(textgrid.trim()),
            pitch: base.join(pitch.trim()),
            sentence: sentence.trim().to_string(),
        });
    }
    Ok(entries)
}

fn measure_entry(
    entry: &ManifestEntry,
    tier: Option<&str>,
    lexicon: &Lexicon,
    fallback: bool,
) -> Result<(analysis::MeasuredUtterance, analysis::MeasuredUtterance), CliError> {
    let ctx = |e: &dyn std::fmt::Display| {
        CliError::Input(format!("manifest line {} ({}): {e}", entry.line, entry.textgrid.display()))
    };
    let words = tokenize_sentence(&entry.sentence);
    let standard = parse_pho(&read_text(&entry.standard)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", entry.standard.display())))?;
    let aligned = align(&standard, &words, lexicon, fallback).map_err(|e| ctx(&e))?;
    let measured_standard = measure_pho(&standard, &aligned);

    let bytes = std::fs::read(&entry.textgrid).map_err(|e| CliError::io(entry.textgrid.display(), e))?;
    let text = decode_textgrid_bytes(&bytes).map_err(|e| ctx(&e))?;
    let tiers = parse_textgrid(&text).map_err(|e| ctx(&e))?;
    let tier = select_tier(tiers, tier).map_err(|e| ctx(&e))?;
    let pitch = parse_pitch_sidecar(&read_text(&entry.pitch)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", entry.pitch.display())))?;
    let recorded = measure_recording(&tier, &pitch, &words, lexicon, fallback).map_err(|e| ctx(&e))?;
    Ok((measured_standard, recorded))
}

fn cmd_derive(args: &DeriveArgs, config: &FileConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (lexicon, fallback) = resolve_lexicon(&args.lexicon, config)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&read_text(&args.manifest)?, base)?;
    let pairs = entries
        .iter()
        .map(|entry| measure_entry(entry, args.tier.as_deref(), &lexicon, fallback))
        .collect::<Result<Vec<_>, _>>()?;
    let report = derive_profile(&pairs, &args.name).map_err(|e| match e {
        analysis::AnalysisError::EmptyCorpus => CliError::Input(format!("{}: {e}", args.manifest.display())),
        other => CliError::Input(other.to_string()),
    })?;
    save_profile(&report.profile, &args.out)?;
    let rendered = report.render();
    match &args.report {
        Some(path) => write_file(path, rendered.as_bytes()),
        None => write_stdout(stdout, &rendered),
    }
}

fn open(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::open(path).map_err(|e| CliError::io(path.display(), e))
}

fn json_line(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_score(args: &ScoreArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let threshold = |report: &evaluation::ThresholdReport, out: &mut String| {
        for e in &report.emotions {
            let rate = e.recognition_pct.map_or("n/a".to_string(), |r| format!("{r:.2}%"));
            let verdict = if e.passed { "pass" } else { "FAIL" };
            let _ =
                writeln!(out, "{:<8} {:>8}  {verdict} (threshold {}%)", e.emotion.name(), rate, report.threshold_pct);
        }
    };
    let mut out = String::new();
    let mut failed = None;
    match args.mode {
        ScoreMode::Perception | ScoreMode::Naturalness => {
            let responses = evaluation::read_responses(open(&args.input)?)?;
            let matrix = confusion_matrix(&responses)?;
            let check = args.check_threshold.map(|t| check_recognition_threshold(&matrix, t));
            if let Some(report) = check.as_ref().filter(|r| !r.passed) {
                let names: Vec<_> = report.emotions.iter().filter(|e| !e.passed).map(|e| e.emotion.name()).collect();
                failed = Some(format!("recognition below {}% for {}", report.threshold_pct, names.join(", ")));
            }
            let naturalness = match args.mode {
                ScoreMode::Naturalness => Some(evaluation::naturalness_report(&responses)?),
                _ => None,
            };
            if args.json {
                let rows: BTreeMap<&str, Option<[f64; 3]>> =
                    crate::Emotion::ALL.iter().map(|&e| (e.name(), matrix.row_percentages(e))).collect();
                let summary = serde_json::json!({
                    "mode": format!("{:?}", args.mode).to_lowercase(),
                    "responses": matrix.total(),
                    "confusion_pct": rows,
                    "naturalness": naturalness,
                    "threshold": check,
                });
                out.push_str(&json_line(&summary));
            } else {
                out.push_str(&matrix.render());
                if let Some(n) = &naturalness {
                    out.push('\n');
                    for (emotion, pct) in &n.per_emotion_pct {
                        let _ = writeln!(out, "{:<8} {:>8.2}%", emotion.name(), pct);
                    }
                    let _ = writeln!(
                        out,
                        "overall (all responses)  {:>8.2}%  ({}/{})",
                        n.overall_pct, n.correct, n.responses
                    );
                    let _ = writeln!(out, "mean of emotion rates    {:>8.2}%", n.mean_of_emotions_pct);
                }
                if let Some(report) = &check {
                    out.push('\n');
                    threshold(report, &mut out);
                }
            }
        }
        ScoreMode::Intelligibility => {
            if args.check_threshold.is_some() {
                log::warn!("--check-threshold applies to perception and naturalness scores only");
            }
            let records = evaluation::read_intelligibility(open(&args.input)?)?;
            let report = evaluation::intelligibility_report(&records)?;
            if args.json {
                out.push_str(&json_line(&report));
            } else {
                let _ = writeln!(out, "records          {}", report.records);
                let _ = writeln!(out, "word accuracy    {:.2}%", report.word_accuracy_pct);
                let _ = writeln!(out, "clarity          {:.2}%", report.clarity_pct);
            }
        }
    }
    write_stdout(stdout, &out)?;
    match failed {
        Some(message) => Err(CliError::CheckFailed(message)),
        None => Ok(()),
    }
}

/// Hyphenated syllables and the syllable count of each word.
pub fn syllabify_text(words: &[String]) -> Result<(String, String), SyllabifyError> {
    let mut split = Vec::new();
    let mut digits = String::new();
    for word in words.iter().flat_map(|w| tokenize_sentence(w)) {
        let syllables = syllabify_orthographic(&word)?;
        digits.push_str(&syllables.len().to_string());
        split.push(syllables.join("-"));
    }
    Ok((split.join(" "), digits))
}

fn cmd_syllabify(args: &SyllabifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (split, digits) = syllabify_text(&args.words).map_err(|e| CliError::Input(e.to_string()))?;
    write_stdout(stdout, &format!("{split}\n{digits}\n"))
}

fn cmd_synth(args: &SynthArgs, config: &FileConfig) -> Result<(), CliError> {
    let profile = resolve_profile(&args.profile)?;
    let (lexicon, fallback) = resolve_lexicon(&args.lexicon, config)?;
    let mut synth = config.synth.clone();
    if args.espeak.is_some() {
        synth.espeak_path = args.espeak.clone();
    }
    if args.mbrola.is_some() {
        synth.mbrola_path = args.mbrola.clone();
    }
    if let Some(voice) = &args.voice {
        synth.voice_name = voice.clone();
    }
    if args.voice_db.is_some() {
        synth.voice_db_path = args.voice_db.clone();
    }

    let standard: PhoDocument = generate_standard_pho(&args.text, &synth)?;
    let output = transform_pipeline(&args.text, &standard, &lexicon, &profile, fallback)?;
    if let Some(path) = &args.keep_pho {
        write_file(path, emit_pho(&output.document).as_bytes())?;
    }
    render_wav(&output.document, &synth, &args.out)?;
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Transform(args) => cmd_transform(args, &config, stdout),
        Command::Derive(args) => cmd_derive(args, &config, stdout),
        Command::Score(args) => cmd_score(args, stdout),
        Command::Syllabify(args) => cmd_syllabify(args, stdout),
        Command::Synth(args) => cmd_synth(args, &config),
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock).and_then(|()| lock.flush().map_err(|e| CliError::io("standard output", e))) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("emotif: {e}");
            e.exit_code()
        }
    }
}
