//! Bridge to the external `espeak` and `mbrola` programs.
//!
//! espeak, run with an MBROLA voice in phoneme mode, prints the standard
//! `.pho` stream for a sentence; mbrola renders a `.pho` file to audio with a
//! voice database. Neither is needed by the rest of the crate.
//!
//! Each binary is taken from the config if set, else from `EMOTIF_ESPEAK_BIN`
//! / `EMOTIF_MBROLA_BIN`, else from `PATH`. The voice database comes from the
//! config or `EMOTIF_VOICE_DB`.

use std::ffi::OsString;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use thiserror::Error;

use crate::pho::{emit_pho, parse_pho, PhoDocument, PhoError};
use crate::transform::PhonemeSource;

pub const ESPEAK_ENV: &str = "EMOTIF_ESPEAK_BIN";
pub const MBROLA_ENV: &str = "EMOTIF_MBROLA_BIN";
pub const VOICE_DB_ENV: &str = "EMOTIF_VOICE_DB";

/// Default espeak arguments; `{voice}` is replaced by the voice name.
pub const DEFAULT_ESPEAK_ARGS: [&str; 5] = ["-v", "{voice}", "-q", "--pho", "--stdin"];

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("{tool} not found: {hint}")]
    BinaryNotFound { tool: &'static str, hint: String },
    #[error("{tool} exited with {}: {stderr}", status.map_or("a signal".to_string(), |c| format!("status {c}")))]
    NonZeroExit { tool: &'static str, status: Option<i32>, stderr: String },
    #[error("espeak output is not a valid .pho stream: {0}")]
    ParseFailure(#[from] PhoError),
    #[error("espeak output is not UTF-8")]
    NonUtf8Output,
    #[error("mbrola produced no audio at {0}")]
    EmptyOutput(PathBuf),
    #[error("running {tool}: {source}")]
    Io { tool: &'static str, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub espeak_path: Option<PathBuf>,
    pub mbrola_path: Option<PathBuf>,
    pub voice_name: String,
    pub voice_db_path: Option<PathBuf>,
    pub espeak_args: Vec<String>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            espeak_path: None,
            mbrola_path: None,
            voice_name: "mb-id1".to_string(),
            voice_db_path: None,
            espeak_args: DEFAULT_ESPEAK_ARGS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Environment lookup, injectable for tests.
pub type EnvLookup<'a> = &'a dyn Fn(&str) -> Option<OsString>;

fn process_env(key: &str) -> Option<OsString> {
    std::env::var_os(key)
}

fn is_executable(path: &Path) -> bool {
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        path.metadata().is_ok_and(|m| m.is_file() && m.permissions().mode() & 0o111 != 0)
    }
    #[cfg(not(unix))]
    {
        path.is_file()
    }
}

fn search_path(name: &str, env: EnvLookup) -> Option<PathBuf> {
    let paths = env("PATH")?;
    std::env::split_paths(&paths).map(|dir| dir.join(name)).find(|p| is_executable(p))
}

fn locate(tool: &'static str, explicit: Option<&Path>, env_key: &str, env: EnvLookup) -> Result<PathBuf, SynthError> {
    if let Some(path) = explicit.map(Path::to_path_buf).or_else(|| env(env_key).map(PathBuf::from)) {
        return if is_executable(&path) {
            Ok(path)
        } else {
            Err(SynthError::BinaryNotFound { tool, hint: format!("{} is not an executable file", path.display()) })
        };
    }
    search_path(tool, env).ok_or_else(|| SynthError::BinaryNotFound {
        tool,
        hint: format!("install it, put it on PATH, or set {env_key}"),
    })
}

impl SynthConfig {
    pub fn espeak_binary(&self, env: EnvLookup) -> Result<PathBuf, SynthError> {
        locate("espeak", self.espeak_path.as_deref(), ESPEAK_ENV, env)
    }

    pub fn mbrola_binary(&self, env: EnvLookup) -> Result<PathBuf, SynthError> {
        locate("mbrola", self.mbrola_path.as_deref(), MBROLA_ENV, env)
    }

    pub fn voice_database(&self, env: EnvLookup) -> Result<PathBuf, SynthError> {
        let path = self.voice_db_path.clone().or_else(|| env(VOICE_DB_ENV).map(PathBuf::from)).ok_or_else(|| {
            SynthError::BinaryNotFound {
                tool: "mbrola",
                hint: format!("no voice database configured; set {VOICE_DB_ENV}"),
            }
        })?;
        if path.is_file() {
            Ok(path)
        } else {
            Err(SynthError::BinaryNotFound {
                tool: "mbrola",
                hint: format!("voice database {} is not a readable file", path.display()),
            })
        }
    }

    fn espeak_argv(&self) -> Vec<String> {
        self.espeak_args.iter().map(|a| a.replace("{voice}", &self.voice_name)).collect()
    }
}

fn check_status(tool: &'static str, output: &std::process::Output) -> Result<(), SynthError> {
    if output.status.success() {
        Ok(())
    } else {
        Err(SynthError::NonZeroExit {
            tool,
            status: output.status.code(),
            stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        })
    }
}

/// Runs espeak on `text` and parses the `.pho` stream it prints.
pub fn generate_standard_pho(text: &str, config: &SynthConfig) -> Result<PhoDocument, SynthError> {
    generate_standard_pho_with_env(text, config, &process_env)
}

pub fn generate_standard_pho_with_env(
    text: &str,
    config: &SynthConfig,
    env: EnvLookup,
) -> Result<PhoDocument, SynthError> {
    let binary = config.espeak_binary(env)?;
    let io = |source| SynthError::Io { tool: "espeak", source };
    log::debug!("running {} {:?}", binary.display(), config.espeak_argv());
    let mut child = Command::new(&binary)
        .args(config.espeak_argv())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(io)?;

    let mut stdin = child.stdin.take().expect("stdin is piped");
    let input = format!("{text}\n");
    let writer = std::thread::spawn(move || match stdin.write_all(input.as_bytes()) {
        // a stub that ignores its input may close the pipe first
        Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
        other => other,
    });
    let output = child.wait_with_output().map_err(io)?;
    writer.join().expect("stdin writer panicked").map_err(io)?;
    check_status("espeak", &output)?;

    let stdout = String::from_utf8(output.stdout).map_err(|_| SynthError::NonUtf8Output)?;
    Ok(parse_pho(&stdout)?)
}

/// Writes `doc` to a temporary `.pho` file and renders it with mbrola.
///
/// The temporary file is removed on success and kept (and logged) on failure.
pub fn render_wav(doc: &PhoDocument, config: &SynthConfig, out_path: &Path) -> Result<(), SynthError> {
    render_wav_with_env(doc, config, out_path, &process_env)
}

pub fn render_wav_with_env(
    doc: &PhoDocument,
    config: &SynthConfig,
    out_path: &Path,
    env: EnvLookup,
) -> Result<(), SynthError> {
    let binary = config.mbrola_binary(env)?;
    let voice = config.voice_database(env)?;
    let io = |source| SynthError::Io { tool: "mbrola", source };

    let mut pho = tempfile::Builder::new().prefix("emotif-").suffix(".pho").tempfile().map_err(io)?;
    pho.write_all(emit_pho(doc).as_bytes()).map_err(io)?;
    pho.flush().map_err(io)?;

    let result = Command::new(&binary)
        .arg(&voice)
        .arg(pho.path())
        .arg(out_path)
        .stdin(Stdio::null())
        .output()
        .map_err(io)
        .and_then(|output| check_status("mbrola", &output))
        .and_then(|()| match std::fs::metadata(out_path) {
            Ok(m) if m.len() > 0 => Ok(()),
            _ => Err(SynthError::EmptyOutput(out_path.to_path_buf())),
        });

    if result.is_err() {
        match pho.keep() {
            Ok((_, path)) => log::warn!("kept intermediate .pho at {}", path.display()),
            Err(e) => log::warn!("could not keep intermediate .pho: {e}"),
        }
    }
    result
}

/// espeak as a standard-stream source.
impl PhonemeSource for SynthConfig {
    fn standard_pho(&self, text: &str) -> Result<PhoDocument, Box<dyn std::error::Error + Send + Sync>> {
        Ok(generate_standard_pho(text, self)?)
    }
}
