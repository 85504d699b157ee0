//! Emotion injection for MBROLA phoneme streams.
//!
//! The crate turns a neutral `.pho` stream into a happy, angry or sad one by
//! scaling phoneme durations and pitch contours with per-syllable-position
//! rate factors. It can also derive those factors from aligned recordings and
//! score listening tests.
//!
//! Typical flow: [`pho::parse_pho`] a standard stream, [`lexicon::align`] it
//! to the sentence, then [`transform::apply_emotion`] with a profile from
//! [`profile::builtin_profile`] and write the result with [`pho::emit_pho`].

pub mod analysis;
pub mod cli;
pub mod evaluation;
pub mod lexicon;
pub mod pho;
pub mod profile;
pub mod synth;
pub mod transform;

pub use lexicon::{Lexicon, ProsodicContext};
pub use pho::{emit_pho, parse_pho, PhoDocument, PhonemeRecord, PitchPoint};
pub use profile::{builtin_profile, Emotion, EmotionProfile, RateFactor};
pub use transform::apply_emotion;
