//! Generators shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use emotif::lexicon::LexiconEntry;
use emotif::pho::{PhoDocument, PhoItem, PhonemeRecord, PitchPoint};
use emotif::profile::EmotionProfile;
use emotif::{Lexicon, RateFactor};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn centi(value: f64) -> f64 {
    (value * 100.0).round() / 100.0
}

/// Lexicon words sorted so a seeded RNG picks the same ones every run.
pub fn lexicon_words(lexicon: &Lexicon) -> Vec<LexiconEntry> {
    let mut entries: Vec<LexiconEntry> = lexicon.entries().cloned().collect();
    entries.sort_by(|a, b| a.word.cmp(&b.word));
    entries
}

pub struct Fixture {
    pub sentence: Vec<String>,
    pub doc: PhoDocument,
}

/// A pronounceable stream for 1..=`max_words` random lexicon words.
///
/// With `inverse_friendly`, every phoneme is voiced with points at 0% and
/// 100%, durations are at least 50 ms and base pitch at most 125 Hz, so the
/// largest built-in factors stay inside the clamp and rounding stays below
/// one percentage point.
pub fn random_fixture(rng: &mut StdRng, lexicon: &Lexicon, max_words: usize, inverse_friendly: bool) -> Fixture {
    let words = lexicon_words(lexicon);
    let count = rng.gen_range(1..=max_words);
    let chosen: Vec<&LexiconEntry> = (0..count).map(|_| words.choose(rng).unwrap()).collect();
    let mut doc = PhoDocument::new();
    if rng.gen_bool(0.3) {
        doc.items.push(PhoItem::Comment("; generated".into()));
    }
    doc.push(PhonemeRecord::new("_", rng.gen_range(20..300)));
    for (i, entry) in chosen.iter().enumerate() {
        if i > 0 && rng.gen_bool(0.25) {
            doc.push(PhonemeRecord::new("_", rng.gen_range(10..150)));
        }
        for symbol in entry.phonemes() {
            let record = if inverse_friendly {
                let duration = rng.gen_range(50..=220);
                let a = centi(rng.gen_range(70.0..=125.0));
                let b = centi(rng.gen_range(70.0..=125.0));
                PhonemeRecord::new(symbol, duration).with_pitch(0.0, a).with_pitch(100.0, b)
            } else {
                random_record(rng, symbol)
            };
            doc.push(record);
        }
    }
    doc.push(PhonemeRecord::new("_", rng.gen_range(20..300)));
    Fixture { sentence: chosen.iter().map(|e| e.word.clone()).collect(), doc }
}

/// Random duration and 0..=3 in-range pitch points at increasing positions.
pub fn random_record(rng: &mut StdRng, symbol: &str) -> PhonemeRecord {
    let duration = rng.gen_range(1..=400);
    let n = rng.gen_range(0..=3);
    let mut positions: Vec<f64> = (0..n).map(|_| centi(rng.gen_range(0.0..=100.0))).collect();
    positions.sort_by(f64::total_cmp);
    positions.dedup();
    let mut record = PhonemeRecord::new(symbol, duration);
    record.pitch_points =
        positions.into_iter().map(|p| PitchPoint::new(p, centi(rng.gen_range(30.0..=600.0)))).collect();
    record
}

/// A profile with every factor drawn from (-99, 400].
pub fn random_profile(rng: &mut StdRng) -> EmotionProfile {
    let mut draw = || RateFactor::new(400.0 - rng.gen_range(0.0..499.0)).unwrap();
    let mut profile = EmotionProfile::neutral().with_name("fuzz");
    for ctx in EmotionProfile::duration_cells() {
        profile.set_duration(ctx, draw());
    }
    for (w, s, e) in EmotionProfile::pitch_cells() {
        profile.set_pitch(w, s, e, draw());
    }
    profile
}

fn decimal() -> impl Strategy<Value = f64> {
    (0u32..=10_000).prop_map(|c| f64::from(c) / 100.0)
}

prop_compose! {
    pub fn arb_record()(
        symbol in prop::sample::select(vec!["_", "a", "i", "u", "e", "@", "o", "k", "s", "tS", "dZ", "N", "J", "au"]),
        duration in 1u32..5000,
        raw in prop::collection::vec((decimal(), 3_000u32..=60_000), 0..5),
    ) -> PhonemeRecord {
        let mut raw = raw;
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        raw.dedup_by(|a, b| a.0 == b.0);
        let mut record = PhonemeRecord::new(symbol, duration);
        record.pitch_points = raw.into_iter().map(|(p, c)| PitchPoint::new(p, f64::from(c) / 100.0)).collect();
        record
    }
}

pub fn arb_item() -> impl Strategy<Value = PhoItem> {
    prop_oneof![
        6 => arb_record().prop_map(PhoItem::Phoneme),
        1 => "[ a-zA-Z0-9:=.,]{0,20}".prop_map(|t| PhoItem::Comment(format!(";{t}"))),
        1 => Just(PhoItem::Blank),
    ]
}

pub fn arb_document() -> impl Strategy<Value = PhoDocument> {
    prop::collection::vec(arb_item(), 0..40).prop_map(|items| PhoDocument { items })
}
