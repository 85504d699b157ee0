mod common;

use common::{arb_document, random_fixture, random_profile};
use emotif::analysis::{derive_profile, duration_diff, measure_pho, measure_recording, pho_to_recording};
use emotif::lexicon::align;
use emotif::pho::{emit_pho, parse_pho};
use emotif::transform::{scale_duration, MAX_PITCH_HZ, MIN_PITCH_HZ};
use emotif::{apply_emotion, EmotionProfile, Lexicon, RateFactor};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

proptest! {
    #[test]
    fn emit_then_parse_is_identity(doc in arb_document()) {
        let text = emit_pho(&doc);
        prop_assert_eq!(parse_pho(&text).unwrap(), doc);
    }

    #[test]
    fn emitting_is_canonical(doc in arb_document()) {
        let once = emit_pho(&doc);
        prop_assert_eq!(emit_pho(&parse_pho(&once).unwrap()), once);
    }

    #[test]
    fn neutral_profile_changes_nothing(seed in any::<u64>()) {
        let lexicon = Lexicon::sample();
        let fixture = random_fixture(&mut StdRng::seed_from_u64(seed), &lexicon, 4, false);
        let aligned = align(&fixture.doc, &fixture.sentence, &lexicon, false).unwrap();
        prop_assert_eq!(apply_emotion(&fixture.doc, &aligned, &EmotionProfile::neutral()).unwrap(), fixture.doc);
    }

    #[test]
    fn transforms_are_deterministic_and_bounded(seed in any::<u64>()) {
        let lexicon = Lexicon::sample();
        let mut rng = StdRng::seed_from_u64(seed);
        let fixture = random_fixture(&mut rng, &lexicon, 4, false);
        let profile = random_profile(&mut rng);
        let aligned = align(&fixture.doc, &fixture.sentence, &lexicon, false).unwrap();
        let out = apply_emotion(&fixture.doc, &aligned, &profile).unwrap();
        prop_assert_eq!(&out, &apply_emotion(&fixture.doc, &aligned, &profile).unwrap());
        prop_assert_eq!(out.symbols(), fixture.doc.symbols());
        for rec in out.phonemes() {
            prop_assert!(rec.duration_ms >= 1);
            for p in &rec.pitch_points {
                prop_assert!((MIN_PITCH_HZ..=MAX_PITCH_HZ).contains(&p.frequency_hz));
            }
        }
    }

    #[test]
    fn duration_scaling_is_monotone(d in 1u32..10_000, a in -99.0f64..400.0, b in -99.0f64..400.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (lo, hi) = (RateFactor::new(lo).unwrap(), RateFactor::new(hi).unwrap());
        prop_assert!(scale_duration(d, lo) <= scale_duration(d, hi));
        prop_assert!(scale_duration(d, hi) <= scale_duration(d + 1, hi));
    }

    #[test]
    fn diff_sign_and_scale_equivariance(s in 1.0f64..1000.0, m in 1.0f64..1000.0, k in 0.01f64..100.0) {
        let d = duration_diff(s, m);
        prop_assert_eq!(d > 0.0, m > s);
        prop_assert_eq!(d < 0.0, m < s);
        prop_assert!((duration_diff(s * k, m * k) - d).abs() <= 1e-9 * d.abs().max(1.0));
    }

    #[test]
    fn profile_json_round_trips(seed in any::<u64>()) {
        let profile = random_profile(&mut StdRng::seed_from_u64(seed));
        let back = EmotionProfile::from_json_str(&profile.to_json_string()).unwrap();
        prop_assert_eq!(back, profile);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derivation_ignores_corpus_order(seed in any::<u64>()) {
        let lexicon = Lexicon::sample();
        let mut rng = StdRng::seed_from_u64(seed);
        let profile = random_profile(&mut rng);
        let mut pairs = Vec::new();
        for _ in 0..6 {
            let fixture = random_fixture(&mut rng, &lexicon, 3, true);
            let aligned = align(&fixture.doc, &fixture.sentence, &lexicon, false).unwrap();
            let applied = apply_emotion(&fixture.doc, &aligned, &profile).unwrap();
            let (tier, pitch) = pho_to_recording(&applied);
            let recorded = measure_recording(&tier, &pitch, &fixture.sentence, &lexicon, false).unwrap();
            pairs.push((measure_pho(&fixture.doc, &aligned), recorded));
        }
        let forward = derive_profile(&pairs, "x").unwrap();
        pairs.shuffle(&mut rng);
        let shuffled = derive_profile(&pairs, "x").unwrap();
        prop_assert_eq!(forward, shuffled);
    }
}
