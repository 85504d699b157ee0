//! Acceptance checks, one line per criterion:
//!
//! ```text
//! [PASS] AC1 table fidelity: 99/99 factors (0.001 s)
//! ```
//!
//! Runs without the libtest harness so the lines show in `cargo test`.

mod common;

use std::cell::Cell;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{arb_document, fixture_dir, random_fixture, random_profile};
use emotif::analysis::{
    derive_profile, duration_diff, end_pitch_diff, measure_pho, measure_recording, pho_to_recording, start_pitch_diff,
};
use emotif::cli::syllabify_text;
use emotif::evaluation::{
    check_recognition_threshold, clarity_rate, confusion_matrix, intelligibility_accuracy, naturalness_report,
    read_intelligibility, read_responses,
};
use emotif::lexicon::{align, PitchEdge, ProsodicContext, Role, SyllablePosition, WordPosition};
use emotif::pho::{emit_pho, parse_pho, PhoItem};
use emotif::transform::{MAX_PITCH_HZ, MIN_PITCH_HZ};
use emotif::{apply_emotion, builtin_profile, Emotion, EmotionProfile, Lexicon};
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

struct Criterion {
    id: &'static str,
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

// Published factors, one row per syllable position: (c1, c2, vowel) for
// duration and (start, end) for pitch; first word rows, then last word
// rows, then the single other-word entry.
const HAPPY_DUR: [[i32; 3]; 6] =
    [[-38, -32, 65], [4, -36, 61], [-11, 30, 89], [-16, 53, 174], [-5, 21, 252], [14, 60, 256]];
const HAPPY_DUR_OTHER: i32 = 21;
const HAPPY_PITCH: [[i32; 2]; 7] = [[132, 152], [133, 162], [173, 201], [205, 282], [243, 363], [288, 333], [226, 242]];
const ANGRY_DUR: [[i32; 3]; 6] = [[-36, 1, 12], [5, -3, 72], [-15, 5, 136], [-18, -10, 77], [-41, 5, 26], [9, -16, 58]];
const ANGRY_DUR_OTHER: i32 = 5;
const ANGRY_PITCH: [[i32; 2]; 7] = [[172, 183], [195, 260], [244, 237], [192, 232], [154, 207], [209, 202], [192, 205]];
const SAD_DUR: [[i32; 3]; 6] =
    [[-25, -40, 113], [-11, 40, 135], [8, -26, -40], [10, -7, 117], [8, 33, 169], [10, 10, 229]];
const SAD_DUR_OTHER: i32 = 33;
const SAD_PITCH: [[i32; 2]; 7] = [[123, 122], [96, 108], [107, 112], [88, 133], [89, 137], [116, 136], [113, 116]];

fn ac1_tables() -> Outcome {
    let mut checked = 0;
    let mut wrong = Vec::new();
    let words = [WordPosition::First, WordPosition::Last];
    let syllables = [SyllablePosition::First, SyllablePosition::Middle, SyllablePosition::Last];
    let roles = [Role::Consonant1, Role::Consonant2, Role::Vowel];
    for (emotion, dur, dur_other, pitch) in [
        (Emotion::Happy, HAPPY_DUR, HAPPY_DUR_OTHER, HAPPY_PITCH),
        (Emotion::Angry, ANGRY_DUR, ANGRY_DUR_OTHER, ANGRY_PITCH),
        (Emotion::Sad, SAD_DUR, SAD_DUR_OTHER, SAD_PITCH),
    ] {
        let p = builtin_profile(emotion);
        // the other-word factor applies to every syllable and role
        for syl in syllables {
            for role in roles {
                let ctx = ProsodicContext::new(WordPosition::Other, syl, role);
                if p.duration(ctx).percent() != f64::from(dur_other) {
                    wrong.push(format!("{emotion} other-word duration {ctx}"));
                }
            }
        }
        let mut check = |label: String, got: f64, want: i32| {
            checked += 1;
            if got != f64::from(want) {
                wrong.push(format!("{emotion} {label}: {got} != {want}"));
            }
        };
        for (w, word) in words.iter().enumerate() {
            for (s, syl) in syllables.iter().enumerate() {
                let row = w * 3 + s;
                for (r, role) in roles.iter().enumerate() {
                    let ctx = ProsodicContext::new(*word, *syl, *role);
                    check(format!("duration {ctx}"), p.duration(ctx).percent(), dur[row][r]);
                }
                for (e, edge) in [PitchEdge::Start, PitchEdge::End].iter().enumerate() {
                    check(format!("pitch {word}/{syl}/{edge}"), p.pitch(*word, *syl, *edge).percent(), pitch[row][e]);
                }
            }
        }
        check(
            "duration other-word".into(),
            p.duration(ProsodicContext::new(WordPosition::Other, SyllablePosition::First, Role::Vowel)).percent(),
            dur_other,
        );
        for (e, edge) in [PitchEdge::Start, PitchEdge::End].iter().enumerate() {
            check(
                format!("pitch other-word/{edge}"),
                p.pitch(WordPosition::Other, SyllablePosition::Middle, *edge).percent(),
                pitch[6][e],
            );
        }
    }
    if wrong.is_empty() && checked == 99 {
        Ok(format!("{checked}/99 factors"))
    } else {
        Err(format!("{checked} checked, mismatches: {wrong:?}"))
    }
}

fn ac2_formulas() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xD1FF);
    for i in 0..1000 {
        let s: f64 = rng.gen_range(1.0..1000.0);
        let m: f64 = if i % 50 == 0 { s } else { rng.gen_range(1.0..1000.0) };
        let oracle = (m - s) / s * 100.0;
        let got = [
            duration_diff(s, m),
            start_pitch_diff(Some(s), Some(m)).map_err(|e| e.to_string())?,
            end_pitch_diff(Some(s), Some(m)).map_err(|e| e.to_string())?,
        ];
        if got.iter().any(|&g| g != oracle) {
            return Err(format!("s={s} m={m}: oracle {oracle}, got {got:?}"));
        }
    }
    Ok("1000 pairs, exact".into())
}

fn ac3_round_trip() -> Outcome {
    let (unvoiced, multi, comments, cases) = (Cell::new(0), Cell::new(0), Cell::new(0), Cell::new(0));
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    runner
        .run(&arb_document(), |doc| {
            cases.set(cases.get() + 1);
            for item in &doc.items {
                match item {
                    PhoItem::Phoneme(r) if r.pitch_points.is_empty() => unvoiced.set(unvoiced.get() + 1),
                    PhoItem::Phoneme(r) if r.pitch_points.len() > 1 => multi.set(multi.get() + 1),
                    PhoItem::Comment(_) => comments.set(comments.get() + 1),
                    _ => {}
                }
            }
            let back = parse_pho(&emit_pho(&doc)).expect("emitted text parses");
            proptest::prop_assert_eq!(back, doc);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    if cases.get() < 50 || unvoiced.get() == 0 || multi.get() == 0 || comments.get() == 0 {
        return Err(format!("corpus too thin: {} docs", cases.get()));
    }
    Ok(format!(
        "{} documents ({} unvoiced, {} multi-point, {} comments)",
        cases.get(),
        unvoiced.get(),
        multi.get(),
        comments.get()
    ))
}

fn ac4_inverse() -> Outcome {
    let lexicon = Lexicon::sample();
    let mut summary = Vec::new();
    for emotion in Emotion::ALL {
        let profile = builtin_profile(emotion);
        let mut rng = StdRng::seed_from_u64(emotion.ordinal() as u64 + 40);
        let mut pairs = Vec::new();
        for _ in 0..20 {
            let fixture = random_fixture(&mut rng, &lexicon, 4, true);
            let aligned = align(&fixture.doc, &fixture.sentence, &lexicon, false).map_err(|e| e.to_string())?;
            let applied = apply_emotion(&fixture.doc, &aligned, &profile).map_err(|e| e.to_string())?;
            let (tier, pitch) = pho_to_recording(&applied);
            let recorded =
                measure_recording(&tier, &pitch, &fixture.sentence, &lexicon, false).map_err(|e| e.to_string())?;
            pairs.push((measure_pho(&fixture.doc, &aligned), recorded));
        }
        let report = derive_profile(&pairs, emotion.name()).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        let mut sampled = 0;
        for (ctx, &n) in EmotionProfile::duration_cells().iter().zip(&report.duration_counts) {
            if n > 0 {
                sampled += 1;
                let err = (report.profile.duration(*ctx).percent() - profile.duration(*ctx).percent()).abs();
                worst = worst.max(err);
                if err > 1.0 {
                    return Err(format!("{emotion} duration {ctx}: off by {err:.3}pp"));
                }
            }
        }
        for (&(w, s, e), &n) in EmotionProfile::pitch_cells().iter().zip(&report.pitch_counts) {
            if n > 0 {
                sampled += 1;
                let err = (report.profile.pitch(w, s, e).percent() - profile.pitch(w, s, e).percent()).abs();
                worst = worst.max(err);
                if err > 1.0 {
                    return Err(format!("{emotion} pitch {w}/{s}/{e}: off by {err:.3}pp"));
                }
            }
        }
        summary.push(format!("{emotion} {sampled}/33 cells, max {worst:.3}pp"));
    }
    Ok(summary.join("; "))
}

fn ac5_identity() -> Outcome {
    let lexicon = Lexicon::sample();
    let neutral = EmotionProfile::neutral();
    let mut rng = StdRng::seed_from_u64(5);
    for i in 0..100 {
        let fixture = random_fixture(&mut rng, &lexicon, 5, false);
        let aligned = align(&fixture.doc, &fixture.sentence, &lexicon, false).map_err(|e| e.to_string())?;
        let out = apply_emotion(&fixture.doc, &aligned, &neutral).map_err(|e| e.to_string())?;
        if out != fixture.doc {
            return Err(format!("document {i} changed"));
        }
    }
    Ok("100 documents unchanged".into())
}

fn ac6_table3() -> Outcome {
    let file = std::fs::File::open(fixture_dir().join("scoring/perception.csv")).map_err(|e| e.to_string())?;
    let matrix = confusion_matrix(&read_responses(file).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let expected = [[95.0, 5.0, 0.0], [2.5, 96.25, 1.25], [0.0, 1.25, 98.75]];
    for (emotion, want) in Emotion::ALL.iter().zip(expected) {
        let row = matrix.row_percentages(*emotion).ok_or("empty row")?;
        if row.iter().zip(want).any(|(g, w)| (g - w).abs() > 0.01) {
            return Err(format!("{emotion}: {row:?} != {want:?}"));
        }
    }
    if !check_recognition_threshold(&matrix, 60.0).passed {
        return Err("threshold check failed".into());
    }
    Ok("rows 95/5/0, 2.5/96.25/1.25, 0/1.25/98.75; 60% threshold passes".into())
}

fn ac7_metrics() -> Outcome {
    let dir = fixture_dir().join("scoring");
    let open = |name: &str| std::fs::File::open(dir.join(name)).map_err(|e| e.to_string());
    let records = read_intelligibility(open("intelligibility.csv")?).map_err(|e| e.to_string())?;
    let accuracy = intelligibility_accuracy(&records).map_err(|e| e.to_string())?;
    let clarity = clarity_rate(&records).map_err(|e| e.to_string())?;
    let responses = read_responses(open("naturalness.csv")?).map_err(|e| e.to_string())?;
    let nat = naturalness_report(&responses).map_err(|e| e.to_string())?;
    let near = |got: f64, want: f64| (got - want).abs() <= 0.05;
    let per = |e| nat.per_emotion_pct.get(&e).copied().unwrap_or(f64::NAN);
    let line = format!(
        "accuracy {accuracy:.2}, clarity {clarity:.2}, naturalness {:.2}/{:.2}/{:.2}; overall {:.2} by responses, {:.2} by emotion mean (an overall figure of 75.6 is not reachable from 90/73.3/60 with equal groups)",
        per(Emotion::Happy),
        per(Emotion::Angry),
        per(Emotion::Sad),
        nat.overall_pct,
        nat.mean_of_emotions_pct
    );
    if near(accuracy, 93.3)
        && near(clarity, 62.8)
        && near(per(Emotion::Happy), 90.0)
        && near(per(Emotion::Angry), 73.3)
        && near(per(Emotion::Sad), 60.0)
    {
        Ok(line)
    } else {
        Err(line)
    }
}

fn ac8_syllables() -> Outcome {
    let table = [
        ("aku suka sekali", "a-ku su-ka se-ka-li", "223"),
        ("senior amat cantik", "se-ni-or a-mat can-tik", "322"),
        ("kamu diam saja", "ka-mu di-am sa-ja", "222"),
        ("pergi kalian berdua", "per-gi ka-li-an ber-du-a", "233"),
        ("hilang hadiah itu", "hi-lang ha-di-ah i-tu", "232"),
        ("lupakan saja aku", "lu-pa-kan sa-ja a-ku", "322"),
    ];
    for (sentence, split, digits) in table {
        let got = syllabify_text(&[sentence.to_string()]).map_err(|e| e.to_string())?;
        if got != (split.to_string(), digits.to_string()) {
            return Err(format!("{sentence}: {got:?}"));
        }
    }
    Ok("6 sentences".into())
}

#[cfg(unix)]
fn ac9_end_to_end() -> Outcome {
    use std::os::unix::fs::PermissionsExt;
    let e2e = fixture_dir().join("e2e");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let stub = |name: &str, body: &str| -> Result<std::path::PathBuf, String> {
        let path = dir.path().join(name);
        std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).map_err(|e| e.to_string())?;
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).map_err(|e| e.to_string())?;
        Ok(path)
    };
    let voice = dir.path().join("id1");
    std::fs::write(&voice, "voice").map_err(|e| e.to_string())?;
    let mbrola = stub("mbrola", "printf 'RIFF....WAVE' > \"$3\"")?;
    for (emotion, sentence) in [("happy", "aku suka sekali"), ("angry", "kamu diam saja"), ("sad", "hilang hadiah itu")]
    {
        let espeak =
            stub(&format!("espeak-{emotion}"), &format!("cat '{}'", e2e.join(format!("{emotion}.std.pho")).display()))?;
        let wav = dir.path().join(format!("{emotion}.wav"));
        let kept = dir.path().join(format!("{emotion}.pho"));
        let out = Command::new(env!("CARGO_BIN_EXE_emotif"))
            .args(["synth", "--text", sentence, "--emotion", emotion])
            .arg("--out")
            .arg(&wav)
            .arg("--keep-pho")
            .arg(&kept)
            .env("EMOTIF_ESPEAK_BIN", &espeak)
            .env("EMOTIF_MBROLA_BIN", &mbrola)
            .env("EMOTIF_VOICE_DB", &voice)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("{emotion}: {}", String::from_utf8_lossy(&out.stderr)));
        }
        let expected = std::fs::read(e2e.join(format!("{emotion}.expected.pho"))).map_err(|e| e.to_string())?;
        if std::fs::read(&kept).map_err(|e| e.to_string())? != expected {
            return Err(format!("{emotion}: kept .pho differs from the expected file"));
        }
        if std::fs::metadata(&wav).map(|m| m.len()).unwrap_or(0) == 0 {
            return Err(format!("{emotion}: no audio written"));
        }
    }
    Ok("happy, angry, sad byte-equal".into())
}

#[cfg(not(unix))]
fn ac9_end_to_end() -> Outcome {
    Err("stub executables need a Unix shell".into())
}

fn ac10_bounds() -> Outcome {
    let lexicon = Lexicon::sample();
    let mut rng = StdRng::seed_from_u64(10);
    let (mut min_ms, mut min_hz, mut max_hz) = (u32::MAX, f64::MAX, f64::MIN);
    for i in 0..10_000 {
        let fixture = random_fixture(&mut rng, &lexicon, 3, false);
        let profile = random_profile(&mut rng);
        let aligned = align(&fixture.doc, &fixture.sentence, &lexicon, false).map_err(|e| e.to_string())?;
        let out = apply_emotion(&fixture.doc, &aligned, &profile).map_err(|e| e.to_string())?;
        for rec in out.phonemes() {
            min_ms = min_ms.min(rec.duration_ms);
            for p in &rec.pitch_points {
                min_hz = min_hz.min(p.frequency_hz);
                max_hz = max_hz.max(p.frequency_hz);
            }
        }
        if min_ms < 1 || min_hz < MIN_PITCH_HZ || max_hz > MAX_PITCH_HZ {
            return Err(format!("case {i}: duration {min_ms} ms, pitch {min_hz}..{max_hz} Hz"));
        }
    }
    Ok(format!("10000 cases; min duration {min_ms} ms, pitch {min_hz}..{max_hz} Hz"))
}

fn main() {
    let criteria = [
        Criterion { id: "AC1", title: "table fidelity", limit: Duration::from_secs(1), run: ac1_tables },
        Criterion { id: "AC2", title: "difference formulas", limit: Duration::from_secs(1), run: ac2_formulas },
        Criterion { id: "AC3", title: "parse/emit round trip", limit: Duration::from_secs(5), run: ac3_round_trip },
        Criterion { id: "AC4", title: "derive inverts apply", limit: Duration::from_secs(10), run: ac4_inverse },
        Criterion { id: "AC5", title: "neutral identity", limit: Duration::from_secs(5), run: ac5_identity },
        Criterion { id: "AC6", title: "perception matrix", limit: Duration::from_secs(1), run: ac6_table3 },
        Criterion { id: "AC7", title: "evaluation metrics", limit: Duration::from_secs(1), run: ac7_metrics },
        Criterion { id: "AC8", title: "syllabification", limit: Duration::from_secs(1), run: ac8_syllables },
        Criterion { id: "AC9", title: "synth end to end", limit: Duration::from_secs(5), run: ac9_end_to_end },
        Criterion { id: "AC10", title: "safety bounds", limit: Duration::from_secs(30), run: ac10_bounds },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; took longer than {:?}", c.limit)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("[PASS] {} {}: {detail} ({:.3} s)", c.id, c.title, elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {}: {detail} ({:.3} s)", c.id, c.title, elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
