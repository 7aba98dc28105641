use nonstat_cli::batch::{run_batch, BatchOptions};
use nonstat_cli::config::Settings;
use nonstat_cli::corpus::write_corpus;
use nonstat_cli::pipeline::label;
use nonstat_cli::records::read_manifest;
use nonstat_core::audio::{synth_signal, SignalKind, SynthSpec, CLIP_SECONDS};

fn settings(j: usize) -> Settings {
    Settings {
        surrogates: j,
        ..Settings::default()
    }
}

#[test]
fn white_noise_is_mostly_stationary() {
    let s = settings(16);
    let stationary = (0..30u64)
        .filter(|&seed| {
            let mut clip = synth_signal(&SynthSpec::random(SignalKind::WhiteNoise, seed), CLIP_SECONDS).unwrap();
            clip.source_id = format!("white_{seed}");
            !label(&clip, &s).unwrap().result.label
        })
        .count();
    assert!(stationary >= 27, "{stationary}/30");
}

#[test]
fn impulse_train_is_non_stationary() {
    let clip = synth_signal(&SynthSpec::new(SignalKind::ImpulseTrain, 1), CLIP_SECONDS).unwrap();
    assert!(label(&clip, &settings(50)).unwrap().result.label);
}

#[test]
fn mixed_corpus_fraction_is_near_design() {
    let dir = tempfile::tempdir().unwrap();
    let kinds: Vec<SignalKind> = SignalKind::STATIONARY.iter().chain(SignalKind::NON_STATIONARY.iter()).copied().collect();
    // 17 clips per kind, minus one of the third kind in each class: 50 + 50.
    let manifest = write_corpus(dir.path(), &kinds, 17, 21, CLIP_SECONDS).unwrap();
    let records: Vec<_> = read_manifest(&manifest)
        .unwrap()
        .into_iter()
        .filter(|r| r.id != "lowpass_rumble_0016" && r.id != "tone_step_0016")
        .collect();
    assert_eq!(records.len(), 100);
    let summary = run_batch(&records, &settings(16), BatchOptions::default(), std::io::sink()).unwrap();
    assert!(summary.failed.is_empty());
    let frac = summary.non_stationary_fraction.unwrap();
    assert!((0.4..=0.6).contains(&frac), "{frac}");
}
