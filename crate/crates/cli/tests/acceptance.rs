//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion fails.
//!
//! `NONSTAT_ACCEPTANCE_J` overrides the surrogate count used by the
//! synthetic validation (default 16; 50 reproduces the default
//! configuration at roughly three times the runtime).

use std::process::Command;
use std::time::Instant;

use nonstat_cli::bench::run_bench;
use nonstat_cli::config::Settings;
use nonstat_cli::corpus::write_corpus;
use nonstat_cli::records::LabelRecord;
use nonstat_cli::validate::validate_synthetic;
use nonstat_core::audio::{synth_signal, AudioClip, SignalKind, SynthSpec, CLIP_SECONDS};
use nonstat_core::hlc::{hlc_label, majority, HlcConfig, RegionPartition};
use nonstat_core::ins::{ins_at_scale, ins_curve, InsConfig, InsCurve, InsPoint};
use nonstat_core::seed;
use nonstat_core::surrogate::{generate_surrogates, SurrogateGenerator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_clip(rng: &mut ChaCha8Rng, kinds: &[SignalKind], id: String) -> AudioClip {
    let kind = kinds[rng.random_range(0..kinds.len())];
    let mut clip = synth_signal(&SynthSpec::random(kind, rng.random()), CLIP_SECONDS).expect("valid synthetic spec");
    clip.source_id = id;
    clip
}

fn magnitudes(x: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf.iter().map(|c| c.norm()).collect()
}

/// Surrogates keep every DFT magnitude and the energy of their source.
fn surrogate_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_mag, mut worst_energy) = (0.0f64, 0.0f64);
    for c in 0..100 {
        let clip = random_clip(&mut rng, &SignalKind::ALL, format!("c{c}"));
        let reference = magnitudes(&clip.samples);
        let energy: f64 = clip.samples.iter().map(|x| x * x).sum();
        for s in generate_surrogates(&clip, 4, c).unwrap().surrogates {
            for (a, b) in magnitudes(&s.samples).iter().zip(&reference) {
                if *b > 0.0 {
                    worst_mag = worst_mag.max((a - b).abs() / b);
                }
            }
            let e: f64 = s.samples.iter().map(|x| x * x).sum();
            worst_energy = worst_energy.max(((e - energy) / energy).abs());
        }
    }
    Outcome {
        pass: worst_mag < 1e-6 && worst_energy < 1e-6,
        detail: format!("100 clips x 4 surrogates: max bin rel. error {worst_mag:.1e}, max energy rel. error {worst_energy:.1e} (< 1e-6)"),
    }
}

/// A surrogate used as input is stationary by construction, so the test
/// should reject at the nominal false-alarm rate.
fn null_calibration() -> Outcome {
    let cfg = InsConfig::default();
    let trials = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut rejections = 0;
    for t in 0..trials {
        let source = random_clip(&mut rng, &SignalKind::ALL, format!("source{t}"));
        let input = SurrogateGenerator::new(&source).unwrap().surrogate(seed::derive_named(t, "input"), 0);
        let set = generate_surrogates(&input, cfg.j_surrogates, seed::derive_named(t, "null")).unwrap();
        let p = ins_at_scale(&input, &set, 0.1, &cfg).unwrap();
        rejections += p.is_non_stationary() as usize;
    }
    let rate = rejections as f64 / trials as f64;
    let eps = cfg.epsilon;
    let band = 3.0 * (eps * (1.0 - eps) / trials as f64).sqrt();
    Outcome {
        pass: (rate - eps).abs() <= band,
        detail: format!("{rejections}/{trials} rejections at scale 0.1, J = {}: rate {rate:.3} (target {eps} ± {band:.3})", cfg.j_surrogates),
    }
}

fn synthetic_curve(values: &[(f64, f64)]) -> InsCurve {
    InsCurve {
        clip_id: "hlc".into(),
        config_fingerprint: String::new(),
        seed: 0,
        points: RegionPartition::default()
            .scales()
            .into_iter()
            .zip(values)
            .map(|(scale, &(ins, gamma))| InsPoint {
                scale,
                window_len: 0,
                ins,
                gamma,
                theta1: ins * ins,
                theta0_mean: 1.0,
                gamma_degenerate: false,
            })
            .collect(),
    }
}

/// Region-flag truth table, strict threshold, and alpha monotonicity.
fn hlc_logic() -> Outcome {
    let cfg = HlcConfig::default();
    let mut table_ok = true;
    for mask in 0u8..8 {
        let flags: Vec<bool> = (0..3).map(|k| mask >> k & 1 == 1).collect();
        let values: Vec<(f64, f64)> = (0..9).map(|i| if flags[i / 3] { (25.0, 2.0) } else { (3.0, 2.0) }).collect();
        let r = hlc_label(&synthetic_curve(&values), &cfg).unwrap();
        let expected = flags.iter().filter(|&&f| f).count() >= 2;
        table_ok &= r.region_flags == flags && r.label == expected && majority(&flags) == expected;
    }
    let boundary = hlc_label(&synthetic_curve(&[(10.0, 1.0); 9]), &cfg).unwrap();
    let boundary_ok = !boundary.label && boundary.ns_scales.iter().all(Vec::is_empty);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = 0;
    for _ in 0..1000 {
        let values: Vec<(f64, f64)> = (0..9).map(|_| (rng.random_range(0.0..60.0), rng.random_range(0.8..3.0))).collect();
        let curve = synthetic_curve(&values);
        let a1 = rng.random_range(1.01..30.0);
        let a2 = rng.random_range(a1..40.0);
        let lo = hlc_label(&curve, &HlcConfig { alpha: a1, ..cfg.clone() }).unwrap();
        let hi = hlc_label(&curve, &HlcConfig { alpha: a2, ..cfg.clone() }).unwrap();
        let shrinks = hi.ns_scales.iter().zip(&lo.ns_scales).all(|(h, l)| h.iter().all(|s| l.contains(s)));
        if (hi.label && !lo.label) || !shrinks {
            violations += 1;
        }
    }
    Outcome {
        pass: table_ok && boundary_ok && violations == 0,
        detail: format!(
            "truth table {}, boundary ins == alpha*gamma {}, alpha-monotonicity violations {violations}/1000",
            if table_ok { "8/8" } else { "MISMATCH" },
            if boundary_ok { "excluded" } else { "INCLUDED" }
        ),
    }
}

/// Labeling accuracy on synthetic analogs of stationary and non-stationary sounds.
fn synthetic_validation() -> Outcome {
    let j = std::env::var("NONSTAT_ACCEPTANCE_J").ok().and_then(|v| v.parse().ok()).unwrap_or(16);
    let settings = Settings {
        surrogates: j,
        seed: 2024,
        ..Settings::default()
    };
    let report = validate_synthetic(100, &settings).unwrap();
    println!("{report}");
    let ns_ok = SignalKind::NON_STATIONARY.iter().all(|&k| report.row(k).unwrap().accuracy_pct >= 95.0);
    let st_ok = SignalKind::STATIONARY.iter().all(|&k| report.row(k).unwrap().accuracy_pct >= 90.0);
    let per_kind: Vec<String> = report.rows.iter().map(|r| format!("{} {:.0}%", r.kind, r.accuracy_pct)).collect();
    Outcome {
        pass: ns_ok && st_ok && report.macro_average_pct >= 90.0,
        detail: format!("n = 100/kind, J = {j}: {}; macro {:.1}% (NS >= 95, S >= 90, macro >= 90)", per_kind.join(", "), report.macro_average_pct),
    }
}

/// Batch output does not depend on the number of workers.
fn batch_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let kinds: Vec<SignalKind> = SignalKind::ALL.to_vec();
    let manifest = write_corpus(dir.path(), &kinds, 8, 5, CLIP_SECONDS).unwrap();
    let text = std::fs::read_to_string(&manifest).unwrap();
    let first50: String = text.lines().take(50).map(|l| format!("{l}\n")).collect();
    let manifest50 = dir.path().join("manifest50.jsonl");
    std::fs::write(&manifest50, first50).unwrap();

    let run = |jobs: &str, extra: &[&str]| -> String {
        let out = Command::new(env!("CARGO_BIN_EXE_nonstat"))
            .args(["batch", manifest50.to_str().unwrap(), "-J", "16", "--jobs", jobs])
            .args(extra)
            .env_remove("NONSTAT_SEED")
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    let a = run("1", &["--sorted", "--no-timing"]);
    let b = run("8", &["--sorted", "--no-timing"]);
    let content = |s: &str| {
        let mut v: Vec<LabelRecord> = s
            .lines()
            .map(|l| {
                let mut r: LabelRecord = serde_json::from_str(l).unwrap();
                r.elapsed_ms = 0.0;
                r
            })
            .collect();
        v.sort_by(|x, y| x.id.cmp(&y.id));
        v
    };
    let timed_1 = content(&run("1", &[]));
    let timed_8 = content(&run("8", &[]));
    let lines = a.lines().count();
    Outcome {
        pass: lines == 50 && a == b && timed_1 == timed_8 && content(&a) == timed_1,
        detail: format!(
            "50-clip manifest, --jobs 1 vs 8: {lines} records; sorted output byte-identical: {}; default-mode content identical (modulo order/elapsed_ms): {}",
            a == b,
            timed_1 == timed_8
        ),
    }
}

/// `ins^2 * theta0_mean == theta1` and level invariance of every point.
fn ratio_and_amplitude() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let scales = RegionPartition::default().scales();
    let (mut worst_ratio, mut worst_ins, mut worst_gamma) = (0.0f64, 0.0f64, 0.0f64);
    for c in 0..100 {
        let clip = random_clip(&mut rng, &SignalKind::ALL, format!("amp{c}"));
        let gain = 10f64.powf(rng.random_range(-1.3..1.3));
        let cfg = InsConfig {
            j_surrogates: 16,
            seed: c,
            ..InsConfig::default()
        };
        let a = ins_curve(&clip, &scales, &cfg).unwrap();
        let b = ins_curve(&clip.scaled(gain), &scales, &cfg).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            for x in [p, q] {
                worst_ratio = worst_ratio.max((x.ins * x.ins * x.theta0_mean - x.theta1).abs() / x.theta1.max(f64::MIN_POSITIVE));
            }
            worst_ins = worst_ins.max((p.ins - q.ins).abs() / p.ins.max(f64::MIN_POSITIVE));
            worst_gamma = worst_gamma.max((p.gamma - q.gamma).abs() / p.gamma);
        }
    }
    Outcome {
        pass: worst_ratio <= 1e-9 && worst_ins <= 1e-6 && worst_gamma <= 1e-6,
        detail: format!(
            "100 clips x 9 scales, gains 0.05..20: ratio identity max rel. error {worst_ratio:.1e} (<= 1e-9); ins {worst_ins:.1e}, gamma {worst_gamma:.1e} under scaling (<= 1e-6)"
        ),
    }
}

/// Timing report of the full labeling path is produced and self-consistent.
fn bench_report() -> Outcome {
    let settings = Settings {
        jobs: 1,
        ..Settings::default()
    };
    let report = run_bench(5, &settings, true).unwrap();
    println!("{report}");
    let stats = [report.ins_total, report.surrogate_gen, report.per_scale_sum, report.hlc];
    let non_negative = stats.iter().all(|s| s.mean_ms >= 0.0 && s.std_ms >= 0.0)
        && report.per_scale.iter().all(|s| s.mean_ms >= 0.0 && s.std_ms >= 0.0);
    let scale_sum: f64 = report.per_scale.iter().map(|s| s.mean_ms).sum();
    let accounting = report.per_scale_sum.mean_ms <= report.ins_total.mean_ms
        && (scale_sum - report.per_scale_sum.mean_ms).abs() <= 1e-9 * scale_sum.max(1.0)
        && report.surrogate_gen.mean_ms + report.per_scale_sum.mean_ms + report.hlc.mean_ms <= report.ins_total.mean_ms;
    Outcome {
        pass: non_negative && accounting && report.per_scale.len() == 9,
        detail: format!(
            "J = {}: INS+HLC {:.1} ± {:.1} ms per 1.5 s clip (reference hardware 12597.1 ± 25.3 ms, not asserted); per-scale sum {:.1} ms <= total; 2J/J time ratio {:.2}",
            report.j_surrogates,
            report.ins_total.mean_ms,
            report.ins_total.std_ms,
            report.per_scale_sum.mean_ms,
            report.doubled_j_ratio.unwrap_or(f64::NAN)
        ),
    }
}

fn main() {
    // `cargo test -- <filter>` style arguments are accepted and ignored.
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("surrogate invariants", surrogate_invariants),
        ("null calibration", null_calibration),
        ("HLC logic", hlc_logic),
        ("synthetic validation", synthetic_validation),
        ("batch determinism", batch_determinism),
        ("ratio identity and amplitude invariance", ratio_and_amplitude),
        ("bench report", bench_report),
    ];
    let mut failed = 0;
    let mut lines = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        failed += !outcome.pass as usize;
        let line = format!("criterion {} [{verdict}] {name} ({:.1} s): {}", i + 1, start.elapsed().as_secs_f64(), outcome.detail);
        println!("{line}");
        lines.push(line);
    }
    println!("\nacceptance summary");
    for line in &lines {
        println!("{line}");
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
