//! Wall-clock timing of the full labeling path.

use nonstat_core::audio::{synth_signal, SignalKind, SynthSpec, CLIP_SECONDS};
use nonstat_core::ins::window_for_scale;
use nonstat_core::seed;

use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::pipeline::{label, Labeled};
use crate::records::{BenchReport, Machine, ScaleStat, Stat};

pub const MIN_BENCH_CLIPS: usize = 3;

fn bench_clips(n: usize, base_seed: u64) -> Result<Vec<nonstat_core::audio::AudioClip>> {
    let kinds: Vec<SignalKind> = SignalKind::STATIONARY.iter().chain(SignalKind::NON_STATIONARY.iter()).copied().collect();
    (0..n)
        .map(|i| {
            let kind = kinds[i % kinds.len()];
            let spec = SynthSpec::random(kind, seed::derive_named(base_seed, &format!("bench/{i}")));
            let mut clip = synth_signal(&spec, CLIP_SECONDS)?;
            clip.source_id = format!("bench_{i:03}");
            Ok(clip)
        })
        .collect()
}

fn run(clips: &[nonstat_core::audio::AudioClip], settings: &Settings) -> Result<Vec<Labeled>> {
    // Clips run one after another; each clip may still use every core.
    clips.iter().map(|c| label(c, settings)).collect()
}

/// Times `n` synthetic clips at the given settings. With `scaling`, the clips
/// are timed again at twice the surrogate count.
pub fn run_bench(n: usize, settings: &Settings, scaling: bool) -> Result<BenchReport> {
    if n < MIN_BENCH_CLIPS {
        return Err(CliError::Usage(format!("bench needs at least {MIN_BENCH_CLIPS} clips")));
    }
    let clips = bench_clips(n, settings.seed)?;
    let scales = settings.scales();
    let runs = settings.thread_pool()?.install(|| run(&clips, settings))?;

    let totals: Vec<f64> = runs.iter().map(|r| r.elapsed_ms).collect();
    let per_scale = scales
        .iter()
        .enumerate()
        .map(|(k, &scale)| {
            let s = Stat::of(&runs.iter().map(|r| r.timing.per_scale_ms[k]).collect::<Vec<_>>());
            Ok(ScaleStat {
                scale,
                window_len: window_for_scale(scale, clips[0].len())?,
                mean_ms: s.mean_ms,
                std_ms: s.std_ms,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ins_total = Stat::of(&totals);

    let doubled_j_ratio = if scaling {
        let doubled = Settings {
            surrogates: 2 * settings.surrogates,
            ..settings.clone()
        };
        let runs2 = settings.thread_pool()?.install(|| run(&clips, &doubled))?;
        let mean2 = Stat::of(&runs2.iter().map(|r| r.elapsed_ms).collect::<Vec<_>>()).mean_ms;
        Some(mean2 / ins_total.mean_ms)
    } else {
        None
    };

    Ok(BenchReport {
        clips: n,
        clip_seconds: CLIP_SECONDS,
        j_surrogates: settings.surrogates,
        ins_total,
        surrogate_gen: Stat::of(&runs.iter().map(|r| r.timing.surrogate_ms).collect::<Vec<_>>()),
        per_scale,
        per_scale_sum: Stat::of(&runs.iter().map(|r| r.timing.per_scale_ms.iter().sum()).collect::<Vec<f64>>()),
        hlc: Stat::of(&runs.iter().map(|r| r.hlc_ms).collect::<Vec<_>>()),
        doubled_j_ratio,
        machine: Machine::current(settings.jobs),
    })
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{} clips of {} s, J = {}", self.clips, self.clip_seconds, self.j_surrogates)?;
        let line = |f: &mut std::fmt::Formatter<'_>, name: &str, s: &Stat| {
            writeln!(f, "{name:<16} {:>10.1} ± {:.1} ms", s.mean_ms, s.std_ms)
        };
        line(f, "INS + HLC", &self.ins_total)?;
        line(f, "surrogates", &self.surrogate_gen)?;
        for s in &self.per_scale {
            writeln!(f, "scale {:<10} {:>10.1} ± {:.1} ms  (window {})", s.scale, s.mean_ms, s.std_ms, s.window_len)?;
        }
        line(f, "sum of scales", &self.per_scale_sum)?;
        line(f, "labeling", &self.hlc)?;
        if let Some(r) = self.doubled_j_ratio {
            writeln!(f, "time ratio at 2J  {r:>9.2}")?;
        }
        write!(
            f,
            "machine          {} {}, {} logical CPUs, {} workers",
            self.machine.os, self.machine.arch, self.machine.logical_cpus, self.machine.worker_threads
        )
    }
}
