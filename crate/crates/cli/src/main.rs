use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nonstat_core::audio::{SignalKind, SynthSpec, CLIP_SECONDS};
use nonstat_cli::batch::{run_batch, BatchOptions};
use nonstat_cli::bench::run_bench;
use nonstat_cli::config::{CommonArgs, Settings};
use nonstat_cli::corpus::{write_corpus, write_synth};
use nonstat_cli::error::{exit, CliError, Result};
use nonstat_cli::pipeline::{analyze, default_id, label, load_clip};
use nonstat_cli::plot::{plot_rows, write_plot_csv};
use nonstat_cli::records::read_manifest;
use nonstat_cli::validate::validate_synthetic;

/// Index of Non-Stationarity and hard stationarity labels for audio clips.
///
/// Exit codes: 0 success, 1 usage, 2 I/O, 3 precondition (e.g. clip too
/// short), 4 unsupported or malformed input format.
#[derive(Debug, Parser)]
#[command(name = "nonstat", version)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct ClipArgs {
    /// WAV file to analyze.
    wav: PathBuf,
    /// Offset of the 1.5 s analysis clip, in seconds.
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    /// Clip id (default: file stem); also keys the surrogate seed.
    #[arg(long)]
    id: Option<String>,
}

impl ClipArgs {
    fn id(&self) -> String {
        self.id.clone().unwrap_or_else(|| default_id(&self.wav))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the INS curve of one clip as JSON.
    Analyze(ClipArgs),
    /// Print the label record of one clip as a JSON line.
    Label(ClipArgs),
    /// Label every clip of a JSONL manifest.
    Batch {
        manifest: PathBuf,
        /// Write records in manifest order.
        #[arg(long)]
        sorted: bool,
        /// Record elapsed_ms = 0 (byte-identical reruns).
        #[arg(long)]
        no_timing: bool,
        /// Also write the summary as JSON.
        #[arg(long, value_name = "PATH")]
        summary: Option<PathBuf>,
    },
    /// Label accuracy on random synthetic clips of known stationarity.
    ValidateSynthetic {
        /// Clips per kind.
        #[arg(long, short = 'n', default_value_t = 100)]
        n: usize,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Time the full labeling path on synthetic clips.
    Bench {
        #[arg(long, default_value_t = 10)]
        clips: usize,
        /// Also time every clip at twice the surrogate count.
        #[arg(long)]
        scaling: bool,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Write `scale,ins,gamma,gamma_hlc` CSV for one clip.
    PlotData(ClipArgs),
    /// Write a synthetic signal, or with --count a corpus plus manifest.
    Synth {
        /// Signal kind (default: from the config file).
        #[arg(long)]
        kind: Option<String>,
        /// Generator parameter, repeatable.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Duration in seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Corpus mode: random clips per kind.
        #[arg(long, requires = "out_dir")]
        count: Option<usize>,
        /// Corpus directory.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        /// Comma-separated kinds for corpus mode (default: all validation kinds).
        #[arg(long, value_delimiter = ',')]
        kinds: Option<Vec<String>>,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    let mut out = output(path)?;
    let target = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    out.write_all(text.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(target, e))
}

fn to_json<T: serde::Serialize>(value: &T, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("serializable")
    } else {
        serde_json::to_string(value).expect("serializable")
    }
}

fn parse_kind(s: &str) -> Result<SignalKind> {
    s.parse().map_err(|e: nonstat_core::Error| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    let settings = Settings::resolve(&cli.common)?;
    let out = cli.common.out.as_deref();
    match cli.command {
        Command::Analyze(clip) => {
            let audio = load_clip(&clip.wav, clip.start, &clip.id())?;
            let (curve, _) = analyze(&audio, &settings)?;
            write_out(out, &to_json(&curve, true))
        }
        Command::Label(clip) => {
            let audio = load_clip(&clip.wav, clip.start, &clip.id())?;
            let mut record = label(&audio, &settings)?.record(&settings);
            record.path = Some(clip.wav.clone());
            record.start_sec = clip.start;
            write_out(out, &to_json(&record, false))
        }
        Command::Batch {
            manifest,
            sorted,
            no_timing,
            summary,
        } => {
            let records = read_manifest(&manifest)?;
            let opts = BatchOptions { sorted, no_timing };
            let result = run_batch(&records, &settings, opts, output(out)?)?;
            eprintln!("{result}");
            if let Some(path) = summary {
                write_out(Some(&path), &to_json(&result, true))?;
            }
            Ok(())
        }
        Command::ValidateSynthetic { n, json } => {
            let report = validate_synthetic(n, &settings)?;
            write_out(out, &if json { to_json(&report, true) } else { report.to_string() })
        }
        Command::Bench { clips, scaling, json } => {
            let report = run_bench(clips, &settings, scaling)?;
            write_out(out, &if json { to_json(&report, true) } else { report.to_string() })
        }
        Command::PlotData(clip) => {
            let audio = load_clip(&clip.wav, clip.start, &clip.id())?;
            let (curve, _) = analyze(&audio, &settings)?;
            let target = out.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
            write_plot_csv(output(out)?, &plot_rows(&curve, settings.alpha))
                .map_err(|e| CliError::io(target, io::Error::other(e)))
        }
        Command::Synth {
            kind,
            params,
            duration,
            count,
            out_dir,
            kinds,
        } => {
            let duration = duration.or(settings.synth.duration_sec).unwrap_or(CLIP_SECONDS);
            if !(duration > 0.0) {
                return Err(CliError::Usage("--duration must be positive".into()));
            }
            if let (Some(count), Some(dir)) = (count, out_dir) {
                let kinds = match kinds {
                    Some(list) => list.iter().map(|k| parse_kind(k)).collect::<Result<Vec<_>>>()?,
                    None => SignalKind::STATIONARY.iter().chain(SignalKind::NON_STATIONARY.iter()).copied().collect(),
                };
                let manifest = write_corpus(&dir, &kinds, count, settings.seed, duration)?;
                eprintln!("wrote {} clips and {}", kinds.len() * count, manifest.display());
                return Ok(());
            }
            let kind = kind
                .or_else(|| settings.synth.kind.clone())
                .ok_or_else(|| CliError::Usage("synth needs --kind (or [synth] kind in the config file)".into()))?;
            let mut spec = SynthSpec::new(parse_kind(&kind)?, settings.synth.seed.unwrap_or(settings.seed));
            for (name, value) in &settings.synth.params {
                spec = spec.with(name, *value);
            }
            for p in &params {
                let (name, value) = p
                    .split_once('=')
                    .and_then(|(n, v)| v.trim().parse::<f64>().ok().map(|v| (n.trim(), v)))
                    .ok_or_else(|| CliError::Usage(format!("--param expects NAME=VALUE, got '{p}'")))?;
                spec = spec.with(name, value);
            }
            let path = out.ok_or_else(|| CliError::Usage("synth needs --out FILE.wav".into()))?;
            write_synth(path, &spec, duration).map_err(|e| match e {
                CliError::Core(nonstat_core::Error::InvalidParameter(m)) => CliError::Usage(m),
                other => other,
            })?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { exit::OK as u8 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
