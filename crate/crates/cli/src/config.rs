//! Run settings: built-in defaults, overlaid by an optional TOML config
//! file, overlaid by command-line flags. `NONSTAT_SEED` supplies the base
//! seed when neither a flag nor the config file does.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use nonstat_core::audio::SignalKind;
use nonstat_core::hlc::{HlcConfig, RegionPartition, DEFAULT_ALPHA};
use nonstat_core::ins::{DistanceMode, DistanceSpec, InsConfig, DEFAULT_FLOOR};
use nonstat_core::spectral::TaperFamily;
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const SEED_ENV: &str = "NONSTAT_SEED";

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Base seed (falls back to $NONSTAT_SEED, then 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of surrogates J.
    #[arg(long, short = 'J', global = true)]
    pub surrogates: Option<usize>,
    /// Threshold multiplier for the hard label criteria.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Comma-separated observation scales (default: the region partition).
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub scales: Option<Vec<f64>>,
    /// Number of tapers.
    #[arg(long, global = true)]
    pub tapers: Option<usize>,
    /// Spectral distance: kl, lsd or combined.
    #[arg(long, global = true)]
    pub distance: Option<String>,
    /// False-alarm rate of the surrogate threshold.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file (default: standard output).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Contents of a config file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub surrogates: Option<usize>,
    pub alpha: Option<f64>,
    pub scales: Option<Vec<f64>>,
    pub regions: Option<Vec<Vec<f64>>>,
    pub tapers: Option<usize>,
    pub taper_family: Option<String>,
    pub distance: Option<String>,
    pub floor: Option<f64>,
    pub epsilon: Option<f64>,
    pub jobs: Option<usize>,
    pub synth: Option<SynthSection>,
}

/// Synthetic-signal description usable by the `synth` subcommand.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub kind: Option<String>,
    pub seed: Option<u64>,
    pub duration_sec: Option<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub surrogates: usize,
    pub alpha: f64,
    pub scales: Option<Vec<f64>>,
    pub partition: RegionPartition,
    pub tapers: usize,
    pub taper_family: TaperFamily,
    pub distance: DistanceSpec,
    pub epsilon: f64,
    pub jobs: usize,
    pub synth: SynthSection,
}

impl Default for Settings {
    fn default() -> Self {
        let ins = InsConfig::default();
        Self {
            seed: 0,
            surrogates: ins.j_surrogates,
            alpha: DEFAULT_ALPHA,
            scales: None,
            partition: RegionPartition::default(),
            tapers: ins.tapers,
            taper_family: ins.taper_family,
            distance: DistanceSpec {
                mode: DistanceMode::Combined,
                floor: DEFAULT_FLOOR,
            },
            epsilon: ins.epsilon,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            synth: SynthSection::default(),
        }
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

impl Settings {
    /// Resolves settings from flags, the config file they name, and the
    /// environment.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let env_seed = std::env::var(SEED_ENV).ok();
        Self::layered(&file, args, env_seed.as_deref())
    }

    /// Precedence: flag, then config file, then `env_seed` (seed only), then
    /// defaults.
    pub fn layered(file: &ConfigFile, args: &CommonArgs, env_seed: Option<&str>) -> Result<Self> {
        let mut s = Settings::default();
        let env_seed = match env_seed {
            Some(v) => Some(
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer")))?,
            ),
            None => None,
        };
        s.seed = args.seed.or(file.seed).or(env_seed).unwrap_or(0);
        s.surrogates = args.surrogates.or(file.surrogates).unwrap_or(s.surrogates);
        s.alpha = args.alpha.or(file.alpha).unwrap_or(s.alpha);
        s.scales = args.scales.clone().or_else(|| file.scales.clone());
        if let Some(regions) = &file.regions {
            s.partition = RegionPartition::new(regions.clone()).map_err(usage)?;
        }
        s.tapers = args.tapers.or(file.tapers).unwrap_or(s.tapers);
        if let Some(family) = &file.taper_family {
            s.taper_family = family.parse().map_err(usage)?;
        }
        if let Some(mode) = args.distance.as_ref().or(file.distance.as_ref()) {
            s.distance.mode = mode.parse().map_err(usage)?;
        }
        if let Some(floor) = file.floor {
            s.distance.floor = floor;
        }
        s.epsilon = args.epsilon.or(file.epsilon).unwrap_or(s.epsilon);
        s.jobs = args.jobs.or(file.jobs).unwrap_or(s.jobs);
        s.synth = file.synth.clone().unwrap_or_default();
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.ins_config(self.seed).validate().map_err(usage)?;
        HlcConfig::new(self.alpha, self.partition.clone()).map_err(usage)?;
        if self.jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        if let Some(scales) = &self.scales {
            if scales.is_empty() {
                return Err(CliError::Usage("--scales needs at least one value".into()));
            }
            if scales.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::Usage("--scales must be strictly ascending".into()));
            }
            if let Some(bad) = scales.iter().find(|s| !(**s > 0.0 && **s <= 0.5)) {
                return Err(CliError::Usage(format!("scale {bad} is outside (0, 0.5]")));
            }
        }
        if let Some(kind) = &self.synth.kind {
            kind.parse::<SignalKind>().map_err(usage)?;
        }
        Ok(())
    }

    /// Scales to analyze: explicit `--scales`, else every partition scale.
    pub fn scales(&self) -> Vec<f64> {
        self.scales.clone().unwrap_or_else(|| self.partition.scales())
    }

    pub fn ins_config(&self, seed: u64) -> InsConfig {
        InsConfig {
            j_surrogates: self.surrogates,
            epsilon: self.epsilon,
            distance: self.distance,
            tapers: self.tapers,
            taper_family: self.taper_family,
            seed,
            ..InsConfig::default()
        }
    }

    pub fn hlc_config(&self) -> HlcConfig {
        HlcConfig {
            alpha: self.alpha,
            partition: self.partition.clone(),
        }
    }

    /// Identifies everything that influences a label except the seed.
    pub fn fingerprint(&self) -> String {
        format!("{};{}", self.ins_config(0).fingerprint(), self.hlc_config().fingerprint())
    }

    /// Bounded pool used for clip-level parallelism.
    pub fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", self.jobs)))
    }
}
