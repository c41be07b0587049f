//! Command-line front end.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::csv_io::{read_observation, write_curves, write_observation};
use crate::harness::{
    auc, default_pf_grid, needs_surrogate, power_curve, roc_curve, run_trials, telegraph_surrogate,
    DetectorBank, DetectorKind,
};
use crate::presets::{preset, PRESET_NAMES};
use crate::rng::{rng_from_seed, substream_seed, Stream};
use crate::signal_models::{add_awgn, Hypothesis};
use crate::Statistic;

#[derive(Debug, Parser)]
#[command(
    name = "spindetect",
    version,
    about = "Spin-detection signal models, detectors and Monte-Carlo curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one H1 and one H0 observation file.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Output path; `<stem>_h1.csv` and `<stem>_h0.csv` are written.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print each configured detector's statistic for an observation file.
    Detect {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        input: PathBuf,
    },
    /// Monte-Carlo ROC curves, one per detector.
    Roc {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo power curves over `run.snr_grid` at `run.pf`.
    Power {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Source {
    /// Experiment configuration file.
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "preset",
        required_unless_present = "preset"
    )]
    pub config: Option<PathBuf>,
    /// Bundled configuration: fig5 … fig12.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Overrides `run.seed`.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Overrides `run.trials`.
    #[arg(long, value_name = "N")]
    pub trials: Option<usize>,
}

impl Source {
    pub fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut config = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                ExperimentConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
            }
            (None, Some(name)) => preset(name).with_context(|| {
                format!(
                    "unknown preset `{name}` (known: {})",
                    PRESET_NAMES.join(", ")
                )
            })?,
            (None, None) => bail!("one of --config or --preset is required"),
        };
        if let Some(seed) = self.seed {
            config.run.seed = seed;
        }
        if let Some(trials) = self.trials {
            config.run.trials = trials;
        }
        Ok(config)
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

/// `<dir>/<stem>_h1.csv` and `<dir>/<stem>_h0.csv` for an output path.
pub fn observation_paths(out: &Path) -> (PathBuf, PathBuf) {
    let stem = out.file_stem().map_or_else(
        || "observation".into(),
        |s| s.to_string_lossy().into_owned(),
    );
    let dir = out.parent().unwrap_or(Path::new(""));
    (
        dir.join(format!("{stem}_h1.csv")),
        dir.join(format!("{stem}_h0.csv")),
    )
}

/// The observation pair of trial 0 of a Monte-Carlo run with this seed.
pub fn cmd_simulate(config: &ExperimentConfig, out: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
    let model = config.signal_model()?;
    let sigma = config.sigma()?;
    let seed = config.run.seed;
    let n = model.n_samples();
    let signal = model.generate_with(&mut rng_from_seed(substream_seed(seed, 0, Stream::Signal)));
    let h1 = add_awgn(
        Some(signal),
        n,
        sigma,
        substream_seed(seed, 0, Stream::NoiseH1),
        Hypothesis::H1,
    )?;
    let h0 = add_awgn(
        None,
        n,
        sigma,
        substream_seed(seed, 0, Stream::NoiseH0),
        Hypothesis::H0,
    )?;

    let (h1_path, h0_path) = observation_paths(out);
    for (path, record) in [(&h1_path, &h1), (&h0_path, &h0)] {
        let mut meta = config.metadata()?;
        meta.push(("sigma_value".into(), sigma.to_string()));
        meta.push(("hypothesis".into(), record.hypothesis.to_string()));
        let mut w = create(path)?;
        write_observation(&mut w, &record.samples, &meta)?;
        w.flush()?;
    }
    Ok((h1_path, h0_path))
}

pub fn cmd_detect(config: &ExperimentConfig, input: &Path) -> anyhow::Result<Vec<Statistic>> {
    let file = File::open(input).with_context(|| format!("opening {}", input.display()))?;
    let (samples, _) = read_observation(BufReader::new(file))
        .with_context(|| format!("reading {}", input.display()))?;
    let kinds = &config.detectors.list;
    if kinds.contains(&DetectorKind::MatchedFilter) {
        bail!("the matched filter needs the clean signal path, which observation files do not carry; remove `mf` from detectors.list");
    }
    let model = config.signal_model()?;
    let sigma = config.sigma()?;
    let set = config.detector_set();
    set.validate()?;
    let surrogate = if needs_surrogate(kinds) {
        Some(telegraph_surrogate(&model, &set, config.run.seed)?)
    } else {
        None
    };
    let bank = DetectorBank::new(&model, sigma, kinds, surrogate.as_ref())?;
    let values = bank.evaluate(&samples, None)?;
    Ok(kinds
        .iter()
        .zip(values)
        .map(|(k, v)| Statistic::new(k.name(), v))
        .collect())
}

fn curve_metadata(config: &ExperimentConfig) -> anyhow::Result<Vec<(String, String)>> {
    let mut meta = config.metadata()?;
    let set = config.detector_set();
    let model = config.signal_model()?;
    if needs_surrogate(&set.kinds) {
        let s = telegraph_surrogate(&model, &set, config.run.seed)?;
        meta.push(("surrogate_p".into(), s.p.to_string()));
        meta.push(("surrogate_q".into(), s.q.to_string()));
        if let Some(a) = s.alpha {
            meta.push(("alpha_used".into(), a.to_string()));
        }
    }
    Ok(meta)
}

/// Writes the ROC CSV and returns each detector's AUC.
pub fn cmd_roc(config: &ExperimentConfig, out: &Path) -> anyhow::Result<Vec<(String, f64)>> {
    let model = config.signal_model()?;
    let sigma = config.sigma()?;
    let batches = run_trials(
        &model,
        &config.detector_set(),
        config.run.trials,
        sigma,
        config.run.seed,
    )?;
    let grid = default_pf_grid();
    let curves = batches
        .iter()
        .map(|b| roc_curve(b, &grid))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut w = create(out)?;
    write_curves(&mut w, &curves, &curve_metadata(config)?)?;
    w.flush()?;
    curves
        .iter()
        .map(|c| Ok((c.detector.clone(), auc(c)?)))
        .collect()
}

pub fn cmd_power(config: &ExperimentConfig, out: &Path) -> anyhow::Result<()> {
    if config.run.snr_grid.is_empty() {
        bail!("power curves need `run.snr_grid`");
    }
    let model = config.signal_model()?;
    let curves = power_curve(
        &model,
        &config.detector_set(),
        &config.run.snr_grid,
        config.run.pf,
        config.run.trials,
        config.run.seed,
    )?;
    let mut meta = curve_metadata(config)?;
    meta.push(("pf".into(), config.run.pf.to_string()));
    let mut w = create(out)?;
    write_curves(&mut w, &curves, &meta)?;
    w.flush()?;
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { source, out } => {
            let (h1, h0) = cmd_simulate(&source.load()?, &out)?;
            println!("{}\n{}", h1.display(), h0.display());
        }
        Command::Detect { source, input } => {
            for s in cmd_detect(&source.load()?, &input)? {
                println!("{s}");
            }
        }
        Command::Roc { source, out } => {
            for (name, area) in cmd_roc(&source.load()?, &out)? {
                println!("{name},auc={area:.4}");
            }
        }
        Command::Power { source, out } => cmd_power(&source.load()?, &out)?,
    }
    Ok(())
}
