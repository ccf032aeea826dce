//! `simulate`: runs a Monte Carlo or exact experiment from a config file.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use hindex_core::mc::{bias_csv, run_bias, run_consistency, run_coverage, Experiment, ExperimentConfig};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

pub fn load_config(path: &Path, overrides: Overrides) -> anyhow::Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = overrides.seed {
        cfg.root_seed = seed;
    }
    if let Some(threads) = overrides.threads {
        cfg.threads = Some(threads);
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> anyhow::Result<String> {
    Ok(match cfg.experiment {
        Experiment::Coverage => run_coverage(cfg)?.to_csv(),
        Experiment::Consistency => run_consistency(cfg)?.to_csv(),
        Experiment::Bias => bias_csv(&cfg.model.to_string(), &run_bias(&cfg.model, &cfg.n_grid)),
    })
}

/// Writes the CSV to `out` only once the whole run has succeeded.
pub fn cmd_simulate(config: &Path, out: &Path, overrides: Overrides) -> anyhow::Result<()> {
    let cfg = load_config(config, overrides)?;
    let csv = run_experiment(&cfg)?;
    let dir = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("{}", dir.display()))?;
    tmp.write_all(csv.as_bytes())?;
    tmp.persist(out).with_context(|| format!("{}", out.display()))?;
    Ok(())
}
