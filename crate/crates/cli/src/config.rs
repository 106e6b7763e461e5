//! Flat `key = value` experiment configuration.
//!
//! Grammar: one `key = value` pair per line; blank lines and lines starting
//! with `#` are ignored; text after an unquoted `#` is not special (values
//! run to the end of the line and are trimmed). Keys are case-sensitive and
//! must belong to the experiment's schema; each may appear once. An optional
//! `experiment = <name>` line must match the subcommand. Command-line
//! `--set key=value` pairs are applied after the file, then `--seed` and
//! `--out`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Benchmark1d,
    Deconvolve,
    DenoiseLowrank,
    ProxCheck,
    Diagnose,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Benchmark1d => "benchmark1d",
            Experiment::Deconvolve => "deconvolve",
            Experiment::DenoiseLowrank => "denoise-lowrank",
            Experiment::ProxCheck => "prox-check",
            Experiment::Diagnose => "diagnose",
        }
    }

    /// Allowed keys and their defaults.
    pub fn schema(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Experiment::Benchmark1d => &[
                ("seed", "0"),
                ("out", "results"),
                ("benchmark", "quartic"),
                ("samplers", "pmala,mala,malta,smmala"),
                ("delta", "1"),
                ("initial", "10"),
                ("n_samples", "250"),
                ("burn_in", "0"),
                ("thinning", "1"),
                ("adapt", "false"),
                ("band_lo", "0.4"),
                ("band_hi", "0.6"),
                ("eps1", "20"),
                ("eps2", "0.1"),
                ("drift_clamp", "none"),
                ("divergence_threshold", "1e6"),
            ],
            Experiment::Deconvolve => &[
                ("seed", "0"),
                ("out", "results"),
                ("image", "phantom"),
                ("size", "64"),
                ("kernel_size", "9"),
                ("bsnr_db", "40"),
                ("alpha", "0.05"),
                ("samplers", "pmala,mala"),
                ("delta", "0.01"),
                ("burn_in", "50000"),
                ("n_samples", "2000"),
                ("thinning", "10"),
                ("adapt", "true"),
                ("band_lo", "0.4"),
                ("band_hi", "0.6"),
                ("tv_step", "0.248"),
                ("tv_max_iters", "50"),
                ("tv_tolerance", "1e-5"),
                ("map_max_iters", "3000"),
                ("map_tolerance", "1e-8"),
                ("map_tv_max_iters", "200"),
                ("map_tv_tolerance", "1e-7"),
                ("max_lag", "20"),
            ],
            Experiment::DenoiseLowrank => &[
                ("seed", "0"),
                ("out", "results"),
                ("square", "8"),
                ("tiles", "8"),
                ("sigma2", "0.01"),
                ("alpha_sigma2", "1.15"),
                ("samplers", "pmala,rwmh"),
                ("delta", "0.001"),
                ("rwmh_delta", "1e-6"),
                ("rwmh_budget", "steps"),
                ("burn_in", "2000"),
                ("n_samples", "2000"),
                ("thinning", "100"),
                ("adapt", "true"),
                ("band_lo", "0.4"),
                ("band_hi", "0.6"),
                ("replicas", "749,999,1249,1499,1749,1999"),
                ("max_lag", "20"),
            ],
            Experiment::ProxCheck => &[
                ("seed", "0"),
                ("out", "results"),
                (
                    "operators",
                    "soft-threshold,quadratic,quartic,power,box,nuclear,tv",
                ),
                ("cases", "100"),
                ("tolerance", "1e-6"),
                ("nuclear_tolerance", "1e-3"),
                ("tv_tolerance", "1e-4"),
            ],
            Experiment::Diagnose => &[
                ("seed", "0"),
                ("out", "results"),
                ("input", ""),
                ("columns", "all"),
                ("max_lag", "20"),
                ("probs", "0.05,0.5,0.95"),
            ],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('_', "-");
        [
            Experiment::Benchmark1d,
            Experiment::Deconvolve,
            Experiment::DenoiseLowrank,
            Experiment::ProxCheck,
            Experiment::Diagnose,
        ]
        .into_iter()
        .find(|e| e.name() == key)
        .ok_or_else(|| anyhow!("unknown experiment '{s}'"))
    }
}

/// Effective configuration: every schema key with its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    experiment: Experiment,
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let values = experiment
            .schema()
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self { experiment, values }
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment
    }

    /// Parses configuration text on top of the experiment's defaults.
    pub fn parse(experiment: Experiment, text: &str) -> Result<Self> {
        let mut cfg = Self::defaults(experiment);
        let mut seen = std::collections::BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value', found '{line}'", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                bail!("line {}: duplicate key '{key}'", i + 1);
            }
            if key == "experiment" {
                let named: Experiment = value.parse()?;
                if named != experiment {
                    bail!("config is for '{named}' but the command is '{experiment}'");
                }
                continue;
            }
            cfg.set(key, value)
                .with_context(|| format!("line {}", i + 1))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.trim().to_string();
                Ok(())
            }
            None => bail!("unknown key '{key}' for experiment '{}'", self.experiment),
        }
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("--set expects key=value, found '{pair}'"))?;
        self.set(k.trim(), v)
    }

    /// Canonical text form; parsing it reproduces this configuration.
    pub fn to_text(&self) -> String {
        let mut s = format!("experiment = {}\n", self.experiment);
        for (k, v) in &self.values {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn raw(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| anyhow!("unknown key '{key}'"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let raw = self.raw(key)?;
        raw.parse::<T>()
            .map_err(|e| anyhow!("bad value '{raw}' for '{key}': {e}"))
    }

    /// `none` (or empty) maps to `None`.
    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key)? {
            "" | "none" => Ok(None),
            _ => self.get(key).map(Some),
        }
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| anyhow!("bad list item '{s}' for '{key}': {e}"))
            })
            .collect()
    }
}
