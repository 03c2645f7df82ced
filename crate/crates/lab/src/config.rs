//! Experiment configuration from `key = value` files and command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use modrec::quadrature::QuadratureSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError(msg.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Thm1,
    Thm2,
    FirstLaw,
    Filtering,
    Hirschman,
    Xi,
    Suite,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Thm1 => "thm1",
            Experiment::Thm2 => "thm2",
            Experiment::FirstLaw => "firstlaw",
            Experiment::Filtering => "filtering",
            Experiment::Hirschman => "hirschman",
            Experiment::Xi => "xi",
            Experiment::Suite => "suite",
        }
    }
}

impl FromStr for Experiment {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        Ok(match s {
            "thm1" => Experiment::Thm1,
            "thm2" => Experiment::Thm2,
            "firstlaw" => Experiment::FirstLaw,
            "filtering" => Experiment::Filtering,
            "hirschman" => Experiment::Hirschman,
            "xi" => Experiment::Xi,
            "suite" => Experiment::Suite,
            _ => return usage(format!("unknown experiment `{s}`")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankPolicy {
    Full,
    /// Full rank with probability 0.7, otherwise uniform in `1..n`.
    Random,
    Fixed(usize),
}

impl FromStr for RankPolicy {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "full" => Ok(RankPolicy::Full),
            "random" => Ok(RankPolicy::Random),
            _ => match s.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(RankPolicy::Fixed(k)),
                _ => usage(format!("rank must be `full`, `random` or a positive integer, got `{s}`")),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => usage(format!("format must be `csv` or `json`, got `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub blocks: Vec<(usize, usize)>,
    pub trials: usize,
    pub seed: u64,
    pub rank_policy: RankPolicy,
    pub quadrature: QuadratureSpec,
    pub eps: f64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub timing: bool,
}

pub const KEYS: [&str; 10] = ["blocks", "trials", "seed", "nodes", "tclamp", "eps", "out", "format", "rank", "timing"];

/// `2x2,1x3` → `[(2, 2), (1, 3)]`.
pub fn parse_blocks(s: &str) -> Result<Vec<(usize, usize)>, UsageError> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let Some((m, k)) = part.split_once(['x', 'X']) else {
            return usage(format!("block `{part}` is not of the form MxK"));
        };
        match (m.trim().parse::<usize>(), k.trim().parse::<usize>()) {
            (Ok(m), Ok(k)) if m >= 1 && k >= 1 => out.push((m, k)),
            _ => return usage(format!("block `{part}` needs positive integers")),
        }
    }
    Ok(out)
}

pub fn format_blocks(blocks: &[(usize, usize)]) -> String {
    blocks.iter().map(|(m, k)| format!("{m}x{k}")).collect::<Vec<_>>().join(",")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!("config line {}: expected `key = value`", i + 1));
        };
        let k = k.trim();
        if !KEYS.contains(&k) {
            return usage(format!("config line {}: unknown key `{k}`", i + 1));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, UsageError> {
    v.parse().map_err(|_| UsageError(format!("invalid value `{v}` for {key}")))
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        ExperimentConfig {
            experiment,
            blocks: vec![(2, 2)],
            trials: 100,
            seed: 0,
            rank_policy: RankPolicy::Random,
            quadrature: QuadratureSpec::default(),
            eps: 1e-8,
            output: None,
            format: OutputFormat::Csv,
            timing: false,
        }
    }

    /// Applies settings over the defaults and validates the result.
    pub fn from_settings(experiment: Experiment, settings: &BTreeMap<String, String>) -> Result<Self, UsageError> {
        let mut cfg = Self::defaults(experiment);
        for (k, v) in settings {
            match k.as_str() {
                "blocks" => cfg.blocks = parse_blocks(v)?,
                "trials" => cfg.trials = parse_value(k, v)?,
                "seed" => cfg.seed = parse_value(k, v)?,
                "nodes" => cfg.quadrature.node_count = parse_value(k, v)?,
                "tclamp" => cfg.quadrature.t_clamp = parse_value(k, v)?,
                "eps" => cfg.eps = parse_value(k, v)?,
                "out" => cfg.output = Some(PathBuf::from(v)),
                "format" => cfg.format = v.parse()?,
                "rank" => cfg.rank_policy = v.parse()?,
                "timing" => cfg.timing = parse_value(k, v)?,
                _ => return usage(format!("unknown key `{k}`")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        if self.trials < 1 {
            return usage("trials must be at least 1");
        }
        if !(self.eps > 0.0) {
            return usage("eps must be positive");
        }
        if let Err(e) = self.quadrature.validate() {
            return usage(e.to_string());
        }
        if let Err(e) = modrec::algebra::InclusionSpec::new(self.blocks.clone()) {
            return usage(e.to_string());
        }
        if let RankPolicy::Fixed(k) = self.rank_policy {
            if k > self.n() {
                return usage(format!("rank {k} exceeds dimension {}", self.n()));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|(m, k)| m * k).sum()
    }
}
