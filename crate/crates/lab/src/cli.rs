//! Command-line front end: argument parsing, settings merge and exit codes.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;

use crate::config::{read_config_file, Experiment, ExperimentConfig, UsageError};
use crate::experiments;
use crate::suite;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Runs recovery-inequality experiments on random finite inclusions.
#[derive(Debug, Parser)]
#[command(name = "mrlab", version)]
pub struct Args {
    /// thm1, thm2, firstlaw, filtering, hirschman, xi or suite
    pub experiment: String,
    /// Block structure of the subalgebra, e.g. `2x2` or `2x2,1x3`
    #[arg(long)]
    pub blocks: Option<String>,
    #[arg(long)]
    pub trials: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Quadrature node count
    #[arg(long)]
    pub nodes: Option<String>,
    /// Quadrature truncation of the t integral
    #[arg(long)]
    pub tclamp: Option<String>,
    /// Regularization added to ill-conditioned σ
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// full, random or a fixed rank for ρ
    #[arg(long)]
    pub rank: Option<String>,
    /// `key = value` settings file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Include per-trial wall time in the output
    #[arg(long)]
    pub timing: bool,
}

impl Args {
    /// Merges defaults, the config file and explicit flags, in that order.
    pub fn settings(&self) -> Result<BTreeMap<String, String>, UsageError> {
        let mut s = match &self.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let flags = [
            ("blocks", &self.blocks),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("nodes", &self.nodes),
            ("tclamp", &self.tclamp),
            ("eps", &self.eps),
            ("format", &self.format),
            ("rank", &self.rank),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.insert(k.to_string(), v.clone());
            }
        }
        if let Some(p) = &self.out {
            s.insert("out".into(), p.display().to_string());
        }
        if self.timing {
            s.insert("timing".into(), "true".into());
        }
        Ok(s)
    }

    pub fn config(&self) -> Result<ExperimentConfig, UsageError> {
        let experiment: Experiment = self.experiment.parse()?;
        ExperimentConfig::from_settings(experiment, &self.settings()?)
    }
}

/// Entry point shared by the binary and the tests. A leading `run` word
/// is accepted and ignored.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if argv.get(1).is_some_and(|a| a == "run") {
        argv.remove(1);
    }
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let cfg = match args.config() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "mrlab: {e}");
            return EXIT_USAGE;
        }
    };
    if cfg.experiment == Experiment::Suite {
        return run_suite(stdout);
    }
    let records = match experiments::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "mrlab: {e}");
            return EXIT_USAGE;
        }
    };
    let name = cfg.experiment.name();
    let written = match &cfg.output {
        Some(path) => File::create(path)
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                records.write(name, cfg.format, &mut w)?;
                w.flush()
            })
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display()))),
        None => records.write(name, cfg.format, &mut *stdout),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "mrlab: {e}");
        return EXIT_USAGE;
    }
    let s = records.summary();
    let _ = writeln!(
        stderr,
        "{name}: {} trials, {} passed, {} violations, {} flagged",
        s.trials, s.passed, s.violations, s.flagged
    );
    if s.violations > 0 {
        EXIT_VIOLATION
    } else {
        EXIT_PASS
    }
}

fn run_suite(stdout: &mut dyn Write) -> i32 {
    let mut ok = true;
    for id in 1..=11 {
        let c = suite::criterion(id);
        ok &= c.passed;
        let _ = writeln!(stdout, "{c}");
    }
    if ok {
        EXIT_PASS
    } else {
        EXIT_VIOLATION
    }
}
