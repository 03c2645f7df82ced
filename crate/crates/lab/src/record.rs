//! Trial records and their CSV / JSON serialization.

use std::io::Write;

use serde::Serialize;

use crate::config::OutputFormat;

pub const HEADER_TAG: &str = "# modular-recovery-lab v1";

pub trait Record: Serialize + Send {
    fn trial(&self) -> u64;
    /// Excluded from hard pass/fail (clamped or regularized).
    fn flagged(&self) -> bool;
    fn passed(&self) -> bool;
    fn set_wall_time(&mut self, seconds: Option<f64>);
}

/// One recovery-bound trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub blocks: String,
    pub n: usize,
    pub d: usize,
    pub rank_rho: usize,
    pub rank_sigma: usize,
    pub delta_s: f64,
    pub log_fidelity_integral: f64,
    pub quad_error: f64,
    pub integral_gap: f64,
    pub neg_two_log_fidelity: f64,
    pub eps_bound: f64,
    pub trace_distance: f64,
    pub clamped: bool,
    pub regularized: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FirstLawRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub x: f64,
    pub p: f64,
    pub final_ratio: f64,
    pub petz_slope_1e4: f64,
    pub sandwiched_slope_1e4: f64,
    pub petz_slope_last: f64,
    pub sandwiched_slope_last: f64,
    pub monotone: bool,
    pub violator_rejected: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilteringRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub relative_entropy: f64,
    pub gaussian_final_entropy: f64,
    pub gaussian_offset: f64,
    pub bump_offset: f64,
    pub bump_bound: f64,
    /// `min_P (‖f‖₁ − ‖a_P‖)`.
    pub operator_slack: f64,
    /// `min_P λ_min(C²σ − ψ_P ψ_P*)`.
    pub domination_slack: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HirschmanRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub gap_theta_010: f64,
    pub gap_theta_025: f64,
    pub gap_theta_040: f64,
    pub min_gap: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiRecord {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub delta_s: f64,
    pub residual_1e1: f64,
    pub residual_1e2: f64,
    pub residual_1e3: f64,
    pub residual_1e4: f64,
    pub residual_1e5: f64,
    pub g_theta_01: f64,
    pub infimum_theta_01: f64,
    pub infimum_monotone: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

macro_rules! record_impl {
    ($t:ty, $flag:expr) => {
        impl Record for $t {
            fn trial(&self) -> u64 {
                self.trial
            }

            fn flagged(&self) -> bool {
                let f: fn(&$t) -> bool = $flag;
                f(self)
            }

            fn passed(&self) -> bool {
                self.pass
            }

            fn set_wall_time(&mut self, seconds: Option<f64>) {
                self.wall_time_s = seconds;
            }
        }
    };
}

record_impl!(TrialRecord, |r| r.clamped || r.regularized);
record_impl!(FirstLawRecord, |_| false);
record_impl!(FilteringRecord, |_| false);
record_impl!(HirschmanRecord, |_| false);
record_impl!(XiRecord, |_| false);

/// Writes records sorted by trial id; the CSV form starts with a
/// versioned comment line.
pub fn write_records<R: Record, W: Write>(records: &[R], experiment: &str, format: OutputFormat, mut out: W) -> std::io::Result<()> {
    let mut sorted: Vec<&R> = records.iter().collect();
    sorted.sort_by_key(|r| r.trial());
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{HEADER_TAG} experiment={experiment}")?;
            let mut w = csv::Writer::from_writer(out);
            for r in sorted {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &sorted)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub trials: usize,
    pub passed: usize,
    pub violations: usize,
    pub flagged: usize,
}

impl Summary {
    pub fn of<R: Record>(records: &[R]) -> Self {
        let mut s = Summary {
            trials: records.len(),
            ..Summary::default()
        };
        for r in records {
            if r.flagged() {
                s.flagged += 1;
            } else if r.passed() {
                s.passed += 1;
            } else {
                s.violations += 1;
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(trial: u64, pass: bool) -> HirschmanRecord {
        HirschmanRecord {
            trial,
            seed: 1,
            n: 4,
            gap_theta_010: 0.5,
            gap_theta_025: 0.25,
            gap_theta_040: 0.125,
            min_gap: 0.125,
            pass,
            wall_time_s: None,
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_records(&[rec(1, true), rec(0, false)], "hirschman", OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "# modular-recovery-lab v1 experiment=hirschman");
        assert_eq!(lines[1], "trial,seed,n,gap_theta_010,gap_theta_025,gap_theta_040,min_gap,pass");
        assert!(lines[2].starts_with("0,"));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn json_mirrors_fields() {
        let mut r = rec(0, true);
        r.set_wall_time(Some(0.5));
        let mut buf = Vec::new();
        write_records(&[r], "hirschman", OutputFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["min_gap"], 0.125);
        assert_eq!(v[0]["wall_time_s"], 0.5);
    }

    #[test]
    fn summary_counts() {
        let s = Summary::of(&[rec(0, true), rec(1, false), rec(2, true)]);
        assert_eq!((s.trials, s.passed, s.violations, s.flagged), (3, 2, 1, 0));
    }
}
