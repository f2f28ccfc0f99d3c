//! Sweep results and their CSV/JSON serialization.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::pipeline::LteBaseline;
use crate::ic::CodeParameters;
use crate::{Error, Result};

/// Error count at which a TBER estimate is flagged reliable.
pub const RELIABLE_ERRORS: usize = 20;

/// Two-sided 95% Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let denom = 1.0 + z * z / n_f;
    let centre = (p + z * z / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z * z / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if k == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if k == n {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub tbs: usize,
    pub tb_errors: usize,
    /// TBs whose CRC passed on a wrong payload.
    pub undetected_errors: usize,
    pub tber: f64,
    pub tber_ci_low: f64,
    pub tber_ci_high: f64,
    pub reliable: bool,
    /// Stopped on the TB cap rather than the error target.
    pub capped: bool,
    /// Error rate of each block position.
    pub cber: Vec<f64>,
    pub avg_decodes_per_cb: f64,
    pub normalized_complexity: f64,
    pub avg_inter_iterations: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub version: String,
    pub scheme: String,
    pub params: CodeParameters,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lte_baseline: Option<LteBaseline>,
    /// The configuration as TOML.
    pub config: String,
    pub points: Vec<SnrPoint>,
}

pub const CSV_HEADER: [&str; 14] = [
    "scheme",
    "snr_db",
    "tbs",
    "tb_errors",
    "undetected_errors",
    "tber",
    "tber_ci_low",
    "tber_ci_high",
    "reliable",
    "capped",
    "avg_decodes_per_cb",
    "normalized_complexity",
    "avg_inter_iterations",
    "cber",
];

impl SimReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Format {
            path: PathBuf::from("<csv>"),
            message: e.to_string(),
        };
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        for p in &self.points {
            let cber = p
                .cber
                .iter()
                .map(|c| format!("{c:.6e}"))
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([
                self.scheme.clone(),
                format!("{}", p.snr_db),
                p.tbs.to_string(),
                p.tb_errors.to_string(),
                p.undetected_errors.to_string(),
                format!("{:.6e}", p.tber),
                format!("{:.6e}", p.tber_ci_low),
                format!("{:.6e}", p.tber_ci_high),
                p.reliable.to_string(),
                p.capped.to_string(),
                format!("{:.4}", p.avg_decodes_per_cb),
                format!("{:.4}", p.normalized_complexity),
                format!("{:.4}", p.avg_inter_iterations),
                cber,
            ])
            .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format {
            path: PathBuf::from("<csv>"),
            message: e.to_string(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`, returning both paths.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        fs::write(&csv_path, self.to_csv()?).map_err(|source| Error::Io {
            path: csv_path.clone(),
            source,
        })?;
        fs::write(&json_path, self.to_json()).map_err(|source| Error::Io {
            path: json_path.clone(),
            source,
        })?;
        Ok((csv_path, json_path))
    }
}
