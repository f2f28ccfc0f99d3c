//! Simulation configuration, read from TOML.
//!
//! ```toml
//! scheme = "ic-fffb"          # lte | ic-fffb | ic-wd
//! seed = 1
//!
//! [code]
//! info_len = 8448             # L, CB CRCs included
//! cb_len = 1152               # K
//! coupling_len = 192          # D
//!
//! [snr]
//! start = -5.0
//! stop = -4.0
//! step = 0.25
//!
//! [stop]
//! max_tbs = 2000
//! max_tb_errors = 50
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ic::{solve_code_parameters, standard_block_lengths, CodeParameters, InterCbConfig};
use crate::rate_matching::RepetitionMode;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "lte")]
    Lte,
    #[serde(rename = "ic-fffb")]
    IcFfFb,
    #[serde(rename = "ic-wd")]
    IcWd,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Lte => "lte",
            Scheme::IcFfFb => "ic-fffb",
            Scheme::IcWd => "ic-wd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lte" => Ok(Scheme::Lte),
            "ic-fffb" => Ok(Scheme::IcFfFb),
            "ic-wd" => Ok(Scheme::IcWd),
            other => Err(Error::Configuration(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F32,
    F64,
}

/// How the IC code is chosen. The LTE baseline is always matched to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    /// Information length `L`, CB CRCs included.
    pub info_len: Option<usize>,
    /// Target rate; solved for `(N, K, D)` over `block_lengths`.
    pub rate: Option<f64>,
    pub num_cbs: Option<usize>,
    pub cb_len: Option<usize>,
    pub coupling_len: Option<usize>,
    /// Allowed block lengths; the standard table when absent.
    pub block_lengths: Option<Vec<usize>>,
    /// Seed of the pseudorandom interleaver for lengths outside the table.
    #[serde(default = "default_interleaver_seed")]
    pub interleaver_seed: u64,
}

fn default_interleaver_seed() -> u64 {
    0x1_7E51
}

impl CodeConfig {
    pub fn resolve(&self) -> Result<CodeParameters> {
        match (self.info_len, self.rate, self.num_cbs, self.cb_len, self.coupling_len) {
            (l, None, Some(n), Some(k), Some(d)) => {
                let cap = (n * k).saturating_sub((n + 1) * d);
                let padding = match l {
                    Some(l) => cap.checked_sub(l).ok_or_else(|| {
                        Error::Configuration(format!("info_len {l} exceeds the capacity {cap} of (N, K, D)"))
                    })?,
                    None => 0,
                };
                CodeParameters::new(n, k, d, padding)
            }
            (Some(l), None, None, Some(k), Some(d)) => CodeParameters::for_coupling(l, k, d),
            (Some(l), Some(r), None, None, None) => {
                let omega = self.block_lengths.clone().unwrap_or_else(standard_block_lengths);
                solve_code_parameters(l, r, &omega)
            }
            _ => Err(Error::Configuration(
                "[code] needs one of: num_cbs+cb_len+coupling_len, info_len+cb_len+coupling_len, or info_len+rate"
                    .into(),
            )),
        }
    }
}

/// SNR points in dB: an explicit list, or `start..=stop` by `step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SnrGrid {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub step: Option<f64>,
    pub points: Option<Vec<f64>>,
}

impl SnrGrid {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Self {
            start: Some(start),
            stop: Some(stop),
            step: Some(step),
            points: None,
        }
    }

    pub fn list(points: Vec<f64>) -> Self {
        Self {
            points: Some(points),
            ..Self::default()
        }
    }

    /// Parses `a:b:step`.
    pub fn parse_range(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Configuration(format!("SNR range {s:?} is not start:stop:step"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        Ok(Self::range(v[0], v[1], v[2]))
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match (self.points.as_ref(), self.start, self.stop, self.step) {
            (Some(p), None, None, None) => {
                if p.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Configuration("SNR points must be finite".into()));
                }
                Ok(p.clone())
            }
            (None, Some(a), Some(b), Some(s)) => {
                if !(s > 0.0) || !a.is_finite() || !b.is_finite() {
                    return Err(Error::Configuration("SNR step must be positive".into()));
                }
                if b < a {
                    return Ok(Vec::new());
                }
                let n = ((b - a) / s + 1e-9).floor() as usize;
                Ok((0..=n).map(|i| a + i as f64 * s).collect())
            }
            _ => Err(Error::Configuration(
                "[snr] needs either points or start+stop+step".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StopRule {
    pub max_tbs: usize,
    pub max_tb_errors: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_tbs: 10_000,
            max_tb_errors: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// File stem for `<stem>.csv` and `<stem>.json`; the scheme name when
    /// absent.
    pub stem: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scheme: Scheme,
    #[serde(default)]
    pub seed: u64,
    pub code: CodeConfig,
    pub snr: SnrGrid,
    #[serde(default)]
    pub stop: StopRule,
    #[serde(default)]
    pub decoder: InterCbConfig,
    #[serde(default)]
    pub repetition: RepetitionMode,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub output: OutputConfig,
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            toml::from_str(text).map_err(|e| Error::Configuration(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.code.resolve()?;
        self.snr.values()?;
        if self.stop.max_tbs == 0 || self.stop.max_tb_errors == 0 {
            return Err(Error::Configuration(
                "stop rule limits must be positive".into(),
            ));
        }
        let d = &self.decoder;
        if d.cb_iters == 0 || d.tb_iters == 0 || d.window_iters == 0 {
            return Err(Error::Configuration(
                "iteration limits must be positive".into(),
            ));
        }
        if p.payload_len() <= crate::crc::CRC_LEN {
            return Err(Error::Configuration(
                "payload too short for the TB CRC".into(),
            ));
        }
        Ok(())
    }
}
