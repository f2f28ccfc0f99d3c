//! Repetition-matched and IC transfer curves, and threshold search.

use serde::{Deserialize, Serialize};

use super::curve::{standard_grid, tunnel_open, ExitCurve};
use super::jfunc::{j_complement, j_function, j_inverse, j_inverse_complement};
use super::mother::ExitFamily;
use crate::channel::llr_sigma_for_snr_db;
use crate::rate_matching::{repetition_profile, RepetitionProfile};
use crate::turbo::MOTHER_RATE;
use crate::{Error, Result};

/// Bisection tolerance used by default.
pub const THRESHOLD_TOL_DB: f64 = 0.02;

/// Channel-LLR spread seen by the mother decoder after chase combining,
/// matched in mutual information.
pub fn repetition_equivalent_sigma(sigma_ch_tilde: f64, profile: &RepetitionProfile) -> f64 {
    if profile.psi == 0 {
        return sigma_ch_tilde;
    }
    let psi = profile.psi as f64;
    let lo = sigma_ch_tilde * psi.sqrt();
    let hi = sigma_ch_tilde * (psi + 1.0).sqrt();
    // Mix in the complement so large spreads keep their resolution.
    let c = j_complement(lo) * profile.lower_fraction() + j_complement(hi) * profile.top_fraction();
    if c > 0.5 {
        j_inverse(
            j_function(lo) * profile.lower_fraction() + j_function(hi) * profile.top_fraction(),
        )
    } else {
        j_inverse_complement(c)
    }
}

/// Transfer curve of the repetition-matched Turbo code at rate `rate`.
pub fn exit_rep(family: &ExitFamily, rate: f64, sigma_ch_tilde: f64) -> Result<ExitCurve> {
    let profile = repetition_profile(rate, MOTHER_RATE)?;
    let mut c = family.curve_at(repetition_equivalent_sigma(sigma_ch_tilde, &profile))?;
    c.sigma_ch_tilde = sigma_ch_tilde;
    Ok(c)
}

/// A priori information after coupling: `I + f·(1 − I)` for coupled fraction
/// `f = 2D/K`.
pub fn coupled_apriori(i_a: f64, coupling_fraction: f64) -> f64 {
    i_a + coupling_fraction * (1.0 - i_a)
}

/// Transfer curve of an IC Turbo code with perfectly known coupled bits.
pub fn exit_ic(mother: &ExitCurve, coupling_fraction: f64) -> Result<ExitCurve> {
    if !(0.0..1.0).contains(&coupling_fraction) {
        return Err(Error::Configuration(format!(
            "coupling fraction {coupling_fraction} must lie in [0, 1)"
        )));
    }
    Ok(mother.compose(&standard_grid(), |i| coupled_apriori(i, coupling_fraction)))
}

/// Smallest SNR (dB) in `[lo_db, hi_db]` whose curve has an open tunnel.
///
/// `builder` must be monotone in SNR. Returns the midpoint of the final
/// bracket, which is no wider than `tol_db`.
pub fn decoding_threshold(
    builder: impl Fn(f64) -> Result<ExitCurve>,
    lo_db: f64,
    hi_db: f64,
    tol_db: f64,
) -> Result<f64> {
    let bracket = || Error::Bracket { lo_db, hi_db };
    if !tunnel_open(&builder(hi_db)?) || tunnel_open(&builder(lo_db)?) {
        return Err(bracket());
    }
    let (mut lo, mut hi) = (lo_db, hi_db);
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        if tunnel_open(&builder(mid)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    Lte,
    Ic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub mode: ThresholdMode,
    pub rate: f64,
    /// `2D/K`, IC mode only.
    pub coupling_fraction: Option<f64>,
    pub threshold_db: f64,
    /// LTE threshold at the same rate minus `threshold_db` (IC mode only).
    pub gain_db: Option<f64>,
    pub lte_threshold_db: f64,
    pub tol_db: f64,
}

/// SNR bracket used by the analysis helpers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrBracket {
    pub lo_db: f64,
    pub hi_db: f64,
}

impl Default for SnrBracket {
    fn default() -> Self {
        Self {
            lo_db: -8.0,
            hi_db: -2.0,
        }
    }
}

impl SnrBracket {
    /// `σ̃_ch` range a family must span to serve this bracket at `rate`.
    pub fn sigma_span(&self, rate: f64) -> Result<(f64, f64)> {
        let p = repetition_profile(rate, MOTHER_RATE)?;
        let lo = llr_sigma_for_snr_db(self.lo_db);
        let hi = repetition_equivalent_sigma(llr_sigma_for_snr_db(self.hi_db), &p);
        Ok((lo, hi))
    }
}

pub fn lte_threshold(
    family: &ExitFamily,
    rate: f64,
    bracket: SnrBracket,
    tol_db: f64,
) -> Result<ThresholdResult> {
    let t = decoding_threshold(
        |db| exit_rep(family, rate, llr_sigma_for_snr_db(db)),
        bracket.lo_db,
        bracket.hi_db,
        tol_db,
    )?;
    Ok(ThresholdResult {
        mode: ThresholdMode::Lte,
        rate,
        coupling_fraction: None,
        threshold_db: t,
        gain_db: None,
        lte_threshold_db: t,
        tol_db,
    })
}

/// IC threshold at coupled fraction `2D/K`, with the gain over the LTE
/// code at `rate`.
pub fn ic_threshold(
    family: &ExitFamily,
    rate: f64,
    coupling_fraction: f64,
    bracket: SnrBracket,
    tol_db: f64,
) -> Result<ThresholdResult> {
    let lte = lte_threshold(family, rate, bracket, tol_db)?;
    let t = decoding_threshold(
        |db| {
            exit_ic(
                &family.curve_at(llr_sigma_for_snr_db(db))?,
                coupling_fraction,
            )
        },
        bracket.lo_db,
        bracket.hi_db,
        tol_db,
    )?;
    Ok(ThresholdResult {
        mode: ThresholdMode::Ic,
        rate,
        coupling_fraction: Some(coupling_fraction),
        threshold_db: t,
        gain_db: Some(lte.threshold_db - t),
        lte_threshold_db: lte.threshold_db,
        tol_db,
    })
}
