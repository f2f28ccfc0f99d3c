//! Code parameters of an IC Turbo code and their rate arithmetic.
//!
//! Rate accounting treats the CB CRCs as information bits, so the
//! information length `L` of a code with `N` blocks of length `K` and
//! coupling length `D` satisfies `L + padding = N·K − (N + 1)·D`, and the
//! transmitted length (tails excluded) is `3·N·K − (N + 1)·D`.

use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::crc::CRC_LEN;
use crate::turbo::{valid_block_lengths, MOTHER_RATE};
use crate::{Error, Rational, Result};

/// `K*` may exceed a valid block length by this relative amount.
const LENGTH_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeParameters {
    /// Information length `L`, CB CRCs included.
    #[serde(rename = "L")]
    pub info_len: usize,
    #[serde(rename = "N")]
    pub num_cbs: usize,
    #[serde(rename = "K")]
    pub cb_len: usize,
    #[serde(rename = "D")]
    pub coupling_len: usize,
    pub padding: usize,
    #[serde(rename = "R_IC")]
    pub rate: f64,
}

impl CodeParameters {
    /// Validates and completes a parameter set.
    pub fn new(num_cbs: usize, cb_len: usize, coupling_len: usize, padding: usize) -> Result<Self> {
        let (n, k, d) = (num_cbs, cb_len, coupling_len);
        if n < 2 {
            return Err(Error::InfeasibleParameters(format!(
                "need at least 2 code blocks, got {n}"
            )));
        }
        if d == 0 {
            return Err(Error::InfeasibleParameters(
                "coupling length must be at least 1".into(),
            ));
        }
        if k <= CRC_LEN || 2 * d > k - CRC_LEN {
            return Err(Error::InfeasibleParameters(format!(
                "coupling length {d} too large for block length {k} (need 2D <= K - {CRC_LEN})"
            )));
        }
        let capacity = n * k - (n + 1) * d;
        let last_free = k - CRC_LEN - 2 * d;
        if padding > last_free || padding >= capacity {
            return Err(Error::InfeasibleParameters(format!(
                "padding {padding} does not fit in the last block ({last_free} free positions)"
            )));
        }
        Ok(Self {
            info_len: capacity - padding,
            num_cbs: n,
            cb_len: k,
            coupling_len: d,
            padding,
            rate: effective_code_rate(n as f64, k as f64, d as f64, MOTHER_RATE),
        })
    }

    /// Smallest `N` carrying `info_len` bits with the given `K` and `D`.
    pub fn for_coupling(info_len: usize, cb_len: usize, coupling_len: usize) -> Result<Self> {
        let (k, d) = (cb_len, coupling_len);
        if d == 0 || 2 * d >= k {
            return Err(Error::InfeasibleParameters(format!(
                "invalid coupling length {d} for K = {k}"
            )));
        }
        let n = ((info_len + d).div_ceil(k - d)).max(2);
        let padding = (n * k - (n + 1) * d)
            .checked_sub(info_len)
            .ok_or_else(|| Error::InfeasibleParameters("information length too large".into()))?;
        Self::new(n, k, d, padding)
    }

    /// Payload carried by the segmentation: information bits minus the
    /// per-block CRCs. This is the TB length including its own CRC.
    pub fn payload_len(&self) -> usize {
        self.info_len - self.num_cbs * CRC_LEN
    }

    /// Coded bits sent, tails excluded.
    pub fn transmitted_len(&self) -> usize {
        let (n, k, d) = (self.num_cbs, self.cb_len, self.coupling_len);
        3 * n * k - (n + 1) * d
    }

    /// `R_IC` as an exact fraction.
    pub fn exact_rate(&self) -> Rational {
        effective_code_rate_exact(self.num_cbs, self.cb_len, self.coupling_len)
    }

    /// `2D/K`.
    pub fn coupling_fraction(&self) -> f64 {
        2.0 * self.coupling_len as f64 / self.cb_len as f64
    }
}

/// `R_IC = [N(K−D) − D] / [N(K − R₀D) − R₀D] · R₀`.
pub fn effective_code_rate<T: Num + FromPrimitive + Copy>(n: T, k: T, d: T, mother: T) -> T {
    let num = n * (k - d) - d;
    let den = n * (k - mother * d) - mother * d;
    num / den * mother
}

pub fn effective_code_rate_exact(n: usize, k: usize, d: usize) -> Rational {
    let r = |v: usize| Rational::from_integer(v as i64);
    effective_code_rate(r(n), r(k), r(d), Rational::new(1, 3))
}

/// Chooses `(N, K, D)` for information length `info_len` and target rate.
///
/// `N` is increased from 2 until the block length
/// `K* = L(1−R)R₀ / (N(1−R₀)R)` fits under a valid length. `K` is the
/// smallest valid length not below `K*` (up to a relative `1e-4`). When `K`
/// exceeds `K*`, `L` is zero-padded to the length that hits the rate at this
/// `(N, K)`, and then minimally further so that `D` is an integer.
pub fn solve_code_parameters(
    info_len: usize,
    rate: f64,
    valid: &[usize],
) -> Result<CodeParameters> {
    let r0 = MOTHER_RATE;
    if !(rate > 0.0 && rate < r0) {
        return Err(Error::UnsupportedRate { rate, mother: r0 });
    }
    if valid.is_empty() {
        return Err(Error::Configuration("empty set of block lengths".into()));
    }
    let l = info_len as f64;
    let per_block = (1.0 - r0) * rate / ((1.0 - rate) * r0);
    for n in 2..=info_len.max(2) {
        let k_star = l / (n as f64 * per_block);
        let Some(k) = valid
            .iter()
            .copied()
            .filter(|&k| k as f64 >= k_star * (1.0 - LENGTH_TOLERANCE))
            .min()
        else {
            continue;
        };
        let padded = ((n * k) as f64 * per_block - 1e-6).ceil().max(l) as usize;
        let total = n * k;
        if total <= padded {
            continue;
        }
        let excess = total - padded;
        let extra = excess % (n + 1);
        let padding = padded - info_len + extra;
        let d = (excess - extra) / (n + 1);
        if let Ok(p) = CodeParameters::new(n, k, d, padding) {
            return Ok(p);
        }
    }
    Err(Error::InfeasibleParameters(format!(
        "no (N, K, D) reaches rate {rate} for L = {info_len}"
    )))
}

/// The standard set of valid block lengths.
pub fn standard_block_lengths() -> Vec<usize> {
    valid_block_lengths().collect()
}
