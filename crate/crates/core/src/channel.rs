//! BPSK over real AWGN and soft demodulation.
//!
//! Bit 0 maps to `+1`, bit 1 to `−1`, symbol energy `E_s = 1`. The SNR is
//! `ρ = E_s / N₀` and the per-dimension noise variance is `σ² = N₀ / 2`.
//! Noise is drawn with `rand_distr::StandardNormal` (ziggurat method) from
//! a caller-supplied RNG, so streams are reproducible and splittable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::exit::mutual_information_from_llrs;
use crate::{Bit, Llr};

/// Smallest noise variance the channel will use.
pub const SIGMA2_FLOOR: f64 = 1e-40;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub snr_db: f64,
    pub sigma2: f64,
}

impl ChannelConfig {
    pub fn from_snr_db(snr_db: f64) -> Self {
        let sigma2 = (1.0 / (2.0 * db_to_linear(snr_db))).max(SIGMA2_FLOOR);
        Self { snr_db, sigma2 }
    }

    pub fn snr_linear(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    /// Standard deviation of the channel LLRs, `σ̃ = 2 / σ`.
    pub fn llr_sigma(&self) -> f64 {
        2.0 / self.sigma2.sqrt()
    }
}

/// `σ̃` of the channel LLRs at `snr_db`.
pub fn llr_sigma_for_snr_db(snr_db: f64) -> f64 {
    ChannelConfig::from_snr_db(snr_db).llr_sigma()
}

/// Inverse of [`llr_sigma_for_snr_db`]: `σ̃² = 8ρ`.
pub fn snr_db_for_llr_sigma(sigma_tilde: f64) -> f64 {
    linear_to_db(sigma_tilde * sigma_tilde / 8.0)
}

#[inline]
pub fn bpsk(bit: Bit) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// An AWGN channel with its own RNG stream.
#[derive(Debug, Clone)]
pub struct AwgnChannel<R = ChaCha8Rng> {
    config: ChannelConfig,
    rng: R,
}

impl AwgnChannel<ChaCha8Rng> {
    pub fn seeded(config: ChannelConfig, seed: u64) -> Self {
        Self::with_rng(config, ChaCha8Rng::seed_from_u64(seed))
    }
}

impl<R: Rng> AwgnChannel<R> {
    pub fn with_rng(config: ChannelConfig, rng: R) -> Self {
        Self { config, rng }
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    /// `y = x + n`.
    pub fn transmit(&mut self, bits: &[Bit]) -> Vec<f64> {
        let sigma = self.config.sigma2.sqrt();
        bits.iter()
            .map(|&b| {
                let n: f64 = StandardNormal.sample(&mut self.rng);
                bpsk(b) + sigma * n
            })
            .collect()
    }

    /// Transmit and demodulate in one step.
    pub fn transmit_llr<T: Llr>(&mut self, bits: &[Bit]) -> Vec<T> {
        let y = self.transmit(bits);
        demodulate_llr(&y, &self.config)
    }
}

/// Natural-log LLR `2y/σ²`, saturated.
pub fn demodulate_llr<T: Llr>(y: &[f64], config: &ChannelConfig) -> Vec<T> {
    let scale = 2.0 / config.sigma2;
    y.iter().map(|&v| T::lit(v * scale).saturate()).collect()
}

/// Empirical `I(V; L(V))` of the demodulated channel at `snr_db` over
/// `samples` uniformly random bits.
pub fn llr_consistency_check(snr_db: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits: Vec<Bit> = (0..samples).map(|_| rng.random_range(0..2)).collect();
    let mut ch = AwgnChannel::with_rng(ChannelConfig::from_snr_db(snr_db), rng);
    let llr: Vec<f64> = ch.transmit_llr(&bits);
    mutual_information_from_llrs(&llr, &bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exit::j_function;

    #[test]
    fn db_conversion_is_exact() {
        for db in [-7.5, -5.0, 0.0, 3.0, 10.0] {
            let back = linear_to_db(db_to_linear(db));
            assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
        }
        let c = ChannelConfig::from_snr_db(0.0);
        assert!((c.sigma2 - 0.5).abs() < 1e-15);
        assert!((snr_db_for_llr_sigma(llr_sigma_for_snr_db(-5.3)) + 5.3).abs() < 1e-12);
    }

    #[test]
    fn floor_gives_noiseless_symbols() {
        let mut ch = AwgnChannel::seeded(ChannelConfig::from_snr_db(1000.0), 1);
        assert_eq!(ch.config().sigma2, SIGMA2_FLOOR);
        assert_eq!(ch.transmit(&[0, 1, 1, 0]), vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn noise_moments() {
        let cfg = ChannelConfig::from_snr_db(-3.0);
        let mut ch = AwgnChannel::seeded(cfg, 99);
        let n = 1_000_000;
        let bits: Vec<Bit> = (0..n).map(|i| (i % 2) as Bit).collect();
        let y = ch.transmit(&bits);
        let noise: Vec<f64> = y.iter().zip(&bits).map(|(v, &b)| v - bpsk(b)).collect();
        let mean = noise.iter().sum::<f64>() / n as f64;
        let var = noise.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let sigma = cfg.sigma2.sqrt();
        assert!(mean.abs() < 4.0 * sigma / 1e3);
        assert!((var / cfg.sigma2 - 1.0).abs() < 0.01);
    }

    #[test]
    fn demodulation_closed_form() {
        let cfg = ChannelConfig {
            snr_db: 0.0,
            sigma2: 0.5,
        };
        let l: Vec<f64> = demodulate_llr(&[0.0, 1.0, -0.3], &cfg);
        assert_eq!(l[0], 0.0);
        assert!((l[1] - 4.0).abs() < 1e-15);
        assert!(l[2] < 0.0);
        // ln of the Gaussian likelihood ratio, evaluated numerically
        let y: f64 = 1.0;
        let like = |x: f64| (-(y - x).powi(2) / (2.0 * 0.5)).exp();
        assert!(((like(1.0) / like(-1.0)).ln() - l[1]).abs() < 1e-12);
    }

    #[test]
    fn identical_seeds_reproduce() {
        let cfg = ChannelConfig::from_snr_db(-2.0);
        let a = AwgnChannel::seeded(cfg, 5).transmit(&[0; 64]);
        let b = AwgnChannel::seeded(cfg, 5).transmit(&[0; 64]);
        let c = AwgnChannel::seeded(cfg, 6).transmit(&[0; 64]);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn llr_statistics_are_consistent() {
        for db in [-6.0, -3.0, 0.0] {
            let cfg = ChannelConfig::from_snr_db(db);
            let mut ch = AwgnChannel::seeded(cfg, 17);
            let n = 200_000;
            let l: Vec<f64> = ch.transmit_llr(&vec![0; n]);
            let mean = l.iter().sum::<f64>() / n as f64;
            let var = l.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            let st = cfg.llr_sigma();
            assert!((mean / (st * st / 2.0) - 1.0).abs() < 0.02, "{db}");
            assert!((var / (st * st) - 1.0).abs() < 0.02, "{db}");
        }
    }

    /// Histogram estimate of I(V; L) from the class-conditional densities.
    fn histogram_mi(llr: &[f64], bits: &[Bit]) -> f64 {
        let (lo, hi, nb) = (-60.0, 60.0, 1200usize);
        let mut h = vec![[0f64; 2]; nb];
        let mut counts = [0f64; 2];
        for (&l, &b) in llr.iter().zip(bits) {
            let idx = (((l - lo) / (hi - lo)) * nb as f64).clamp(0.0, nb as f64 - 1.0) as usize;
            h[idx][b as usize] += 1.0;
            counts[b as usize] += 1.0;
        }
        let mut mi = 0.0;
        for bin in &h {
            for v in 0..2 {
                let p = bin[v] / counts[v];
                if p > 0.0 {
                    let q0 = bin[0] / counts[0];
                    let q1 = bin[1] / counts[1];
                    mi += 0.5 * p * (2.0 * p / (q0 + q1)).log2();
                }
            }
        }
        mi
    }

    #[test]
    fn consistency_check_matches_j_at_zero_db() {
        let est = llr_consistency_check(0.0, 1_000_000, 3);
        let j = j_function(llr_sigma_for_snr_db(0.0));
        assert!((est - j).abs() < 0.005, "{est} vs {j}");

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let bits: Vec<Bit> = (0..1_000_000).map(|_| rng.random_range(0..2)).collect();
        let mut ch = AwgnChannel::with_rng(ChannelConfig::from_snr_db(0.0), rng);
        let llr: Vec<f64> = ch.transmit_llr(&bits);
        assert!((histogram_mi(&llr, &bits) - j).abs() < 0.005);
    }

    #[test]
    fn consistency_check_limits() {
        assert!(llr_consistency_check(-40.0, 100_000, 1) < 0.01);
        assert!(llr_consistency_check(15.0, 100_000, 1) > 0.999);
    }
}
