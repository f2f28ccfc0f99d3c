//! Monte Carlo transfer curves of the constituent decoder.
//!
//! The all-zero codeword is used throughout (the code is linear and the
//! decoder symmetric). Channel and a priori LLRs are built from one set of
//! standard-normal draws per seed, scaled to each `σ̃`, so curves at
//! neighbouring parameters share their noise and the family is smooth in
//! `σ̃`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curve::{standard_grid, ExitCurve};
use super::jfunc::{j_inverse, mutual_information_all_zero};
use crate::rate_matching::{repeat_to_length, repetition_profile, RepetitionMode};
use crate::turbo::{bcjr_decode_into, BcjrWorkspace, Trellis, MOTHER_RATE};
use crate::{Error, Result};

/// Sample budget and frame shape for curve generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitSimConfig {
    /// Information bits per I_A grid point.
    pub bits_per_point: usize,
    /// Length of each terminated frame.
    pub frame_len: usize,
    pub seed: u64,
}

impl Default for ExitSimConfig {
    fn default() -> Self {
        Self {
            bits_per_point: 100_000,
            frame_len: 10_000,
            seed: 0x00E1_7C0D,
        }
    }
}

impl ExitSimConfig {
    /// Budget used for decoding thresholds. At 10^5 bits per point the
    /// threshold still moves by up to 0.1 dB between seeds, because the
    /// whole family shares one noise bank; at 10^6 it moves by about 0.03 dB.
    pub fn threshold_grade() -> Self {
        Self {
            bits_per_point: 1_000_000,
            ..Self::default()
        }
    }
}

impl ExitSimConfig {
    fn frames(&self) -> usize {
        self.bits_per_point.div_ceil(self.frame_len)
    }
}

/// Shared standard-normal draws for one configuration.
#[derive(Debug, Clone)]
pub(crate) struct NoiseBank {
    pub frame_len: usize,
    pub steps: usize,
    /// Per frame: systematic noise (steps), parity noise (steps), prior
    /// noise (frame_len).
    pub sys: Vec<Vec<f64>>,
    pub par: Vec<Vec<f64>>,
    pub prior: Vec<Vec<f64>>,
}

impl NoiseBank {
    pub fn new(cfg: &ExitSimConfig, memory: usize) -> Self {
        let steps = cfg.frame_len + memory;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut draw =
            |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };
        let frames = cfg.frames();
        let mut sys = Vec::with_capacity(frames);
        let mut par = Vec::with_capacity(frames);
        let mut prior = Vec::with_capacity(frames);
        for _ in 0..frames {
            sys.push(draw(steps));
            par.push(draw(steps));
            prior.push(draw(cfg.frame_len));
        }
        Self {
            frame_len: cfg.frame_len,
            steps,
            sys,
            par,
            prior,
        }
    }
}

#[inline]
pub(crate) fn consistent(sigma: f64, noise: f64) -> f64 {
    sigma * sigma / 2.0 + sigma * noise
}

/// How the channel observes the constituent codeword.
#[derive(Debug, Clone)]
pub(crate) enum Observation {
    /// One BPSK observation per coded bit.
    Single,
    /// Chase-combined copies per frame and step, for the systematic and
    /// parity streams. `c` copies at `σ̃` are distributed as one observation
    /// at `√c·σ̃`.
    Repeated {
        sys: Vec<Vec<u32>>,
        par: Vec<Vec<u32>>,
    },
    /// Information positions known to the receiver (not transmitted,
    /// saturated prior).
    Known(Vec<bool>),
}

/// Extrinsic mutual information at one `(σ̃_ch, I_A)` point.
pub(crate) fn extrinsic_mi(
    trellis: &Trellis,
    bank: &NoiseBank,
    sigma_ch_tilde: f64,
    prior_sigma: f64,
    obs: &Observation,
) -> f64 {
    let mut ws = BcjrWorkspace::new();
    let mut sys = vec![0.0; bank.steps];
    let mut par = vec![0.0; bank.steps];
    let mut apr = vec![0.0; bank.frame_len];
    let mut ext = vec![0.0; bank.frame_len];
    let mut all = Vec::with_capacity(bank.frame_len * bank.sys.len());
    for f in 0..bank.sys.len() {
        for t in 0..bank.steps {
            let (s_sys, s_par) = match obs {
                Observation::Repeated { sys, par } => (
                    sigma_ch_tilde * (sys[f][t] as f64).sqrt(),
                    sigma_ch_tilde * (par[f][t] as f64).sqrt(),
                ),
                _ => (sigma_ch_tilde, sigma_ch_tilde),
            };
            sys[t] = consistent(s_sys, bank.sys[f][t]);
            par[t] = consistent(s_par, bank.par[f][t]);
        }
        for t in 0..bank.frame_len {
            apr[t] = consistent(prior_sigma, bank.prior[f][t]);
        }
        if let Observation::Known(mask) = obs {
            for (t, _) in mask.iter().enumerate().filter(|(_, &k)| k) {
                sys[t] = 0.0;
                apr[t] = crate::LLR_SATURATION;
            }
        }
        bcjr_decode_into(trellis, &sys, &par, &apr, &mut ws, &mut ext, None);
        all.extend_from_slice(&ext);
    }
    mutual_information_all_zero(&all)
}

fn curve_from_bank(
    sigma_ch_tilde: f64,
    trellis: &Trellis,
    bank: &NoiseBank,
    obs: &Observation,
) -> ExitCurve {
    let grid = standard_grid();
    let ie: Vec<f64> = grid
        .par_iter()
        .map(|&ia| extrinsic_mi(trellis, bank, sigma_ch_tilde, j_inverse(ia), obs))
        .collect();
    ExitCurve::from_raw(sigma_ch_tilde, &grid, &ie)
}

/// Simulated transfer curve of the constituent decoder when its coded bits
/// are repeated to `rate` with a random repetition pattern and
/// chase-combined, at channel quality `σ̃_ch`.
pub fn simulate_repetition_exit(
    sigma_ch_tilde: f64,
    rate: f64,
    trellis: &Trellis,
    cfg: &ExitSimConfig,
) -> Result<ExitCurve> {
    let profile = repetition_profile(rate, MOTHER_RATE)?;
    let bank = NoiseBank::new(cfg, trellis.memory());
    let len = 2 * bank.steps;
    let target = profile.transmitted_len(len);
    let frames = bank.sys.len();
    let (mut sys, mut par) = (Vec::with_capacity(frames), Vec::with_capacity(frames));
    for f in 0..frames {
        let seed = cfg.seed ^ (0xA5A5_0000 + f as u64);
        let m = repeat_to_length(len, target, RepetitionMode::Random, seed).multiplicities();
        sys.push(m[..bank.steps].iter().map(|&c| c as u32).collect());
        par.push(m[bank.steps..].iter().map(|&c| c as u32).collect());
    }
    Ok(curve_from_bank(
        sigma_ch_tilde,
        trellis,
        &bank,
        &Observation::Repeated { sys, par },
    ))
}

/// Simulated transfer curve with a fraction of the information positions
/// replaced by known dummy bits, spread evenly over the frame. The output
/// is averaged over all positions.
pub fn simulate_dummy_bit_exit(
    sigma_ch_tilde: f64,
    known_fraction: f64,
    trellis: &Trellis,
    cfg: &ExitSimConfig,
) -> ExitCurve {
    let bank = NoiseBank::new(cfg, trellis.memory());
    let mask = (0..bank.frame_len)
        .map(|t| ((t + 1) as f64 * known_fraction).floor() > (t as f64 * known_fraction).floor())
        .collect();
    curve_from_bank(sigma_ch_tilde, trellis, &bank, &Observation::Known(mask))
}

/// Constituent transfer curve `I_E = F(I_A; σ̃_ch)` on the standard grid.
pub fn generate_mother_exit(
    sigma_ch_tilde: f64,
    trellis: &Trellis,
    cfg: &ExitSimConfig,
) -> ExitCurve {
    let bank = NoiseBank::new(cfg, trellis.memory());
    mother_from_bank(sigma_ch_tilde, trellis, &bank)
}

fn mother_from_bank(sigma_ch_tilde: f64, trellis: &Trellis, bank: &NoiseBank) -> ExitCurve {
    curve_from_bank(sigma_ch_tilde, trellis, bank, &Observation::Single)
}

/// Mother curves on a uniform `σ̃_ch` grid, interpolated in between.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExitFamily {
    pub sigma_min: f64,
    pub sigma_step: f64,
    pub curves: Vec<ExitCurve>,
}

/// Default `σ̃_ch` spacing of a family.
pub const FAMILY_STEP: f64 = 0.05;

impl ExitFamily {
    pub fn generate(
        trellis: &Trellis,
        sigma_min: f64,
        sigma_max: f64,
        sigma_step: f64,
        cfg: &ExitSimConfig,
    ) -> Self {
        assert!(sigma_step > 0.0 && sigma_max >= sigma_min);
        let bank = NoiseBank::new(cfg, trellis.memory());
        let n = ((sigma_max - sigma_min) / sigma_step - 1e-9).ceil() as usize + 1;
        let curves = (0..n)
            .map(|i| mother_from_bank(sigma_min + i as f64 * sigma_step, trellis, &bank))
            .collect();
        Self {
            sigma_min,
            sigma_step,
            curves,
        }
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_min + (self.curves.len() - 1) as f64 * self.sigma_step
    }

    /// Curve at `σ̃_ch`, linear in `σ̃` between the two neighbouring members.
    pub fn curve_at(&self, sigma: f64) -> Result<ExitCurve> {
        let pos = (sigma - self.sigma_min) / self.sigma_step;
        let last = (self.curves.len() - 1) as f64;
        if !(-1e-9..=last + 1e-9).contains(&pos) {
            return Err(Error::Configuration(format!(
                "sigma {sigma:.4} outside the EXIT family range [{:.3}, {:.3}]",
                self.sigma_min,
                self.sigma_max()
            )));
        }
        let pos = pos.clamp(0.0, last);
        let i0 = (pos.floor() as usize).min(self.curves.len() - 1);
        let i1 = (i0 + 1).min(self.curves.len() - 1);
        let w = pos - i0 as f64;
        let (c0, c1) = (&self.curves[i0], &self.curves[i1]);
        let ia = c0.abscissa();
        let ie: Vec<f64> = c0
            .samples
            .iter()
            .zip(&c1.samples)
            .map(|(a, b)| (1.0 - w) * a.1 + w * b.1)
            .collect();
        Ok(ExitCurve::from_raw(sigma, &ia, &ie))
    }
}
