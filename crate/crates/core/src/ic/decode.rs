//! Intra-CB decoding and the two inter-CB schedules.
//!
//! Messages between neighbouring blocks are extrinsic LLRs on the shared
//! bits. Block `n` sends its post-position extrinsics forward (they become
//! block `n + 1`'s pre a priori) and its pre-position extrinsics backward
//! (block `n − 1`'s post a priori).

use serde::{Deserialize, Serialize};

use super::layout::{reassemble, CbLayout};
use super::params::CodeParameters;
use crate::crc::{crc24_passes, CrcPolynomial, CRC24A, CRC24B};
use crate::turbo::{LlrFrame, TurboDecoder};
use crate::{Bit, Error, Llr, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct IntraCbOutput<T> {
    /// All `K` bits, CRC included.
    pub estimate: Vec<Bit>,
    pub pre_e: Vec<T>,
    pub post_e: Vec<T>,
    pub crc_pass: bool,
    pub iterations: usize,
}

/// Decodes one block with external a priori on its coupled positions.
///
/// Dummy ends get saturated priors regardless of `pre_a`/`post_a`. The
/// returned extrinsics exclude both the injected priors and the channel
/// systematic LLRs.
pub fn intra_cb_decode<T: Llr>(
    decoder: &TurboDecoder<'_>,
    frame: &LlrFrame<T>,
    pre_a: &[T],
    post_a: &[T],
    layout: &CbLayout,
    max_iters: usize,
    cb_crc: CrcPolynomial,
) -> Result<IntraCbOutput<T>> {
    let d = layout.pre.len();
    if pre_a.len() != d || post_a.len() != d {
        return Err(Error::MalformedInput(format!(
            "coupling priors must have length {d}, got {} and {}",
            pre_a.len(),
            post_a.len()
        )));
    }
    let mut f = frame.clone();
    for (j, &p) in layout.pre.iter().enumerate() {
        f.apriori[p] = if layout.is_head_dummy() {
            T::saturation()
        } else {
            pre_a[j]
        };
    }
    for (j, &p) in layout.post.iter().enumerate() {
        f.apriori[p] = if layout.is_tail_dummy() {
            T::saturation()
        } else {
            post_a[j]
        };
    }
    let stop = |bits: &[Bit]| crc24_passes(bits, cb_crc);
    let out = decoder.decode(&f, max_iters, Some(&stop))?;
    Ok(IntraCbOutput {
        pre_e: out.extrinsic_at(&layout.pre),
        post_e: out.extrinsic_at(&layout.post),
        crc_pass: out.stop_satisfied,
        iterations: out.iterations,
        estimate: out.estimate,
    })
}

/// Which messages a pass reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MessageSchedule {
    /// The latest message available when a block is decoded.
    #[default]
    Freshest,
    /// Only messages produced in earlier passes.
    PreviousRound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterCbConfig {
    pub cb_iters: usize,
    pub tb_iters: usize,
    pub window_iters: usize,
    pub schedule: MessageSchedule,
}

impl Default for InterCbConfig {
    fn default() -> Self {
        Self {
            cb_iters: 8,
            tb_iters: 20,
            window_iters: 6,
            schedule: MessageSchedule::Freshest,
        }
    }
}

/// Extrinsic messages on each of the `N − 1` boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMessages<T> {
    pub forward_e: Vec<Vec<T>>,
    pub backward_e: Vec<Vec<T>>,
    pub forward_a: Vec<Vec<T>>,
    pub backward_a: Vec<Vec<T>>,
}

impl<T: Llr> CouplingMessages<T> {
    pub fn zeros(boundaries: usize, d: usize) -> Self {
        let z = vec![vec![T::zero(); d]; boundaries];
        Self {
            forward_e: z.clone(),
            backward_e: z.clone(),
            forward_a: z.clone(),
            backward_a: z,
        }
    }

    fn publish(&mut self) {
        self.forward_a.clone_from(&self.forward_e);
        self.backward_a.clone_from(&self.backward_e);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DecodeStats {
    /// Intra-CB decoder calls per block.
    pub decode_invocations: Vec<usize>,
    /// Inter-CB passes run (FF-FB) or windows opened (WD).
    pub inter_iterations: usize,
    /// Fraction of blocks not yet decoded before each pass; starts at 1.
    pub undecoded_fractions: Vec<f64>,
    /// Blocks in the order their final estimates were released (WD).
    pub emission_order: Vec<usize>,
    pub cb_crc_pass: Vec<bool>,
    pub tb_crc_pass: bool,
}

impl DecodeStats {
    fn new(n: usize) -> Self {
        Self {
            decode_invocations: vec![0; n],
            cb_crc_pass: vec![false; n],
            ..Self::default()
        }
    }

    pub fn total_invocations(&self) -> usize {
        self.decode_invocations.iter().sum()
    }

    pub fn average_decodes_per_cb(&self) -> f64 {
        self.total_invocations() as f64 / self.decode_invocations.len().max(1) as f64
    }
}

/// Average decodes per block scaled by `⌈(L+D)/(K−D)⌉ / ⌈L/K⌉`, the block
/// count ratio against an uncoupled code of the same length.
pub fn complexity_report(stats: &DecodeStats, params: &CodeParameters) -> f64 {
    stats.average_decodes_per_cb() * block_count_ratio(params)
}

/// Blocks needed with coupling over blocks needed without, for the same
/// information length.
pub fn block_count_ratio(params: &CodeParameters) -> f64 {
    let (l, k, d) = (params.info_len, params.cb_len, params.coupling_len);
    (l + d).div_ceil(k - d) as f64 / l.div_ceil(k) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterCbOutput {
    pub cb_estimates: Vec<Vec<Bit>>,
    /// Reassembled payload (TB with its CRC), padding stripped.
    pub payload: Vec<Bit>,
    pub stats: DecodeStats,
}

/// Everything the inter-CB decoders need besides the frames.
#[derive(Debug, Clone, Copy)]
pub struct IcDecoder<'a> {
    pub params: &'a CodeParameters,
    pub layouts: &'a [CbLayout],
    pub turbo: TurboDecoder<'a>,
    pub config: InterCbConfig,
    pub cb_crc: CrcPolynomial,
    pub tb_crc: CrcPolynomial,
}

impl<'a> IcDecoder<'a> {
    pub fn new(
        params: &'a CodeParameters,
        layouts: &'a [CbLayout],
        turbo: TurboDecoder<'a>,
        config: InterCbConfig,
    ) -> Self {
        Self {
            params,
            layouts,
            turbo,
            config,
            cb_crc: CRC24B,
            tb_crc: CRC24A,
        }
    }

    fn check(&self, frames_len: usize) -> Result<()> {
        if frames_len != self.layouts.len() {
            return Err(Error::MalformedInput(format!(
                "{frames_len} frames for {} blocks",
                self.layouts.len()
            )));
        }
        Ok(())
    }

    fn decode_one<T: Llr>(
        &self,
        frame: &LlrFrame<T>,
        n: usize,
        pre_a: &[T],
        post_a: &[T],
    ) -> Result<IntraCbOutput<T>> {
        intra_cb_decode(
            &self.turbo,
            frame,
            pre_a,
            post_a,
            &self.layouts[n],
            self.config.cb_iters,
            self.cb_crc,
        )
    }

    fn finish(
        &self,
        cb_estimates: Vec<Vec<Bit>>,
        mut stats: DecodeStats,
        all_cbs_ok: bool,
    ) -> InterCbOutput {
        let payload = reassemble(&cb_estimates, self.layouts, self.params);
        stats.tb_crc_pass = all_cbs_ok && crc24_passes(&payload, self.tb_crc);
        InterCbOutput {
            cb_estimates,
            payload,
            stats,
        }
    }

    /// Feed-forward/feed-back decoding.
    pub fn ff_fb_decode<T: Llr>(&self, frames: &[LlrFrame<T>]) -> Result<InterCbOutput> {
        self.ff_fb_decode_observed(frames, |_, _| {})
    }

    /// As [`Self::ff_fb_decode`], calling `observer(pass, estimates)` after
    /// every pass (`pass` counts from 1).
    pub fn ff_fb_decode_observed<T: Llr>(
        &self,
        frames: &[LlrFrame<T>],
        mut observer: impl FnMut(usize, &[Vec<Bit>]),
    ) -> Result<InterCbOutput> {
        self.check(frames.len())?;
        let n = frames.len();
        let d = self.params.coupling_len;
        let zeros = vec![T::zero(); d];
        let mut msg = CouplingMessages::<T>::zeros(n - 1, d);
        let mut stats = DecodeStats::new(n);
        let mut estimates: Vec<Vec<Bit>> = self.layouts.iter().map(|l| vec![0; l.cb_len]).collect();
        let mut decoded = vec![false; n];

        for pass in 1..=self.config.tb_iters.max(1) {
            let remaining = decoded.iter().filter(|&&x| !x).count();
            stats.undecoded_fractions.push(remaining as f64 / n as f64);
            stats.inter_iterations = pass;
            let order: Vec<usize> = if pass % 2 == 1 {
                (0..n).collect()
            } else {
                (0..n).rev().collect()
            };
            msg.publish();
            for cb in order {
                if decoded[cb] {
                    continue;
                }
                let fresh = self.config.schedule == MessageSchedule::Freshest;
                let pre_a = match cb {
                    0 => &zeros,
                    _ if fresh => &msg.forward_e[cb - 1],
                    _ => &msg.forward_a[cb - 1],
                };
                let post_a = match cb {
                    _ if cb + 1 == n => &zeros,
                    _ if fresh => &msg.backward_e[cb],
                    _ => &msg.backward_a[cb],
                };
                let out = self.decode_one(&frames[cb], cb, pre_a, post_a)?;
                stats.decode_invocations[cb] += 1;
                if cb + 1 < n {
                    msg.forward_e[cb] = out.post_e;
                }
                if cb > 0 {
                    msg.backward_e[cb - 1] = out.pre_e;
                }
                decoded[cb] = out.crc_pass;
                estimates[cb] = out.estimate;
            }
            observer(pass, &estimates);
            if decoded.iter().all(|&x| x) {
                break;
            }
        }
        stats.cb_crc_pass = decoded.clone();
        let all = decoded.iter().all(|&x| x);
        Ok(self.finish(estimates, stats, all))
    }

    /// Windowed decoding over pairs of consecutive blocks.
    pub fn wd_decode<T: Llr>(&self, frames: &[LlrFrame<T>]) -> Result<InterCbOutput> {
        self.check(frames.len())?;
        let n = frames.len();
        let d = self.params.coupling_len;
        let zeros = vec![T::zero(); d];
        let mut stats = DecodeStats::new(n);
        let mut estimates: Vec<Vec<Bit>> = self.layouts.iter().map(|l| vec![0; l.cb_len]).collect();
        let mut forward_in = zeros.clone();
        let mut all_ok = true;

        for cb in 0..n {
            stats.inter_iterations = cb + 1;
            stats.undecoded_fractions.push((n - cb) as f64 / n as f64);
            let out = if cb + 1 == n {
                stats.decode_invocations[cb] += 1;
                self.decode_one(&frames[cb], cb, &forward_in, &zeros)?
            } else {
                let mut backward = zeros.clone();
                let mut i_wd = 0;
                loop {
                    let out = self.decode_one(&frames[cb], cb, &forward_in, &backward)?;
                    stats.decode_invocations[cb] += 1;
                    i_wd += 1;
                    if out.crc_pass || i_wd >= self.config.window_iters.max(1) {
                        break out;
                    }
                    let next = self.decode_one(&frames[cb + 1], cb + 1, &out.post_e, &zeros)?;
                    stats.decode_invocations[cb + 1] += 1;
                    backward = next.pre_e;
                }
            };
            estimates[cb] = out.estimate;
            stats.cb_crc_pass[cb] = out.crc_pass;
            if !out.crc_pass {
                all_ok = false;
                break;
            }
            stats.emission_order.push(cb);
            forward_in = out.post_e;
        }
        Ok(self.finish(estimates, stats, all_ok))
    }
}
