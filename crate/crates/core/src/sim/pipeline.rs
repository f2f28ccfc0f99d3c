//! Per-TB transmit/receive chains for the IC schemes and the LTE baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Scheme, SimConfig};
use crate::channel::{AwgnChannel, ChannelConfig};
use crate::crc::{crc24_attach, crc24_compute, crc24_passes, CRC24A, CRC24B, CRC_LEN};
use crate::ic::{
    build_layouts, route_channel_llrs, segment_and_couple, select_transmitted_bits,
    standard_block_lengths, CbLayout, CodeParameters, IcDecoder, InterCbOutput,
};
use crate::rate_matching::{chase_combine, repeat_to_length, RepetitionMap};
use crate::turbo::{turbo_encode, Interleaver, LlrFrame, Trellis, TurboDecoder, TAIL_LEN};
use crate::{Bit, Error, Llr, Result};

/// RNG for one TB: the payload bits are drawn first, then the channel
/// noise. Depends only on `(seed, snr_index, tb_index)`, so every scheme
/// sees the same payload and the same noise sequence.
pub fn tb_rng(seed: u64, snr_index: usize, tb_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 40) ^ tb_index);
    rng
}

/// LTE segmentation carrying the same payload in the same number of
/// channel symbols (tails excluded) as a given IC code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LteBaseline {
    pub payload_len: usize,
    pub num_cbs: usize,
    pub cb_len: usize,
    /// Known zero bits at the start of the first block.
    pub filler: usize,
    /// Symbols per block before the tail.
    pub symbols_per_cb: Vec<usize>,
}

impl LteBaseline {
    pub fn matched(params: &CodeParameters, valid: &[usize]) -> Result<Self> {
        let b = params.payload_len();
        let k_max = params.cb_len;
        let num_cbs = b.div_ceil(k_max - CRC_LEN);
        let need = b.div_ceil(num_cbs) + CRC_LEN;
        let cb_len = valid
            .iter()
            .copied()
            .filter(|&k| k >= need && k <= k_max)
            .min()
            .unwrap_or(need);
        let filler = num_cbs * (cb_len - CRC_LEN) - b;
        let total = params.transmitted_len();
        let per = total / num_cbs;
        let extra = total % num_cbs;
        let symbols_per_cb: Vec<usize> = (0..num_cbs)
            .map(|c| per + usize::from(c >= num_cbs - extra))
            .collect();
        let s = Self {
            payload_len: b,
            num_cbs,
            cb_len,
            filler,
            symbols_per_cb,
        };
        for c in 0..num_cbs {
            if s.symbols_per_cb[c] < s.buffer_len(c) {
                return Err(Error::InfeasibleParameters(format!(
                    "LTE block {c} needs {} symbols but only {} are available",
                    s.buffer_len(c),
                    s.symbols_per_cb[c]
                )));
            }
        }
        Ok(s)
    }

    fn filler_of(&self, cb: usize) -> usize {
        if cb == 0 {
            self.filler
        } else {
            0
        }
    }

    /// Circular-buffer length of block `cb`: systematic bits except filler,
    /// then interlaced parity pairs.
    pub fn buffer_len(&self, cb: usize) -> usize {
        3 * self.cb_len - self.filler_of(cb)
    }

    /// Effective rate of the baseline (payload over symbols, tails excluded).
    pub fn rate(&self) -> f64 {
        self.payload_len as f64 / self.symbols_per_cb.iter().sum::<usize>() as f64
    }

    fn segment(&self, payload: &[Bit]) -> Vec<Vec<Bit>> {
        let mut src = payload.iter().copied();
        (0..self.num_cbs)
            .map(|c| {
                let mut cb = vec![0; self.cb_len];
                let data = self.cb_len - CRC_LEN;
                for bit in cb.iter_mut().take(data).skip(self.filler_of(c)) {
                    *bit = src.next().expect("segment sizes add up");
                }
                let crc = crc24_compute(&cb[..data], CRC24B);
                cb[data..].copy_from_slice(&crc);
                cb
            })
            .collect()
    }

    fn gather(&self, cbs: &[Vec<Bit>]) -> Vec<Bit> {
        let data = self.cb_len - CRC_LEN;
        cbs.iter()
            .enumerate()
            .flat_map(|(c, cb)| cb[self.filler_of(c)..data].iter().copied())
            .collect()
    }
}

/// Outcome of one simulated TB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TbOutcome {
    pub tb_error: bool,
    /// The TB CRC passed on a wrong payload.
    pub undetected: bool,
    pub cb_errors: Vec<bool>,
    pub decode_invocations: usize,
    pub inter_iterations: usize,
    /// Block error flags after each inter-CB pass (FF-FB with recording).
    pub pass_cb_errors: Vec<Vec<bool>>,
}

#[derive(Debug)]
enum Chain {
    Ic { layouts: Vec<CbLayout> },
    Lte { baseline: LteBaseline },
}

/// Everything that stays fixed across TBs of one configuration.
#[derive(Debug)]
pub struct Session {
    pub config: SimConfig,
    pub params: CodeParameters,
    trellis: Trellis,
    interleaver: Interleaver,
    chain: Chain,
}

impl Session {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let params = config.code.resolve()?;
        let trellis = Trellis::lte();
        let seed = Some(config.code.interleaver_seed);
        let (chain, k) = match config.scheme {
            Scheme::Lte => {
                let omega = config
                    .code
                    .block_lengths
                    .clone()
                    .unwrap_or_else(standard_block_lengths);
                let baseline = LteBaseline::matched(&params, &omega)?;
                let k = baseline.cb_len;
                (Chain::Lte { baseline }, k)
            }
            Scheme::IcFfFb | Scheme::IcWd => (
                Chain::Ic {
                    layouts: build_layouts(&params),
                },
                params.cb_len,
            ),
        };
        let interleaver = Interleaver::for_block_length(k, seed)?;
        Ok(Self {
            config: config.clone(),
            params,
            trellis,
            interleaver,
            chain,
        })
    }

    pub fn num_cbs(&self) -> usize {
        match &self.chain {
            Chain::Ic { .. } => self.params.num_cbs,
            Chain::Lte { baseline } => baseline.num_cbs,
        }
    }

    pub fn lte_baseline(&self) -> Option<&LteBaseline> {
        match &self.chain {
            Chain::Lte { baseline } => Some(baseline),
            Chain::Ic { .. } => None,
        }
    }

    /// Simulates TB `tb_index` at SNR point `snr_index`.
    pub fn run_tb<T: Llr>(
        &self,
        snr_index: usize,
        snr_db: f64,
        tb_index: u64,
        record_passes: bool,
    ) -> Result<TbOutcome> {
        let mut rng = tb_rng(self.config.seed, snr_index, tb_index);
        let tb: Vec<Bit> = (0..self.params.payload_len() - CRC_LEN)
            .map(|_| rng.random_range(0..2))
            .collect();
        let payload = crc24_attach(&tb, CRC24A);
        let mut channel = AwgnChannel::with_rng(ChannelConfig::from_snr_db(snr_db), rng);
        match &self.chain {
            Chain::Ic { layouts } => {
                self.run_ic::<T>(&payload, layouts, &mut channel, record_passes)
            }
            Chain::Lte { baseline } => {
                self.run_lte::<T>(&payload, baseline, &mut channel, tb_index)
            }
        }
    }

    fn run_ic<T: Llr>(
        &self,
        payload: &[Bit],
        layouts: &[CbLayout],
        channel: &mut AwgnChannel,
        record_passes: bool,
    ) -> Result<TbOutcome> {
        let (cbs, _) = segment_and_couple(payload, &self.params, CRC24B)?;
        let cws = cbs
            .iter()
            .map(|cb| turbo_encode(cb, &self.interleaver, &self.trellis))
            .collect::<Result<Vec<_>>>()?;
        let tx = select_transmitted_bits(&cws, layouts)?;
        let llrs: Vec<T> = channel.transmit_llr(&tx.bits());
        let frames = route_channel_llrs(&llrs, &tx, layouts)?;
        let dec = IcDecoder::new(
            &self.params,
            layouts,
            TurboDecoder::new(&self.trellis, &self.interleaver),
            self.config.decoder,
        );
        let errors_of =
            |est: &[Vec<Bit>]| -> Vec<bool> { est.iter().zip(&cbs).map(|(a, b)| a != b).collect() };
        let mut passes = Vec::new();
        let out: InterCbOutput = match self.config.scheme {
            Scheme::IcWd => dec.wd_decode(&frames)?,
            _ if record_passes => {
                dec.ff_fb_decode_observed(&frames, |_, est| passes.push(errors_of(est)))?
            }
            _ => dec.ff_fb_decode(&frames)?,
        };
        let wrong = out.payload != payload;
        Ok(TbOutcome {
            tb_error: wrong || !out.stats.tb_crc_pass,
            undetected: wrong && out.stats.tb_crc_pass,
            cb_errors: errors_of(&out.cb_estimates),
            decode_invocations: out.stats.total_invocations(),
            inter_iterations: out.stats.inter_iterations,
            pass_cb_errors: passes,
        })
    }

    fn run_lte<T: Llr>(
        &self,
        payload: &[Bit],
        base: &LteBaseline,
        channel: &mut AwgnChannel,
        tb_index: u64,
    ) -> Result<TbOutcome> {
        let k = base.cb_len;
        let cbs = base.segment(payload);
        let mode = self.config.repetition;
        let mut maps: Vec<RepetitionMap> = Vec::with_capacity(base.num_cbs);
        let mut symbols = Vec::new();
        for (c, cb) in cbs.iter().enumerate() {
            let cw = turbo_encode(cb, &self.interleaver, &self.trellis)?;
            let f = base.filler_of(c);
            let mut buffer: Vec<Bit> = cw.systematic[f..].to_vec();
            for i in 0..k {
                buffer.push(cw.parity1[i]);
                buffer.push(cw.parity2[i]);
            }
            let map = repeat_to_length(
                buffer.len(),
                base.symbols_per_cb[c],
                mode,
                repetition_seed(tb_index, c),
            );
            symbols.extend(map.sources.iter().map(|&i| buffer[i]));
            symbols.extend_from_slice(&cw.tail);
            maps.push(map);
        }
        let llrs: Vec<T> = channel.transmit_llr(&symbols);
        let decoder = TurboDecoder::new(&self.trellis, &self.interleaver);
        let stop = |bits: &[Bit]| crc24_passes(bits, CRC24B);
        let mut offset = 0;
        let mut estimates = Vec::with_capacity(base.num_cbs);
        let mut cb_ok = Vec::with_capacity(base.num_cbs);
        for (c, map) in maps.iter().enumerate() {
            let comb = chase_combine(&llrs[offset..offset + map.len()], map);
            offset += map.len();
            let f = base.filler_of(c);
            let mut frame = LlrFrame::<T>::zeros(k);
            for i in 0..f {
                frame.systematic[i] = T::saturation();
                frame.apriori[i] = T::saturation();
            }
            frame.systematic[f..].copy_from_slice(&comb[..k - f]);
            let par = &comb[k - f..];
            for i in 0..k {
                frame.parity1[i] = par[2 * i];
                frame.parity2[i] = par[2 * i + 1];
            }
            frame.tail.copy_from_slice(&llrs[offset..offset + TAIL_LEN]);
            offset += TAIL_LEN;
            let out = decoder.decode(&frame, self.config.decoder.cb_iters, Some(&stop))?;
            cb_ok.push(out.stop_satisfied);
            estimates.push(out.estimate);
        }
        let decoded = base.gather(&estimates);
        let crc_ok = cb_ok.iter().all(|&x| x) && crc24_passes(&decoded, CRC24A);
        let wrong = decoded != payload;
        Ok(TbOutcome {
            tb_error: wrong || !crc_ok,
            undetected: wrong && crc_ok,
            cb_errors: estimates.iter().zip(&cbs).map(|(a, b)| a != b).collect(),
            decode_invocations: base.num_cbs,
            inter_iterations: 1,
            pass_cb_errors: Vec::new(),
        })
    }
}

fn repetition_seed(tb_index: u64, cb: usize) -> u64 {
    tb_index.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ cb as u64
}
