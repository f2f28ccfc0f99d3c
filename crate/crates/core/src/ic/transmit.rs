//! Which coded bits go on the air, and how received LLRs are routed back
//! into per-block frames.

use serde::{Deserialize, Serialize};

use super::layout::CbLayout;
use crate::turbo::{LlrFrame, TurboCodeword, TAIL_LEN};
use crate::{Bit, Error, Llr, Result};

/// One coded bit of a block's codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodedSlot {
    Systematic(usize),
    Parity1(usize),
    Parity2(usize),
    Tail(usize),
}

impl CodedSlot {
    pub fn is_tail(&self) -> bool {
        matches!(self, CodedSlot::Tail(_))
    }
}

/// A coupled systematic symbol carried by block `from_cb` and also consumed
/// by block `from_cb + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedRoute {
    pub from_cb: usize,
    pub from_position: usize,
    pub to_position: usize,
    /// Index of the symbol in the flattened transmission.
    pub symbol: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbTransmission {
    pub slots: Vec<CodedSlot>,
    pub bits: Vec<Bit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcTransmission {
    pub per_cb: Vec<CbTransmission>,
    pub shared_llr_routes: Vec<SharedRoute>,
}

impl IcTransmission {
    pub fn len(&self) -> usize {
        self.per_cb.iter().map(|c| c.bits.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Symbols counted by the rate formulas (tails excluded).
    pub fn len_without_tails(&self) -> usize {
        self.per_cb
            .iter()
            .flat_map(|c| &c.slots)
            .filter(|s| !s.is_tail())
            .count()
    }

    /// All symbols in transmission order.
    pub fn bits(&self) -> Vec<Bit> {
        self.per_cb
            .iter()
            .flat_map(|c| c.bits.iter().copied())
            .collect()
    }
}

/// Slots of block `layout` that are sent: every parity and tail bit, and
/// every systematic bit except dummies and pre bits of coupled blocks.
pub fn transmitted_slots(layout: &CbLayout) -> Vec<CodedSlot> {
    let k = layout.cb_len;
    let mut skip = vec![false; k];
    // Pre positions are either dummies or sent by the previous block.
    for &p in &layout.pre {
        skip[p] = true;
    }
    if layout.is_tail_dummy() {
        for &p in &layout.post {
            skip[p] = true;
        }
    }
    let mut slots: Vec<CodedSlot> = (0..k)
        .filter(|&i| !skip[i])
        .map(CodedSlot::Systematic)
        .collect();
    slots.extend((0..k).map(CodedSlot::Parity1));
    slots.extend((0..k).map(CodedSlot::Parity2));
    slots.extend((0..TAIL_LEN).map(CodedSlot::Tail));
    slots
}

fn slot_bit(cw: &TurboCodeword, slot: CodedSlot) -> Bit {
    match slot {
        CodedSlot::Systematic(i) => cw.systematic[i],
        CodedSlot::Parity1(i) => cw.parity1[i],
        CodedSlot::Parity2(i) => cw.parity2[i],
        CodedSlot::Tail(i) => cw.tail[i],
    }
}

pub fn select_transmitted_bits(
    codewords: &[TurboCodeword],
    layouts: &[CbLayout],
) -> Result<IcTransmission> {
    if codewords.len() != layouts.len() {
        return Err(Error::MalformedInput(format!(
            "{} codewords for {} layouts",
            codewords.len(),
            layouts.len()
        )));
    }
    let mut per_cb = Vec::with_capacity(layouts.len());
    let mut routes = Vec::new();
    let mut offset = 0;
    for (n, (cw, lay)) in codewords.iter().zip(layouts).enumerate() {
        if cw.block_len() != lay.cb_len {
            return Err(Error::MalformedInput(format!(
                "codeword {n} has the wrong block length"
            )));
        }
        let slots = transmitted_slots(lay);
        let bits = slots.iter().map(|&s| slot_bit(cw, s)).collect();
        if !lay.is_tail_dummy() {
            let next = &layouts[n + 1];
            for (j, &p) in lay.post.iter().enumerate() {
                let idx = slots
                    .iter()
                    .position(|&s| s == CodedSlot::Systematic(p))
                    .expect("post systematic bits are sent");
                routes.push(SharedRoute {
                    from_cb: n,
                    from_position: p,
                    to_position: next.pre[j],
                    symbol: offset + idx,
                });
            }
        }
        offset += slots.len();
        per_cb.push(CbTransmission { slots, bits });
    }
    Ok(IcTransmission {
        per_cb,
        shared_llr_routes: routes,
    })
}

/// Builds one frame per block from the flattened received LLRs.
///
/// Shared systematic LLRs fill both consumers' slots, dummy systematic slots
/// are saturated towards 0, and anything else not received stays 0.
pub fn route_channel_llrs<T: Llr>(
    llrs: &[T],
    transmission: &IcTransmission,
    layouts: &[CbLayout],
) -> Result<Vec<LlrFrame<T>>> {
    if llrs.len() != transmission.len() {
        return Err(Error::MalformedInput(format!(
            "{} LLRs for {} transmitted symbols",
            llrs.len(),
            transmission.len()
        )));
    }
    let mut frames = Vec::with_capacity(layouts.len());
    let mut offset = 0;
    for (tx, lay) in transmission.per_cb.iter().zip(layouts) {
        let mut f = LlrFrame::zeros(lay.cb_len);
        for (&slot, &l) in tx.slots.iter().zip(&llrs[offset..offset + tx.slots.len()]) {
            match slot {
                CodedSlot::Systematic(i) => f.systematic[i] = l,
                CodedSlot::Parity1(i) => f.parity1[i] = l,
                CodedSlot::Parity2(i) => f.parity2[i] = l,
                CodedSlot::Tail(i) => f.tail[i] = l,
            }
        }
        if lay.is_head_dummy() {
            for &p in &lay.pre {
                f.systematic[p] = T::saturation();
            }
        }
        if lay.is_tail_dummy() {
            for &p in &lay.post {
                f.systematic[p] = T::saturation();
            }
        }
        offset += tx.slots.len();
        frames.push(f);
    }
    for r in &transmission.shared_llr_routes {
        frames[r.from_cb + 1].systematic[r.to_position] = llrs[r.symbol];
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crc::CRC24B;
    use crate::ic::layout::segment_and_couple;
    use crate::ic::params::CodeParameters;
    use crate::turbo::{turbo_encode, Interleaver, Trellis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn encode_all(p: &CodeParameters, seed: u64) -> (Vec<TurboCodeword>, Vec<CbLayout>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let payload: Vec<Bit> = (0..p.payload_len())
            .map(|_| rng.random_range(0..2))
            .collect();
        let (cbs, lay) = segment_and_couple(&payload, p, CRC24B).unwrap();
        let il = Interleaver::for_block_length(p.cb_len, Some(11)).unwrap();
        let t = Trellis::lte();
        let cws = cbs
            .iter()
            .map(|cb| turbo_encode(cb, &il, &t).unwrap())
            .collect();
        (cws, lay)
    }

    #[test]
    fn counts_match_the_length_identity() {
        for (n, k, d) in [(2, 64, 8), (5, 120, 1), (4, 200, 40)] {
            let p = CodeParameters::new(n, k, d, 0).unwrap();
            let (cws, lay) = encode_all(&p, 1);
            let tx = select_transmitted_bits(&cws, &lay).unwrap();
            assert_eq!(tx.len_without_tails(), p.transmitted_len());
            assert_eq!(tx.len(), p.transmitted_len() + n * TAIL_LEN);
            assert_eq!(tx.shared_llr_routes.len(), (n - 1) * d);
        }
    }

    #[test]
    fn minimal_coupling_drops_one_systematic_bit_per_block() {
        let p = CodeParameters::new(4, 80, 1, 0).unwrap();
        let (cws, lay) = encode_all(&p, 2);
        let tx = select_transmitted_bits(&cws, &lay).unwrap();
        for c in &tx.per_cb[..3] {
            let sys = c
                .slots
                .iter()
                .filter(|s| matches!(s, CodedSlot::Systematic(_)))
                .count();
            assert_eq!(sys, 79);
        }
        let last = &tx.per_cb[3];
        assert_eq!(
            last.slots
                .iter()
                .filter(|s| matches!(s, CodedSlot::Systematic(_)))
                .count(),
            78
        );
    }

    #[test]
    fn second_block_pre_bits_travel_in_the_first() {
        let p = CodeParameters::new(2, 64, 8, 0).unwrap();
        let (cws, lay) = encode_all(&p, 3);
        let tx = select_transmitted_bits(&cws, &lay).unwrap();
        for &q in &lay[1].pre {
            assert!(!tx.per_cb[1].slots.contains(&CodedSlot::Systematic(q)));
        }
        for &q in &lay[0].post {
            assert!(tx.per_cb[0].slots.contains(&CodedSlot::Systematic(q)));
        }
    }

    #[test]
    fn routing_shares_values_and_saturates_dummies() {
        let p = CodeParameters::new(3, 100, 10, 0).unwrap();
        let (cws, lay) = encode_all(&p, 4);
        let tx = select_transmitted_bits(&cws, &lay).unwrap();
        let llrs: Vec<f64> = (0..tx.len()).map(|i| i as f64 * 0.001 - 1.0).collect();
        let frames = route_channel_llrs(&llrs, &tx, &lay).unwrap();
        for n in 0..2 {
            for j in 0..10 {
                assert_eq!(
                    frames[n].systematic[lay[n].post[j]],
                    frames[n + 1].systematic[lay[n + 1].pre[j]]
                );
            }
        }
        for &q in &lay[0].pre {
            assert_eq!(frames[0].systematic[q], 64.0);
        }
        for &q in &lay[2].post {
            assert_eq!(frames[2].systematic[q], 64.0);
        }
        assert!(route_channel_llrs(&llrs[1..], &tx, &lay).is_err());
    }
}
